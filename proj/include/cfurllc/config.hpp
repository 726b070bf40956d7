// cfurllc: downlink precoding for cell-free massive MIMO under short-packet rates
// Copyright (C) 2026 The cfurllc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cfurllc {

enum class CorrelationModel { kUncorrelated, kLocalScattering };

/// Every physical and algorithmic knob of a simulation, in SI units.
/// Defaults reproduce the reference deployment: 16 APs on a 4x4 grid over 96 m x 48 m,
/// t = 0.05 ms, B = 1 MHz, epsilon = 1e-5.
struct ScenarioConfig {
  int L = 16;  // APs
  int N = 4;   // antennas per AP
  int K = 6;   // users
  int M = 16;  // APs per cluster (M == L is the centralized case)

  double area_width = 96.0;
  double area_height = 48.0;
  double ap_spacing_x = 24.0;
  double ap_spacing_y = 12.0;

  double t = 0.05e-3;     // seconds
  double B = 1e6;         // Hz
  double epsilon = 1e-5;  // decoding error probability

  std::optional<double> sigma2;  // Watts; derived from B and the noise figure when unset
  double noise_figure_db = 9.0;
  double p_max = 1.0;                           // Watts per AP
  std::optional<double> mmse_power_per_user;    // Watts; p_max / K when unset

  // Propagation
  double pathloss_intercept_db = -30.5;
  double pathloss_exponent = 3.67;
  double min_distance = 1.0;  // meters
  double shadowing_std_db = 0.0;
  CorrelationModel correlation = CorrelationModel::kUncorrelated;
  double angular_spread_deg = 10.0;
  double antenna_spacing_wavelengths = 0.5;

  // Explicit AP -> cluster assignment; grid blocks of M APs when empty.
  std::vector<int> cluster_map;

  int pilot_length = 3;  // recorded only; CSI is assumed perfect

  std::uint64_t seed = 1;
  int trials = 200;
  double pfa_tol = 1e-4;
  double solver_tol = 1e-6;
  int pfa_max_iter = 50;
  int init_max_iter = 20;

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;

  double noise_power() const;
  double mmse_power() const;
};

nlohmann::json to_json(const ScenarioConfig& config);
/// Starts from defaults and overrides every key present; unknown keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
/// FNV-1a over the canonical JSON dump.
std::string config_hash(const ScenarioConfig& config);

}  // namespace cfurllc
