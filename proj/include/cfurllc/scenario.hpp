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
#include <random>
#include <vector>

#include "cfurllc/config.hpp"
#include "cfurllc/types.hpp"

namespace cfurllc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer over (seed, stream); used to give every trial, cluster and
/// sub-stream its own generator so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct NetworkGeometry {
  std::vector<Point> ap_positions;    // column-major over the AP grid
  std::vector<Point> user_positions;
  double width = 0.0;
  double height = 0.0;
  int grid_columns = 0;
  int grid_rows = 0;
};

struct LargeScaleFading {
  RMatrix beta;                  // L x K, linear gain
  std::vector<CMatrix> R;        // L*K entries (index l*K + k); empty => R_kl = beta_kl * I
  int antennas_per_ap = 1;

  bool correlated() const { return !R.empty(); }
  CMatrix correlation(int l, int k) const;
};

/// APs at the centers of a grid of ap_spacing_x by ap_spacing_y cells, users uniform.
NetworkGeometry build_geometry(const ScenarioConfig& config, Rng& rng);

/// Distance on the torus obtained by wrapping the area at its edges.
double wrap_distance(const Point& p, const Point& q, const NetworkGeometry& geometry);

/// Log-distance path loss in dB at distance d (floored at min_distance).
double pathloss_db(double d, const ScenarioConfig& config);

/// Shadowing (when enabled) draws from rng; otherwise rng is untouched.
LargeScaleFading large_scale_fading(const NetworkGeometry& geometry, const ScenarioConfig& config,
                                    Rng& rng);

/// h_kl = R_kl^{1/2} z with z ~ CN(0, I_N).
ChannelRealization sample_channel(const LargeScaleFading& fading, Rng& rng);

}  // namespace cfurllc
