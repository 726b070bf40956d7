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

#include "cfurllc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "cfurllc/types.hpp"

namespace cfurllc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

const char* correlation_name(CorrelationModel m) {
  return m == CorrelationModel::kUncorrelated ? "uncorrelated" : "local_scattering";
}

}  // namespace

void ScenarioConfig::validate() const {
  require(L >= 1, "L >= 1");
  require(N >= 1, "N >= 1");
  require(K >= 1, "K >= 1");
  require(M >= 1 && L % M == 0, "M must divide L");
  require(area_width > 0 && area_height > 0, "area dimensions > 0");
  require(ap_spacing_x > 0 && ap_spacing_y > 0, "AP spacing > 0");
  require(t > 0, "t > 0");
  require(B > 0, "B > 0");
  require(t * B >= 1.0, "t*B >= 1");
  require(epsilon > 0 && epsilon < 1, "0 < epsilon < 1");
  require(!sigma2 || *sigma2 > 0, "sigma2 > 0");
  require(p_max > 0, "p_max > 0");
  require(!mmse_power_per_user || *mmse_power_per_user > 0, "mmse_power_per_user > 0");
  require(min_distance > 0, "min_distance > 0");
  require(shadowing_std_db >= 0, "shadowing_std_db >= 0");
  require(trials >= 0, "trials >= 0");
  require(pfa_tol > 0 && solver_tol > 0, "tolerances > 0");
  require(pfa_max_iter >= 1 && init_max_iter >= 1, "iteration caps >= 1");
  if (!cluster_map.empty()) {
    require(static_cast<int>(cluster_map.size()) == L, "cluster_map has one entry per AP");
    std::set<int> ids(cluster_map.begin(), cluster_map.end());
    require(*ids.begin() == 0 && *ids.rbegin() == static_cast<int>(ids.size()) - 1,
            "cluster ids are 0..C-1");
    for (int id : ids) {
      int count = 0;
      for (int c : cluster_map) count += (c == id);
      require(count == M, "every cluster in cluster_map has exactly M APs");
    }
  }
}

double ScenarioConfig::noise_power() const {
  if (sigma2) return *sigma2;
  // -174 dBm/Hz thermal density plus the receiver noise figure.
  const double dbm = -174.0 + 10.0 * std::log10(B) + noise_figure_db;
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double ScenarioConfig::mmse_power() const {
  return mmse_power_per_user ? *mmse_power_per_user : p_max / K;
}

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["L"] = c.L;
  j["N"] = c.N;
  j["K"] = c.K;
  j["M"] = c.M;
  j["area_width"] = c.area_width;
  j["area_height"] = c.area_height;
  j["ap_spacing_x"] = c.ap_spacing_x;
  j["ap_spacing_y"] = c.ap_spacing_y;
  j["t"] = c.t;
  j["B"] = c.B;
  j["epsilon"] = c.epsilon;
  j["sigma2"] = c.sigma2 ? nlohmann::json(*c.sigma2) : nlohmann::json(nullptr);
  j["noise_figure_db"] = c.noise_figure_db;
  j["p_max"] = c.p_max;
  j["mmse_power_per_user"] =
      c.mmse_power_per_user ? nlohmann::json(*c.mmse_power_per_user) : nlohmann::json(nullptr);
  j["pathloss_intercept_db"] = c.pathloss_intercept_db;
  j["pathloss_exponent"] = c.pathloss_exponent;
  j["min_distance"] = c.min_distance;
  j["shadowing_std_db"] = c.shadowing_std_db;
  j["correlation"] = correlation_name(c.correlation);
  j["angular_spread_deg"] = c.angular_spread_deg;
  j["antenna_spacing_wavelengths"] = c.antenna_spacing_wavelengths;
  j["cluster_map"] = c.cluster_map;
  j["pilot_length"] = c.pilot_length;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["pfa_tol"] = c.pfa_tol;
  j["solver_tol"] = c.solver_tol;
  j["pfa_max_iter"] = c.pfa_max_iter;
  j["init_max_iter"] = c.init_max_iter;
  return j;
}

ScenarioConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  ScenarioConfig c;
  const auto known = to_json(c);
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key: " + key);
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    auto get_opt = [&](const char* key, std::optional<double>& field) {
      if (!j.contains(key)) return;
      if (j.at(key).is_null()) {
        field.reset();
      } else {
        field = j.at(key).get<double>();
      }
    };
    get("L", c.L);
    get("N", c.N);
    get("K", c.K);
    get("M", c.M);
    get("area_width", c.area_width);
    get("area_height", c.area_height);
    get("ap_spacing_x", c.ap_spacing_x);
    get("ap_spacing_y", c.ap_spacing_y);
    get("t", c.t);
    get("B", c.B);
    get("epsilon", c.epsilon);
    get_opt("sigma2", c.sigma2);
    get("noise_figure_db", c.noise_figure_db);
    get("p_max", c.p_max);
    get_opt("mmse_power_per_user", c.mmse_power_per_user);
    get("pathloss_intercept_db", c.pathloss_intercept_db);
    get("pathloss_exponent", c.pathloss_exponent);
    get("min_distance", c.min_distance);
    get("shadowing_std_db", c.shadowing_std_db);
    if (j.contains("correlation")) {
      const auto name = j.at("correlation").get<std::string>();
      if (name == "uncorrelated") {
        c.correlation = CorrelationModel::kUncorrelated;
      } else if (name == "local_scattering") {
        c.correlation = CorrelationModel::kLocalScattering;
      } else {
        throw ConfigError("unknown correlation model: " + name);
      }
    }
    get("angular_spread_deg", c.angular_spread_deg);
    get("antenna_spacing_wavelengths", c.antenna_spacing_wavelengths);
    get("cluster_map", c.cluster_map);
    get("pilot_length", c.pilot_length);
    get("seed", c.seed);
    get("trials", c.trials);
    get("pfa_tol", c.pfa_tol);
    get("solver_tol", c.solver_tol);
    get("pfa_max_iter", c.pfa_max_iter);
    get("init_max_iter", c.init_max_iter);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config value: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cfurllc
