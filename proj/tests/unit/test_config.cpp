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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "cfurllc/config.hpp"
#include "cfurllc/types.hpp"

using namespace cfurllc;
using nlohmann::json;

TEST_CASE("defaults are the reference deployment and validate") {
  const ScenarioConfig c;
  CHECK(c.L == 16);
  CHECK(c.N == 4);
  CHECK(c.K == 6);
  CHECK(c.t == 0.05e-3);
  CHECK(c.B == 1e6);
  CHECK(c.epsilon == 1e-5);
  CHECK_NOTHROW(c.validate());
  // -174 dBm/Hz + 60 dB + 9 dB = -105 dBm
  CHECK(c.noise_power() == doctest::Approx(3.162277660168379332e-14).epsilon(1e-12));
  CHECK(c.mmse_power() == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("explicit noise and MMSE power override the derived values") {
  ScenarioConfig c;
  c.sigma2 = 2.0;
  c.mmse_power_per_user = 0.25;
  CHECK(c.noise_power() == 2.0);
  CHECK(c.mmse_power() == 0.25);
}

TEST_CASE("validate rejects broken invariants") {
  auto fails = [](auto mutate) {
    ScenarioConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  fails([](ScenarioConfig& c) { c.K = 0; });
  fails([](ScenarioConfig& c) { c.L = 0; });
  fails([](ScenarioConfig& c) { c.M = 3; });
  fails([](ScenarioConfig& c) { c.t = 0.0; });
  fails([](ScenarioConfig& c) { c.t = 1e-7; });  // tB < 1
  fails([](ScenarioConfig& c) { c.epsilon = 0.0; });
  fails([](ScenarioConfig& c) { c.epsilon = 1.0; });
  fails([](ScenarioConfig& c) { c.p_max = -1.0; });
  fails([](ScenarioConfig& c) { c.sigma2 = 0.0; });
  fails([](ScenarioConfig& c) { c.pfa_tol = 0.0; });
  fails([](ScenarioConfig& c) { c.pfa_max_iter = 0; });
  fails([](ScenarioConfig& c) { c.cluster_map = {0, 1}; });
  fails([](ScenarioConfig& c) {
    c.M = 8;
    c.cluster_map.assign(16, 0);
    c.cluster_map[0] = 2;  // ids not contiguous
  });
}

TEST_CASE("json round trip keeps every field") {
  ScenarioConfig c;
  c.K = 4;
  c.N = 2;
  c.M = 8;
  c.sigma2 = 1e-13;
  c.correlation = CorrelationModel::kLocalScattering;
  c.seed = 0xFFFFFFFFFFFFull;
  c.cluster_map = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  const ScenarioConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(ScenarioConfig{}) != config_hash(c));
}

TEST_CASE("partial json overrides defaults only where given") {
  const ScenarioConfig c = config_from_json(json{{"K", 3}, {"sigma2", nullptr}});
  CHECK(c.K == 3);
  CHECK(c.N == 4);
  CHECK_FALSE(c.sigma2.has_value());
}

TEST_CASE("json errors surface as ConfigError") {
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"unknown_key", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"K", "six"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"correlation", "rician"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"K", -2}}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/cfurllc.json"), ConfigError);

  const std::string path = "cfurllc_test_bad_config.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_config(path), ConfigError);
  {
    std::ofstream out(path);
    out << R"({"K": 2, "epsilon": 0.001})";
  }
  const ScenarioConfig c = load_config(path);
  CHECK(c.K == 2);
  CHECK(c.epsilon == 0.001);
  std::remove(path.c_str());
}
