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

#include "cfurllc/config.hpp"
#include "cfurllc/types.hpp"

namespace cfurllc {

/// Duality-based MMSE precoder. The uplink MMSE combiner
///   v_k = p (sum_i p h_i h_i^H + sigma2 I)^{-1} h_k
/// gives the direction; each per-AP block is then normalized to sqrt(p_max / K), so every
/// AP spends exactly p_max split evenly over the users.
PrecodingMatrix mmse_precoding(const ChannelRealization& H, double p, double sigma2,
                               double p_max);

struct FlopReport {
  int aps = 0;                           // APs optimized jointly
  double mmse_multiplications = 0.0;     // closed-form complex multiplications per MMSE design
  double pfa_order_per_iteration = 0.0;  // (aps N K)^3 (2K + 1)
  double measured_iterations = 0.0;      // mean path-following iterations per run
  double measured_flops_per_iteration = 0.0;
};

/// Closed-form counts at the configured N, K with `aps` APs per jointly optimized unit
/// (L for the centralized design, the cluster size otherwise). Measured fields stay zero
/// until a run fills them in.
FlopReport flop_report(const ScenarioConfig& config, int aps);

}  // namespace cfurllc
