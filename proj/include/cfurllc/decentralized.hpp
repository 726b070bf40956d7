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
#include <vector>

#include "cfurllc/config.hpp"
#include "cfurllc/pfa.hpp"
#include "cfurllc/rate_model.hpp"
#include "cfurllc/scenario.hpp"
#include "cfurllc/types.hpp"

namespace cfurllc {

/// Non-overlapping AP clusters of equal size.
struct ClusterPartition {
  std::vector<int> assignment;            // AP index -> cluster index
  std::vector<std::vector<int>> members;  // cluster -> ascending AP indices

  int cluster_count() const { return static_cast<int>(members.size()); }
  int ap_count() const { return static_cast<int>(assignment.size()); }
};

/// Contiguous runs of M APs in the column-major grid order, so clusters fill whole grid
/// columns first. Throws ConfigError unless M divides the AP count.
ClusterPartition partition_aps(const NetworkGeometry& geometry, int M);

/// Explicit assignment; every cluster id in [0, C) must own the same number of APs.
ClusterPartition partition_from_map(const std::vector<int>& assignment);

/// config.cluster_map when given, grid blocks of config.M otherwise.
ClusterPartition partition_for(const NetworkGeometry& geometry, const ScenarioConfig& config);

/// Rows of H belonging to the given APs, in the given order.
ChannelRealization cluster_channel(const ChannelRealization& H, const std::vector<int>& aps);

/// SINR seen by user k when only the cluster transmits. Out-of-cluster channels are
/// zero-mean and independent of the cluster's precoder, so their cross terms vanish.
double virtual_sinr(const ChannelRealization& H_cluster, const PrecodingMatrix& W_cluster, int k,
                    double sigma2);

/// Path-following run over the cluster's APs only, on the virtual SINR.
PfaResult run_cluster(const ChannelRealization& H_cluster, const ScenarioConfig& config, Rng& rng,
                      bool shannon_only = false);

/// Places every cluster block at its APs' rows of the global precoder.
PrecodingMatrix assemble(const ClusterPartition& partition,
                         const std::vector<PrecodingMatrix>& cluster_precoders);

struct DecentralizedResult {
  PrecodingMatrix W;
  RateVector rates;                       // true global rates of the assembled precoder
  std::vector<RateVector> virtual_rates;  // per cluster, on its own virtual SINR
  std::vector<PfaTrace> traces;
};

/// Runs every cluster with its own generator Rng(derive_seed(seed, c)), assembles and
/// evaluates the global rates. With one cluster this is exactly the centralized run driven
/// by Rng(derive_seed(seed, 0)). Clusters run on up to `workers` threads.
DecentralizedResult run_decentralized(const ChannelRealization& H,
                                      const ClusterPartition& partition,
                                      const ScenarioConfig& config, std::uint64_t seed,
                                      bool shannon_only = false, int workers = 1);

}  // namespace cfurllc
