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

#include "cfurllc/decentralized.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>

namespace cfurllc {

ClusterPartition partition_aps(const NetworkGeometry& geometry, int M) {
  const int L = static_cast<int>(geometry.ap_positions.size());
  if (M < 1 || L % M != 0) {
    throw ConfigError("cluster size " + std::to_string(M) + " does not divide " +
                      std::to_string(L) + " APs");
  }
  std::vector<int> assignment(L);
  for (int l = 0; l < L; ++l) assignment[l] = l / M;
  return partition_from_map(assignment);
}

ClusterPartition partition_from_map(const std::vector<int>& assignment) {
  if (assignment.empty()) throw ConfigError("empty cluster map");
  const int C = *std::max_element(assignment.begin(), assignment.end()) + 1;
  ClusterPartition p;
  p.assignment = assignment;
  p.members.resize(C);
  for (int l = 0; l < static_cast<int>(assignment.size()); ++l) {
    if (assignment[l] < 0) throw ConfigError("negative cluster id");
    p.members[assignment[l]].push_back(l);
  }
  for (const auto& m : p.members) {
    if (m.size() != p.members.front().size() || m.empty()) {
      throw ConfigError("clusters must be non-empty and of equal size");
    }
  }
  return p;
}

ClusterPartition partition_for(const NetworkGeometry& geometry, const ScenarioConfig& config) {
  if (!config.cluster_map.empty()) return partition_from_map(config.cluster_map);
  return partition_aps(geometry, config.M);
}

ChannelRealization cluster_channel(const ChannelRealization& H, const std::vector<int>& aps) {
  const int N = H.antennas_per_ap;
  ChannelRealization out;
  out.antennas_per_ap = N;
  out.H.resize(static_cast<Eigen::Index>(aps.size()) * N, H.user_count());
  for (std::size_t j = 0; j < aps.size(); ++j) {
    out.H.middleRows(static_cast<Eigen::Index>(j) * N, N) = H.H.middleRows(aps[j] * N, N);
  }
  return out;
}

double virtual_sinr(const ChannelRealization& H_cluster, const PrecodingMatrix& W_cluster, int k,
                    double sigma2) {
  return sinr(H_cluster, W_cluster, k, sigma2);
}

PfaResult run_cluster(const ChannelRealization& H_cluster, const ScenarioConfig& config, Rng& rng,
                      bool shannon_only) {
  // The cluster's channel carries only its own rows, so every rate the loop sees is the
  // virtual one.
  return run(H_cluster, config, rng, shannon_only);
}

PrecodingMatrix assemble(const ClusterPartition& partition,
                         const std::vector<PrecodingMatrix>& cluster_precoders) {
  if (static_cast<int>(cluster_precoders.size()) != partition.cluster_count()) {
    throw std::invalid_argument("one precoder per cluster expected");
  }
  const int N = cluster_precoders.front().antennas_per_ap;
  const auto K = cluster_precoders.front().W.cols();
  PrecodingMatrix W;
  W.antennas_per_ap = N;
  W.W = CMatrix::Zero(static_cast<Eigen::Index>(partition.ap_count()) * N, K);
  for (int c = 0; c < partition.cluster_count(); ++c) {
    const auto& block = cluster_precoders[c];
    const auto& aps = partition.members[c];
    if (block.antennas_per_ap != N || block.W.cols() != K ||
        block.W.rows() != static_cast<Eigen::Index>(aps.size()) * N) {
      throw std::invalid_argument("cluster precoder " + std::to_string(c) +
                                  " has the wrong shape");
    }
    for (std::size_t j = 0; j < aps.size(); ++j) {
      W.W.middleRows(aps[j] * N, N) = block.W.middleRows(static_cast<Eigen::Index>(j) * N, N);
    }
  }
  return W;
}

DecentralizedResult run_decentralized(const ChannelRealization& H,
                                      const ClusterPartition& partition,
                                      const ScenarioConfig& config, std::uint64_t seed,
                                      bool shannon_only, int workers) {
  if (partition.ap_count() != H.ap_count()) {
    throw std::invalid_argument("partition does not cover the channel's APs");
  }
  const int C = partition.cluster_count();
  std::vector<PfaResult> results(C);
  std::vector<std::exception_ptr> errors(C);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c = next++; c < C; c = next++) {
      try {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        results[c] = run_cluster(cluster_channel(H, partition.members[c]), config, rng,
                                 shannon_only);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(workers, 1, C);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  DecentralizedResult out;
  std::vector<PrecodingMatrix> blocks;
  const double sigma2 = config.noise_power();
  for (int c = 0; c < C; ++c) {
    blocks.push_back(results[c].W);
    out.virtual_rates.push_back(evaluate_rates(cluster_channel(H, partition.members[c]),
                                               results[c].W, sigma2, config.t, config.B,
                                               config.epsilon));
    out.traces.push_back(std::move(results[c].trace));
  }
  out.W = assemble(partition, blocks);
  out.rates = evaluate_rates(H, out.W, sigma2, config.t, config.B, config.epsilon);
  return out;
}

}  // namespace cfurllc
