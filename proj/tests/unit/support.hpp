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

// Seeded generators shared by the property-style tests.

#include <cmath>
#include <random>

#include "cfurllc/scenario.hpp"
#include "cfurllc/types.hpp"

namespace cfurllc::testing {

inline cd complex_gaussian(Rng& rng, double variance = 1.0) {
  std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
  const double re = g(rng);
  return {re, g(rng)};
}

inline ChannelRealization random_channel(Rng& rng, int L, int N, int K, double variance = 1.0) {
  ChannelRealization H;
  H.antennas_per_ap = N;
  H.H.resize(L * N, K);
  for (int c = 0; c < K; ++c) {
    for (int r = 0; r < L * N; ++r) H.H(r, c) = complex_gaussian(rng, variance);
  }
  return H;
}

/// Random precoder with every AP block at power_fraction * p_max.
inline PrecodingMatrix random_precoder(Rng& rng, int L, int N, int K, double p_max,
                                       double power_fraction = 1.0) {
  PrecodingMatrix W;
  W.antennas_per_ap = N;
  W.W.resize(L * N, K);
  for (int c = 0; c < K; ++c) {
    for (int r = 0; r < L * N; ++r) W.W(r, c) = complex_gaussian(rng);
  }
  for (int l = 0; l < L; ++l) {
    W.W.middleRows(l * N, N) *= std::sqrt(power_fraction * p_max / W.ap_power(l));
  }
  return W;
}

/// W + scale * (random direction with the same per-AP power profile).
inline PrecodingMatrix perturb(Rng& rng, const PrecodingMatrix& W, double scale) {
  PrecodingMatrix out = W;
  for (Eigen::Index c = 0; c < W.W.cols(); ++c) {
    for (Eigen::Index r = 0; r < W.W.rows(); ++r) out.W(r, c) += scale * complex_gaussian(rng);
  }
  return out;
}

/// Scales every AP block down to at most p_max.
inline void clip_power(PrecodingMatrix& W, double p_max) {
  for (int l = 0; l < W.ap_count(); ++l) {
    const double p = W.ap_power(l);
    if (p > p_max) {
      W.W.middleRows(l * W.antennas_per_ap, W.antennas_per_ap) *= std::sqrt(p_max / p);
    }
  }
}

}  // namespace cfurllc::testing
