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

#include "cfurllc/mmse.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cfurllc {

PrecodingMatrix mmse_precoding(const ChannelRealization& H, double p, double sigma2,
                               double p_max) {
  if (!(p > 0.0)) throw std::invalid_argument("per-user power must be positive");
  const auto K = H.H.cols();
  // Push-through identity: the LN x LN inverse equals H (p H^H H + sigma2 I_K)^{-1} applied
  // to the K user columns.
  CMatrix gram = p * (H.H.adjoint() * H.H);
  gram.diagonal().array() += sigma2;
  const Eigen::LLT<CMatrix> llt(gram);
  assert(llt.info() == Eigen::Success);
  const CMatrix V = p * H.H * llt.solve(CMatrix::Identity(K, K));

  PrecodingMatrix W;
  W.antennas_per_ap = H.antennas_per_ap;
  W.W = CMatrix::Zero(V.rows(), K);
  const int N = H.antennas_per_ap;
  const double amplitude = std::sqrt(p_max / static_cast<double>(K));
  for (int l = 0; l < H.ap_count(); ++l) {
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto block = V.block(static_cast<Eigen::Index>(l) * N, k, N, 1);
      const double norm = block.norm();
      if (norm > 0.0) W.W.block(static_cast<Eigen::Index>(l) * N, k, N, 1) = block * (amplitude / norm);
    }
  }
  return W;
}

FlopReport flop_report(const ScenarioConfig& config, int aps) {
  const double N = config.N;
  const double L = config.L;
  const double K = config.K;
  FlopReport r;
  r.aps = aps;
  r.mmse_multiplications = (N * N * L * L * K + N * L * K) / 2.0 +
                           (N * N * N * L * L * L - N * L) / 3.0 + N * N * L * L;
  const double dim = aps * N * K;
  r.pfa_order_per_iteration = dim * dim * dim * (2.0 * K + 1.0);
  return r;
}

}  // namespace cfurllc
