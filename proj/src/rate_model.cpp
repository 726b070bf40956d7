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

#include "cfurllc/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace cfurllc {

double sinr(const ChannelRealization& H, const PrecodingMatrix& W, int k, double sigma2) {
  const CVector gains = H.H.col(k).adjoint() * W.W;  // h_k^H w_i for all i
  double interference = 0.0;
  for (Eigen::Index i = 0; i < gains.size(); ++i) {
    if (i != k) interference += std::norm(gains(i));
  }
  return std::norm(gains(k)) / (interference + sigma2);
}

double shannon_rate(double phi) { return std::log1p(phi); }

double dispersion(double phi) {
  const double r = 1.0 / (1.0 + phi);
  return 1.0 - r * r;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inverse(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::domain_error("q_inverse: epsilon must lie in (0, 1)");
  }
  if (epsilon == 0.5) return 0.0;
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * epsilon);
}

double dispersion_penalty(double t, double B, double epsilon) {
  return q_inverse(epsilon) / std::sqrt(t * B);
}

double urllc_rate(double phi, double t, double B, double epsilon) {
  return shannon_rate(phi) - std::sqrt(dispersion(phi)) * dispersion_penalty(t, B, epsilon);
}

double nats_to_bits(double rate) { return rate / std::numbers::ln2; }

double RateVector::min_shannon() const { return *std::min_element(shannon.begin(), shannon.end()); }
double RateVector::min_urllc() const { return *std::min_element(urllc.begin(), urllc.end()); }

std::vector<double> RateVector::shannon_bits() const {
  std::vector<double> out;
  out.reserve(shannon.size());
  for (double r : shannon) out.push_back(nats_to_bits(r));
  return out;
}

std::vector<double> RateVector::urllc_bits() const {
  std::vector<double> out;
  out.reserve(urllc.size());
  for (double r : urllc) out.push_back(std::max(0.0, nats_to_bits(r)));
  return out;
}

RateVector evaluate_rates(const ChannelRealization& H, const PrecodingMatrix& W, double sigma2,
                          double t, double B, double epsilon) {
  const double a = dispersion_penalty(t, B, epsilon);
  RateVector r;
  for (int k = 0; k < H.user_count(); ++k) {
    const double phi = sinr(H, W, k, sigma2);
    r.sinr.push_back(phi);
    r.shannon.push_back(shannon_rate(phi));
    r.dispersion.push_back(dispersion(phi));
    r.urllc.push_back(shannon_rate(phi) - std::sqrt(dispersion(phi)) * a);
  }
  return r;
}

}  // namespace cfurllc
