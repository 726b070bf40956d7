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

#include <vector>

#include "cfurllc/types.hpp"

namespace cfurllc {

// Rates are in nats/s/Hz internally. The finite-blocklength rate follows the normal
// approximation  ln(1+phi) - sqrt(V(phi)/(tB)) * Qinv(eps),  V(phi) = 1 - (1+phi)^-2.
// It can be negative for small phi; only reports clamp at zero.

double sinr(const ChannelRealization& H, const PrecodingMatrix& W, int k, double sigma2);
double shannon_rate(double phi);
double dispersion(double phi);
/// Gaussian tail Q(x) = P(Z > x).
double q_function(double x);
/// Throws std::domain_error outside (0, 1).
double q_inverse(double epsilon);
/// Q^{-1}(eps) / sqrt(tB), the weight of the dispersion penalty.
double dispersion_penalty(double t, double B, double epsilon);
double urllc_rate(double phi, double t, double B, double epsilon);
double nats_to_bits(double rate);

struct RateVector {
  std::vector<double> sinr;
  std::vector<double> shannon;     // nats/s/Hz
  std::vector<double> dispersion;
  std::vector<double> urllc;       // nats/s/Hz, signed

  double min_shannon() const;
  double min_urllc() const;
  std::vector<double> shannon_bits() const;
  /// Clamped at zero.
  std::vector<double> urllc_bits() const;
};

RateVector evaluate_rates(const ChannelRealization& H, const PrecodingMatrix& W, double sigma2,
                          double t, double B, double epsilon);

}  // namespace cfurllc
