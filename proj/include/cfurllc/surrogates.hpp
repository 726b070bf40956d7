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

#include "cfurllc/config.hpp"
#include "cfurllc/types.hpp"

namespace cfurllc {

/// Expansion points must give every user at least this SINR.
inline constexpr double kSinrFloor = 1e-6;

/// Iteration-n bound coefficients for one user, frozen at the expansion point w^(n).
///
/// With x = h_k^H w_k, interference I = sum_{i!=k} |h_k^H w_i|^2 and the frozen values
/// alpha = I(w^(n)) + sigma2, beta = alpha + |x(w^(n))|^2:
///
///   f_lower = a_bar - |x_n|^2 / (2 Re{conj(x_n) x} - |x_n|^2) - b_bar |x|^2 - c_bar I
///   g_upper = d - 4 alpha e / beta^2 * I_lin + 2 alpha^2 e / beta^3 * (|x|^2 + I + sigma2)
///               + e (I + sigma2)^2 / beta^2
///
/// where I_lin = sum_{i!=k} (2 Re{conj(z_n,i) z_i} - |z_n,i|^2) + sigma2 is the tangent
/// minorant of I + sigma2. f_lower is concave and g_upper convex; both touch the true
/// ln(1+sinr) and sqrt(V) at w^(n).
struct UserSurrogate {
  double alpha = 0.0;  // Watts
  double beta = 0.0;   // Watts
  cd signal;           // h_k^H w_k^(n)
  double sinr = 0.0;
  double a_bar = 0.0;
  double b_bar = 0.0;  // 1/Watts
  double c_bar = 0.0;  // 1/Watts
  double d = 0.0;
  double e = 0.0;
};

struct SurrogateState {
  std::vector<UserSurrogate> users;
  CMatrix gains;          // K x K, gains(k, i) = h_k^H w_i^(n)
  double sigma2 = 0.0;
  double penalty = 0.0;   // Q^{-1}(eps) / sqrt(tB)

  int user_count() const { return static_cast<int>(users.size()); }
};

/// Throws SingularSurrogate when some user's SINR at w_n is below kSinrFloor.
SurrogateState freeze_state(const ChannelRealization& H, const PrecodingMatrix& Wn, double sigma2,
                            double penalty);
SurrogateState freeze_state(const ChannelRealization& H, const PrecodingMatrix& Wn,
                            const ScenarioConfig& config);

// The functions below take the row of inner products z_i = h_k^H w_i (length K) of the
// candidate precoder; the (H, W) overloads compute it.

double trust_region_residual(const SurrogateState& s, int k, const CVector& z);
double f_lower(const SurrogateState& s, int k, const CVector& z);

struct GResiduals {
  double total_power = 0.0;     // 2 beta - (sum_i |z_i|^2 + sigma2), Watts
  double linearization = 0.0;   // (2/alpha) I_lin - (sum_i |z_i|^2 + sigma2)/beta
};
GResiduals g_constraint_residuals(const SurrogateState& s, int k, const CVector& z);
double g_upper(const SurrogateState& s, int k, const CVector& z);
double r_lower(const SurrogateState& s, int k, const CVector& z);

CVector user_gains(const ChannelRealization& H, const PrecodingMatrix& W, int k);

double trust_region_residual(const SurrogateState& s, const ChannelRealization& H,
                             const PrecodingMatrix& W, int k);
double f_lower(const SurrogateState& s, const ChannelRealization& H, const PrecodingMatrix& W,
               int k);
GResiduals g_constraint_residuals(const SurrogateState& s, const ChannelRealization& H,
                                  const PrecodingMatrix& W, int k);
double g_upper(const SurrogateState& s, const ChannelRealization& H, const PrecodingMatrix& W,
               int k);
double r_lower(const SurrogateState& s, const ChannelRealization& H, const PrecodingMatrix& W,
               int k);

/// min_k r_lower, or min_k f_lower when shannon_only. Throws on any bound-domain violation.
double surrogate_objective(const SurrogateState& s, const ChannelRealization& H,
                           const PrecodingMatrix& W, bool shannon_only);

}  // namespace cfurllc
