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

#include "cfurllc/surrogates.hpp"

#include <cmath>
#include <limits>

#include "cfurllc/rate_model.hpp"

namespace cfurllc {

namespace {

// Constraint checks accept residuals down to -kSlack relative to the frozen scale.
constexpr double kSlack = 1e-12;

struct Powers {
  double signal = 0.0;        // |z_k|^2
  double interference = 0.0;  // sum_{i!=k} |z_i|^2
  double interference_lin = 0.0;  // sum_{i!=k} (2 Re{conj(zn_i) z_i} - |zn_i|^2)
};

Powers powers(const SurrogateState& s, int k, const CVector& z) {
  Powers p;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (i == k) {
      p.signal = std::norm(z(i));
    } else {
      const cd zn = s.gains(k, i);
      p.interference += std::norm(z(i));
      p.interference_lin += 2.0 * std::real(std::conj(zn) * z(i)) - std::norm(zn);
    }
  }
  return p;
}

}  // namespace

SurrogateState freeze_state(const ChannelRealization& H, const PrecodingMatrix& Wn, double sigma2,
                            double penalty) {
  SurrogateState s;
  s.sigma2 = sigma2;
  s.penalty = penalty;
  s.gains = H.H.adjoint() * Wn.W;
  const int K = H.user_count();
  s.users.resize(K);
  for (int k = 0; k < K; ++k) {
    UserSurrogate& u = s.users[k];
    double interference = 0.0;
    for (int i = 0; i < K; ++i) {
      if (i != k) interference += std::norm(s.gains(k, i));
    }
    u.signal = s.gains(k, k);
    const double sig = std::norm(u.signal);
    u.alpha = interference + sigma2;
    u.beta = u.alpha + sig;
    u.sinr = sig / u.alpha;
    if (!(u.sinr >= kSinrFloor)) throw SingularSurrogate(k, u.sinr);

    u.a_bar = std::log1p(u.sinr) + 2.0 - (sig / u.beta) * (sigma2 / u.alpha);
    u.b_bar = u.alpha / (u.beta * sig);
    u.c_bar = sig / (u.beta * u.alpha);
    const double root_v = std::sqrt(dispersion(u.sinr));
    u.d = root_v / 2.0 + 1.0 / (2.0 * root_v);
    u.e = 1.0 / (2.0 * root_v);
  }
  return s;
}

SurrogateState freeze_state(const ChannelRealization& H, const PrecodingMatrix& Wn,
                            const ScenarioConfig& config) {
  return freeze_state(H, Wn, config.noise_power(),
                      dispersion_penalty(config.t, config.B, config.epsilon));
}

double trust_region_residual(const SurrogateState& s, int k, const CVector& z) {
  const cd xn = s.users[k].signal;
  return 2.0 * std::real(std::conj(xn) * z(k)) - std::norm(xn);
}

double f_lower(const SurrogateState& s, int k, const CVector& z) {
  const UserSurrogate& u = s.users[k];
  const double denom = trust_region_residual(s, k, z);
  if (!(denom > 0.0)) throw TrustRegionViolation(k, denom);
  const Powers p = powers(s, k, z);
  return u.a_bar - std::norm(u.signal) / denom - u.b_bar * p.signal - u.c_bar * p.interference;
}

GResiduals g_constraint_residuals(const SurrogateState& s, int k, const CVector& z) {
  const UserSurrogate& u = s.users[k];
  const Powers p = powers(s, k, z);
  const double received = p.signal + p.interference + s.sigma2;
  GResiduals r;
  r.total_power = 2.0 * u.beta - received;
  r.linearization = 2.0 / u.alpha * (p.interference_lin + s.sigma2) - received / u.beta;
  return r;
}

double g_upper(const SurrogateState& s, int k, const CVector& z) {
  const UserSurrogate& u = s.users[k];
  const GResiduals r = g_constraint_residuals(s, k, z);
  if (r.total_power < -kSlack * u.beta) {
    throw ConstraintViolation(k, ConstraintViolation::Which::kTotalPower);
  }
  if (r.linearization < -kSlack) {
    throw ConstraintViolation(k, ConstraintViolation::Which::kInterferenceLinearization);
  }
  const Powers p = powers(s, k, z);
  const double received = p.signal + p.interference + s.sigma2;
  const double plus_noise = p.interference + s.sigma2;
  const double a = u.alpha;
  const double b = u.beta;
  return u.d - 4.0 * a * u.e / (b * b) * (p.interference_lin + s.sigma2) +
         2.0 * a * a * u.e / (b * b * b) * received + plus_noise * plus_noise * u.e / (b * b);
}

double r_lower(const SurrogateState& s, int k, const CVector& z) {
  const double f = f_lower(s, k, z);
  if (s.penalty == 0.0) return f;
  return f - s.penalty * g_upper(s, k, z);
}

CVector user_gains(const ChannelRealization& H, const PrecodingMatrix& W, int k) {
  return (H.H.col(k).adjoint() * W.W).transpose();
}

double trust_region_residual(const SurrogateState& s, const ChannelRealization& H,
                             const PrecodingMatrix& W, int k) {
  return trust_region_residual(s, k, user_gains(H, W, k));
}

double f_lower(const SurrogateState& s, const ChannelRealization& H, const PrecodingMatrix& W,
               int k) {
  return f_lower(s, k, user_gains(H, W, k));
}

GResiduals g_constraint_residuals(const SurrogateState& s, const ChannelRealization& H,
                                  const PrecodingMatrix& W, int k) {
  return g_constraint_residuals(s, k, user_gains(H, W, k));
}

double g_upper(const SurrogateState& s, const ChannelRealization& H, const PrecodingMatrix& W,
               int k) {
  return g_upper(s, k, user_gains(H, W, k));
}

double r_lower(const SurrogateState& s, const ChannelRealization& H, const PrecodingMatrix& W,
               int k) {
  return r_lower(s, k, user_gains(H, W, k));
}

double surrogate_objective(const SurrogateState& s, const ChannelRealization& H,
                           const PrecodingMatrix& W, bool shannon_only) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < s.user_count(); ++k) {
    const CVector z = user_gains(H, W, k);
    best = std::min(best, shannon_only ? f_lower(s, k, z) : r_lower(s, k, z));
  }
  return best;
}

}  // namespace cfurllc
