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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cfurllc {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Channel of one coherence block: (L*N) x K, column k stacks h_k1 ... h_kL.
struct ChannelRealization {
  CMatrix H;
  int antennas_per_ap = 1;

  int ap_count() const { return static_cast<int>(H.rows()) / antennas_per_ap; }
  int user_count() const { return static_cast<int>(H.cols()); }
};

/// Precoder: (L*N) x K, column i stacks w_i1 ... w_iL.
struct PrecodingMatrix {
  CMatrix W;
  int antennas_per_ap = 1;

  int ap_count() const { return static_cast<int>(W.rows()) / antennas_per_ap; }
  int user_count() const { return static_cast<int>(W.cols()); }

  /// Sum over users of ||w_kl||^2 at AP l.
  double ap_power(int l) const {
    return W.middleRows(static_cast<Eigen::Index>(l) * antennas_per_ap, antennas_per_ap)
        .squaredNorm();
  }
  double max_ap_power() const {
    double m = 0.0;
    for (int l = 0; l < ap_count(); ++l) m = std::max(m, ap_power(l));
    return m;
  }
};

// Errors -------------------------------------------------------------------

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expansion point has a user whose SINR is below the surrogate floor.
class SingularSurrogate : public std::runtime_error {
 public:
  SingularSurrogate(int user, double sinr)
      : std::runtime_error("surrogate expansion singular for user " + std::to_string(user) +
                           " (sinr " + std::to_string(sinr) + ")"),
        user(user) {}
  int user;
};

/// Candidate precoder lies outside the region where the lower bound on ln(1+sinr) holds.
class TrustRegionViolation : public std::runtime_error {
 public:
  TrustRegionViolation(int user, double residual)
      : std::runtime_error("trust region violated for user " + std::to_string(user) +
                           " (residual " + std::to_string(residual) + ")"),
        user(user) {}
  int user;
};

/// Candidate precoder violates one of the constraints attached to the dispersion bound.
class ConstraintViolation : public std::runtime_error {
 public:
  enum class Which { kTotalPower, kInterferenceLinearization };
  ConstraintViolation(int user, Which which)
      : std::runtime_error(std::string("dispersion-bound constraint ") +
                           (which == Which::kTotalPower ? "(received power <= 2 beta)"
                                                        : "(interference linearization)") +
                           " violated for user " + std::to_string(user)),
        user(user),
        which(which) {}
  int user;
  Which which;
};

class InitializationFailed : public std::runtime_error {
 public:
  InitializationFailed(int user, const std::string& why)
      : std::runtime_error("initialization failed for user " + std::to_string(user) + ": " + why),
        user(user) {}
  int user;
};

}  // namespace cfurllc
