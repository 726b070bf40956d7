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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfurllc/surrogates.hpp"
#include "cfurllc/types.hpp"

namespace cfurllc {

struct LinearTerm {
  int index = 0;
  double coeff = 0.0;
};

/// constant + sum coeff * y[index]
struct AffineForm {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  double eval(const RVector& y) const;
};

/// p * q >= ||v||^2 with p, q >= 0.
struct RotatedCone {
  AffineForm p;
  AffineForm q;
  std::vector<AffineForm> v;
  std::string label;
};

/// form >= 0
struct LinearConstraint {
  AffineForm form;
  std::string label;
};

/// Aux-variable layout of one user inside the program.
struct UserBlock {
  int z_offset = 0;     // first of 2K entries: Re/Im of scaled h_k^H w_i, i = 0..K-1
  int reciprocal = -1;  // epigraph of |x_n|^2 / (2 Re{conj(x_n) x} - |x_n|^2)
  int signal = -1;      // epigraph of |x|^2
  int received = -1;    // epigraph of interference + noise
  int squared = -1;     // epigraph of (interference + noise)^2; absent when unused
  double scale = 1.0;   // beta_k^(n): user k's powers are divided by this
};

/// Epigraph cone form of one path-following step.
///
/// Decision vector x = [w ; y]. The precoder part w holds the real and imaginary parts of
/// the precoder divided by sqrt(p_max), AP-major: entry ((l*K + i)*N + n)*2 + {0,1}.
/// Each AP's block must stay inside the ball ||w_l||^2 <= power_budget.
/// The aux part y starts with the 2K^2 scaled inner products z = link * w and carries the
/// per-user epigraph variables and the objective scalar tau. Every cone and linear row
/// touches the variables of at most one user group plus tau.
struct ConeProgram {
  int ap_count = 0;
  int antennas = 0;
  int users = 0;
  double power_budget = 1.0;
  double precoder_scale = 1.0;  // physical w = precoder_scale * w
  RMatrix link;                 // 2K^2 x (ap_count * 2NK)

  int aux_size = 0;
  std::vector<int> group;  // per aux variable; -1 marks a global variable
  int objective_index = 0; // maximize y[objective_index]
  std::vector<UserBlock> user_blocks;
  std::vector<RotatedCone> cones;
  std::vector<LinearConstraint> linear;

  bool shannon_only = false;  // objective min_k f_lower instead of min_k r_lower
  SurrogateState state;
  ChannelRealization channel;

  int precoder_size() const { return ap_count * ap_block(); }
  int ap_block() const { return 2 * antennas * users; }
  /// Sum of barrier parameters: 2 per cone (power balls included), 1 per linear row.
  double barrier_degree() const;
};

/// Main step: max min_k R_k^(n)(w) under per-AP power, the trust region, and both
/// constraints of the dispersion bound.
ConeProgram build_subproblem(const SurrogateState& state, const ChannelRealization& H,
                             double p_max);
/// Initialization step: max min_k f_k^(n)(w) under per-AP power and the trust region.
ConeProgram build_init_subproblem(const SurrogateState& state, const ChannelRealization& H,
                                  double p_max);

RVector to_program_vector(const ConeProgram& program, const PrecodingMatrix& W);
PrecodingMatrix from_program_vector(const ConeProgram& program, const RVector& w);

/// Strictly feasible aux vector for the precoder part w, or nullopt when w is not strictly
/// inside the power balls or the trust region.
std::optional<RVector> lift(const ConeProgram& program, const RVector& w);

/// Plain-text dump for cross-checking against external conic solvers.
void dump_program(const ConeProgram& program, std::ostream& out);

}  // namespace cfurllc
