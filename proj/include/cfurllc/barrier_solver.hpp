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

#include "cfurllc/cone_program.hpp"

namespace cfurllc {

enum class SolveStatus { kOptimal, kMaxIter, kInfeasible };

const char* to_string(SolveStatus status);

struct BarrierOptions {
  double tol = 1e-6;          // target gap, relative to max(1, |objective|)
  double t0 = 0.0;             // <= 0: barrier_degree / (0.1 max(1, |objective at start|))
  double mu = 10.0;
  double centering_tol = 1e-9;  // lambda^2 / 2
  int max_newton = 600;
};

struct BarrierResult {
  RVector w;
  RVector y;
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;        // y[objective_index]
  double gap = 0.0;              // barrier degree / t at the last central point
  double newton_decrement = 0.0; // lambda^2 / 2 at exit
  int newton_iterations = 0;
  int outer_iterations = 0;
  double flops = 0.0;            // floating-point operations counted in the Newton solves
};

/// Log-barrier path-following method with equality-constrained Newton steps.
///
/// The start (w0, y0) must be strictly feasible and satisfy y0[0:2K^2] = link * w0. Each
/// Newton system is reduced to the 2K^2 multipliers of the link equality: the power-ball
/// Hessians are inverted in closed form (scaled identity plus rank one) and the aux Hessian
/// is block-diagonal per user group bordered by the global variables.
BarrierResult solve_barrier(const ConeProgram& program, const RVector& w0, const RVector& y0,
                            const BarrierOptions& options = {});

}  // namespace cfurllc
