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

#include "cfurllc/barrier_solver.hpp"
#include "cfurllc/cone_program.hpp"

namespace cfurllc {

struct SolveResult {
  PrecodingMatrix W_next;
  double objective = 0.0;     // min_k of the program's bound at W_next, nats/s/Hz
  SolveStatus status = SolveStatus::kInfeasible;
  double kkt_residual = 0.0;  // certified gap relative to max(1, |objective|)
  int newton_iterations = 0;
  double flops = 0.0;
};

/// Exact objective of the program (min_k r_lower or min_k f_lower) at W; -inf outside the
/// region where the bounds are defined.
double program_objective(const ConeProgram& program, const PrecodingMatrix& W);

/// Solves the program from a feasible warm start. Never returns a point worse than (or
/// less feasible than) the warm start: when the interior-point iterate does not improve the
/// exact objective, the warm start comes back unchanged.
SolveResult solve(const ConeProgram& program, const PrecodingMatrix& warm_start, double tol);

}  // namespace cfurllc
