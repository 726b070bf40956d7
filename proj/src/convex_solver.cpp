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

#include "cfurllc/convex_solver.hpp"

#include <cmath>
#include <limits>

namespace cfurllc {

namespace {

// Interior margin applied to a warm start sitting on a power ball.
constexpr double kPowerMargin = 1e-4;

}  // namespace

double program_objective(const ConeProgram& program, const PrecodingMatrix& W) {
  try {
    if (!program.shannon_only) {
      // r_lower skips the dispersion-bound checks when the penalty is zero.
      for (int k = 0; k < program.users; ++k) {
        const GResiduals r = g_constraint_residuals(program.state, program.channel, W, k);
        if (r.total_power < 0.0 || r.linearization < 0.0) {
          return -std::numeric_limits<double>::infinity();
        }
      }
    }
    return surrogate_objective(program.state, program.channel, W, program.shannon_only);
  } catch (const std::runtime_error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

SolveResult solve(const ConeProgram& program, const PrecodingMatrix& warm_start, double tol) {
  SolveResult out;
  out.W_next = warm_start;
  const double warm_objective = program_objective(program, warm_start);
  out.objective = warm_objective;

  RVector w0 = to_program_vector(program, warm_start);
  double peak = 0.0;
  for (int l = 0; l < program.ap_count; ++l) {
    peak = std::max(peak, w0.segment(l * program.ap_block(), program.ap_block()).squaredNorm());
  }
  const double limit = program.power_budget * (1.0 - kPowerMargin);
  if (peak > limit) w0 *= std::sqrt(limit / peak);

  const auto y0 = lift(program, w0);
  if (!y0) {
    out.status = SolveStatus::kInfeasible;
    return out;
  }

  BarrierOptions options;
  options.tol = tol;
  const BarrierResult r = solve_barrier(program, w0, *y0, options);
  out.newton_iterations = r.newton_iterations;
  out.flops = r.flops;
  out.status = r.status;

  const PrecodingMatrix candidate = from_program_vector(program, r.w);
  const double value = program_objective(program, candidate);
  out.kkt_residual = r.gap / std::max(1.0, std::abs(value));
  if (value > warm_objective) {
    out.W_next = candidate;
    out.objective = value;
  }
  return out;
}

}  // namespace cfurllc
