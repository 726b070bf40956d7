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

#include "cfurllc/pfa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "cfurllc/convex_solver.hpp"
#include "cfurllc/rate_model.hpp"
#include "cfurllc/surrogates.hpp"

namespace cfurllc {

namespace {

constexpr int kStartAttempts = 10;
constexpr int kMaxHalvings = 40;

double relative_change(double previous, double next) {
  return std::abs(next - previous) / std::max(std::abs(previous), 1e-12);
}

// The next iterate must itself be a usable expansion point, and must stay where the
// current bound is valid.
bool usable(const SurrogateState& s, const ChannelRealization& H, const PrecodingMatrix& W) {
  for (int k = 0; k < H.user_count(); ++k) {
    if (sinr(H, W, k, s.sigma2) < kSinrFloor) return false;
    if (trust_region_residual(s, H, W, k) <= 0.0) return false;
  }
  return true;
}

PfaRecord take_step(const ConeProgram& program, PrecodingMatrix& W, const ChannelRealization& H,
                    const ScenarioConfig& config, PfaPhase phase, int iteration) {
  const auto start = std::chrono::steady_clock::now();
  const SolveResult r = solve(program, W, config.solver_tol);

  PfaRecord rec;
  rec.phase = phase;
  rec.iteration = iteration;
  rec.status = r.status;
  rec.newton_iterations = r.newton_iterations;
  rec.flops = r.flops;
  rec.objective = r.objective;

  // Halving toward the expansion point keeps the bound value at least that of W (concavity),
  // so ascent survives the shrink.
  PrecodingMatrix next = r.W_next;
  while (!usable(program.state, H, next) && rec.halvings < kMaxHalvings) {
    next.W = 0.5 * (next.W + W.W);
    ++rec.halvings;
  }
  if (usable(program.state, H, next)) W = next;

  const RateVector rates = evaluate_rates(H, W, config.noise_power(), config.t, config.B,
                                          config.epsilon);
  rec.min_urllc = rates.min_urllc();
  rec.min_shannon = rates.min_shannon();
  rec.urllc = rates.urllc;
  rec.shannon = rates.shannon;
  rec.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

double min_sinr(const ChannelRealization& H, const PrecodingMatrix& W, double sigma2,
                int* worst) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < H.user_count(); ++k) {
    const double v = sinr(H, W, k, sigma2);
    if (v < m) {
      m = v;
      if (worst) *worst = k;
    }
  }
  return m;
}

}  // namespace

int PfaTrace::iterations(PfaPhase phase) const {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [&](const PfaRecord& r) { return r.phase == phase; }));
}

double PfaTrace::flops(PfaPhase phase) const {
  double total = 0.0;
  for (const auto& r : records) {
    if (r.phase == phase) total += r.flops;
  }
  return total;
}

std::vector<double> PfaTrace::min_urllc_series() const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.phase == PfaPhase::kMain) out.push_back(r.min_urllc);
  }
  return out;
}

PrecodingMatrix random_start(int ap_count, int antennas, int users, double p_max, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  PrecodingMatrix W;
  W.antennas_per_ap = antennas;
  W.W.resize(static_cast<Eigen::Index>(ap_count) * antennas, users);
  for (Eigen::Index c = 0; c < W.W.cols(); ++c) {
    for (Eigen::Index r = 0; r < W.W.rows(); ++r) {
      const double re = gauss(rng);
      W.W(r, c) = cd(re, gauss(rng));
    }
  }
  for (int l = 0; l < ap_count; ++l) {
    const double power = W.ap_power(l);
    if (power > 0.0) W.W.middleRows(l * antennas, antennas) *= std::sqrt(p_max / power);
  }
  return W;
}

PrecodingMatrix initialize(const ChannelRealization& H, const ScenarioConfig& config, Rng& rng,
                           PfaTrace* trace) {
  const double sigma2 = config.noise_power();
  PrecodingMatrix W;
  int worst = 0;
  bool found = false;
  for (int attempt = 0; attempt < kStartAttempts && !found; ++attempt) {
    W = random_start(H.ap_count(), H.antennas_per_ap, H.user_count(), config.p_max, rng);
    found = min_sinr(H, W, sigma2, &worst) >= kSinrFloor;
  }
  if (!found) throw InitializationFailed(worst, "no random start reaches the SINR floor");

  double previous = evaluate_rates(H, W, sigma2, config.t, config.B, config.epsilon).min_shannon();
  for (int it = 1; it <= config.init_max_iter; ++it) {
    const SurrogateState state = freeze_state(H, W, sigma2, 0.0);
    const ConeProgram program = build_init_subproblem(state, H, config.p_max);
    const PfaRecord rec = take_step(program, W, H, config, PfaPhase::kInit, it);
    if (trace) trace->records.push_back(rec);
    const bool settled = relative_change(previous, rec.min_shannon) < config.pfa_tol;
    previous = rec.min_shannon;
    if (settled) break;
  }
  if (min_sinr(H, W, sigma2, &worst) < kSinrFloor) {
    throw InitializationFailed(worst, "SINR floor lost during initialization");
  }
  return W;
}

PfaResult refine(const ChannelRealization& H, const PrecodingMatrix& start,
                 const ScenarioConfig& config, bool shannon_only) {
  const double sigma2 = config.noise_power();
  const double penalty =
      shannon_only ? 0.0 : dispersion_penalty(config.t, config.B, config.epsilon);
  auto objective = [&](const RateVector& r) {
    return shannon_only ? r.min_shannon() : r.min_urllc();
  };

  PfaResult out;
  out.W = start;
  double previous =
      objective(evaluate_rates(H, out.W, sigma2, config.t, config.B, config.epsilon));
  for (int it = 1; it <= config.pfa_max_iter; ++it) {
    const SurrogateState state = freeze_state(H, out.W, sigma2, penalty);
    const ConeProgram program = build_subproblem(state, H, config.p_max);
    PfaRecord rec = take_step(program, out.W, H, config, PfaPhase::kMain, it);
    const double current = shannon_only ? rec.min_shannon : rec.min_urllc;
    out.trace.records.push_back(std::move(rec));
    const bool settled = relative_change(previous, current) < config.pfa_tol;
    previous = current;
    if (settled) break;
  }
  return out;
}

PfaResult run(const ChannelRealization& H, const ScenarioConfig& config, Rng& rng,
              bool shannon_only) {
  PfaTrace init_trace;
  const PrecodingMatrix start = initialize(H, config, rng, &init_trace);
  PfaResult out = refine(H, start, config, shannon_only);
  out.trace.records.insert(out.trace.records.begin(), init_trace.records.begin(),
                           init_trace.records.end());
  return out;
}

void write_trace_csv(const PfaTrace& trace, std::ostream& out) {
  const std::size_t users = trace.records.empty() ? 0 : trace.records.front().urllc.size();
  out << "phase,iteration,objective,min_urllc,min_shannon,status,newton,halvings,flops,seconds";
  for (std::size_t k = 0; k < users; ++k) out << ",urllc_" << k;
  for (std::size_t k = 0; k < users; ++k) out << ",shannon_" << k;
  out << '\n';
  const auto precision = out.precision(17);
  for (const auto& r : trace.records) {
    out << (r.phase == PfaPhase::kInit ? "init" : "main") << ',' << r.iteration << ','
        << r.objective << ',' << r.min_urllc << ',' << r.min_shannon << ',' << to_string(r.status)
        << ',' << r.newton_iterations << ',' << r.halvings << ',' << r.flops << ',' << r.seconds;
    for (double v : r.urllc) out << ',' << v;
    for (double v : r.shannon) out << ',' << v;
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace cfurllc
