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

// Acceptance runner. `acceptance <n>` runs check n (1..10), `acceptance all` runs every
// check. Each check prints one line starting with "criterion <n>: PASS" or "FAIL" and the
// process exits non-zero when any selected check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "../unit/support.hpp"
#include "cfurllc/convex_solver.hpp"
#include "cfurllc/decentralized.hpp"
#include "cfurllc/harness.hpp"
#include "cfurllc/mmse.hpp"
#include "cfurllc/pfa.hpp"
#include "cfurllc/rate_model.hpp"
#include "cfurllc/surrogates.hpp"

using namespace cfurllc;
using namespace cfurllc::testing;

namespace {

// Tolerances and sample sizes. Changing any of these changes what the check asserts.
constexpr double kTightnessTol = 1e-9;
constexpr int kTightnessPoints = 100;
constexpr double kTightnessSeconds = 10.0;

constexpr double kValiditySlack = 1e-9;
constexpr int kValidityPerturbations = 1000;
constexpr double kValiditySeconds = 60.0;

constexpr int kMonotoneTrials = 100;
constexpr double kMonotoneSlack = 1e-9;
constexpr int kMonotoneMaxIterations = 50;

constexpr int kOracleInstances = 50;
constexpr int kOracleSamples = 1000000;
constexpr double kOracleSlack = 1e-3;
constexpr double kOracleSeconds = 300.0;

constexpr int kDegenerateSeeds = 20;
constexpr double kDegenerateTol = 1e-6;

constexpr int kClusterSeeds = 20;
constexpr double kClusterTolFactor = 10.0;  // times solver_tol

constexpr int kBaselineTrials = 200;

constexpr int kSweepTrials = 20;  // per user count; K = 15 runs take ~30 s per trial
const std::vector<double> kSweepT = {0.01e-3, 0.02e-3, 0.05e-3, 0.1e-3};

constexpr int kClusterTrials = 200;

constexpr double kRoundTripTol = 1e-8;
constexpr double kBisectionTol = 1e-6;
constexpr double kQInverseReference = 4.2648907939228246285;  // 50-digit oracle, tests/oracles

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool report(int n, bool pass, const std::string& detail, double seconds) {
  std::printf("criterion %d: %s  %s  [%.1f s]\n", n, pass ? "PASS" : "FAIL", detail.c_str(),
              seconds);
  std::fflush(stdout);
  return pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ScenarioConfig grid4(int N, int K) {
  ScenarioConfig c;
  c.L = 4;
  c.N = N;
  c.K = K;
  c.M = 4;
  c.ap_spacing_x = 48.0;
  c.ap_spacing_y = 24.0;
  return c;
}

// Expansion points from the deployment model: channel of trial i, random full-power start.
struct ExpansionPoint {
  ChannelRealization H;
  PrecodingMatrix W;
  SurrogateState state;
  double sigma2 = 0.0;
};

std::vector<ExpansionPoint> expansion_points(const ScenarioConfig& c, int count) {
  std::vector<ExpansionPoint> out;
  const double sigma2 = c.noise_power();
  const double penalty = dispersion_penalty(c.t, c.B, c.epsilon);
  for (int i = 0; out.size() < static_cast<std::size_t>(count); ++i) {
    const TrialDraw draw = draw_trial(c, i);
    Rng rng(draw.precoder_seed);
    std::uniform_real_distribution<double> fraction(0.05, 1.0);
    PrecodingMatrix W = random_start(c.L, c.N, c.K, c.p_max * fraction(rng), rng);
    try {
      SurrogateState s = freeze_state(draw.H, W, sigma2, penalty);
      out.push_back({draw.H, W, std::move(s), sigma2});
    } catch (const SingularSurrogate&) {
      // below the SINR floor: not an admissible expansion point
    }
  }
  return out;
}

bool inside_region(const SurrogateState& s, const ChannelRealization& H,
                   const PrecodingMatrix& W) {
  for (int k = 0; k < s.user_count(); ++k) {
    const CVector z = user_gains(H, W, k);
    if (trust_region_residual(s, k, z) <= 0.0) return false;
    const GResiduals r = g_constraint_residuals(s, k, z);
    if (r.total_power < 0.0 || r.linearization < 0.0) return false;
  }
  return true;
}

// 1. Bounds touch the true functions at the expansion point.
bool criterion_1() {
  const auto start = Clock::now();
  const ScenarioConfig c = grid4(2, 3);
  double worst_f = 0.0, worst_g = 0.0, worst_r = 0.0;
  for (const auto& p : expansion_points(c, kTightnessPoints)) {
    for (int k = 0; k < c.K; ++k) {
      const double phi = sinr(p.H, p.W, k, p.sigma2);
      worst_f = std::max(worst_f, std::abs(f_lower(p.state, p.H, p.W, k) - shannon_rate(phi)));
      worst_g = std::max(worst_g,
                         std::abs(g_upper(p.state, p.H, p.W, k) - std::sqrt(dispersion(phi))));
      worst_r = std::max(worst_r, std::abs(r_lower(p.state, p.H, p.W, k) -
                                           urllc_rate(phi, c.t, c.B, c.epsilon)));
    }
  }
  const double secs = seconds_since(start);
  const bool pass = worst_f <= kTightnessTol && worst_g <= kTightnessTol &&
                    worst_r <= kTightnessTol && secs < kTightnessSeconds;
  return report(1, pass,
                fmt("%d points, max |f-ln(1+sinr)| %.2e, |g-sqrtV| %.2e, |r-urllc| %.2e "
                    "(tol %.0e, < %.0f s)",
                    kTightnessPoints, worst_f, worst_g, worst_r, kTightnessTol, kTightnessSeconds),
                secs);
}

// 2. Bounds hold at feasible perturbations of each expansion point.
bool criterion_2() {
  const auto start = Clock::now();
  const ScenarioConfig c = grid4(2, 3);
  Rng rng(2002);
  std::uniform_real_distribution<double> log_scale(-4.0, 0.0);
  long violations = 0, accepted = 0, attempts = 0;
  double worst_f = -std::numeric_limits<double>::infinity();
  double worst_g = -std::numeric_limits<double>::infinity();
  int short_points = 0;
  for (const auto& p : expansion_points(c, kTightnessPoints)) {
    const double amplitude = p.W.W.norm() / std::sqrt(static_cast<double>(p.W.W.size()));
    int got = 0;
    for (int tries = 0; got < kValidityPerturbations && tries < 100 * kValidityPerturbations;
         ++tries) {
      ++attempts;
      PrecodingMatrix W = perturb(rng, p.W, amplitude * std::pow(10.0, log_scale(rng)));
      if (W.max_ap_power() > c.p_max) continue;
      if (!inside_region(p.state, p.H, W)) continue;
      ++got;
      for (int k = 0; k < c.K; ++k) {
        const double phi = sinr(p.H, W, k, p.sigma2);
        const double df = f_lower(p.state, p.H, W, k) - shannon_rate(phi);
        const double dg = std::sqrt(dispersion(phi)) - g_upper(p.state, p.H, W, k);
        worst_f = std::max(worst_f, df);
        worst_g = std::max(worst_g, dg);
        if (df > kValiditySlack || dg > kValiditySlack) ++violations;
      }
    }
    accepted += got;
    if (got < kValidityPerturbations) ++short_points;
  }
  const double secs = seconds_since(start);
  const bool pass = violations == 0 && short_points == 0 && secs < kValiditySeconds;
  return report(2, pass,
                fmt("%ld feasible perturbations (%ld drawn), %ld violations, max f-ln(1+sinr) "
                    "%.2e, max sqrtV-g %.2e (slack %.0e), points short of %d: %d",
                    accepted, attempts, violations, worst_f, worst_g, kValiditySlack,
                    kValidityPerturbations, short_points),
                secs);
}

// 3. Monotone ascent and termination of the full loop. The main phase must not lower the
// minimum URLLC rate; the initialization phase must not lower its own objective, the minimum
// Shannon rate.
bool criterion_3() {
  const auto start = Clock::now();
  ScenarioConfig c;
  c.N = 2;
  c.K = 4;
  int monotone = 0, terminated = 0, failed = 0, max_iter = 0, max_init = 0, whole_trace = 0;
  double worst_drop = 0.0;
  for (int i = 0; i < kMonotoneTrials; ++i) {
    try {
      const TrialDraw draw = draw_trial(c, i);
      Rng rng(derive_seed(draw.precoder_seed, 0));
      const PfaResult r = run(draw.H, c, rng);
      bool ok = true, urllc_everywhere = true;
      double init_prev = -std::numeric_limits<double>::infinity();
      double urllc_prev = -std::numeric_limits<double>::infinity();
      double last_change = 0.0;
      for (const auto& rec : r.trace.records) {
        if (rec.min_urllc < urllc_prev - kMonotoneSlack) urllc_everywhere = false;
        if (rec.phase == PfaPhase::kInit) {
          worst_drop = std::max(worst_drop, init_prev - rec.min_shannon);
          if (rec.min_shannon < init_prev - kMonotoneSlack) ok = false;
          init_prev = rec.min_shannon;
        } else {
          worst_drop = std::max(worst_drop, urllc_prev - rec.min_urllc);
          if (rec.min_urllc < urllc_prev - kMonotoneSlack) ok = false;
          last_change = std::abs(rec.min_urllc - urllc_prev) / std::max(std::abs(urllc_prev), 1e-12);
        }
        urllc_prev = rec.min_urllc;
      }
      const int iters = r.trace.iterations(PfaPhase::kMain);
      max_iter = std::max(max_iter, iters);
      max_init = std::max(max_init, r.trace.iterations(PfaPhase::kInit));
      monotone += ok;
      whole_trace += urllc_everywhere;
      terminated += iters >= 1 && iters <= kMonotoneMaxIterations && last_change < c.pfa_tol;
    } catch (const std::exception&) {
      ++failed;
    }
  }
  const bool pass = monotone == kMonotoneTrials && terminated == kMonotoneTrials;
  return report(3, pass,
                fmt("%d trials L=16 N=2 K=4: monotone %d, settled within %d iterations %d, "
                    "failed %d, max main iterations %d (init %d), largest drop %.2e "
                    "(slack %.0e), min URLLC non-decreasing over the whole trace %d",
                    kMonotoneTrials, monotone, kMonotoneMaxIterations, terminated, failed,
                    max_iter, max_init, worst_drop, kMonotoneSlack, whole_trace),
                seconds_since(start));
}

// Uniform point in each AP's power ball.
PrecodingMatrix uniform_in_balls(Rng& rng, int L, int N, int K, double p_max) {
  PrecodingMatrix W = random_precoder(rng, L, N, K, p_max);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double dim = 2.0 * N * K;
  for (int l = 0; l < L; ++l) W.W.middleRows(l * N, N) *= std::pow(u(rng), 1.0 / dim);
  return W;
}

// 4. The interior-point solution beats brute-force sampling of the same program.
bool criterion_4() {
  const auto start = Clock::now();
  constexpr int L = 2, N = 1, K = 2;  // 8 real dimensions
  constexpr double p_max = 1.0, sigma2 = 0.1;
  const double penalty = dispersion_penalty(0.05e-3, 1e6, 1e-5);
  Rng rng(4004);
  std::uniform_real_distribution<double> fraction(0.2, 0.95);
  std::uniform_real_distribution<double> log_scale(-4.0, 0.0);
  int dominated = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  long feasible = 0;
  for (int inst = 0; inst < kOracleInstances; ++inst) {
    const auto H = random_channel(rng, L, N, K);
    const auto Wn = random_precoder(rng, L, N, K, p_max, fraction(rng));
    SurrogateState s;
    try {
      s = freeze_state(H, Wn, sigma2, penalty);
    } catch (const SingularSurrogate&) {
      --inst;
      continue;
    }
    const ConeProgram program = build_subproblem(s, H, p_max);
    const SolveResult res = solve(program, Wn, 1e-8);
    double best = program_objective(program, Wn);
    for (int i = 0; i < kOracleSamples; ++i) {
      // Half uniform over the power balls, half local around the expansion point.
      PrecodingMatrix W = (i % 2 == 0) ? uniform_in_balls(rng, L, N, K, p_max)
                                       : perturb(rng, Wn, std::pow(10.0, log_scale(rng)));
      if (W.max_ap_power() > p_max) continue;
      const double v = program_objective(program, W);
      if (!std::isfinite(v)) continue;
      ++feasible;
      best = std::max(best, v);
    }
    const double margin = res.objective - best;
    worst_margin = std::min(worst_margin, margin);
    dominated += margin >= -kOracleSlack;
  }
  const double secs = seconds_since(start);
  const bool pass = dominated == kOracleInstances && secs < kOracleSeconds;
  return report(4, pass,
                fmt("%d instances, %d dominate the best of %d samples (%ld feasible in total), "
                    "worst margin %.3e (slack %.0e)",
                    kOracleInstances, dominated, kOracleSamples, feasible, worst_margin,
                    kOracleSlack),
                secs);
}

// 5. With eps = 0.5 the finite-blocklength penalty vanishes.
bool criterion_5() {
  const auto start = Clock::now();
  ScenarioConfig c;
  c.N = 2;
  c.K = 4;
  c.epsilon = 0.5;
  double worst = 0.0;
  for (int i = 0; i < kDegenerateSeeds; ++i) {
    const TrialDraw draw = draw_trial(c, i);
    Rng a(derive_seed(draw.precoder_seed, 0)), b(derive_seed(draw.precoder_seed, 0));
    const PfaResult u = run(draw.H, c, a, false);
    const PfaResult s = run(draw.H, c, b, true);
    const double ru =
        evaluate_rates(draw.H, u.W, c.noise_power(), c.t, c.B, c.epsilon).min_urllc();
    const double rs =
        evaluate_rates(draw.H, s.W, c.noise_power(), c.t, c.B, c.epsilon).min_shannon();
    worst = std::max(worst, std::abs(ru - rs));
  }
  return report(5, worst < kDegenerateTol,
                fmt("%d seeds, max |min URLLC - min Shannon| %.2e nats (tol %.0e)",
                    kDegenerateSeeds, worst, kDegenerateTol),
                seconds_since(start));
}

// 6. One cluster holding every AP is the centralized design.
bool criterion_6() {
  const auto start = Clock::now();
  const ScenarioConfig c;
  const double tol = kClusterTolFactor * c.solver_tol;
  double worst = 0.0;
  for (int i = 0; i < kClusterSeeds; ++i) {
    const TrialDraw draw = draw_trial(c, i);
    Rng rng(derive_seed(draw.precoder_seed, 0));
    const PfaResult central = run(draw.H, c, rng);
    const auto rc = evaluate_rates(draw.H, central.W, c.noise_power(), c.t, c.B, c.epsilon);
    const auto dec = run_decentralized(draw.H, partition_aps(draw.geometry, c.L), c,
                                       draw.precoder_seed);
    for (int k = 0; k < c.K; ++k) worst = std::max(worst, std::abs(rc.urllc[k] - dec.rates.urllc[k]));
  }
  return report(6, worst <= tol,
                fmt("%d seeds, max per-user URLLC difference %.2e nats (tol %.0e)",
                    kClusterSeeds, worst, tol),
                seconds_since(start));
}

// 7. Centralized path-following beats the MMSE baseline.
bool criterion_7() {
  const auto start = Clock::now();
  ScenarioConfig c;
  c.trials = kBaselineTrials;
  const RateReport pfa = run_experiment(c, Mode::kCentralized);
  const RateReport mmse = run_experiment(c, Mode::kMmse);
  const bool pass = pfa.mean_urllc > mmse.mean_urllc && pfa.likely_urllc > mmse.likely_urllc;
  auto gain = [](double a, double b) {
    return b > 0.0 ? fmt("%+.0f%%", 100.0 * (a - b) / b) : std::string("n/a, baseline 0");
  };
  return report(7, pass,
                fmt("%d trials (failed %d/%d): mean URLLC %.3f vs %.3f bits/s/Hz (%s), "
                    "95%%-likely %.3f vs %.3f (%s)",
                    kBaselineTrials, pfa.failed_trials, mmse.failed_trials, pfa.mean_urllc,
                    mmse.mean_urllc, gain(pfa.mean_urllc, mmse.mean_urllc).c_str(),
                    pfa.likely_urllc, mmse.likely_urllc,
                    gain(pfa.likely_urllc, mmse.likely_urllc).c_str()),
                seconds_since(start));
}

// 8. Rate against transmission duration for 6 and 15 users.
bool criterion_8() {
  const auto start = Clock::now();
  ScenarioConfig c6;
  c6.trials = kSweepTrials;
  ScenarioConfig c15 = c6;
  c15.K = 15;
  const auto r6 = sweep_t(c6, kSweepT);
  const auto r15 = sweep_t(c15, kSweepT);
  bool increasing = true, flat = true, fewer_better = true;
  std::string rows;
  for (std::size_t j = 0; j < kSweepT.size(); ++j) {
    if (j > 0) {
      increasing = increasing && r6[j].likely_urllc >= r6[j - 1].likely_urllc &&
                   r15[j].likely_urllc >= r15[j - 1].likely_urllc;
      flat = flat && r6[j].likely_shannon == r6[0].likely_shannon &&
             r15[j].likely_shannon == r15[0].likely_shannon;
    }
    fewer_better = fewer_better && r15[j].likely_urllc <= r6[j].likely_urllc;
    rows += fmt(" t=%.2gms K6 %.3f K15 %.3f;", kSweepT[j] * 1e3, r6[j].likely_urllc,
                r15[j].likely_urllc);
  }
  const bool pass = increasing && flat && fewer_better;
  return report(8, pass,
                fmt("%d trials, 95%%-likely URLLC non-decreasing in t: %s, Shannon constant "
                    "(K6 %.3f, K15 %.3f): %s, K15 <= K6: %s;",
                    kSweepTrials, increasing ? "yes" : "no", r6[0].likely_shannon,
                    r15[0].likely_shannon, flat ? "yes" : "no", fewer_better ? "yes" : "no") +
                    rows,
                seconds_since(start));
}

// 9. Larger clusters do at least as well; complexity of the two-cluster design.
bool criterion_9() {
  const auto start = Clock::now();
  ScenarioConfig c;
  c.trials = kClusterTrials;
  const RateReport central = run_experiment(c, Mode::kCentralized);
  std::vector<RateReport> clusters;
  for (int M : {8, 4, 1}) {
    ScenarioConfig d = c;
    d.M = M;
    clusters.push_back(run_experiment(d, Mode::kDecentralized));
  }
  const bool pass = central.likely_urllc >= clusters[0].likely_urllc &&
                    clusters[0].likely_urllc >= clusters[1].likely_urllc &&
                    clusters[1].likely_urllc >= clusters[2].likely_urllc;
  const double measured_ratio = clusters[0].flops.measured_flops_per_iteration /
                                central.flops.measured_flops_per_iteration;
  const double order_ratio = clusters[0].flops.pfa_order_per_iteration /
                             central.flops.pfa_order_per_iteration;
  return report(9, pass,
                fmt("%d trials, 95%%-likely URLLC C %.3f >= D2 %.3f >= D4 %.3f >= D16 %.3f "
                    "(means %.3f %.3f %.3f %.3f); two-cluster/centralized flops per iteration "
                    "per cluster: measured %.1f%%, closed-form order %.1f%%, claimed 12%% "
                    "(reported only)",
                    kClusterTrials, central.likely_urllc, clusters[0].likely_urllc,
                    clusters[1].likely_urllc, clusters[2].likely_urllc, central.mean_urllc,
                    clusters[0].mean_urllc, clusters[1].mean_urllc, clusters[2].mean_urllc,
                    100.0 * measured_ratio, 100.0 * order_ratio),
                seconds_since(start));
}

// Bisection on the libm Gaussian tail, independent of the inverse used by the library.
double bisect_q_inverse(double eps) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > eps ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// 10. Inverse Gaussian tail.
bool criterion_10() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (int e = 1; e <= 9; ++e) {
    const double eps = std::pow(10.0, -e);
    worst = std::max(worst, std::abs(q_function(q_inverse(eps)) - eps) / eps);
  }
  const double bisect = std::abs(q_inverse(1e-5) - bisect_q_inverse(1e-5));
  const double reference = std::abs(q_inverse(1e-5) - kQInverseReference);
  const bool pass = worst <= kRoundTripTol && bisect <= kBisectionTol && reference <= kBisectionTol;
  return report(10, pass,
                fmt("max relative round-trip error %.2e (tol %.0e); q_inverse(1e-5) = %.15f, "
                    "bisection diff %.2e, 50-digit reference diff %.2e (tol %.0e)",
                    worst, kRoundTripTol, q_inverse(1e-5), bisect, reference, kBisectionTol),
                seconds_since(start));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> checks = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  std::vector<int> selected;
  if (argc < 2 || std::string(argv[1]) == "all") {
    for (int i = 1; i <= 10; ++i) selected.push_back(i);
  } else {
    for (int a = 1; a < argc; ++a) {
      const int n = std::atoi(argv[a]);
      if (n < 1 || n > 10) {
        std::fprintf(stderr, "usage: %s [all | 1..10 ...]\n", argv[0]);
        return 2;
      }
      selected.push_back(n);
    }
  }
  bool ok = true;
  for (int n : selected) {
    try {
      ok = checks[n - 1]() && ok;
    } catch (const std::exception& e) {
      std::printf("criterion %d: FAIL  exception: %s\n", n, e.what());
      ok = false;
    }
  }
  return ok ? 0 : 1;
}
