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

#include "cfurllc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "cfurllc/decentralized.hpp"
#include "cfurllc/pfa.hpp"
#include "cfurllc/rate_model.hpp"

namespace cfurllc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TrialRates to_bits(int trial, const RateVector& rates) {
  return TrialRates{trial, rates.shannon_bits(), rates.urllc_bits()};
}

struct TrialOutcome {
  bool ok = false;
  std::string error;
  TrialRates rates;
  double seconds = 0.0;
  double iterations = 0.0;
  double flops = 0.0;
  int runs = 0;  // path-following runs (clusters) contributing to iterations
};

void count(const PfaTrace& trace, TrialOutcome& out) {
  out.iterations += static_cast<double>(trace.records.size());
  for (const auto& r : trace.records) out.flops += r.flops;
  out.runs += 1;
}

TrialOutcome run_trial(const ScenarioConfig& config, Mode mode, int trial) {
  TrialOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    const TrialDraw draw = draw_trial(config, trial);
    const double sigma2 = config.noise_power();
    PrecodingMatrix W;
    switch (mode) {
      case Mode::kCentralized:
      case Mode::kShannonCentralized: {
        Rng rng(derive_seed(draw.precoder_seed, 0));
        PfaResult r = run(draw.H, config, rng, mode == Mode::kShannonCentralized);
        count(r.trace, out);
        W = std::move(r.W);
        break;
      }
      case Mode::kDecentralized: {
        const ClusterPartition partition = partition_for(draw.geometry, config);
        DecentralizedResult r = run_decentralized(draw.H, partition, config, draw.precoder_seed);
        for (const auto& trace : r.traces) count(trace, out);
        W = std::move(r.W);
        break;
      }
      case Mode::kMmse:
        W = mmse_precoding(draw.H, config.mmse_power(), sigma2, config.p_max);
        break;
    }
    out.rates = to_bits(trial, evaluate_rates(draw.H, W, sigma2, config.t, config.B,
                                              config.epsilon));
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.seconds = seconds_since(start);
  return out;
}

int cooperating_aps(const ScenarioConfig& config, Mode mode) {
  if (mode != Mode::kDecentralized) return config.L;
  if (!config.cluster_map.empty()) {
    const int clusters =
        *std::max_element(config.cluster_map.begin(), config.cluster_map.end()) + 1;
    return config.L / clusters;
  }
  return config.M;
}

// Shared tail of every experiment: failure policy, ordering, aggregates.
RateReport finish(const ScenarioConfig& config, Mode mode, std::vector<TrialOutcome>& outcomes,
                  double wall_seconds, const ExperimentOptions& options) {
  RateReport report;
  report.mode = to_string(mode);
  report.config_hash = config_hash(config);
  report.seed = config.seed;
  report.trials_requested = config.trials;
  report.wall_seconds = wall_seconds;
  report.flops = flop_report(config, cooperating_aps(config, mode));

  double seconds = 0.0;
  double iterations = 0.0;
  double flops = 0.0;
  int runs = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    if (!o.ok) {
      ++report.failed_trials;
      if (options.on_failure) options.on_failure(static_cast<int>(i), o.error);
      continue;
    }
    seconds += o.seconds;
    iterations += o.iterations;
    flops += o.flops;
    runs += o.runs;
    report.samples.push_back(std::move(o.rates));
  }
  if (report.failed_trials * 100 > config.trials) {
    throw ExperimentAborted(std::to_string(report.failed_trials) + " of " +
                            std::to_string(config.trials) + " trials failed");
  }
  if (!report.samples.empty()) {
    report.mean_trial_seconds = seconds / static_cast<double>(report.samples.size());
  }
  if (runs > 0) report.flops.measured_iterations = iterations / runs;
  if (iterations > 0) report.flops.measured_flops_per_iteration = flops / iterations;
  aggregate(report);
  return report;
}

int resolve_workers(const ExperimentOptions& options) {
  return options.workers > 0 ? options.workers : worker_count();
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::kCentralized: return "centralized";
    case Mode::kDecentralized: return "decentralized";
    case Mode::kMmse: return "mmse";
    case Mode::kShannonCentralized: return "shannon-centralized";
  }
  return "?";
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::kCentralized, Mode::kDecentralized, Mode::kMmse,
                 Mode::kShannonCentralized}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown mode '" + name + "'");
}

std::vector<double> RateReport::pooled_urllc() const {
  std::vector<double> out;
  for (const auto& s : samples) out.insert(out.end(), s.urllc_bits.begin(), s.urllc_bits.end());
  return out;
}

std::vector<double> RateReport::pooled_shannon() const {
  std::vector<double> out;
  for (const auto& s : samples) {
    out.insert(out.end(), s.shannon_bits.begin(), s.shannon_bits.end());
  }
  return out;
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile outside [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double h = static_cast<double>(samples.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= samples.size()) return samples.back();
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[lo + 1] - samples[lo]);
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<CdfPoint> out(samples.size());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[i] = {samples[i], static_cast<double>(i + 1) / n};
  }
  return out;
}

void aggregate(RateReport& report) {
  const auto urllc = report.pooled_urllc();
  const auto shannon = report.pooled_shannon();
  if (urllc.empty()) return;
  const double n = static_cast<double>(urllc.size());
  report.mean_urllc = std::accumulate(urllc.begin(), urllc.end(), 0.0) / n;
  report.mean_shannon = std::accumulate(shannon.begin(), shannon.end(), 0.0) / n;
  report.likely_urllc = percentile(urllc, 0.05);
  report.likely_shannon = percentile(shannon, 0.05);
  double sum_min = 0.0;
  report.worst_urllc = std::numeric_limits<double>::infinity();
  for (const auto& s : report.samples) {
    const double m = *std::min_element(s.urllc_bits.begin(), s.urllc_bits.end());
    sum_min += m;
    report.worst_urllc = std::min(report.worst_urllc, m);
  }
  report.mean_min_urllc = sum_min / static_cast<double>(report.samples.size());
  report.urllc_cdf = empirical_cdf(urllc);
  report.shannon_cdf = empirical_cdf(shannon);
}

TrialDraw draw_trial(const ScenarioConfig& config, int trial) {
  const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial));
  Rng rng(derive_seed(trial_seed, 0));
  TrialDraw draw;
  draw.geometry = build_geometry(config, rng);
  const LargeScaleFading fading = large_scale_fading(draw.geometry, config, rng);
  draw.H = sample_channel(fading, rng);
  draw.precoder_seed = derive_seed(trial_seed, 1);
  return draw;
}

int worker_count() {
  if (const char* env = std::getenv("CFURLLC_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  const int threads = std::clamp(workers, 1, std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_lock;
  auto body = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_lock);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

RateReport run_experiment(const ScenarioConfig& config, Mode mode,
                          const ExperimentOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialOutcome> outcomes(config.trials);
  parallel_for(config.trials, resolve_workers(options),
               [&](int i) { outcomes[i] = run_trial(config, mode, i); });
  return finish(config, mode, outcomes, seconds_since(start), options);
}

std::vector<SweepTRow> sweep_t(const ScenarioConfig& config, const std::vector<double>& t_values,
                               const ExperimentOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t T = t_values.size();
  // outcomes[j] for t_values[j]; outcomes[T] is the Shannon max-min run.
  std::vector<std::vector<TrialOutcome>> outcomes(T + 1,
                                                  std::vector<TrialOutcome>(config.trials));
  parallel_for(config.trials, resolve_workers(options), [&](int i) {
    try {
      const TrialDraw draw = draw_trial(config, i);
      const double sigma2 = config.noise_power();
      Rng rng(derive_seed(draw.precoder_seed, 0));
      PfaTrace init_trace;
      const PrecodingMatrix W0 = initialize(draw.H, config, rng, &init_trace);
      for (std::size_t j = 0; j <= T; ++j) {
        ScenarioConfig c = config;
        if (j < T) c.t = t_values[j];
        const PfaResult r = refine(draw.H, W0, c, j == T);
        auto& o = outcomes[j][i];
        o.rates = to_bits(i, evaluate_rates(draw.H, r.W, sigma2, c.t, c.B, c.epsilon));
        o.ok = true;
      }
    } catch (const std::exception& e) {
      for (auto& column : outcomes) {
        column[i].ok = false;
        column[i].error = e.what();
      }
    }
  });
  const double wall = seconds_since(start);

  const RateReport shannon = finish(config, Mode::kShannonCentralized, outcomes[T], wall, options);
  std::vector<SweepTRow> rows;
  for (std::size_t j = 0; j < T; ++j) {
    ScenarioConfig c = config;
    c.t = t_values[j];
    const RateReport r = finish(c, Mode::kCentralized, outcomes[j], wall, {});
    rows.push_back({t_values[j], r.likely_urllc, shannon.likely_shannon, r.mean_urllc,
                    shannon.mean_shannon});
  }
  return rows;
}

std::vector<SweepClusterRow> sweep_clusters(const ScenarioConfig& config,
                                            const std::vector<int>& cluster_sizes,
                                            const ExperimentOptions& options) {
  std::vector<SweepClusterRow> rows;
  for (int M : cluster_sizes) {
    ScenarioConfig c = config;
    c.M = M;
    c.cluster_map.clear();
    const RateReport r = run_experiment(c, Mode::kDecentralized, options);
    rows.push_back({M, c.L / M, r.likely_urllc, r.mean_urllc, r.flops.measured_iterations,
                    r.flops.measured_flops_per_iteration, r.flops.pfa_order_per_iteration});
  }
  return rows;
}

std::vector<SweepNRow> sweep_n(const ScenarioConfig& config, const std::vector<int>& n_values,
                               const ExperimentOptions& options) {
  std::vector<SweepNRow> rows;
  for (int N : n_values) {
    ScenarioConfig c = config;
    c.N = N;
    const RateReport pfa = run_experiment(c, Mode::kCentralized, options);
    const RateReport mmse = run_experiment(c, Mode::kMmse, options);
    rows.push_back({N, pfa.likely_urllc, pfa.mean_urllc, mmse.likely_urllc, mmse.mean_urllc});
  }
  return rows;
}

}  // namespace cfurllc
