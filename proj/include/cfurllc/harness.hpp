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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfurllc/config.hpp"
#include "cfurllc/mmse.hpp"
#include "cfurllc/scenario.hpp"

namespace cfurllc {

enum class Mode { kCentralized, kDecentralized, kMmse, kShannonCentralized };

const char* to_string(Mode mode);
/// Accepts centralized | decentralized | mmse | shannon-centralized.
Mode parse_mode(const std::string& name);

/// Rates of one trial, bits/s/Hz, URLLC clamped at zero.
struct TrialRates {
  int trial = 0;
  std::vector<double> shannon_bits;
  std::vector<double> urllc_bits;

  bool operator==(const TrialRates&) const = default;
};

struct CdfPoint {
  double value = 0.0;
  double probability = 0.0;

  bool operator==(const CdfPoint&) const = default;
};

struct RateReport {
  // metadata
  std::string mode;
  std::string config_hash;
  std::uint64_t seed = 0;
  int trials_requested = 0;
  int failed_trials = 0;
  double wall_seconds = 0.0;
  double mean_trial_seconds = 0.0;
  FlopReport flops;

  std::vector<TrialRates> samples;  // successful trials, ascending trial index

  // aggregates over the pooled per-user rates
  double mean_urllc = 0.0;
  double mean_shannon = 0.0;
  double likely_urllc = 0.0;    // 5th percentile: the rate 95% of users get
  double likely_shannon = 0.0;
  double mean_min_urllc = 0.0;  // mean over trials of the worst user's rate
  double worst_urllc = 0.0;
  std::vector<CdfPoint> urllc_cdf;
  std::vector<CdfPoint> shannon_cdf;

  std::vector<double> pooled_urllc() const;
  std::vector<double> pooled_shannon() const;
};

/// Fills every aggregate field from samples. Leaves them at zero for an empty report.
void aggregate(RateReport& report);

/// Empirical quantile, linear interpolation at position (n - 1) q of the sorted samples.
double percentile(std::vector<double> samples, double q);
/// Sorted values with probabilities (i + 1) / n.
std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

class ExperimentAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One Monte-Carlo draw. The generator streams depend on (config.seed, trial) only, so every
/// mode sees the same deployment and channel for a given trial.
struct TrialDraw {
  NetworkGeometry geometry;
  ChannelRealization H;
  std::uint64_t precoder_seed = 0;
};
TrialDraw draw_trial(const ScenarioConfig& config, int trial);

/// Worker count from CFURLLC_WORKERS, else the hardware concurrency (at least 1).
int worker_count();

/// Runs fn(0) ... fn(n - 1) on `workers` threads.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

struct ExperimentOptions {
  int workers = 0;  // 0 => worker_count()
  /// Called with (trial, message) for every excluded trial.
  std::function<void(int, const std::string&)> on_failure;
};

/// Fresh deployment and channel per trial, the selected precoder, global rate evaluation.
/// Throws ExperimentAborted when more than 1% of the trials fail.
RateReport run_experiment(const ScenarioConfig& config, Mode mode,
                          const ExperimentOptions& options = {});

struct SweepTRow {
  double t = 0.0;  // seconds
  double likely_urllc = 0.0;
  double likely_shannon = 0.0;
  double mean_urllc = 0.0;
  double mean_shannon = 0.0;
};

/// One row per t. The initialization of every trial does not depend on t and is shared
/// across the row set; the Shannon column comes from the Shannon max-min run, which does not
/// depend on t either. Rows equal independent run_experiment calls.
std::vector<SweepTRow> sweep_t(const ScenarioConfig& config, const std::vector<double>& t_values,
                               const ExperimentOptions& options = {});

struct SweepClusterRow {
  int cluster_size = 0;  // M
  int clusters = 0;
  double likely_urllc = 0.0;
  double mean_urllc = 0.0;
  double mean_iterations = 0.0;        // path-following iterations per cluster run
  double flops_per_iteration = 0.0;    // measured, one cluster's step
  double order_per_iteration = 0.0;    // closed-form order at the cluster dimension
};

std::vector<SweepClusterRow> sweep_clusters(const ScenarioConfig& config,
                                            const std::vector<int>& cluster_sizes,
                                            const ExperimentOptions& options = {});

struct SweepNRow {
  int antennas = 0;
  double pfa_likely_urllc = 0.0;
  double pfa_mean_urllc = 0.0;
  double mmse_likely_urllc = 0.0;
  double mmse_mean_urllc = 0.0;
};

std::vector<SweepNRow> sweep_n(const ScenarioConfig& config, const std::vector<int>& n_values,
                               const ExperimentOptions& options = {});

// Serialization ---------------------------------------------------------------

enum class Format { kCsv, kJson };
Format parse_format(const std::string& name);

/// CSV: header "trial,user,shannon_bits,urllc_bits", one row per (trial, user).
void write_csv(const RateReport& report, std::ostream& out);
/// Reads the samples back and recomputes the aggregates; metadata stays default.
RateReport read_csv(std::istream& in);

nlohmann::json report_to_json(const RateReport& report);
RateReport report_from_json(const nlohmann::json& j);

/// Throws std::runtime_error on I/O failure.
void emit(const RateReport& report, const std::string& path, Format format);
RateReport read_report(const std::string& path, Format format);

}  // namespace cfurllc
