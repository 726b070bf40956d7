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

// Command-line driver: Monte-Carlo runs and the three sweeps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfurllc/cone_program.hpp"
#include "cfurllc/decentralized.hpp"
#include "cfurllc/harness.hpp"
#include "cfurllc/pfa.hpp"
#include "cfurllc/rate_model.hpp"
#include "cfurllc/surrogates.hpp"

using namespace cfurllc;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON scenario file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--trials", flags.trials, "Monte-Carlo trials")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", flags.out, "output file (stdout when omitted)");
}

ScenarioConfig resolve(const CommonFlags& flags) {
  ScenarioConfig c = flags.config_path.empty() ? ScenarioConfig{} : load_config(flags.config_path);
  if (flags.seed) c.seed = *flags.seed;
  if (flags.trials) c.trials = *flags.trials;
  c.validate();
  return c;
}

ExperimentOptions verbose_options() {
  ExperimentOptions o;
  o.on_failure = [](int trial, const std::string& why) {
    std::cerr << "warning: trial " << trial << " excluded: " << why << '\n';
  };
  return o;
}

// Table output goes to --out when given, stdout otherwise.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  fn(out);
}

void write_diagnostics(const ScenarioConfig& config, Mode mode, const std::string& trace_path,
                       const std::string& program_path) {
  const TrialDraw draw = draw_trial(config, 0);
  Rng rng(derive_seed(draw.precoder_seed, 0));
  const bool shannon = mode == Mode::kShannonCentralized;
  if (!program_path.empty()) {
    Rng copy = rng;
    const PrecodingMatrix W0 = initialize(draw.H, config, copy);
    const double penalty =
        shannon ? 0.0 : dispersion_penalty(config.t, config.B, config.epsilon);
    const SurrogateState state = freeze_state(draw.H, W0, config.noise_power(), penalty);
    std::ofstream out(program_path);
    dump_program(build_subproblem(state, draw.H, config.p_max), out);
  }
  if (!trace_path.empty()) {
    const PfaResult r = run(draw.H, config, rng, shannon);
    std::ofstream out(trace_path);
    write_trace_csv(r.trace, out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfurllc: max-min short-packet rate precoding for cell-free massive MIMO"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string mode_name = "centralized";
  std::string format_name = "csv";
  std::string trace_path;
  std::string program_path;
  auto* run_cmd = app.add_subcommand("run", "Monte-Carlo run of one precoding mode");
  add_common(run_cmd, run_flags);
  run_cmd->add_option("--mode", mode_name, "centralized|decentralized|mmse|shannon-centralized");
  run_cmd->add_option("--format", format_name, "csv|json");
  run_cmd->add_option("--trace", trace_path, "write the path-following trace of trial 0 (CSV)");
  run_cmd->add_option("--dump-program", program_path,
                      "write the first main-step cone program of trial 0");

  CommonFlags t_flags;
  std::vector<double> t_ms{0.01, 0.02, 0.05, 0.1};
  auto* t_cmd = app.add_subcommand("sweep-t", "95%-likely rates versus transmission time");
  add_common(t_cmd, t_flags);
  t_cmd->add_option("--t-ms", t_ms, "transmission times in milliseconds");

  CommonFlags c_flags;
  std::vector<int> sizes{16, 8, 4, 1};
  auto* c_cmd = app.add_subcommand("sweep-clusters", "decentralized runs over cluster sizes");
  add_common(c_cmd, c_flags);
  c_cmd->add_option("--sizes", sizes, "APs per cluster");

  CommonFlags n_flags;
  std::vector<int> antennas{1, 2, 4};
  auto* n_cmd = app.add_subcommand("sweep-n", "path-following versus MMSE over antennas per AP");
  add_common(n_cmd, n_flags);
  n_cmd->add_option("--n", antennas, "antennas per AP");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const ScenarioConfig config = resolve(run_flags);
      const Mode mode = parse_mode(mode_name);
      const Format format = parse_format(format_name);
      if (!trace_path.empty() || !program_path.empty()) {
        write_diagnostics(config, mode, trace_path, program_path);
      }
      const RateReport report = run_experiment(config, mode, verbose_options());
      if (run_flags.out.empty()) {
        if (format == Format::kCsv) {
          write_csv(report, std::cout);
        } else {
          std::cout << report_to_json(report).dump(2) << '\n';
        }
      } else {
        emit(report, run_flags.out, format);
      }
      std::fprintf(stderr,
                   "%s: %zu/%d trials, mean URLLC %.4f, 95%%-likely URLLC %.4f, "
                   "mean Shannon %.4f, 95%%-likely Shannon %.4f bits/s/Hz, %.1f s\n",
                   report.mode.c_str(), report.samples.size(), report.trials_requested,
                   report.mean_urllc, report.likely_urllc, report.mean_shannon,
                   report.likely_shannon, report.wall_seconds);
    } else if (t_cmd->parsed()) {
      const ScenarioConfig config = resolve(t_flags);
      std::vector<double> t_values;
      for (double ms : t_ms) t_values.push_back(ms * 1e-3);
      const auto rows = sweep_t(config, t_values, verbose_options());
      with_output(t_flags.out, [&](std::ostream& out) {
        out << "t_ms,likely_urllc_bits,likely_shannon_bits,mean_urllc_bits,mean_shannon_bits\n";
        out.precision(10);
        for (const auto& r : rows) {
          out << r.t * 1e3 << ',' << r.likely_urllc << ',' << r.likely_shannon << ','
              << r.mean_urllc << ',' << r.mean_shannon << '\n';
        }
      });
    } else if (c_cmd->parsed()) {
      const ScenarioConfig config = resolve(c_flags);
      const auto rows = sweep_clusters(config, sizes, verbose_options());
      with_output(c_flags.out, [&](std::ostream& out) {
        out << "cluster_size,clusters,likely_urllc_bits,mean_urllc_bits,mean_iterations,"
               "flops_per_iteration,order_per_iteration\n";
        out.precision(10);
        for (const auto& r : rows) {
          out << r.cluster_size << ',' << r.clusters << ',' << r.likely_urllc << ','
              << r.mean_urllc << ',' << r.mean_iterations << ',' << r.flops_per_iteration << ','
              << r.order_per_iteration << '\n';
        }
      });
    } else if (n_cmd->parsed()) {
      const ScenarioConfig config = resolve(n_flags);
      const auto rows = sweep_n(config, antennas, verbose_options());
      with_output(n_flags.out, [&](std::ostream& out) {
        out << "N,pfa_likely_urllc_bits,pfa_mean_urllc_bits,mmse_likely_urllc_bits,"
               "mmse_mean_urllc_bits\n";
        out.precision(10);
        for (const auto& r : rows) {
          out << r.antennas << ',' << r.pfa_likely_urllc << ',' << r.pfa_mean_urllc << ','
              << r.mmse_likely_urllc << ',' << r.mmse_mean_urllc << '\n';
        }
      });
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ExperimentAborted& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
