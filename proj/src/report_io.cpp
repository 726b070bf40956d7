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

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "cfurllc/harness.hpp"

namespace cfurllc {

namespace {

nlohmann::json cdf_to_json(const std::vector<CdfPoint>& cdf) {
  auto out = nlohmann::json::array();
  for (const auto& p : cdf) out.push_back({p.value, p.probability});
  return out;
}

std::vector<CdfPoint> cdf_from_json(const nlohmann::json& j) {
  std::vector<CdfPoint> out;
  for (const auto& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw ConfigError("unknown format '" + name + "'");
}

void write_csv(const RateReport& report, std::ostream& out) {
  out << "trial,user,shannon_bits,urllc_bits\n";
  const auto precision = out.precision(17);
  for (const auto& s : report.samples) {
    for (std::size_t k = 0; k < s.urllc_bits.size(); ++k) {
      out << s.trial << ',' << k << ',' << s.shannon_bits[k] << ',' << s.urllc_bits[k] << '\n';
    }
  }
  out.precision(precision);
}

RateReport read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "trial,user,shannon_bits,urllc_bits") {
    throw std::runtime_error("not a rate CSV: bad header");
  }
  RateReport report;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string trial, user, shannon, urllc;
    if (!std::getline(fields, trial, ',') || !std::getline(fields, user, ',') ||
        !std::getline(fields, shannon, ',') || !std::getline(fields, urllc)) {
      throw std::runtime_error("malformed CSV row " + std::to_string(row));
    }
    const int t = std::stoi(trial);
    if (report.samples.empty() || report.samples.back().trial != t) {
      report.samples.push_back(TrialRates{t, {}, {}});
    }
    auto& s = report.samples.back();
    if (std::stoul(user) != s.urllc_bits.size()) {
      throw std::runtime_error("users out of order at CSV row " + std::to_string(row));
    }
    s.shannon_bits.push_back(std::stod(shannon));
    s.urllc_bits.push_back(std::stod(urllc));
  }
  aggregate(report);
  return report;
}

nlohmann::json report_to_json(const RateReport& r) {
  nlohmann::json j;
  j["mode"] = r.mode;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["trials_requested"] = r.trials_requested;
  j["failed_trials"] = r.failed_trials;
  j["wall_seconds"] = r.wall_seconds;
  j["mean_trial_seconds"] = r.mean_trial_seconds;
  j["flops"] = {{"aps", r.flops.aps},
                {"mmse_multiplications", r.flops.mmse_multiplications},
                {"pfa_order_per_iteration", r.flops.pfa_order_per_iteration},
                {"measured_iterations", r.flops.measured_iterations},
                {"measured_flops_per_iteration", r.flops.measured_flops_per_iteration}};
  auto samples = nlohmann::json::array();
  for (const auto& s : r.samples) {
    samples.push_back(
        {{"trial", s.trial}, {"shannon_bits", s.shannon_bits}, {"urllc_bits", s.urllc_bits}});
  }
  j["samples"] = samples;
  j["mean_urllc"] = r.mean_urllc;
  j["mean_shannon"] = r.mean_shannon;
  j["likely_urllc"] = r.likely_urllc;
  j["likely_shannon"] = r.likely_shannon;
  j["mean_min_urllc"] = r.mean_min_urllc;
  j["worst_urllc"] = r.worst_urllc;
  j["urllc_cdf"] = cdf_to_json(r.urllc_cdf);
  j["shannon_cdf"] = cdf_to_json(r.shannon_cdf);
  return j;
}

RateReport report_from_json(const nlohmann::json& j) {
  RateReport r;
  j.at("mode").get_to(r.mode);
  j.at("config_hash").get_to(r.config_hash);
  j.at("seed").get_to(r.seed);
  j.at("trials_requested").get_to(r.trials_requested);
  j.at("failed_trials").get_to(r.failed_trials);
  j.at("wall_seconds").get_to(r.wall_seconds);
  j.at("mean_trial_seconds").get_to(r.mean_trial_seconds);
  const auto& f = j.at("flops");
  f.at("aps").get_to(r.flops.aps);
  f.at("mmse_multiplications").get_to(r.flops.mmse_multiplications);
  f.at("pfa_order_per_iteration").get_to(r.flops.pfa_order_per_iteration);
  f.at("measured_iterations").get_to(r.flops.measured_iterations);
  f.at("measured_flops_per_iteration").get_to(r.flops.measured_flops_per_iteration);
  for (const auto& s : j.at("samples")) {
    TrialRates t;
    s.at("trial").get_to(t.trial);
    s.at("shannon_bits").get_to(t.shannon_bits);
    s.at("urllc_bits").get_to(t.urllc_bits);
    r.samples.push_back(std::move(t));
  }
  j.at("mean_urllc").get_to(r.mean_urllc);
  j.at("mean_shannon").get_to(r.mean_shannon);
  j.at("likely_urllc").get_to(r.likely_urllc);
  j.at("likely_shannon").get_to(r.likely_shannon);
  j.at("mean_min_urllc").get_to(r.mean_min_urllc);
  j.at("worst_urllc").get_to(r.worst_urllc);
  r.urllc_cdf = cdf_from_json(j.at("urllc_cdf"));
  r.shannon_cdf = cdf_from_json(j.at("shannon_cdf"));
  return r;
}

void emit(const RateReport& report, const std::string& path, Format format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (format == Format::kCsv) {
    write_csv(report, out);
  } else {
    out << report_to_json(report).dump(2) << '\n';
  }
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

RateReport read_report(const std::string& path, Format format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  if (format == Format::kCsv) return read_csv(in);
  return report_from_json(nlohmann::json::parse(in));
}

}  // namespace cfurllc
