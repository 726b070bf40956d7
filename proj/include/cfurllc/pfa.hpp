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
#include <vector>

#include "cfurllc/barrier_solver.hpp"
#include "cfurllc/config.hpp"
#include "cfurllc/scenario.hpp"
#include "cfurllc/types.hpp"

namespace cfurllc {

enum class PfaPhase { kInit, kMain };

struct PfaRecord {
  PfaPhase phase = PfaPhase::kMain;
  int iteration = 0;
  double objective = 0.0;    // bound value reported by the step, nats/s/Hz
  double min_urllc = 0.0;    // true rates at the new iterate, nats/s/Hz
  double min_shannon = 0.0;
  std::vector<double> urllc;
  std::vector<double> shannon;
  SolveStatus status = SolveStatus::kOptimal;
  int newton_iterations = 0;
  int halvings = 0;          // step shrinks needed to keep the next expansion valid
  double flops = 0.0;
  double seconds = 0.0;
};

struct PfaTrace {
  std::vector<PfaRecord> records;

  int iterations(PfaPhase phase) const;
  double flops(PfaPhase phase) const;
  /// Main-loop records only.
  std::vector<double> min_urllc_series() const;
};

struct PfaResult {
  PrecodingMatrix W;
  PfaTrace trace;
};

/// Complex Gaussian precoder with every AP block scaled to use exactly p_max.
PrecodingMatrix random_start(int ap_count, int antennas, int users, double p_max, Rng& rng);

/// Random start refined by the Shannon-only step until the minimum Shannon rate settles.
/// Throws InitializationFailed when no start gives every user a usable SINR.
PrecodingMatrix initialize(const ChannelRealization& H, const ScenarioConfig& config, Rng& rng,
                           PfaTrace* trace = nullptr);

/// Full path-following run. With shannon_only the dispersion penalty is dropped and the
/// loop maximizes the minimum Shannon rate instead.
PfaResult run(const ChannelRealization& H, const ScenarioConfig& config, Rng& rng,
              bool shannon_only = false);

/// Same loop from a given feasible start, skipping initialization.
PfaResult refine(const ChannelRealization& H, const PrecodingMatrix& start,
                 const ScenarioConfig& config, bool shannon_only = false);

/// CSV with one row per iteration:
/// phase,iteration,objective,min_urllc,min_shannon,status,newton,halvings,flops,seconds,
/// urllc_0..urllc_{K-1},shannon_0..shannon_{K-1}
void write_trace_csv(const PfaTrace& trace, std::ostream& out);

}  // namespace cfurllc
