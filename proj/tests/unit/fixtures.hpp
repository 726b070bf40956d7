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

// Fixed two-user instance with reference values from tests/oracles/oracle.py
// (50-digit scalar arithmetic, independent of the library).

#include "cfurllc/types.hpp"

namespace cfurllc::testing {

inline ChannelRealization fixed_channel() {
  ChannelRealization H;
  H.antennas_per_ap = 1;
  H.H.resize(2, 2);
  H.H << cd(0.8, -0.3), cd(0.2, 0.5), cd(-0.4, 0.6), cd(1.1, 0.1);
  return H;
}

inline PrecodingMatrix fixed_precoder() {
  PrecodingMatrix W;
  W.antennas_per_ap = 1;
  W.W.resize(2, 2);
  W.W << cd(0.5, 0.1), cd(-0.2, 0.3), cd(0.1, -0.4), cd(0.6, 0.2);
  return W;
}

inline PrecodingMatrix fixed_candidate() {
  PrecodingMatrix W;
  W.antennas_per_ap = 1;
  W.W.resize(2, 2);
  W.W << cd(0.55, 0.05), cd(-0.15, 0.25), cd(0.05, -0.35), cd(0.62, 0.18);
  return W;
}

inline constexpr double kFixedSigma2 = 0.5;

struct FixedUser {
  double sinr, alpha, beta, a_bar, b_bar, c_bar, d, e;
  double candidate_sinr, candidate_f_lower, candidate_g_upper;
};

inline constexpr FixedUser kFixedUsers[2] = {
    {0.16607523066004260564, 0.70449999999999999889, 0.82150000000000001438,
     2.0525631249091036444, 7.3297230935697144925, 0.20216096245896847563,
     1.2292693130644851369, 0.97209201204546709978, 0.19727026817258027747,
     0.078415001987738290981, 0.56062688586749156765},
    {0.71873763355757814858, 1.0108000000000000883, 1.7373000000000001444,
     2.3347353030775264688, 0.80085666626615904517, 0.41370956861657634769,
     1.02142522887104144, 0.61476728537135544057, 0.7346372173548082993,
     0.54372470685247959981, 0.82161972393598710049},
};

inline constexpr double kQInverse1e5 = 4.2648907939228246285;
inline constexpr double kPenaltyReference = 0.60314664028058154099;  // t = 0.05 ms, B = 1 MHz
inline constexpr double kUrllcAtUnitSinr = 0.17080686786972711301;

}  // namespace cfurllc::testing
