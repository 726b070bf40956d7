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

#include "cfurllc/cone_program.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace cfurllc {

double AffineForm::eval(const RVector& y) const {
  double v = constant;
  for (const auto& t : terms) v += t.coeff * y(t.index);
  return v;
}

double ConeProgram::barrier_degree() const {
  return 2.0 * (ap_count + static_cast<double>(cones.size())) + static_cast<double>(linear.size());
}

namespace {

ConeProgram build(const SurrogateState& state, const ChannelRealization& H, double p_max,
                  bool init_problem) {
  const int K = H.user_count();
  const int N = H.antennas_per_ap;
  const int L = H.ap_count();
  ConeProgram P;
  P.ap_count = L;
  P.antennas = N;
  P.users = K;
  P.power_budget = 1.0;
  P.precoder_scale = std::sqrt(p_max);
  P.shannon_only = init_problem;
  P.state = state;
  P.channel = H;

  const int nz = 2 * K * K;
  const bool with_dispersion = !init_problem && state.penalty > 0.0;
  const bool with_trust_constraints = !init_problem;

  // Aux layout: z | per user [reciprocal, signal, received, (squared)] | tau
  int next = nz;
  P.user_blocks.resize(K);
  for (int k = 0; k < K; ++k) {
    UserBlock& b = P.user_blocks[k];
    b.z_offset = 2 * k * K;
    b.scale = state.users[k].beta;
    b.reciprocal = next++;
    b.signal = next++;
    b.received = next++;
    if (with_dispersion) b.squared = next++;
  }
  P.objective_index = next++;
  P.aux_size = next;
  P.group.assign(P.aux_size, -1);
  for (int k = 0; k < K; ++k) {
    const UserBlock& b = P.user_blocks[k];
    for (int j = 0; j < 2 * K; ++j) P.group[b.z_offset + j] = k;
    P.group[b.reciprocal] = k;
    P.group[b.signal] = k;
    P.group[b.received] = k;
    if (b.squared >= 0) P.group[b.squared] = k;
  }

  // Link rows: scaled z_ki = (h_k sqrt(p_max) / sqrt(beta_k))^H w_i.
  P.link = RMatrix::Zero(nz, P.precoder_size());
  for (int k = 0; k < K; ++k) {
    const double s = std::sqrt(p_max / state.users[k].beta);
    for (int i = 0; i < K; ++i) {
      const int row = P.user_blocks[k].z_offset + 2 * i;
      for (int l = 0; l < L; ++l) {
        for (int n = 0; n < N; ++n) {
          const cd h = H.H(static_cast<Eigen::Index>(l) * N + n, k) * s;
          const int col = ((l * K + i) * N + n) * 2;
          // conj(h) * (a + jb) = (Re h a + Im h b) + j(Re h b - Im h a)
          P.link(row, col) = h.real();
          P.link(row, col + 1) = h.imag();
          P.link(row + 1, col) = -h.imag();
          P.link(row + 1, col + 1) = h.real();
        }
      }
    }
  }

  const double a = init_problem ? 0.0 : state.penalty;
  const int tau = P.objective_index;
  for (int k = 0; k < K; ++k) {
    const UserSurrogate& u = state.users[k];
    const UserBlock& b = P.user_blocks[k];
    const double beta = u.beta;
    const double noise = state.sigma2 / beta;
    const double alpha = u.alpha / beta;
    const cd xn = u.signal / std::sqrt(beta);
    const double sig = std::norm(xn);
    const double b_hat = alpha / sig;
    const double c_hat = sig / alpha;
    const int xr = b.z_offset + 2 * k;
    const int xi = xr + 1;
    const std::string tag = "user" + std::to_string(k);

    // Trust region denominator 2 Re{conj(x_n) x} - |x_n|^2 and the reciprocal epigraph.
    AffineForm denom{{{xr, 2.0 * xn.real()}, {xi, 2.0 * xn.imag()}}, -sig};
    P.cones.push_back({AffineForm{{{b.reciprocal, 1.0}}, 0.0}, denom,
                       {AffineForm{{}, std::sqrt(sig)}}, tag + ".reciprocal"});
    P.cones.push_back({AffineForm{{{b.signal, 1.0}}, 0.0}, AffineForm{{}, 1.0},
                       {AffineForm{{{xr, 1.0}}, 0.0}, AffineForm{{{xi, 1.0}}, 0.0}},
                       tag + ".signal"});
    RotatedCone received{AffineForm{{{b.received, 1.0}}, -noise}, AffineForm{{}, 1.0}, {},
                         tag + ".received"};
    // Tangent minorant of interference + noise, in scaled units.
    AffineForm interference_lin{{}, noise};
    for (int i = 0; i < K; ++i) {
      if (i == k) continue;
      const int zr = b.z_offset + 2 * i;
      received.v.push_back(AffineForm{{{zr, 1.0}}, 0.0});
      received.v.push_back(AffineForm{{{zr + 1, 1.0}}, 0.0});
      const cd zn = state.gains(k, i) / std::sqrt(beta);
      interference_lin.terms.push_back({zr, 2.0 * zn.real()});
      interference_lin.terms.push_back({zr + 1, 2.0 * zn.imag()});
      interference_lin.constant -= std::norm(zn);
    }
    P.cones.push_back(std::move(received));
    if (b.squared >= 0) {
      P.cones.push_back({AffineForm{{{b.squared, 1.0}}, 0.0}, AffineForm{{}, 1.0},
                         {AffineForm{{{b.received, 1.0}}, 0.0}}, tag + ".squared"});
    }

    // tau <= f_lower - a * g_upper
    AffineForm epi{{{b.reciprocal, -1.0}, {b.signal, -b_hat}, {b.received, -c_hat}, {tau, -1.0}},
                   u.a_bar + c_hat * noise};
    if (a > 0.0) {
      epi.constant -= a * u.d;
      for (const auto& t : interference_lin.terms) {
        epi.terms.push_back({t.index, a * 4.0 * alpha * u.e * t.coeff});
      }
      epi.constant += a * 4.0 * alpha * u.e * interference_lin.constant;
      const double quad = 2.0 * alpha * alpha * u.e;
      epi.terms.push_back({b.signal, -a * quad});
      epi.terms.push_back({b.received, -a * quad});
      epi.terms.push_back({b.squared, -a * u.e});
    }
    P.linear.push_back({std::move(epi), tag + ".epigraph"});

    if (with_trust_constraints) {
      P.linear.push_back({AffineForm{{{b.signal, -1.0}, {b.received, -1.0}}, 2.0},
                          tag + ".received_power"});
      AffineForm lin{{{b.signal, -1.0}, {b.received, -1.0}}, 2.0 * interference_lin.constant / alpha};
      for (const auto& t : interference_lin.terms) lin.terms.push_back({t.index, 2.0 * t.coeff / alpha});
      P.linear.push_back({std::move(lin), tag + ".interference_linearization"});
    }
  }
  return P;
}

}  // namespace

ConeProgram build_subproblem(const SurrogateState& state, const ChannelRealization& H,
                             double p_max) {
  return build(state, H, p_max, false);
}

ConeProgram build_init_subproblem(const SurrogateState& state, const ChannelRealization& H,
                                  double p_max) {
  return build(state, H, p_max, true);
}

RVector to_program_vector(const ConeProgram& P, const PrecodingMatrix& W) {
  RVector w(P.precoder_size());
  const int N = P.antennas;
  const int K = P.users;
  for (int l = 0; l < P.ap_count; ++l) {
    for (int i = 0; i < K; ++i) {
      for (int n = 0; n < N; ++n) {
        const cd v = W.W(static_cast<Eigen::Index>(l) * N + n, i) / P.precoder_scale;
        const int col = ((l * K + i) * N + n) * 2;
        w(col) = v.real();
        w(col + 1) = v.imag();
      }
    }
  }
  return w;
}

PrecodingMatrix from_program_vector(const ConeProgram& P, const RVector& w) {
  PrecodingMatrix W;
  W.antennas_per_ap = P.antennas;
  const int N = P.antennas;
  const int K = P.users;
  W.W.resize(static_cast<Eigen::Index>(P.ap_count) * N, K);
  for (int l = 0; l < P.ap_count; ++l) {
    for (int i = 0; i < K; ++i) {
      for (int n = 0; n < N; ++n) {
        const int col = ((l * K + i) * N + n) * 2;
        W.W(static_cast<Eigen::Index>(l) * N + n, i) = cd(w(col), w(col + 1)) * P.precoder_scale;
      }
    }
  }
  return W;
}

std::optional<RVector> lift(const ConeProgram& P, const RVector& w) {
  const int block = P.ap_block();
  for (int l = 0; l < P.ap_count; ++l) {
    if (!(w.segment(l * block, block).squaredNorm() < P.power_budget)) return std::nullopt;
  }
  const int nz = static_cast<int>(P.link.rows());
  const int tau = P.objective_index;

  // Relative margins: scaled powers span many orders of magnitude at high SINR, and an
  // absolute offset would be amplified by coefficients of the order of the SINR.
  constexpr double kFloor = 1e-12;
  for (double margin = 1e-3; margin >= 1e-13; margin *= 0.1) {
    RVector y = RVector::Zero(P.aux_size);
    y.head(nz) = P.link * w;
    bool ok = true;
    for (int k = 0; k < P.users && ok; ++k) {
      const UserBlock& b = P.user_blocks[k];
      // Cone order per user: reciprocal, signal, received, [squared].
      const double sig = std::norm(P.state.users[k].signal) / b.scale;
      const cd xn = P.state.users[k].signal / std::sqrt(b.scale);
      const double denom = 2.0 * (xn.real() * y(b.z_offset + 2 * k) +
                                  xn.imag() * y(b.z_offset + 2 * k + 1)) - sig;
      if (!(denom > 0.0)) {
        ok = false;
        break;
      }
      y(b.reciprocal) = sig / denom * (1.0 + margin) + kFloor;
      const double x2 = std::pow(y(b.z_offset + 2 * k), 2) + std::pow(y(b.z_offset + 2 * k + 1), 2);
      y(b.signal) = x2 * (1.0 + margin) + kFloor;
      double interference = P.state.sigma2 / b.scale;
      for (int i = 0; i < P.users; ++i) {
        if (i == k) continue;
        interference += std::pow(y(b.z_offset + 2 * i), 2) + std::pow(y(b.z_offset + 2 * i + 1), 2);
      }
      y(b.received) = interference * (1.0 + margin);
      if (b.squared >= 0) y(b.squared) = y(b.received) * y(b.received) * (1.0 + margin);
    }
    if (!ok) return std::nullopt;

    // tau just below the tightest row that bounds it; other rows must hold on their own.
    double tau_max = std::numeric_limits<double>::infinity();
    for (const auto& row : P.linear) {
      double coeff = 0.0;
      for (const auto& t : row.form.terms) {
        if (t.index == tau) coeff += t.coeff;
      }
      const double rest = row.form.eval(y);
      if (coeff < 0.0) {
        tau_max = std::min(tau_max, rest / -coeff);
      } else if (!(rest > 0.0)) {
        ok = false;
      }
    }
    if (!ok || !std::isfinite(tau_max)) continue;
    y(tau) = tau_max - margin * (1.0 + std::abs(tau_max));
    return y;
  }
  return std::nullopt;
}

namespace {

void write_form(std::ostream& out, const AffineForm& f) {
  out << f.constant;
  for (const auto& t : f.terms) out << ' ' << t.index << ':' << t.coeff;
}

}  // namespace

void dump_program(const ConeProgram& P, std::ostream& out) {
  const auto precision = out.precision(17);
  out << "cfurllc-cone-program 1\n";
  out << "precoder " << P.ap_count << ' ' << P.ap_block() << ' ' << P.power_budget << ' '
      << P.precoder_scale << '\n';
  int nnz = 0;
  for (Eigen::Index r = 0; r < P.link.rows(); ++r) {
    for (Eigen::Index c = 0; c < P.link.cols(); ++c) nnz += P.link(r, c) != 0.0;
  }
  out << "link " << P.link.rows() << ' ' << P.link.cols() << ' ' << nnz << '\n';
  for (Eigen::Index r = 0; r < P.link.rows(); ++r) {
    for (Eigen::Index c = 0; c < P.link.cols(); ++c) {
      if (P.link(r, c) != 0.0) out << r << ' ' << c << ' ' << P.link(r, c) << '\n';
    }
  }
  out << "aux " << P.aux_size << " maximize " << P.objective_index << '\n';
  out << "groups";
  for (int g : P.group) out << ' ' << g;
  out << '\n';
  out << "linear " << P.linear.size() << '\n';
  for (const auto& row : P.linear) {
    out << row.label << " | ";
    write_form(out, row.form);
    out << '\n';
  }
  out << "cones " << P.cones.size() << '\n';
  for (const auto& cone : P.cones) {
    out << cone.label << " " << cone.v.size() << " | ";
    write_form(out, cone.p);
    out << " | ";
    write_form(out, cone.q);
    for (const auto& v : cone.v) {
      out << " | ";
      write_form(out, v);
    }
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace cfurllc
