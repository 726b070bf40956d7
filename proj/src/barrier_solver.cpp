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

#include "cfurllc/barrier_solver.hpp"

#include <cmath>
#include <limits>

namespace cfurllc {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kMaxIter:
      return "max-iter";
    case SolveStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sparse row of a constraint argument in block-local coordinates.
struct LocalRow {
  std::vector<std::pair<int, double>> terms;  // (local index, coeff)
  double constant = 0.0;
  AffineForm global;                          // same row in aux coordinates
};

struct LocalCone {
  int block = -1;  // group id, or -1 when it touches globals only
  LocalRow p, q;
  std::vector<LocalRow> v;
};

struct LocalLinear {
  int block = -1;
  LocalRow row;
};

class Solver {
 public:
  Solver(const ConeProgram& P, const BarrierOptions& opt) : P_(P), opt_(opt) {
    nw_ = P.precoder_size();
    ny_ = P.aux_size;
    nz_ = static_cast<int>(P.link.rows());
    block_ = P.ap_block();

    int groups = 0;
    for (int g : P.group) groups = std::max(groups, g + 1);
    group_vars_.resize(groups);
    local_.assign(ny_, -1);
    for (int i = 0; i < ny_; ++i) {
      if (P.group[i] >= 0) {
        local_[i] = static_cast<int>(group_vars_[P.group[i]].size());
        group_vars_[P.group[i]].push_back(i);
      } else {
        local_[i] = static_cast<int>(globals_.size());
        globals_.push_back(i);
      }
    }
    for (int i = 0; i < nz_; ++i) {
      if (P.group[i] < 0) throw std::logic_error("link variables must belong to a group");
    }
    for (const auto& c : P.cones) {
      LocalCone lc;
      lc.block = block_of(c.p);
      lc.block = merge(lc.block, block_of(c.q));
      for (const auto& v : c.v) lc.block = merge(lc.block, block_of(v));
      lc.p = localize(c.p, lc.block);
      lc.q = localize(c.q, lc.block);
      for (const auto& v : c.v) lc.v.push_back(localize(v, lc.block));
      cones_.push_back(std::move(lc));
    }
    for (const auto& r : P.linear) {
      LocalLinear ll;
      ll.block = block_of(r.form);
      ll.row = localize(r.form, ll.block);
      linear_.push_back(std::move(ll));
    }
    gram_.resize(P.ap_count);
    for (int l = 0; l < P.ap_count; ++l) {
      const auto U = P.link.middleCols(static_cast<Eigen::Index>(l) * block_, block_);
      gram_[l] = U * U.transpose();
    }
    degree_ = P.barrier_degree();
  }

  BarrierResult run(const RVector& w0, const RVector& y0) {
    BarrierResult res;
    res.w = w0;
    res.y = y0;
    if (!std::isfinite(barrier(w0, y0))) {
      res.status = SolveStatus::kInfeasible;
      res.objective = y0(P_.objective_index);
      return res;
    }
    // Default start: an initial gap of a tenth of the objective's magnitude. The warm start
    // is usually close to optimal, and a small t would pull tau far into the interior.
    double t = opt_.t0 > 0.0 ? opt_.t0
                             : degree_ / (0.1 * std::max(1.0, std::abs(y0(P_.objective_index))));
    res.status = SolveStatus::kMaxIter;
    while (true) {
      const bool centered = center(res, t);
      res.gap = degree_ / t;
      res.objective = res.y(P_.objective_index);
      ++res.outer_iterations;
      if (res.gap <= opt_.tol * std::max(1.0, std::abs(res.objective))) {
        res.status = SolveStatus::kOptimal;
        break;
      }
      if (!centered || res.newton_iterations >= opt_.max_newton) break;
      t *= opt_.mu;
    }
    return res;
  }

 private:
  static int merge(int a, int b) {
    if (a < 0) return b;
    if (b < 0 || a == b) return a;
    throw std::logic_error("constraint spans two user groups");
  }

  int block_of(const AffineForm& f) const {
    int g = -1;
    for (const auto& t : f.terms) g = merge(g, P_.group[t.index]);
    return g;
  }

  int block_size(int g) const { return g < 0 ? 0 : static_cast<int>(group_vars_[g].size()); }

  LocalRow localize(const AffineForm& f, int g) const {
    LocalRow r;
    r.constant = f.constant;
    r.global = f;
    const int offset = block_size(g);
    for (const auto& t : f.terms) {
      const int li = P_.group[t.index] >= 0 ? local_[t.index] : offset + local_[t.index];
      r.terms.emplace_back(li, t.coeff);
    }
    return r;
  }

  // Barrier value (without the objective term); +inf outside the interior.
  double barrier(const RVector& w, const RVector& y) const {
    double f = 0.0;
    for (int l = 0; l < P_.ap_count; ++l) {
      const double c = P_.power_budget - w.segment(l * block_, block_).squaredNorm();
      if (!(c > 0.0)) return kInf;
      f -= std::log(c);
    }
    for (const auto& c : P_.cones) {
      const double p = c.p.eval(y);
      const double q = c.q.eval(y);
      if (!(p > 0.0) || !(q > 0.0)) return kInf;
      double vv = 0.0;
      for (const auto& v : c.v) vv += std::pow(v.eval(y), 2);
      const double s = p * q - vv;
      if (!(s > 0.0)) return kInf;
      f -= std::log(s);
    }
    for (const auto& r : P_.linear) {
      const double s = r.form.eval(y);
      if (!(s > 0.0)) return kInf;
      f -= std::log(s);
    }
    return f;
  }

  double objective(double t, const RVector& w, const RVector& y) const {
    const double b = barrier(w, y);
    if (!std::isfinite(b)) return kInf;
    return -t * y(P_.objective_index) + b;
  }

  // Block-local dense accumulators: per group (n_g + n_G)^2, globals-only into D.
  struct Assembly {
    std::vector<RMatrix> blocks;
    RMatrix D;
    RVector gy;
    RVector gw;
    std::vector<double> power_slack;
  };

  void add_row(RVector& grad_local, const LocalRow& r, double weight) const {
    for (const auto& [i, c] : r.terms) grad_local(i) += weight * c;
  }

  // M += s * a b^T + s * b a^T for sparse rows a, b.
  static void add_sym_outer(RMatrix& M, const LocalRow& a, const LocalRow& b, double s) {
    for (const auto& [i, ci] : a.terms) {
      for (const auto& [j, cj] : b.terms) {
        M(i, j) += s * ci * cj;
        M(j, i) += s * ci * cj;
      }
    }
  }

  RMatrix& target(Assembly& A, int g) const { return g < 0 ? A.D : A.blocks[g]; }

  void scatter_gradient(Assembly& A, int g, const RVector& local) const {
    const int nb = block_size(g);
    for (int i = 0; i < nb; ++i) A.gy(group_vars_[g][i]) += local(i);
    for (std::size_t j = 0; j < globals_.size(); ++j) A.gy(globals_[j]) += local(nb + j);
  }

  Assembly assemble(double t, const RVector& w, const RVector& y) const {
    Assembly A;
    const int ng = static_cast<int>(globals_.size());
    A.blocks.resize(group_vars_.size());
    for (std::size_t g = 0; g < group_vars_.size(); ++g) {
      const int n = block_size(static_cast<int>(g)) + ng;
      A.blocks[g] = RMatrix::Zero(n, n);
    }
    A.D = RMatrix::Zero(ng, ng);
    A.gy = RVector::Zero(ny_);
    A.gy(P_.objective_index) = -t;
    A.gw.resize(nw_);
    A.power_slack.resize(P_.ap_count);
    for (int l = 0; l < P_.ap_count; ++l) {
      const auto wl = w.segment(l * block_, block_);
      const double c = P_.power_budget - wl.squaredNorm();
      A.power_slack[l] = c;
      A.gw.segment(l * block_, block_) = 2.0 * wl / c;
    }

    for (std::size_t ci = 0; ci < cones_.size(); ++ci) {
      const LocalCone& c = cones_[ci];
      const int n = block_size(c.block) + ng;
      const double p = c.p.global.eval(y);
      const double q = c.q.global.eval(y);
      std::vector<double> v(c.v.size());
      double vv = 0.0;
      for (std::size_t j = 0; j < c.v.size(); ++j) {
        v[j] = c.v[j].global.eval(y);
        vv += v[j] * v[j];
      }
      const double s = p * q - vv;
      // u = grad_args(s) / s mapped through the rows
      RVector u = RVector::Zero(n);
      add_row(u, c.p, q / s);
      add_row(u, c.q, p / s);
      for (std::size_t j = 0; j < c.v.size(); ++j) add_row(u, c.v[j], -2.0 * v[j] / s);
      RMatrix local = u * u.transpose();
      add_sym_outer(local, c.p, c.q, -1.0 / s);
      for (const auto& vr : c.v) add_sym_outer(local, vr, vr, 1.0 / s);
      if (c.block < 0) {
        A.D += local;
        for (int j = 0; j < ng; ++j) A.gy(globals_[j]) -= u(j);
      } else {
        A.blocks[c.block] += local;
        scatter_gradient(A, c.block, -u);
      }
    }
    for (const auto& r : linear_) {
      const int n = block_size(r.block) + ng;
      const double s = r.row.global.eval(y);
      RVector u = RVector::Zero(n);
      add_row(u, r.row, 1.0 / s);
      if (r.block < 0) {
        A.D += u * u.transpose();
        for (int j = 0; j < ng; ++j) A.gy(globals_[j]) -= u(j);
      } else {
        A.blocks[r.block] += u * u.transpose();
        scatter_gradient(A, r.block, -u);
      }
    }
    return A;
  }

  template <typename Matrix>
  static bool factor(Eigen::LLT<RMatrix>& llt, Matrix M) {
    llt.compute(M);
    if (llt.info() == Eigen::Success) return true;
    const double shift = 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    M.diagonal().array() += shift;
    llt.compute(M);
    return llt.info() == Eigen::Success;
  }

  // Factorization of the bordered block-diagonal aux Hessian.
  struct AuxFactor {
    std::vector<Eigen::LLT<RMatrix>> blocks;
    std::vector<RMatrix> coupling;   // B_g^{-1} C_g
    std::vector<RMatrix> C;
    Eigen::LLT<RMatrix> schur;
  };

  bool factor_aux(const Assembly& A, AuxFactor& F, double& flops) const {
    const int ng = static_cast<int>(globals_.size());
    const std::size_t G = group_vars_.size();
    F.blocks.resize(G);
    F.coupling.resize(G);
    F.C.resize(G);
    RMatrix S = A.D;
    for (std::size_t g = 0; g < G; ++g) {
      const int nb = block_size(static_cast<int>(g));
      S += A.blocks[g].bottomRightCorner(ng, ng);
      if (!factor(F.blocks[g], RMatrix(A.blocks[g].topLeftCorner(nb, nb)))) return false;
      F.C[g] = A.blocks[g].topRightCorner(nb, ng);
      F.coupling[g] = F.blocks[g].solve(F.C[g]);
      S -= F.C[g].transpose() * F.coupling[g];
      flops += std::pow(nb, 3) / 3.0 + 2.0 * nb * nb * ng;
    }
    if (ng > 0 && !factor(F.schur, S)) return false;
    return true;
  }

  RVector apply_inverse(const AuxFactor& F, const RVector& r) const {
    const int ng = static_cast<int>(globals_.size());
    const std::size_t G = group_vars_.size();
    RVector x = RVector::Zero(ny_);
    std::vector<RVector> local(G);
    RVector rg(ng);
    for (int j = 0; j < ng; ++j) rg(j) = r(globals_[j]);
    for (std::size_t g = 0; g < G; ++g) {
      const auto& vars = group_vars_[g];
      RVector rl(vars.size());
      for (std::size_t i = 0; i < vars.size(); ++i) rl(i) = r(vars[i]);
      local[g] = F.blocks[g].solve(rl);
      if (ng > 0) rg -= F.C[g].transpose() * local[g];
    }
    RVector xg = ng > 0 ? RVector(F.schur.solve(rg)) : RVector();
    for (int j = 0; j < ng; ++j) x(globals_[j]) = xg(j);
    for (std::size_t g = 0; g < G; ++g) {
      const auto& vars = group_vars_[g];
      RVector xl = local[g];
      if (ng > 0) xl -= F.coupling[g] * xg;
      for (std::size_t i = 0; i < vars.size(); ++i) x(vars[i]) = xl(i);
    }
    return x;
  }

  // (H_w)^{-1} r for the power-ball Hessians 2I/c + 4 w w^T / c^2.
  RVector apply_power_inverse(const Assembly& A, const RVector& w, const RVector& r) const {
    RVector x(nw_);
    for (int l = 0; l < P_.ap_count; ++l) {
      const auto wl = w.segment(l * block_, block_);
      const auto rl = r.segment(l * block_, block_);
      const double c = A.power_slack[l];
      const double denom = 1.0 + 2.0 * wl.squaredNorm() / c;
      x.segment(l * block_, block_) = 0.5 * c * rl - wl * (wl.dot(rl) / denom);
    }
    return x;
  }

  // Returns false when the Newton system cannot be solved.
  bool newton_direction(double t, const RVector& w, const RVector& y, RVector& dw, RVector& dy,
                        double& lambda2, double& flops) const {
    const Assembly A = assemble(t, w, y);
    AuxFactor F;
    if (!factor_aux(A, F, flops)) return false;

    // P_zz: z-part of the inverse aux Hessian (z sits in the groups).
    RMatrix S = RMatrix::Zero(nz_, nz_);
    const int ng = static_cast<int>(globals_.size());
    RMatrix Y = RMatrix::Zero(nz_, ng);
    for (std::size_t g = 0; g < group_vars_.size(); ++g) {
      const auto& vars = group_vars_[g];
      const int nb = static_cast<int>(vars.size());
      const RMatrix inv = F.blocks[g].solve(RMatrix::Identity(nb, nb));
      flops += std::pow(nb, 3);
      for (int i = 0; i < nb; ++i) {
        if (vars[i] >= nz_) continue;
        for (int j = 0; j < nb; ++j) {
          if (vars[j] < nz_) S(vars[i], vars[j]) = inv(i, j);
        }
        if (ng > 0) Y.row(vars[i]) = F.coupling[g].row(i);
      }
    }
    if (ng > 0) S += Y * F.schur.solve(Y.transpose());

    for (int l = 0; l < P_.ap_count; ++l) {
      const auto wl = w.segment(l * block_, block_);
      const double c = A.power_slack[l];
      const RVector rho = P_.link.middleCols(static_cast<Eigen::Index>(l) * block_, block_) * wl;
      S += 0.5 * c * gram_[l];
      S -= rho * rho.transpose() / (1.0 + 2.0 * wl.squaredNorm() / c);
    }
    flops += static_cast<double>(P_.ap_count) * (3.0 * nz_ * nz_ + 2.0 * nz_ * block_);

    Eigen::LLT<RMatrix> llt;
    if (!factor(llt, S)) return false;
    flops += std::pow(nz_, 3) / 3.0;

    const RVector Pg = apply_inverse(F, A.gy);
    const RVector Hg = apply_power_inverse(A, w, A.gw);
    const RVector rhs = Pg.head(nz_) - P_.link * Hg;
    const RVector nu = llt.solve(rhs);
    flops += 4.0 * nz_ * nw_ + 2.0 * nz_ * nz_;

    dw = -apply_power_inverse(A, w, A.gw + P_.link.transpose() * nu);
    RVector shifted = A.gy;
    shifted.head(nz_) -= nu;
    dy = -apply_inverse(F, shifted);
    lambda2 = -(A.gw.dot(dw) + A.gy.dot(dy));
    return std::isfinite(lambda2) && dw.allFinite() && dy.allFinite();
  }

  // Newton iterations at fixed t; false when progress stalled.
  bool center(BarrierResult& res, double t) const {
    double f = objective(t, res.w, res.y);
    while (res.newton_iterations < opt_.max_newton) {
      RVector dw, dy;
      double lambda2 = 0.0;
      if (!newton_direction(t, res.w, res.y, dw, dy, lambda2, res.flops)) return false;
      ++res.newton_iterations;
      res.newton_decrement = lambda2 / 2.0;
      if (lambda2 / 2.0 <= opt_.centering_tol) return true;
      double step = 1.0;
      bool moved = false;
      while (step > 1e-14) {
        const RVector wn = res.w + step * dw;
        const RVector yn = res.y + step * dy;
        const double fn = objective(t, wn, yn);
        if (std::isfinite(fn) && fn <= f - 0.01 * step * lambda2) {
          res.w = wn;
          res.y = yn;
          f = fn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) {
        // Round-off floor: the decrement is as small as the objective can resolve.
        return lambda2 / 2.0 <= 1e-6;
      }
    }
    return false;
  }

  const ConeProgram& P_;
  BarrierOptions opt_;
  int nw_ = 0, ny_ = 0, nz_ = 0, block_ = 0;
  std::vector<std::vector<int>> group_vars_;
  std::vector<int> globals_;
  std::vector<int> local_;
  std::vector<LocalCone> cones_;
  std::vector<LocalLinear> linear_;
  std::vector<RMatrix> gram_;
  double degree_ = 0.0;
};

}  // namespace

BarrierResult solve_barrier(const ConeProgram& program, const RVector& w0, const RVector& y0,
                            const BarrierOptions& options) {
  Solver solver(program, options);
  return solver.run(w0, y0);
}

}  // namespace cfurllc
