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

#include "cfurllc/scenario.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace cfurllc {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CMatrix LargeScaleFading::correlation(int l, int k) const {
  if (correlated()) return R[static_cast<std::size_t>(l) * beta.cols() + k];
  return CMatrix::Identity(antennas_per_ap, antennas_per_ap) * beta(l, k);
}

NetworkGeometry build_geometry(const ScenarioConfig& config, Rng& rng) {
  NetworkGeometry g;
  g.width = config.area_width;
  g.height = config.area_height;
  const double cols = config.area_width / config.ap_spacing_x;
  const double rows = config.area_height / config.ap_spacing_y;
  g.grid_columns = static_cast<int>(std::lround(cols));
  g.grid_rows = static_cast<int>(std::lround(rows));
  if (std::abs(cols - g.grid_columns) > 1e-9 || std::abs(rows - g.grid_rows) > 1e-9 ||
      g.grid_columns * g.grid_rows != config.L) {
    throw ConfigError("AP grid of " + std::to_string(cols) + " x " + std::to_string(rows) +
                      " cells cannot host L = " + std::to_string(config.L) + " APs");
  }
  for (int c = 0; c < g.grid_columns; ++c) {
    for (int r = 0; r < g.grid_rows; ++r) {
      g.ap_positions.push_back({(c + 0.5) * config.ap_spacing_x, (r + 0.5) * config.ap_spacing_y});
    }
  }
  std::uniform_real_distribution<double> ux(0.0, config.area_width);
  std::uniform_real_distribution<double> uy(0.0, config.area_height);
  for (int k = 0; k < config.K; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    g.user_positions.push_back({x, y});
  }
  return g;
}

namespace {

// Signed per-axis displacement from p to q on the torus.
double wrapped_delta(double from, double to, double extent) {
  double d = std::fmod(to - from, extent);
  if (d > extent / 2) d -= extent;
  if (d < -extent / 2) d += extent;
  return d;
}

}  // namespace

double wrap_distance(const Point& p, const Point& q, const NetworkGeometry& geometry) {
  const double dx = std::abs(p.x - q.x);
  const double dy = std::abs(p.y - q.y);
  const double wx = std::min(dx, geometry.width - dx);
  const double wy = std::min(dy, geometry.height - dy);
  return std::hypot(wx, wy);
}

double pathloss_db(double d, const ScenarioConfig& config) {
  const double dist = std::max(d, config.min_distance);
  return config.pathloss_intercept_db - 10.0 * config.pathloss_exponent * std::log10(dist);
}

LargeScaleFading large_scale_fading(const NetworkGeometry& geometry, const ScenarioConfig& config,
                                    Rng& rng) {
  const int L = static_cast<int>(geometry.ap_positions.size());
  const int K = static_cast<int>(geometry.user_positions.size());
  LargeScaleFading f;
  f.antennas_per_ap = config.N;
  f.beta.resize(L, K);
  std::normal_distribution<double> shadow(0.0, config.shadowing_std_db);
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      double db = pathloss_db(wrap_distance(geometry.ap_positions[l], geometry.user_positions[k],
                                            geometry),
                              config);
      if (config.shadowing_std_db > 0) db += shadow(rng);
      f.beta(l, k) = std::pow(10.0, db / 10.0);
    }
  }
  if (config.correlation == CorrelationModel::kLocalScattering) {
    // Gaussian local-scattering model around the nominal AP->user azimuth, small-ASD form.
    const double asd = config.angular_spread_deg * std::numbers::pi / 180.0;
    const double spacing = config.antenna_spacing_wavelengths;
    f.R.reserve(static_cast<std::size_t>(L) * K);
    for (int l = 0; l < L; ++l) {
      for (int k = 0; k < K; ++k) {
        const Point& ap = geometry.ap_positions[l];
        const Point& ue = geometry.user_positions[k];
        const double angle = std::atan2(wrapped_delta(ap.y, ue.y, geometry.height),
                                        wrapped_delta(ap.x, ue.x, geometry.width));
        CMatrix R(config.N, config.N);
        for (int m = 0; m < config.N; ++m) {
          for (int n = 0; n < config.N; ++n) {
            const double dist = spacing * (m - n);
            const double phase = 2.0 * std::numbers::pi * dist * std::sin(angle);
            const double spread = 2.0 * std::numbers::pi * dist * std::cos(angle);
            R(m, n) = f.beta(l, k) * std::polar(std::exp(-asd * asd / 2.0 * spread * spread), phase);
          }
        }
        f.R.push_back(std::move(R));
      }
    }
  }
  return f;
}

ChannelRealization sample_channel(const LargeScaleFading& fading, Rng& rng) {
  const int L = static_cast<int>(fading.beta.rows());
  const int K = static_cast<int>(fading.beta.cols());
  const int N = fading.antennas_per_ap;
  ChannelRealization ch;
  ch.antennas_per_ap = N;
  ch.H.resize(static_cast<Eigen::Index>(L) * N, K);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

  std::vector<CMatrix> roots;
  if (fading.correlated()) {
    roots.reserve(fading.R.size());
    for (const auto& R : fading.R) {
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(R);
      const double scale = std::max(R.trace().real(), 1e-300);
      if (eig.eigenvalues().minCoeff() < -1e-9 * scale) {
        throw std::invalid_argument("spatial correlation matrix is not positive semidefinite");
      }
      const RVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      roots.push_back(eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint());
    }
  }

  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      CVector z(N);
      for (int n = 0; n < N; ++n) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        z(n) = cd(re, im);
      }
      auto block = ch.H.block(static_cast<Eigen::Index>(l) * N, k, N, 1);
      if (fading.correlated()) {
        block = roots[static_cast<std::size_t>(l) * K + k] * z;
      } else {
        block = std::sqrt(fading.beta(l, k)) * z;
      }
    }
  }
  return ch;
}

}  // namespace cfurllc
