// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qns/rng.hpp"

namespace qns {

Spectrum::Spectrum(FrequencyGrid g, Eigen::VectorXd v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.n_points())
    throw std::invalid_argument("Spectrum: value count differs from grid size");
  if ((values.array() < 0.0).any())
    throw std::invalid_argument("Spectrum: negative spectral density");
}

QdSurrogateParams QdSurrogateParams::defaults(double omega_c) {
  const double w = omega_c / std::numbers::pi;  // band scale
  QdSurrogateParams p;
  p.peak_centers = {0.45 * w, 0.95 * w, 1.45 * w};
  p.peak_widths = {0.018 * w, 0.022 * w, 0.028 * w};
  p.peak_heights = {1.0, 0.75, 0.55};
  p.background_amplitude = 0.30;
  p.background_decay = 0.55 * w;
  return p;
}

namespace {

// Distinct indices drawn uniformly without replacement from [0, limit).
std::vector<int> draw_distinct_indices(int count, int limit, Rng& rng) {
  std::vector<int> pool(limit);
  std::iota(pool.begin(), pool.end(), 0);
  // Partial Fisher-Yates.
  for (int i = 0; i < count; ++i) {
    const int j = rng.uniform_int(i, limit - 1);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

Spectrum make_sparse_spectrum_on(const FrequencyGrid& grid, int s,
                                 std::uint64_t seed, double norm) {
  const int band = grid.band_points();
  if (s < 1 || s > band)
    throw std::invalid_argument("make_sparse_spectrum: sparsity outside [1, band]");
  Rng rng(seed);
  const auto support = draw_distinct_indices(s, band, rng);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.n_points());
  // Magnitudes uniform in [0.5, 1.5): positive and bounded away from zero so
  // every support entry stays resolvable after normalization.
  for (int idx : support) v[idx] = 0.5 + rng.uniform01();
  v *= norm / v.norm();
  return Spectrum(grid, std::move(v));
}

Spectrum make_sparse_spectrum(int n_points, int s, std::uint64_t seed,
                              double norm) {
  return make_sparse_spectrum_on(FrequencyGrid(n_points, 1.0), s, seed, norm);
}

Spectrum make_piecewise_linear_spectrum_on(const FrequencyGrid& grid, int s_star,
                                           std::uint64_t seed) {
  const int n = grid.n_points();
  if (n < 3) throw std::invalid_argument("make_piecewise_linear_spectrum: N < 3");
  if (s_star < 1 || s_star > n - 2)
    throw std::invalid_argument(
        "make_piecewise_linear_spectrum: kink count outside [1, N-2]");
  Rng rng(seed);
  // Kink at grid index k (0-based, interior 1..N-2) shows up as a nonzero in
  // (D2 S)_{k-1}. Slope jumps are bounded away from zero so the kink count
  // survives normalization.
  const auto kinks = draw_distinct_indices(s_star, n - 2, rng);
  Eigen::VectorXd slope_jump = Eigen::VectorXd::Zero(n - 2);
  for (int k : kinks) {
    const double mag = 0.5 + rng.uniform01();
    slope_jump[k] = rng.bernoulli(0.5) ? mag : -mag;
  }
  Eigen::VectorXd v(n);
  double slope = 2.0 * rng.uniform01() - 1.0;
  v[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    v[i] = v[i - 1] + slope;
    if (i - 1 < n - 2) slope += slope_jump[i - 1];
  }
  v.array() -= v.minCoeff();  // nonnegative, keeps curvature intact
  v /= v.norm();
  return Spectrum(grid, std::move(v));
}

Spectrum make_piecewise_linear_spectrum(int n_points, int s_star,
                                        std::uint64_t seed) {
  return make_piecewise_linear_spectrum_on(FrequencyGrid(n_points, 1.0), s_star,
                                           seed);
}

Spectrum make_quantum_dot_surrogate(const QdSurrogateParams& params,
                                    const FrequencyGrid& grid) {
  const std::size_t peaks = params.peak_centers.size();
  if (params.peak_widths.size() != peaks || params.peak_heights.size() != peaks)
    throw std::invalid_argument("qd surrogate: peak parameter lists differ in length");
  if (peaks == 0 && params.background_amplitude == 0.0)
    throw std::invalid_argument("qd surrogate: no peaks and zero background");
  if (params.background_amplitude < 0.0 || params.background_decay <= 0.0)
    throw std::invalid_argument("qd surrogate: invalid background parameters");
  for (std::size_t i = 0; i < peaks; ++i) {
    if (params.peak_widths[i] <= 0.0 || params.peak_heights[i] <= 0.0)
      throw std::invalid_argument("qd surrogate: nonpositive peak width or height");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.n_points());
  for (int i = 0; i < grid.n_points(); ++i) {
    if (!grid.in_band(i)) continue;  // clipped beyond the cutoff
    const double w = grid.omega(i);
    double val = params.background_amplitude * std::exp(-w / params.background_decay);
    for (std::size_t p = 0; p < peaks; ++p) {
      const double hw = params.peak_widths[p];
      const double d = w - params.peak_centers[p];
      val += params.peak_heights[p] * hw * hw / (d * d + hw * hw);
    }
    v[i] = val;
  }
  const double peak = v.maxCoeff();
  if (peak <= 0.0)
    throw std::invalid_argument("qd surrogate: spectrum vanished on the grid");
  v /= peak;
  return Spectrum(grid, std::move(v));
}

Eigen::VectorXd second_difference(const Eigen::VectorXd& values) {
  const auto n = values.size();
  if (n < 3) throw std::invalid_argument("second_difference: input length < 3");
  Eigen::VectorXd out(n - 2);
  for (Eigen::Index i = 0; i + 2 < n; ++i)
    out[i] = values[i + 2] - 2.0 * values[i + 1] + values[i];
  return out;
}

Eigen::VectorXd integrate_curvature(const Eigen::VectorXd& delta,
                                    std::pair<double, double> boundary) {
  const auto m = delta.size();  // interior unknowns S_2..S_{N-1}
  const auto n = m + 2;
  Eigen::VectorXd s(n);
  s[0] = boundary.first;
  s[n - 1] = boundary.second;
  if (m == 0) return s;
  // Tridiagonal system: S_i - 2 S_{i+1} + S_{i+2} = delta_i with endpoints
  // moved to the right-hand side. Thomas algorithm.
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(m, -2.0);
  Eigen::VectorXd rhs = delta;
  rhs[0] -= boundary.first;
  rhs[m - 1] -= boundary.second;
  Eigen::VectorXd c_prime(m), d_prime(m);
  c_prime[0] = 1.0 / diag[0];
  d_prime[0] = rhs[0] / diag[0];
  for (Eigen::Index i = 1; i < m; ++i) {
    const double denom = diag[i] - c_prime[i - 1];
    c_prime[i] = 1.0 / denom;
    d_prime[i] = (rhs[i] - d_prime[i - 1]) / denom;
  }
  s[m] = d_prime[m - 1];
  for (Eigen::Index i = m - 2; i >= 0; --i)
    s[i + 1] = d_prime[i] - c_prime[i] * s[i + 2];
  return s;
}

double l2_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth,
                bool relative) {
  if (estimate.size() != truth.size())
    throw std::invalid_argument("l2_error: size mismatch");
  const double err = (estimate - truth).norm();
  if (!relative) return err;
  const double scale = truth.norm();
  if (scale == 0.0) throw std::invalid_argument("l2_error: zero truth norm");
  return err / scale;
}

double l2_error(const Spectrum& estimate, const Spectrum& truth, bool relative) {
  if (estimate.grid != truth.grid)
    throw std::invalid_argument("l2_error: grid mismatch");
  return l2_error(estimate.values, truth.values, relative);
}

}  // namespace qns
