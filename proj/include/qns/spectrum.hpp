// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "qns/grid.hpp"

namespace qns {

// Nonnegative spectral density sampled on a FrequencyGrid.
struct Spectrum {
  FrequencyGrid grid;
  Eigen::VectorXd values;

  Spectrum(FrequencyGrid g, Eigen::VectorXd v);

  int size() const { return static_cast<int>(values.size()); }
};

// Parameters of the synthetic quantum-dot-like spectrum: a handful of narrow
// Lorentzian resonances on top of an exponentially decaying broadband
// background, normalized to unit peak intensity.
struct QdSurrogateParams {
  std::vector<double> peak_centers;
  std::vector<double> peak_widths;   // Lorentzian half-widths
  std::vector<double> peak_heights;  // positive
  double background_amplitude = 0.0;
  double background_decay = 1.0;     // positive decay scale

  // Three narrow resonances over a decaying background, placed relative to
  // the band edge omega_c.
  static QdSurrogateParams defaults(double omega_c = std::numbers::pi);
};

// s strictly positive entries at distinct uniformly drawn in-band grid
// indices, scaled to the requested L2 norm. Deterministic per seed.
Spectrum make_sparse_spectrum(int n_points, int s, std::uint64_t seed,
                              double norm = 1.0);
Spectrum make_sparse_spectrum_on(const FrequencyGrid& grid, int s,
                                 std::uint64_t seed, double norm = 1.0);

// Continuous nonnegative piecewise-linear spectrum whose second difference
// has exactly s_star nonzero entries; unit L2 norm. Deterministic per seed.
Spectrum make_piecewise_linear_spectrum(int n_points, int s_star,
                                        std::uint64_t seed);
Spectrum make_piecewise_linear_spectrum_on(const FrequencyGrid& grid, int s_star,
                                           std::uint64_t seed);

// Lorentzian peaks plus decaying background, clipped beyond omega_c and
// rescaled so the maximum value is exactly 1.
Spectrum make_quantum_dot_surrogate(const QdSurrogateParams& params,
                                    const FrequencyGrid& grid);

// (D2 x)_n = x_{n+2} - 2 x_{n+1} + x_n for n = 1..N-2. Requires N >= 3.
Eigen::VectorXd second_difference(const Eigen::VectorXd& values);

// Solves D2 S = delta for S with anchored endpoints S_1 = boundary.first and
// S_N = boundary.second, via the tridiagonal system (not cumulative sums).
Eigen::VectorXd integrate_curvature(const Eigen::VectorXd& delta,
                                    std::pair<double, double> boundary);

// Euclidean distance between spectra on the same grid; relative = divide by
// the truth norm.
double l2_error(const Spectrum& estimate, const Spectrum& truth,
                bool relative = false);
double l2_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth,
                bool relative = false);

}  // namespace qns
