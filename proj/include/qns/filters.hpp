// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

#include "qns/grid.hpp"
#include "qns/sequences.hpp"

namespace qns {

// Filter value of an arbitrary segment-sign pattern at a single frequency:
//   tau^2 * sinc^2(omega*tau/2) * |sum_m s_m exp(i*omega*m*tau)|^2.
double sign_filter_at(const std::vector<int>& signs, double tau, double omega);

// Row of the above over all grid points. Nonnegative everywhere.
Eigen::VectorXd sign_filter_row(const std::vector<int>& signs,
                                const FrequencyGrid& grid);

// Single-realization filter of a Rademacher sequence.
Eigen::VectorXd rademacher_filter(const RademacherSequence& seq,
                                  const FrequencyGrid& grid);

// Idealized Fourier-basis row cos(j * omega_n * tau), proportionality
// constant fixed to 1. May be negative: it is a basis function, not a
// physical single-shot filter.
Eigen::VectorXd fourier_filter_ideal(int j, const FrequencyGrid& grid);

struct FourierEnsembleRows {
  std::vector<std::vector<int>> realizations;  // N1 sign vectors
  Eigen::MatrixXd rows;                        // N1 x N single-realization rows
  Eigen::VectorXd averaged_row;                // mean over realizations
};

// Draws N1 sign sequences whose expected filter is affine in the ideal
// cosine row and returns their single-realization rows plus the average.
//
// Construction: per realization, U_m = sgn(xi_m + xi_{m+j}) with xi i.i.d.
// standard normal. The summed Gaussian has autocovariance supported only on
// lags {0, +-j}, so by the arcsine law the sign pattern satisfies
// E[U_m U_{m+d}] = (2/pi) asin(1/2) = 1/3 for |d| = j and 0 for every other
// nonzero lag. Hence
//   E[row](omega) = tau^2 sinc^2(omega tau/2) (M + (2/3)(M-j) cos(j omega tau)),
// an affine image of fourier_filter_ideal(j) under the known sinc^2 window.
// For j = 0 the pattern degenerates to an i.i.d. Rademacher ensemble whose
// expected row is the pure window background tau^2 sinc^2 * M.
FourierEnsembleRows fourier_ensemble_realizations(const FourierEnsemble& ens,
                                                  const FrequencyGrid& grid);

// Expected ensemble-averaged row of the construction above, in closed form.
Eigen::VectorXd fourier_ensemble_expected_row(int j, int m_segments,
                                              const FrequencyGrid& grid);

// Segment-sign pattern of n evenly spaced flips over M segments (CPMG).
// Requires 1 <= n < M.
std::vector<int> cpmg_sign_pattern(int n_pulses, int m_segments);

// Exact CPMG filter row: sign_filter_row of the alternating-block pattern.
// The sequence total time must be an integer multiple of the grid tau.
Eigen::VectorXd cpmg_filter(const CpmgSequence& seq, const FrequencyGrid& grid);

// Idealized delta-function stand-in for the CPMG row: all mass of the exact
// row concentrated in the grid bin nearest pi*n/T. Baseline use only.
Eigen::VectorXd cpmg_delta_row(const CpmgSequence& seq, const FrequencyGrid& grid);

}  // namespace qns
