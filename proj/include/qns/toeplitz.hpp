// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "qns/spectrum.hpp"

namespace qns {

// Hermitian Toeplitz operator B(S) with entries B_{m,m'} = shat_{m-m'}, where
// shat_j is the discrete Fourier coefficient of the windowed spectrum
// S(omega) sinc^2(omega tau / 2) over the circulant grid:
//   shat_j = sum_n S'_n exp(i omega_n j tau),   S'_n = S_n sinc^2(omega_n tau/2).
//
// On the circulant grid (omega_n = 2 pi n / (M tau), N = M) the exponentials
// are periodic in j with period M, so B is exactly circulant and its
// eigenvalues are M * S'_n, one per grid point. The integral form of shat_j
// equals delta_omega times this discrete sum; the single quadrature constant
// linking the quadratic measurement to decay_exponent is
//   kappa = 1 / (2 pi delta_omega),
// i.e. quadratic_measurement = kappa * decay_exponent(rademacher_filter(U), S).
//
// For a spectrum whose windowed values are even on the circle
// (S'_n = S'_{M-n}) all shat_j are real and B is real symmetric.
struct ToeplitzOperator {
  int m_dim = 0;
  double tau = 0.0;
  double delta_omega = 0.0;
  std::vector<std::complex<double>> first_row;  // shat_0 .. shat_{M-1}

  Eigen::MatrixXcd matrix() const;

  // Eigenvalues via the circulant identity (exact, no dense solve).
  Eigen::VectorXd circulant_eigenvalues() const;
};

// Requires the circulant grid with N = M unless allow_general is set, in
// which case the operator is Toeplitz but not circulant and the eigenvalue
// identity is only asymptotic.
ToeplitzOperator build_toeplitz(const Spectrum& spectrum, int m_dim,
                                bool allow_general = false);

// (tau^2 / (2 pi)) * U^T B U for a +-1 sign vector U.
double quadratic_measurement(const std::vector<int>& signs,
                             const ToeplitzOperator& op);

// Windowed spectrum values S'_n = S_n * sinc^2(omega_n tau / 2).
Eigen::VectorXd windowed_values(const Spectrum& spectrum);

}  // namespace qns
