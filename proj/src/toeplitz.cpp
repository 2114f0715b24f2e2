// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/toeplitz.hpp"

#include <cmath>
#include <stdexcept>

namespace qns {

Eigen::VectorXd windowed_values(const Spectrum& spectrum) {
  const auto& grid = spectrum.grid;
  Eigen::VectorXd out(grid.n_points());
  for (int i = 0; i < grid.n_points(); ++i)
    out[i] = spectrum.values[i] * sinc2_window(grid.omega(i), grid.tau());
  return out;
}

ToeplitzOperator build_toeplitz(const Spectrum& spectrum, int m_dim,
                                bool allow_general) {
  const auto& grid = spectrum.grid;
  const bool circulant =
      grid.mode() == GridMode::Circulant && grid.n_points() == m_dim;
  if (!circulant && !allow_general)
    throw std::invalid_argument(
        "build_toeplitz: spectrum is not on the circulant grid with N = M");
  ToeplitzOperator op;
  op.m_dim = m_dim;
  op.tau = grid.tau();
  op.delta_omega = grid.delta_omega();
  op.first_row.resize(static_cast<std::size_t>(m_dim));
  const Eigen::VectorXd sp = windowed_values(spectrum);
  for (int j = 0; j < m_dim; ++j) {
    std::complex<double> acc(0.0, 0.0);
    for (int n = 0; n < grid.n_points(); ++n) {
      const double phase = grid.omega(n) * static_cast<double>(j) * grid.tau();
      acc += sp[n] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    op.first_row[static_cast<std::size_t>(j)] = acc;
  }
  return op;
}

Eigen::MatrixXcd ToeplitzOperator::matrix() const {
  Eigen::MatrixXcd b(m_dim, m_dim);
  for (int r = 0; r < m_dim; ++r) {
    for (int c = 0; c < m_dim; ++c) {
      const int lag = r - c;
      const auto& coeff = first_row[static_cast<std::size_t>(std::abs(lag))];
      b(r, c) = lag >= 0 ? coeff : std::conj(coeff);
    }
  }
  return b;
}

Eigen::VectorXd ToeplitzOperator::circulant_eigenvalues() const {
  // lambda_k = sum_j shat_j e^{-i 2 pi j k / M}; real for Hermitian first row.
  Eigen::VectorXd eig(m_dim);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(m_dim);
  for (int k = 0; k < m_dim; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < m_dim; ++j) {
      const double phase = -step * static_cast<double>(j) * static_cast<double>(k);
      acc += first_row[static_cast<std::size_t>(j)] *
             std::complex<double>(std::cos(phase), std::sin(phase));
    }
    eig[k] = acc.real();
  }
  return eig;
}

double quadratic_measurement(const std::vector<int>& signs,
                             const ToeplitzOperator& op) {
  if (static_cast<int>(signs.size()) != op.m_dim)
    throw std::invalid_argument("quadratic_measurement: dimension mismatch");
  // U^T B U = sum_{lag} c_lag * Re(shat_lag) using the sign autocorrelation;
  // imaginary parts cancel in the symmetric sum.
  const int m = op.m_dim;
  double acc = 0.0;
  for (int lag = 0; lag < m; ++lag) {
    double corr = 0.0;
    for (int i = 0; i + lag < m; ++i)
      corr += static_cast<double>(signs[static_cast<std::size_t>(i)] *
                                  signs[static_cast<std::size_t>(i + lag)]);
    const double re = op.first_row[static_cast<std::size_t>(lag)].real();
    acc += (lag == 0 ? 1.0 : 2.0) * corr * re;
  }
  return op.tau * op.tau / (2.0 * std::numbers::pi) * acc;
}

}  // namespace qns
