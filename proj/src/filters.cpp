// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/filters.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qns/rng.hpp"

namespace qns {

double sign_filter_at(const std::vector<int>& signs, double tau, double omega) {
  std::complex<double> acc(0.0, 0.0);
  // Horner-style phase accumulation: e^{i omega m tau}, m = 1..M.
  const std::complex<double> step(std::cos(omega * tau), std::sin(omega * tau));
  std::complex<double> phase = step;
  for (int s : signs) {
    acc += static_cast<double>(s) * phase;
    phase *= step;
  }
  return tau * tau * sinc2_window(omega, tau) * std::norm(acc);
}

Eigen::VectorXd sign_filter_row(const std::vector<int>& signs,
                                const FrequencyGrid& grid) {
  Eigen::VectorXd row(grid.n_points());
  for (int i = 0; i < grid.n_points(); ++i)
    row[i] = sign_filter_at(signs, grid.tau(), grid.omega(i));
  return row;
}

Eigen::VectorXd rademacher_filter(const RademacherSequence& seq,
                                  const FrequencyGrid& grid) {
  return sign_filter_row(seq.signs, grid);
}

Eigen::VectorXd fourier_filter_ideal(int j, const FrequencyGrid& grid) {
  Eigen::VectorXd row(grid.n_points());
  for (int i = 0; i < grid.n_points(); ++i)
    row[i] = std::cos(static_cast<double>(j) * grid.omega(i) * grid.tau());
  return row;
}

FourierEnsembleRows fourier_ensemble_realizations(const FourierEnsemble& ens,
                                                  const FrequencyGrid& grid) {
  const int m = ens.m_segments;
  const int j = ens.j_index;
  if (m < 1) throw std::invalid_argument("fourier ensemble: m_segments < 1");
  if (j < 0 || j > m)
    throw std::invalid_argument("fourier ensemble: j outside [0, M]");
  if (ens.n_realizations < 1)
    throw std::invalid_argument("fourier ensemble: n_realizations < 1");

  FourierEnsembleRows out;
  out.realizations.reserve(static_cast<std::size_t>(ens.n_realizations));
  out.rows.resize(ens.n_realizations, grid.n_points());
  out.averaged_row = Eigen::VectorXd::Zero(grid.n_points());

  for (int r = 0; r < ens.n_realizations; ++r) {
    Rng rng(derive_seed(ens.seed, 0x466f7572ULL, static_cast<std::uint64_t>(r)));
    std::vector<int> signs(static_cast<std::size_t>(m));
    if (j == 0) {
      for (auto& s : signs) s = rng.normal() >= 0.0 ? +1 : -1;
    } else {
      Eigen::VectorXd xi(m + j);
      for (int i = 0; i < m + j; ++i) xi[i] = rng.normal();
      for (int i = 0; i < m; ++i) signs[static_cast<std::size_t>(i)] =
          (xi[i] + xi[i + j]) >= 0.0 ? +1 : -1;
    }
    Eigen::VectorXd row = sign_filter_row(signs, grid);
    out.rows.row(r) = row.transpose();
    out.averaged_row += row;
    out.realizations.push_back(std::move(signs));
  }
  out.averaged_row /= static_cast<double>(ens.n_realizations);
  return out;
}

Eigen::VectorXd fourier_ensemble_expected_row(int j, int m_segments,
                                              const FrequencyGrid& grid) {
  const double m = static_cast<double>(m_segments);
  const double tau = grid.tau();
  Eigen::VectorXd row(grid.n_points());
  const double lag_corr = j == 0 ? 0.0 : 1.0 / 3.0;  // (2/pi) asin(1/2)
  for (int i = 0; i < grid.n_points(); ++i) {
    const double w = grid.omega(i);
    const double cosine = std::cos(static_cast<double>(j) * w * tau);
    row[i] = tau * tau * sinc2_window(w, tau) *
             (m + 2.0 * lag_corr * (m - static_cast<double>(j)) * cosine);
  }
  return row;
}

std::vector<int> cpmg_sign_pattern(int n_pulses, int m_segments) {
  if (n_pulses < 1 || n_pulses >= m_segments)
    throw std::invalid_argument("cpmg_sign_pattern: need 1 <= n_pulses < M");
  std::vector<int> flip_after(static_cast<std::size_t>(n_pulses));
  for (int k = 0; k < n_pulses; ++k) {
    const double pos = (static_cast<double>(k) + 0.5) *
                       static_cast<double>(m_segments) /
                       static_cast<double>(n_pulses);
    int b = static_cast<int>(std::lround(pos));
    b = std::max(1, std::min(m_segments - 1, b));
    flip_after[static_cast<std::size_t>(k)] = b;
  }
  for (std::size_t k = 1; k < flip_after.size(); ++k)
    if (flip_after[k] <= flip_after[k - 1])
      throw std::invalid_argument("cpmg_sign_pattern: coincident flip boundaries");
  std::vector<int> signs(static_cast<std::size_t>(m_segments), +1);
  int sign = +1;
  std::size_t next = 0;
  for (int seg = 1; seg <= m_segments; ++seg) {
    if (next < flip_after.size() && seg == flip_after[next] + 1) {
      sign = -sign;
      ++next;
    }
    signs[static_cast<std::size_t>(seg - 1)] = sign;
  }
  return signs;
}

namespace {

int segments_for(const CpmgSequence& seq, const FrequencyGrid& grid) {
  const double ratio = seq.total_time / grid.tau();
  const int m = static_cast<int>(std::lround(ratio));
  if (m < 2 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio)
    throw std::invalid_argument("cpmg_filter: total_time is not a multiple of tau");
  return m;
}

}  // namespace

Eigen::VectorXd cpmg_filter(const CpmgSequence& seq, const FrequencyGrid& grid) {
  if (seq.n_pulses < 1) throw std::invalid_argument("cpmg_filter: n_pulses < 1");
  const int m = segments_for(seq, grid);
  return sign_filter_row(cpmg_sign_pattern(seq.n_pulses, m), grid);
}

Eigen::VectorXd cpmg_delta_row(const CpmgSequence& seq, const FrequencyGrid& grid) {
  const Eigen::VectorXd exact = cpmg_filter(seq, grid);
  const double peak_omega = std::numbers::pi *
                            static_cast<double>(seq.n_pulses) / seq.total_time;
  int bin = 0;
  double best = std::abs(grid.omega(0) - peak_omega);
  for (int i = 1; i < grid.n_points(); ++i) {
    const double d = std::abs(grid.omega(i) - peak_omega);
    if (d < best) {
      best = d;
      bin = i;
    }
  }
  Eigen::VectorXd row = Eigen::VectorXd::Zero(grid.n_points());
  row[bin] = exact.sum();  // same total response, concentrated in one bin
  return row;
}

}  // namespace qns
