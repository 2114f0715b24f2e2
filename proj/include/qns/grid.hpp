// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qns {

// One-sided angular-frequency grid shared by spectra, filter rows and the
// measurement model.
//
// Two spacings are supported:
//  * General (default): n_points points spanning (0, omega_c] with spacing
//    omega_c / n_points. All points lie inside the physical band
//    omega <= omega_c <= pi/tau, so every grid index may carry spectral
//    weight.
//  * Circulant: spacing 2*pi/(M*tau) with M = n_points, i.e. the grid walks
//    the full discrete Fourier circle of the tau-sampled exponentials. This
//    makes the Toeplitz operator built from the grid exactly circulant, at
//    the price that indices above M/2 are the aliases of the negative
//    half-band under the even extension of the spectrum.
enum class GridMode { General, Circulant };

class FrequencyGrid {
 public:
  // omega_c <= 0 selects the default cutoff pi/tau.
  FrequencyGrid(int n_points, double tau, GridMode mode = GridMode::General,
                double omega_c = 0.0)
      : n_(n_points), tau_(tau), mode_(mode) {
    if (n_points < 1) throw std::invalid_argument("FrequencyGrid: n_points < 1");
    if (tau <= 0.0) throw std::invalid_argument("FrequencyGrid: tau <= 0");
    const double nyquist = std::numbers::pi / tau;
    omega_c_ = omega_c > 0.0 ? omega_c : nyquist;
    if (omega_c_ > nyquist * (1.0 + 1e-12))
      throw std::invalid_argument("FrequencyGrid: tau*omega_c > pi");
  }

  int n_points() const { return n_; }
  double tau() const { return tau_; }
  GridMode mode() const { return mode_; }
  double omega_c() const { return omega_c_; }

  double delta_omega() const {
    if (mode_ == GridMode::Circulant)
      return 2.0 * std::numbers::pi / (static_cast<double>(n_) * tau_);
    return omega_c_ / static_cast<double>(n_);
  }

  // Grid point i (0-based index, frequency index n = i+1).
  double omega(int i) const { return delta_omega() * static_cast<double>(i + 1); }

  Eigen::VectorXd omegas() const {
    Eigen::VectorXd w(n_);
    for (int i = 0; i < n_; ++i) w[i] = omega(i);
    return w;
  }

  bool in_band(int i) const { return omega(i) <= omega_c_ * (1.0 + 1e-12); }

  // Number of leading grid points inside the physical band.
  int band_points() const {
    int count = 0;
    while (count < n_ && in_band(count)) ++count;
    return count;
  }

  bool operator==(const FrequencyGrid& other) const {
    return n_ == other.n_ && tau_ == other.tau_ && mode_ == other.mode_ &&
           omega_c_ == other.omega_c_;
  }
  bool operator!=(const FrequencyGrid& other) const { return !(*this == other); }

 private:
  int n_;
  double tau_;
  GridMode mode_;
  double omega_c_;
};

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// Squared sinc window of the segment sampling, evaluated at omega.
inline double sinc2_window(double omega, double tau) {
  const double s = sinc(0.5 * omega * tau);
  return s * s;
}

}  // namespace qns
