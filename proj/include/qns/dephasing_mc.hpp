// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "qns/sequences.hpp"

namespace qns {

// Stationary Ornstein-Uhlenbeck noise: autocorrelation
// g(t) = variance * exp(-|t| / correlation_time).
struct OuProcess {
  double correlation_time = 1.0;
  double variance = 1.0;

  // Spectral density on the convention used by decay_exponent: with
  // chi = sum_n F(omega_n) S(omega_n) dOmega over the one-sided axis, the
  // survival probability of Gaussian dephasing is 1/2 + 1/2 exp(-chi) for
  // S(omega) = 4 * variance * t_c / (pi * (1 + omega^2 t_c^2)).
  double spectrum_at(double omega) const;
};

struct NoiseTraceConfig {
  OuProcess process;
  double dt = 1e-3;
  int n_traces = 1;
  std::uint64_t seed = 0;
};

// Piecewise-constant control sign function over [0, total_time]: starts at
// +1 and flips at each listed time.
struct ControlPattern {
  std::vector<double> flip_times;  // strictly increasing, inside (0, T)
  double total_time = 0.0;
};

ControlPattern free_evolution_pattern(double total_time);
ControlPattern cpmg_pattern(const CpmgSequence& seq);
ControlPattern rademacher_pattern(const RademacherSequence& seq, double tau);

struct McSurvival {
  double probability = 0.0;  // 1/2 + 1/2 <cos 2 phi>
  double std_error = 0.0;    // Monte Carlo standard error of the estimate
};

// Simulates n_traces realizations of the OU process, accumulates the phase
// phi = int f(t) V(t) dt per trace, and returns the empirical survival
// probability 1/2 + 1/2 <cos 2 phi>. Requires dt <= correlation_time / 10.
McSurvival monte_carlo_dephasing_oracle(const NoiseTraceConfig& config,
                                        const ControlPattern& pattern);

// chi = int_0^inf S_ou(omega) |f_hat(omega)|^2 domega evaluated by composite
// Simpson quadrature with the exact Fourier magnitude of the sign pattern.
double analytic_ou_chi(const OuProcess& process, const ControlPattern& pattern,
                       double omega_max = 0.0, int quad_points = 200001);

}  // namespace qns
