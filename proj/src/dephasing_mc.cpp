// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/dephasing_mc.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "qns/filters.hpp"
#include "qns/rng.hpp"

namespace qns {

double OuProcess::spectrum_at(double omega) const {
  const double tc = correlation_time;
  return 4.0 * variance * tc / (std::numbers::pi * (1.0 + omega * omega * tc * tc));
}

ControlPattern free_evolution_pattern(double total_time) {
  return ControlPattern{{}, total_time};
}

ControlPattern cpmg_pattern(const CpmgSequence& seq) {
  if (seq.n_pulses < 1) throw std::invalid_argument("cpmg_pattern: n_pulses < 1");
  ControlPattern p;
  p.total_time = seq.total_time;
  p.flip_times.reserve(static_cast<std::size_t>(seq.n_pulses));
  for (int k = 0; k < seq.n_pulses; ++k)
    p.flip_times.push_back((static_cast<double>(k) + 0.5) * seq.total_time /
                           static_cast<double>(seq.n_pulses));
  return p;
}

ControlPattern rademacher_pattern(const RademacherSequence& seq, double tau) {
  ControlPattern p;
  p.total_time = tau * static_cast<double>(seq.m_segments);
  for (int b : pulse_times(seq)) p.flip_times.push_back(tau * static_cast<double>(b));
  return p;
}

namespace {

// Segment decomposition [t_i, t_{i+1}) with sign s_i.
struct Segments {
  std::vector<double> edges;
  std::vector<double> signs;
};

Segments segments_of(const ControlPattern& pattern) {
  Segments seg;
  seg.edges.push_back(0.0);
  double sign = 1.0;
  for (double t : pattern.flip_times) {
    if (t <= seg.edges.back() || t >= pattern.total_time)
      throw std::invalid_argument("ControlPattern: flips not increasing in (0, T)");
    seg.edges.push_back(t);
    seg.signs.push_back(sign);
    sign = -sign;
  }
  seg.edges.push_back(pattern.total_time);
  seg.signs.push_back(sign);
  return seg;
}

// f_hat(omega) = int_0^T f(t) e^{i omega t} dt, exact for the step function.
std::complex<double> pattern_fourier(const Segments& seg, double omega) {
  if (omega == 0.0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < seg.signs.size(); ++i)
      acc += seg.signs[i] * (seg.edges[i + 1] - seg.edges[i]);
    return {acc, 0.0};
  }
  const std::complex<double> iw(0.0, omega);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = 0; i < seg.signs.size(); ++i) {
    const std::complex<double> ea = std::exp(iw * seg.edges[i]);
    const std::complex<double> eb = std::exp(iw * seg.edges[i + 1]);
    acc += seg.signs[i] * (eb - ea) / iw;
  }
  return acc;
}

}  // namespace

McSurvival monte_carlo_dephasing_oracle(const NoiseTraceConfig& config,
                                        const ControlPattern& pattern) {
  const double tc = config.process.correlation_time;
  if (tc <= 0.0 || config.process.variance < 0.0)
    throw std::invalid_argument("monte_carlo_dephasing_oracle: invalid process");
  if (config.dt > tc / 10.0)
    throw std::invalid_argument("monte_carlo_dephasing_oracle: dt too coarse");
  if (config.n_traces < 1)
    throw std::invalid_argument("monte_carlo_dephasing_oracle: n_traces < 1");
  const Segments seg = segments_of(pattern);
  const double sigma = std::sqrt(config.process.variance);

  double sum = 0.0, sum_sq = 0.0;
  for (int trace = 0; trace < config.n_traces; ++trace) {
    Rng rng(derive_seed(config.seed, 0x6f754d63ULL, static_cast<std::uint64_t>(trace)));
    double v = sigma * rng.normal();  // stationary start
    double phi = 0.0;
    for (std::size_t i = 0; i < seg.signs.size(); ++i) {
      const double len = seg.edges[i + 1] - seg.edges[i];
      const int steps = std::max(1, static_cast<int>(std::ceil(len / config.dt)));
      const double h = len / static_cast<double>(steps);
      // Exact OU update over h; midpoint value approximates the integral to
      // O(h^2) inside each smooth segment.
      const double alpha_half = std::exp(-0.5 * h / tc);
      const double noise_half = sigma * std::sqrt(1.0 - alpha_half * alpha_half);
      for (int s = 0; s < steps; ++s) {
        const double v_mid = v * alpha_half + noise_half * rng.normal();
        phi += seg.signs[i] * v_mid * h;
        v = v_mid * alpha_half + noise_half * rng.normal();
      }
    }
    const double c = std::cos(2.0 * phi);
    sum += c;
    sum_sq += c * c;
  }
  const double n = static_cast<double>(config.n_traces);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  McSurvival out;
  out.probability = 0.5 + 0.5 * mean;
  out.std_error = 0.5 * std::sqrt(var / n);
  return out;
}

double analytic_ou_chi(const OuProcess& process, const ControlPattern& pattern,
                       double omega_max, int quad_points) {
  const Segments seg = segments_of(pattern);
  if (omega_max <= 0.0) {
    // The integrand decays like 1/omega^4; this cutoff keeps the tail far
    // below quadrature resolution for the trace lengths used here.
    omega_max = 200.0 / process.correlation_time +
                400.0 * std::numbers::pi / pattern.total_time;
  }
  if (quad_points % 2 == 0) ++quad_points;  // Simpson needs an odd count
  const double h = omega_max / static_cast<double>(quad_points - 1);
  auto integrand = [&](double w) {
    return process.spectrum_at(w) * std::norm(pattern_fourier(seg, w));
  };
  double acc = integrand(0.0) + integrand(omega_max);
  for (int i = 1; i < quad_points - 1; ++i)
    acc += integrand(h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace qns
