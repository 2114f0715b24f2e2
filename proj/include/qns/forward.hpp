// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qns/filters.hpp"
#include "qns/grid.hpp"
#include "qns/sequences.hpp"
#include "qns/spectrum.hpp"

namespace qns {

using SequenceSpec = std::variant<RademacherSequence, FourierEnsemble, CpmgSequence>;

// Descriptor of one measurement row, sufficient to regenerate it.
struct RowMeta {
  std::string type;  // "rademacher" | "fourier_ensemble" | "cpmg"
  int m_segments = 0;
  double p = 0.5;          // rademacher bias
  int j_index = 0;         // fourier ensemble
  int n_realizations = 0;  // fourier ensemble
  int n_pulses = 0;        // cpmg
  double total_time = 0.0; // cpmg
  std::uint64_t seed = 0;
};

// K filter rows on a common grid plus the quadrature weight that turns
// row-times-spectrum sums into decay exponents.
struct MeasurementMatrix {
  Eigen::MatrixXd rows;  // K x N
  std::vector<RowMeta> row_meta;
  double delta_omega = 0.0;

  int k() const { return static_cast<int>(rows.rows()); }
};

// Measured decay exponents with shot metadata. chi holds the values fed to
// reconstruction (noisy when shots are enabled); chi_ideal the noiseless ones.
struct MeasurementRecord {
  Eigen::VectorXd chi;
  Eigen::VectorXd chi_ideal;
  Eigen::VectorXd chi_sigma;   // delta-method uncertainty (0 when noiseless)
  std::vector<bool> clipped;   // inversion hit the probability floor
  int shots = 0;               // N2 per single measurement, 0 = noiseless
  std::uint64_t seed = 0;
};

// chi = sum_n row_n * S_n * delta_omega.
double decay_exponent(const Eigen::VectorXd& row, const Spectrum& spectrum);

// P = 1/2 + 1/2 exp(-chi); requires chi >= 0.
double survival_probability(double chi);

// Binomial(N2, P)/N2 drawn deterministically per seed.
double sample_shots(double probability, int n2, std::uint64_t seed);

struct ChiEstimate {
  double chi = 0.0;
  bool clipped = false;
};

// chi = -log(2 P_hat - 1) with P_hat floored at 1/2 + 1/(2*N2); n2 = 0 means
// a noiseless probability (no floor, but P_hat must exceed 1/2).
ChiEstimate invert_probability(double p_hat, int n2);

// Delta-method standard deviation of the chi estimate at observed P_hat.
double chi_sigma_delta_method(double p_hat, int n2);

// Builds the measurement matrix and record for a batch of sequences sharing
// the grid. shots == nullopt disables shot noise (chi = F S dOmega exactly).
// For Fourier ensembles the row is the ensemble-averaged filter and chi the
// average of the single-realization estimates.
std::pair<MeasurementMatrix, MeasurementRecord> assemble_measurements(
    const std::vector<SequenceSpec>& sequences, const Spectrum& spectrum,
    std::optional<int> shots, std::uint64_t seed);

}  // namespace qns
