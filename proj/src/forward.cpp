// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/forward.hpp"

#include <cmath>
#include <stdexcept>

#include "qns/rng.hpp"

namespace qns {

double decay_exponent(const Eigen::VectorXd& row, const Spectrum& spectrum) {
  if (row.size() != spectrum.values.size())
    throw std::invalid_argument("decay_exponent: row/spectrum size mismatch");
  return row.dot(spectrum.values) * spectrum.grid.delta_omega();
}

double survival_probability(double chi) {
  if (chi < 0.0)
    throw std::invalid_argument("survival_probability: negative decay exponent");
  return 0.5 + 0.5 * std::exp(-chi);
}

double sample_shots(double probability, int n2, std::uint64_t seed) {
  if (probability < 0.0 || probability > 1.0)
    throw std::invalid_argument("sample_shots: probability outside [0, 1]");
  if (n2 < 1) throw std::invalid_argument("sample_shots: n2 < 1");
  Rng rng(seed);
  int successes = 0;
  for (int i = 0; i < n2; ++i)
    if (rng.bernoulli(probability)) ++successes;
  return static_cast<double>(successes) / static_cast<double>(n2);
}

ChiEstimate invert_probability(double p_hat, int n2) {
  ChiEstimate est;
  if (n2 > 0) {
    const double floor = 0.5 + 0.5 / static_cast<double>(n2);
    if (p_hat < floor) {
      p_hat = floor;
      est.clipped = true;
    }
  } else if (p_hat <= 0.5) {
    throw std::invalid_argument("invert_probability: P <= 1/2 without shot count");
  }
  if (p_hat > 1.0) p_hat = 1.0;
  est.chi = -std::log(2.0 * p_hat - 1.0);
  if (est.chi < 0.0) est.chi = 0.0;  // guard round-off at p_hat = 1
  return est;
}

double chi_sigma_delta_method(double p_hat, int n2) {
  if (n2 < 1) return 0.0;
  const double floor = 0.5 + 0.5 / static_cast<double>(n2);
  if (p_hat < floor) p_hat = floor;
  if (p_hat > 1.0 - 1e-12) p_hat = 1.0 - 1e-12;
  const double sigma_p = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n2));
  return 2.0 * sigma_p / (2.0 * p_hat - 1.0);
}

namespace {

struct RowResult {
  Eigen::VectorXd row;
  RowMeta meta;
  double chi_ideal = 0.0;
  double chi = 0.0;
  double sigma = 0.0;
  bool clipped = false;
};

double measure_chi(double chi_true, int n2, std::uint64_t seed, double* sigma,
                   bool* clipped) {
  const double p = survival_probability(chi_true);
  const double p_hat = sample_shots(p, n2, seed);
  const ChiEstimate est = invert_probability(p_hat, n2);
  *sigma = chi_sigma_delta_method(p_hat, n2);
  *clipped = est.clipped;
  return est.chi;
}

RowResult assemble_one(const SequenceSpec& spec, const Spectrum& spectrum,
                       std::optional<int> shots, std::uint64_t row_seed) {
  RowResult out;
  const FrequencyGrid& grid = spectrum.grid;
  if (const auto* rad = std::get_if<RademacherSequence>(&spec)) {
    out.row = rademacher_filter(*rad, grid);
    out.meta = {"rademacher", rad->m_segments, rad->p, 0, 0, 0, 0.0, rad->seed};
    out.chi_ideal = decay_exponent(out.row, spectrum);
    if (shots) {
      out.chi = measure_chi(out.chi_ideal, *shots, derive_seed(row_seed, 1),
                            &out.sigma, &out.clipped);
    } else {
      out.chi = out.chi_ideal;
    }
  } else if (const auto* ens = std::get_if<FourierEnsemble>(&spec)) {
    const FourierEnsembleRows rows = fourier_ensemble_realizations(*ens, grid);
    out.row = rows.averaged_row;
    out.meta = {"fourier_ensemble", ens->m_segments, 0.5, ens->j_index,
                ens->n_realizations, 0, 0.0, ens->seed};
    out.chi_ideal = decay_exponent(out.row, spectrum);
    if (shots) {
      // Pool the measured survival frequencies across realizations, then
      // invert once. Inverting each N2-shot estimate separately and
      // averaging is badly biased whenever a realization's probability
      // wanders near 1/2 (the floor clip saturates); the pooled estimate
      // carries N1*N2 shots and stays in the linear regime. The realization
      // spread adds a (log-of-mean vs mean-of-log) offset that is common to
      // every row and is absorbed by the flat j = 0 background direction.
      double p_acc = 0.0;
      for (int r = 0; r < ens->n_realizations; ++r) {
        const double chi_r =
            rows.rows.row(r).dot(spectrum.values) * grid.delta_omega();
        p_acc += sample_shots(survival_probability(chi_r), *shots,
                              derive_seed(row_seed, 2, static_cast<std::uint64_t>(r)));
      }
      const double n1 = static_cast<double>(ens->n_realizations);
      const double p_pooled = p_acc / n1;
      const int pooled_shots = ens->n_realizations * *shots;
      const ChiEstimate est = invert_probability(p_pooled, pooled_shots);
      out.chi = est.chi;
      out.clipped = est.clipped;
      out.sigma = chi_sigma_delta_method(p_pooled, pooled_shots);
    } else {
      out.chi = out.chi_ideal;
    }
  } else {
    const auto& cpmg = std::get<CpmgSequence>(spec);
    out.row = cpmg_filter(cpmg, grid);
    out.meta = {"cpmg", 0, 0.5, 0, 0, cpmg.n_pulses, cpmg.total_time, 0};
    out.chi_ideal = decay_exponent(out.row, spectrum);
    if (shots) {
      out.chi = measure_chi(out.chi_ideal, *shots, derive_seed(row_seed, 3),
                            &out.sigma, &out.clipped);
    } else {
      out.chi = out.chi_ideal;
    }
  }
  return out;
}

}  // namespace

std::pair<MeasurementMatrix, MeasurementRecord> assemble_measurements(
    const std::vector<SequenceSpec>& sequences, const Spectrum& spectrum,
    std::optional<int> shots, std::uint64_t seed) {
  if (shots && *shots < 1)
    throw std::invalid_argument("assemble_measurements: shots < 1");
  const int k = static_cast<int>(sequences.size());
  MeasurementMatrix matrix;
  matrix.rows.resize(k, spectrum.grid.n_points());
  matrix.row_meta.reserve(sequences.size());
  matrix.delta_omega = spectrum.grid.delta_omega();
  MeasurementRecord record;
  record.chi.resize(k);
  record.chi_ideal.resize(k);
  record.chi_sigma = Eigen::VectorXd::Zero(k);
  record.clipped.assign(static_cast<std::size_t>(k), false);
  record.shots = shots.value_or(0);
  record.seed = seed;
  for (int i = 0; i < k; ++i) {
    RowResult r = assemble_one(sequences[static_cast<std::size_t>(i)], spectrum,
                               shots, derive_seed(seed, 0x6d656173ULL,
                                                  static_cast<std::uint64_t>(i)));
    matrix.rows.row(i) = r.row.transpose();
    matrix.row_meta.push_back(r.meta);
    record.chi[i] = r.chi;
    record.chi_ideal[i] = r.chi_ideal;
    record.chi_sigma[i] = r.sigma;
    record.clipped[static_cast<std::size_t>(i)] = r.clipped;
  }
  return {std::move(matrix), std::move(record)};
}

}  // namespace qns
