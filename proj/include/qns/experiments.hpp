// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qns/solvers.hpp"
#include "qns/spectrum.hpp"

namespace qns {

enum class Method { CsTgv, CsR, CsRTgv, Cpmg };
enum class SpectrumFamily { Sparse, PiecewiseLinear, QdSurrogate };

// How the regularization weights are chosen per solve.
struct LambdaPolicy {
  enum class Kind { Fixed, Scaled, CvFirstTrial } kind = Kind::Fixed;
  // Scaled: lambda = c * ||F^T chi||_inf (c1 for the point penalty, c2 for
  // the curvature penalty). CvFirstTrial: cross-validate on the first trial
  // of each sweep point and reuse the selection for the remaining trials.
  double c1 = 0.0;
  double c2 = 0.0;
  int cv_folds = 5;
  int cv_points = 12;
};

struct SweepSpec {
  Method method = Method::CsR;
  SpectrumFamily family = SpectrumFamily::Sparse;
  // Rademacher sensing wants grid spacing equal to the 2 pi/(M tau) width of
  // the squared-DFT kernel: either the circulant grid with M = n_grid, or
  // the general in-band grid with M = 2 n_grid. Cosine and CPMG rows are
  // smooth and run on the general grid with M = n_grid.
  GridMode grid_mode = GridMode::Circulant;
  int n_grid = 100;
  int m_segments = 100;
  double tau = 0.1;
  int sparsity = 3;  // s for Sparse, s_star for PiecewiseLinear
  QdSurrogateParams qd_params = QdSurrogateParams::defaults();
  std::vector<int> k_values;  // measurement counts (N_set for CPMG)
  int n_trials = 40;
  int n1 = 0;  // Fourier-ensemble realizations; 0 selects ideal cosine rows
  int n2 = 0;  // shots per measurement; 0 = noiseless
  double rademacher_p = 0.5;
  std::uint64_t seed = 0;
  SolverConfig solver;
  LambdaPolicy lambda_policy;
  int jobs = 1;
};

struct SweepPoint {
  int k = 0;
  std::vector<double> errors;        // per-trial relative L2 error
  std::vector<double> pulse_counts;  // per-trial mean applied pulses
  int failed_trials = 0;             // solver did not converge
  double mean_error = 0.0;
  double ci_half_width = 0.0;  // 95% normal-approximation half width
  double lambda1 = 0.0, lambda2 = 0.0;  // weights actually used
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;
};

// Runs n_trials independent (spectrum, sequences, shots) draws per K value.
SweepResult accuracy_vs_k(const SweepSpec& spec);

// Smallest K whose mean error falls below threshold; nullopt if never.
std::optional<int> critical_k(const SweepResult& result, double threshold);

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0, rss = 0.0;
};
struct QuadraticFit {
  double a = 0.0, b = 0.0, c = 0.0, r_squared = 0.0, rss = 0.0;
};
struct ScalingReport {
  LinearFit kc_vs_s;          // K_c = a s + b
  QuadraticFit kc_vs_logn;    // K_c = a (log N)^2 + b log N + c
  LinearFit kc_vs_logn_linear;  // comparison model K_c = a log N + b
};

// Least-squares scaling fits; each input needs >= 4 points.
ScalingReport kc_scaling(const std::vector<std::pair<double, double>>& s_to_kc,
                         const std::vector<std::pair<double, double>>& n_to_kc);

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);
QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y);

struct QdComparisonSpec {
  QdSurrogateParams qd_params = QdSurrogateParams::defaults();
  int n_grid = 200;
  int m_segments = 200;
  double tau = 1.0;
  std::vector<int> n_set_values;
  int n_trials = 30;
  std::uint64_t seed = 0;
  LambdaPolicy cs_tgv_policy;
  LambdaPolicy cs_r_tgv_policy;
  SolverConfig solver;
  int jobs = 1;
};

struct QdComparison {
  SweepResult cs_tgv;
  SweepResult cs_r_tgv;
  SweepResult cpmg;
};

// CS_TGV (ideal Fourier rows), CS_R+TGV (Rademacher rows) and CPMG + NNLS on
// the same surrogate spectrum, noiseless, across N_set values.
QdComparison qd_comparison(const QdComparisonSpec& spec);

// K span over which the mean error first drops from hi_frac to lo_frac of
// its value at the smallest K; +inf when a level is never crossed.
double transition_width(const SweepResult& result, double hi_frac = 0.8,
                        double lo_frac = 0.2);

struct PulseBudgetResult {
  std::vector<double> p_values;
  std::vector<SweepResult> sweeps;
  std::vector<double> mean_pulse_counts;      // empirical, pooled over trials
  std::vector<double> expected_pulse_counts;  // 2 M p (1-p)
};

// CS_R+TGV sweeps at each bias p on the shared spectrum family of base.
PulseBudgetResult pulse_budget_study(const std::vector<double>& p_values,
                                     const SweepSpec& base);

// Pool-adjacent-violators fit, non-increasing.
std::vector<double> pava_non_increasing(const std::vector<double>& values);

}  // namespace qns
