// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Cholesky>
#include <cmath>

#include "doctest.h"
#include "qns/filters.hpp"
#include "qns/rng.hpp"
#include "qns/solvers.hpp"
#include "qns/spectrum.hpp"

using namespace qns;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

double objective(const Eigen::MatrixXd& f, const Eigen::VectorXd& chi,
                 const Eigen::VectorXd& x, double l1, double l2) {
  double obj = 0.5 * (chi - f * x).squaredNorm() + l1 * x.lpNorm<1>();
  if (l2 > 0.0) obj += l2 * second_difference(x).lpNorm<1>();
  return obj;
}

}  // namespace

TEST_CASE("l1 solver: identity design, no penalty") {
  const int n = 20;
  const Eigen::MatrixXd f = Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd chi = random_vector(n, 4);
  SolverConfig cfg;
  cfg.lambda = 0.0;
  cfg.nonneg = false;
  const auto res = solve_l1(f, chi, cfg);
  CHECK(res.converged);
  CHECK((res.spectrum_estimate - chi).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("l1 solver: identity design reduces to soft thresholding") {
  const int n = 25;
  const Eigen::MatrixXd f = Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd chi = random_vector(n, 8);
  SolverConfig cfg;
  cfg.lambda = 0.4;
  cfg.nonneg = false;
  const auto res = solve_l1(f, chi, cfg);
  CHECK(res.converged);
  for (int i = 0; i < n; ++i) {
    const double expect =
        chi[i] > 0.4 ? chi[i] - 0.4 : (chi[i] < -0.4 ? chi[i] + 0.4 : 0.0);
    CHECK(res.spectrum_estimate[i] == doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("l1 solver: nonnegativity clamps the prox") {
  const int n = 15;
  const Eigen::MatrixXd f = Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd chi = random_vector(n, 9);
  SolverConfig cfg;
  cfg.lambda = 0.3;
  cfg.nonneg = true;
  const auto res = solve_l1(f, chi, cfg);
  CHECK(res.converged);
  for (int i = 0; i < n; ++i) {
    const double expect = std::max(chi[i] - 0.3, 0.0);
    CHECK(res.spectrum_estimate[i] == doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("l1 solver: objective trace is non-increasing") {
  const Eigen::MatrixXd f = random_matrix(30, 50, 2);
  const Eigen::VectorXd chi = random_vector(30, 3);
  SolverConfig cfg;
  cfg.lambda = 0.5;
  cfg.nonneg = false;
  const auto res = solve_l1(f, chi, cfg);
  for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
    CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-10);
}

TEST_CASE("l1 solver: non-convergence is reported, not thrown") {
  const Eigen::MatrixXd f = random_matrix(40, 80, 5);
  const Eigen::VectorXd chi = random_vector(40, 6);
  SolverConfig cfg;
  cfg.lambda = 1e-4;
  cfg.max_iter = 3;
  const auto res = solve_l1(f, chi, cfg);
  CHECK(!res.converged);
  CHECK(res.iterations == 3);
}

TEST_CASE("tgv solver: large weight flattens to the best affine fit") {
  const int n = 40;
  const Eigen::MatrixXd f = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd chi = random_vector(n, 12);
  chi.array() += 4.0;  // keep the affine fit comfortably positive
  SolverConfig cfg;
  cfg.lambda = 1e7;
  cfg.nonneg = false;
  cfg.max_iter = 60000;
  const auto res = solve_tgv(f, chi, cfg);
  CHECK(res.converged);
  // Projection of chi onto span{1, ramp}.
  Eigen::MatrixXd basis(n, 2);
  for (int i = 0; i < n; ++i) {
    basis(i, 0) = 1.0;
    basis(i, 1) = i;
  }
  const Eigen::VectorXd coef =
      (basis.transpose() * basis).ldlt().solve(basis.transpose() * chi);
  const Eigen::VectorXd affine = basis * coef;
  CHECK((res.spectrum_estimate - affine).norm() / affine.norm() < 1e-5);
}

TEST_CASE("tgv solver: zero weight matches the normal equations") {
  const int n = 25, k = 60;
  const Eigen::MatrixXd f = random_matrix(k, n, 31);
  const Eigen::VectorXd chi = random_vector(k, 32);
  SolverConfig cfg;
  cfg.lambda = 0.0;
  cfg.nonneg = false;
  const auto res = solve_tgv(f, chi, cfg);
  const Eigen::VectorXd direct =
      (f.transpose() * f).ldlt().solve(f.transpose() * chi);
  CHECK((res.spectrum_estimate - direct).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("combined solver: degeneration identities") {
  const Eigen::MatrixXd f = random_matrix(30, 40, 77);
  const Eigen::VectorXd chi = random_vector(30, 78);

  SolverConfig combined;
  combined.lambda1 = 0.3;
  combined.lambda2 = 0.0;
  combined.nonneg = true;
  const auto res_combined = solve_l1_tgv(f, chi, combined);
  SolverConfig pure;
  pure.lambda = 0.3;
  pure.nonneg = true;
  const auto res_l1 = solve_l1(f, chi, pure);
  CHECK((res_combined.spectrum_estimate - res_l1.spectrum_estimate)
            .cwiseAbs()
            .maxCoeff() < 1e-6);

  SolverConfig combined2;
  combined2.lambda1 = 0.0;
  combined2.lambda2 = 0.5;
  combined2.nonneg = false;
  const auto res_combined2 = solve_l1_tgv(f, chi, combined2);
  SolverConfig tgv;
  tgv.lambda = 0.5;
  tgv.nonneg = false;
  const auto res_tgv = solve_tgv(f, chi, tgv);
  CHECK((res_combined2.spectrum_estimate - res_tgv.spectrum_estimate)
            .cwiseAbs()
            .maxCoeff() < 1e-6);
}

TEST_CASE("solver determinism: bit-identical reruns") {
  const Eigen::MatrixXd f = random_matrix(25, 35, 50);
  const Eigen::VectorXd chi = random_vector(25, 51);
  SolverConfig cfg;
  cfg.lambda1 = 0.2;
  cfg.lambda2 = 0.1;
  const auto a = solve_l1_tgv(f, chi, cfg);
  const auto b = solve_l1_tgv(f, chi, cfg);
  CHECK(a.iterations == b.iterations);
  CHECK(a.spectrum_estimate == b.spectrum_estimate);
}

TEST_CASE("measurement weights: unit weights are a no-op, bad shapes throw") {
  const Eigen::MatrixXd f = random_matrix(20, 30, 41);
  const Eigen::VectorXd chi = random_vector(20, 42);
  SolverConfig plain;
  plain.lambda = 0.2;
  SolverConfig weighted = plain;
  weighted.weights = Eigen::VectorXd::Ones(20);
  CHECK(solve_l1(f, chi, plain).spectrum_estimate ==
        solve_l1(f, chi, weighted).spectrum_estimate);

  SolverConfig bad = plain;
  bad.weights = Eigen::VectorXd::Ones(19);
  CHECK_THROWS_AS(solve_l1(f, chi, bad), std::invalid_argument);
  SolverConfig negative = plain;
  negative.weights = -Eigen::VectorXd::Ones(20);
  CHECK_THROWS_AS(solve_l1(f, chi, negative), std::invalid_argument);
}

TEST_CASE("kkt residuals: random instances across programs") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int n = 24, k = 18;
    const Eigen::MatrixXd f = random_matrix(k, n, 100 + seed);
    const Eigen::VectorXd chi = random_vector(k, 200 + seed);
    const double scale = (f.transpose() * chi).cwiseAbs().maxCoeff();

    SolverConfig cfg;
    cfg.nonneg = (seed % 2) == 0;
    cfg.lambda = 0.05 * scale;
    auto res = solve_l1(f, chi, cfg);
    REQUIRE(res.converged);
    CHECK(kkt_residual(f, chi, res, Program::L1, cfg) < 1e-7 * std::max(1.0, scale));

    cfg.lambda = 0.02 * scale;
    cfg.nonneg = false;
    res = solve_tgv(f, chi, cfg);
    REQUIRE(res.converged);
    CHECK(kkt_residual(f, chi, res, Program::Tgv, cfg) < 1e-7 * std::max(1.0, scale));

    cfg.lambda1 = 0.03 * scale;
    cfg.lambda2 = 0.03 * scale;
    cfg.nonneg = true;
    res = solve_l1_tgv(f, chi, cfg);
    REQUIRE(res.converged);
    CHECK(kkt_residual(f, chi, res, Program::L1Tgv, cfg) < 1e-7 * std::max(1.0, scale));
    checked += 3;
  }
  CHECK(checked == 75);
}

TEST_CASE("solver never loses to the ground truth on its own objective") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 50, k = 30;
    const Spectrum truth = make_sparse_spectrum(n, 4, seed, 1.0);
    const Eigen::MatrixXd f = random_matrix(k, n, 300 + seed);
    Eigen::VectorXd chi = f * truth.values;
    chi += 0.01 * random_vector(k, 400 + seed);
    SolverConfig cfg;
    cfg.lambda = 0.05;
    cfg.nonneg = true;
    const auto res = solve_l1(f, chi, cfg);
    REQUIRE(res.converged);
    CHECK(objective(f, chi, res.spectrum_estimate, cfg.lambda, 0.0) <=
          objective(f, chi, truth.values, cfg.lambda, 0.0) + 1e-9);
  }
}

TEST_CASE("small-instance oracle: exhaustive single-support search") {
  // K = N keeps the lambda -> 0 limit unique; underdetermined designs have a
  // whole least-squares manifold and the comparison would be ill-posed.
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int n = 12, k = 12;
    const Eigen::MatrixXd f = random_matrix(k, n, 500 + seed);
    Rng rng(600 + seed);
    const int support = rng.uniform_int(0, n - 1);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(n);
    truth[support] = 0.5 + rng.uniform01();
    const Eigen::VectorXd chi = f * truth;

    // Oracle: least squares on every singleton support.
    int best_idx = -1;
    double best_res = std::numeric_limits<double>::infinity();
    double best_coef = 0.0;
    for (int i = 0; i < n; ++i) {
      const double coef = f.col(i).dot(chi) / f.col(i).squaredNorm();
      const double r = (chi - coef * f.col(i)).squaredNorm();
      if (r < best_res) {
        best_res = r;
        best_idx = i;
        best_coef = coef;
      }
    }
    REQUIRE(best_idx == support);

    SolverConfig cfg;
    cfg.lambda = 1e-8;
    cfg.nonneg = false;
    cfg.tol_primal = cfg.tol_dual = 1e-10;
    cfg.max_iter = 60000;
    const auto res = solve_l1(f, chi, cfg);
    Eigen::VectorXd oracle = Eigen::VectorXd::Zero(n);
    oracle[best_idx] = best_coef;
    CHECK((res.spectrum_estimate - oracle).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("curvature solver: exact on a noiseless tent") {
  const int n = 50;
  const FrequencyGrid grid(n, 1.0);
  const Spectrum tent = make_piecewise_linear_spectrum_on(grid, 1, 5);
  // Anchor values are the true boundary samples.
  const int k = n;
  Eigen::MatrixXd f(k, n);
  std::vector<int> j_indices(k);
  for (int i = 0; i < k; ++i) {
    j_indices[static_cast<std::size_t>(i)] = i + 1;  // skip j = 0
    f.row(i) = fourier_filter_ideal(i + 1, grid).transpose();
  }
  const Eigen::VectorXd chi = f * tent.values * grid.delta_omega();
  SolverConfig cfg;
  cfg.lambda = 1e-10;
  cfg.tol_primal = cfg.tol_dual = 1e-11;
  cfg.max_iter = 60000;
  cfg.boundary = {tent.values[0], tent.values[n - 1]};
  const auto res = solve_curvature_l1(f, chi, j_indices, grid.delta_omega(), cfg);
  CHECK(res.converged);
  CHECK((res.spectrum_estimate - tent.values).norm() < 1e-6);
}

TEST_CASE("curvature solver: zero curvature with zero anchors gives zero") {
  const int n = 30;
  const FrequencyGrid grid(n, 1.0);
  Eigen::MatrixXd f(10, n);
  std::vector<int> j_indices(10);
  for (int i = 0; i < 10; ++i) {
    j_indices[static_cast<std::size_t>(i)] = i + 1;
    f.row(i) = fourier_filter_ideal(i + 1, grid).transpose();
  }
  const Eigen::VectorXd chi = Eigen::VectorXd::Zero(10);
  SolverConfig cfg;
  cfg.lambda = 1e-6;
  const auto res = solve_curvature_l1(f, chi, j_indices, grid.delta_omega(), cfg);
  CHECK(res.spectrum_estimate.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("curvature solver: j = 0 rows dropped, all-zero rejected") {
  const int n = 20;
  const FrequencyGrid grid(n, 1.0);
  Eigen::MatrixXd f(3, n);
  f.row(0) = fourier_filter_ideal(0, grid).transpose();
  f.row(1) = fourier_filter_ideal(2, grid).transpose();
  f.row(2) = fourier_filter_ideal(5, grid).transpose();
  const Eigen::VectorXd chi = Eigen::VectorXd::Zero(3);
  SolverConfig cfg;
  const auto res = solve_curvature_l1(f, chi, {0, 2, 5}, grid.delta_omega(), cfg);
  CHECK(res.warnings.size() == 1);
  CHECK_THROWS_AS(
      solve_curvature_l1(f, chi, {0, 0, 0}, grid.delta_omega(), cfg),
      std::invalid_argument);
}

TEST_CASE("curvature route is more fragile than one-step tgv under noise") {
  // Head-to-head on noisy instances; the integration step amplifies
  // low-frequency noise so the two-step route should lose most of the time.
  const int n = 40;
  const FrequencyGrid grid(n, 1.0);
  int tgv_wins = 0;
  const int instances = 50;
  for (int inst = 0; inst < instances; ++inst) {
    const Spectrum truth = make_piecewise_linear_spectrum_on(
        grid, 3, 900 + static_cast<std::uint64_t>(inst));
    const int k = 30;
    Eigen::MatrixXd f(k, n);
    std::vector<int> j_indices(k);
    Rng rng(1000 + static_cast<std::uint64_t>(inst));
    for (int i = 0; i < k; ++i) {
      j_indices[static_cast<std::size_t>(i)] = 1 + rng.uniform_int(0, n - 1);
      f.row(i) =
          fourier_filter_ideal(j_indices[static_cast<std::size_t>(i)], grid).transpose();
    }
    Eigen::VectorXd chi = f * truth.values * grid.delta_omega();
    for (int i = 0; i < k; ++i) chi[i] += 2e-3 * rng.normal();

    // Default zero anchors: the true boundary samples are not part of the
    // measured data, and assuming them away is the route's practical flaw.
    SolverConfig curv_cfg;
    curv_cfg.lambda = 1e-4;
    const auto curv = solve_curvature_l1(f, chi, j_indices, grid.delta_omega(), curv_cfg);

    SolverConfig tgv_cfg;
    tgv_cfg.lambda = 1e-4;
    tgv_cfg.nonneg = true;
    const auto tgv = solve_tgv(f, chi, tgv_cfg);

    const double err_curv = (curv.spectrum_estimate - truth.values).norm();
    const double err_tgv = (tgv.spectrum_estimate - truth.values).norm();
    if (err_curv >= err_tgv) ++tgv_wins;
  }
  CHECK(tgv_wins >= 40);  // >= 80% of instances
}

TEST_CASE("nnls: identity designs") {
  const int n = 12;
  const Eigen::MatrixXd f = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd chi = random_vector(n, 60).cwiseAbs();
  auto res = solve_nnls(f, chi);
  CHECK(res.converged);
  CHECK((res.spectrum_estimate - chi).cwiseAbs().maxCoeff() < 1e-10);

  Eigen::VectorXd mixed = random_vector(n, 61);
  res = solve_nnls(f, mixed);
  CHECK(res.converged);
  for (int i = 0; i < n; ++i)
    CHECK(res.spectrum_estimate[i] ==
          doctest::Approx(std::max(mixed[i], 0.0)).epsilon(1e-10));
}

TEST_CASE("nnls: residual is no larger than sampled feasible points") {
  const Eigen::MatrixXd f = random_matrix(20, 15, 70);
  const Eigen::VectorXd chi = random_vector(20, 71);
  const auto res = solve_nnls(f, chi);
  REQUIRE(res.converged);
  const double opt = (chi - f * res.spectrum_estimate).squaredNorm();
  Rng rng(72);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd s(15);
    for (int i = 0; i < 15; ++i) s[i] = rng.uniform01();
    CHECK(opt <= (chi - f * s).squaredNorm() + 1e-12);
  }
  // Perturbations around the solution stay worse as well.
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd s = res.spectrum_estimate;
    for (int i = 0; i < 15; ++i) s[i] = std::max(0.0, s[i] + 0.01 * rng.normal());
    CHECK(opt <= (chi - f * s).squaredNorm() + 1e-12);
  }
}

TEST_CASE("cross-validation: noiseless data keeps regularization off") {
  const int n = 10, k = 30;
  const Eigen::MatrixXd f = random_matrix(k, n, 80);
  const Spectrum truth = make_sparse_spectrum(n, 2, 81, 1.0);
  const Eigen::VectorXd chi = f * truth.values;
  std::vector<std::pair<double, double>> grid = {{0.0, 0.0}, {1e-3, 0.0}, {1.0, 0.0}};
  SolverConfig cfg;
  cfg.nonneg = false;
  const CvResult cv = cross_validate(f, chi, grid, 5, 3, Program::L1, cfg);
  CHECK(cv.mean_residuals[cv.selected_index] <= 1e-10);
}

TEST_CASE("cross-validation: pure noise selects the strongest weight") {
  const int n = 20, k = 24;
  const Eigen::MatrixXd f = random_matrix(k, n, 90);
  const Eigen::VectorXd chi = random_vector(k, 91);  // no signal
  std::vector<std::pair<double, double>> grid;
  for (double l : default_lambda_grid(f, chi, 8)) grid.emplace_back(l, 0.0);
  SolverConfig cfg;
  cfg.nonneg = false;
  const CvResult cv = cross_validate(f, chi, grid, 4, 5, Program::L1, cfg);
  CHECK(cv.selected_index == grid.size() - 1);
}

TEST_CASE("cross-validation: invariant under joint rescaling") {
  const int n = 15, k = 20;
  const Eigen::MatrixXd f = random_matrix(k, n, 95);
  const Spectrum truth = make_sparse_spectrum(n, 3, 96, 1.0);
  Eigen::VectorXd chi = f * truth.values + 0.05 * random_vector(k, 97);
  std::vector<std::pair<double, double>> grid;
  for (double l : default_lambda_grid(f, chi, 10)) grid.emplace_back(l, 0.0);
  SolverConfig cfg;
  cfg.nonneg = false;
  const CvResult base = cross_validate(f, chi, grid, 4, 11, Program::L1, cfg);

  const double c = 3.7;
  std::vector<std::pair<double, double>> scaled_grid;
  for (const auto& [l1, l2] : grid) scaled_grid.emplace_back(c * c * l1, c * c * l2);
  const CvResult scaled =
      cross_validate(c * f, (c * chi).eval(), scaled_grid, 4, 11, Program::L1, cfg);
  CHECK(base.selected_index == scaled.selected_index);
}

TEST_CASE("cross-validation: degenerate folds rejected") {
  const Eigen::MatrixXd f = random_matrix(6, 4, 1);
  const Eigen::VectorXd chi = random_vector(6, 2);
  std::vector<std::pair<double, double>> grid = {{0.1, 0.0}};
  SolverConfig cfg;
  CHECK_THROWS_AS(cross_validate(f, chi, grid, 1, 0, Program::L1, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(cross_validate(f, chi, grid, 7, 0, Program::L1, cfg),
                  std::invalid_argument);
}
