// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "qns/experiments.hpp"

using namespace qns;

namespace {

SweepSpec small_sparse_sweep() {
  SweepSpec spec;
  spec.method = Method::CsR;
  spec.family = SpectrumFamily::Sparse;
  spec.n_grid = 40;
  spec.m_segments = 40;
  spec.sparsity = 2;
  spec.k_values = {2, 4, 6, 8, 10, 12};
  spec.n_trials = 10;
  spec.n2 = 0;
  spec.seed = 5;
  spec.lambda_policy.kind = LambdaPolicy::Kind::Scaled;
  spec.lambda_policy.c1 = 1e-6;
  spec.solver.nonneg = true;
  spec.jobs = 2;
  return spec;
}

}  // namespace

TEST_CASE("sweep: fully determined system reconstructs exactly") {
  SweepSpec spec;
  spec.method = Method::CsTgv;
  spec.family = SpectrumFamily::PiecewiseLinear;
  spec.grid_mode = GridMode::General;
  spec.n_grid = 30;
  spec.m_segments = 30;
  spec.sparsity = 2;
  spec.k_values = {31};  // every basis index once
  spec.n_trials = 3;
  spec.n1 = 0;  // ideal rows, noiseless
  spec.seed = 9;
  spec.lambda_policy.kind = LambdaPolicy::Kind::Fixed;
  spec.solver.lambda = 1e-10;
  spec.solver.nonneg = false;
  spec.solver.tol_primal = spec.solver.tol_dual = 1e-10;
  spec.solver.max_iter = 60000;
  const SweepResult result = accuracy_vs_k(spec);
  CHECK(result.points.size() == 1);
  CHECK(result.points[0].mean_error < 1e-6);
}

TEST_CASE("sweep: deterministic for a fixed seed") {
  SweepSpec spec = small_sparse_sweep();
  spec.k_values = {6};
  spec.n_trials = 4;
  const SweepResult a = accuracy_vs_k(spec);
  const SweepResult b = accuracy_vs_k(spec);
  REQUIRE(a.points.size() == b.points.size());
  CHECK(a.points[0].errors == b.points[0].errors);
  // Thread count must not affect results.
  spec.jobs = 1;
  const SweepResult c = accuracy_vs_k(spec);
  CHECK(a.points[0].errors == c.points[0].errors);
}

TEST_CASE("sweep: error decreases with K and matches its isotone fit") {
  const SweepResult result = accuracy_vs_k(small_sparse_sweep());
  std::vector<double> means;
  double mean_hw = 0.0;
  for (const auto& p : result.points) {
    means.push_back(p.mean_error);
    mean_hw += p.ci_half_width;
  }
  mean_hw /= static_cast<double>(result.points.size());
  const std::vector<double> iso = pava_non_increasing(means);
  for (std::size_t i = 0; i < means.size(); ++i)
    CHECK(std::abs(iso[i] - means[i]) < std::max(mean_hw, 1e-9));
}

TEST_CASE("sweep: confidence width shrinks with more trials") {
  SweepSpec spec = small_sparse_sweep();
  spec.k_values = {4};
  spec.n2 = 100;  // keep some per-trial spread
  spec.n_trials = 10;
  const double hw10 = accuracy_vs_k(spec).points[0].ci_half_width;
  spec.n_trials = 20;
  const double hw20 = accuracy_vs_k(spec).points[0].ci_half_width;
  CHECK(hw20 < 2.0 * hw10);
  CHECK(hw20 < 1.5 * hw10);
}

TEST_CASE("critical K: crossing detection") {
  SweepResult result;
  for (int i = 0; i < 4; ++i) {
    SweepPoint p;
    p.k = i + 1;
    p.mean_error = std::vector<double>{0.9, 0.6, 0.4, 0.1}[static_cast<std::size_t>(i)];
    result.points.push_back(p);
  }
  CHECK(critical_k(result, 0.5).value() == 3);
  CHECK(!critical_k(result, 0.05).has_value());
}

TEST_CASE("scaling fits: exact synthetic data") {
  std::vector<std::pair<double, double>> s_kc, n_kc;
  for (double s = 2; s <= 6; ++s) s_kc.emplace_back(s, 3.0 * s + 1.0);
  for (double n : {50.0, 100.0, 200.0, 400.0}) {
    const double x = std::log(n);
    n_kc.emplace_back(n, 2.0 * x * x - x + 0.5);
  }
  const ScalingReport report = kc_scaling(s_kc, n_kc);
  CHECK(report.kc_vs_s.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.kc_vs_s.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(report.kc_vs_logn.r_squared == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(report.kc_vs_logn.rss < report.kc_vs_logn_linear.rss);
}

TEST_CASE("scaling fits: insufficient points rejected") {
  std::vector<std::pair<double, double>> three = {{1, 1}, {2, 2}, {3, 3}};
  std::vector<std::pair<double, double>> four = {{1, 1}, {2, 2}, {3, 3}, {4, 4}};
  CHECK_THROWS_AS(kc_scaling(three, four), std::invalid_argument);
  CHECK_THROWS_AS(kc_scaling(four, three), std::invalid_argument);
}

TEST_CASE("pava: pooled means are non-increasing and order preserving") {
  const std::vector<double> v = {5.0, 4.0, 4.5, 2.0, 2.5, 1.0};
  const std::vector<double> fit = pava_non_increasing(v);
  REQUIRE(fit.size() == v.size());
  for (std::size_t i = 1; i < fit.size(); ++i) CHECK(fit[i] <= fit[i - 1] + 1e-12);
  // Monotone input is unchanged.
  const std::vector<double> mono = {3.0, 2.0, 1.5, 0.5};
  CHECK(pava_non_increasing(mono) == mono);
}

TEST_CASE("transition width: synthetic curve") {
  SweepResult result;
  const std::vector<double> errors = {1.0, 0.9, 0.75, 0.5, 0.15, 0.05};
  for (std::size_t i = 0; i < errors.size(); ++i) {
    SweepPoint p;
    p.k = static_cast<int>(i) * 10;
    p.mean_error = errors[i];
    result.points.push_back(p);
  }
  // 0.8 of 1.0 first crossed at k = 20, 0.2 at k = 40.
  CHECK(transition_width(result) == doctest::Approx(20.0));
}

TEST_CASE("pulse budget: empirical counts track the bias") {
  SweepSpec base = small_sparse_sweep();
  base.k_values = {6};
  base.n_trials = 6;
  base.lambda_policy.c2 = 1e-6;
  const PulseBudgetResult out = pulse_budget_study({0.5, 0.1}, base);
  REQUIRE(out.p_values.size() == 2);
  CHECK(out.expected_pulse_counts[0] == doctest::Approx(2.0 * 40 * 0.25));
  // Empirical means live near (M-1) 2p(1-p); generous band, few samples.
  CHECK(std::abs(out.mean_pulse_counts[0] - 19.5) < 4.0);
  CHECK(std::abs(out.mean_pulse_counts[1] - 39.0 * 0.18) < 3.0);
  CHECK(out.mean_pulse_counts[1] < out.mean_pulse_counts[0]);
}
