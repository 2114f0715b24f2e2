// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/spectrum.hpp"

#include <cmath>

#include "doctest.h"
#include "qns/rng.hpp"

using namespace qns;

namespace {

int count_above(const Eigen::VectorXd& v, double threshold) {
  int n = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > threshold) ++n;
  return n;
}

}  // namespace

TEST_CASE("sparse spectrum: support count and norm") {
  const Spectrum s = make_sparse_spectrum(100, 4, 7, 1.0);
  CHECK(count_above(s.values, 0.0) == 4);
  CHECK(s.values.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((s.values.array() >= 0.0).all());
}

TEST_CASE("sparse spectrum: full support") {
  const Spectrum s = make_sparse_spectrum(10, 10, 0, 1.0);
  CHECK((s.values.array() > 0.0).all());
}

TEST_CASE("sparse spectrum: single spike carries the whole norm") {
  const Spectrum s = make_sparse_spectrum(100, 1, 3, 2.0);
  CHECK(count_above(s.values, 0.0) == 1);
  CHECK(s.values.maxCoeff() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sparse spectrum: invalid sparsity") {
  CHECK_THROWS_AS(make_sparse_spectrum(10, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_sparse_spectrum(10, 11, 1), std::invalid_argument);
}

TEST_CASE("generators are pure functions of parameters and seed") {
  const Spectrum a = make_sparse_spectrum(64, 5, 42, 1.0);
  const Spectrum b = make_sparse_spectrum(64, 5, 42, 1.0);
  CHECK(a.values == b.values);
  const Spectrum c = make_sparse_spectrum(64, 5, 43, 1.0);
  CHECK(a.values != c.values);

  CHECK(make_piecewise_linear_spectrum(80, 3, 9).values ==
        make_piecewise_linear_spectrum(80, 3, 9).values);

  const FrequencyGrid grid(50, 1.0);
  const auto params = QdSurrogateParams::defaults();
  CHECK(make_quantum_dot_surrogate(params, grid).values ==
        make_quantum_dot_surrogate(params, grid).values);
}

TEST_CASE("grid: cutoff beyond the sampling bound is rejected") {
  CHECK_THROWS_AS(FrequencyGrid(10, 1.0, GridMode::General, 4.0),
                  std::invalid_argument);
  CHECK_NOTHROW(FrequencyGrid(10, 1.0, GridMode::General, 3.14159));
  CHECK_THROWS_AS(FrequencyGrid(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(10, -1.0), std::invalid_argument);
}

TEST_CASE("piecewise-linear spectrum: exact kink counts") {
  const Spectrum s = make_piecewise_linear_spectrum(100, 4, 11);
  CHECK(count_above(second_difference(s.values), 1e-9) == 4);
  CHECK(s.values.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((s.values.array() >= 0.0).all());
}

TEST_CASE("piecewise-linear spectrum: one kink makes a tent") {
  const Spectrum s = make_piecewise_linear_spectrum(100, 1, 5);
  const Eigen::VectorXd dd = second_difference(s.values);
  CHECK(count_above(dd, 1e-9) == 1);
}

TEST_CASE("piecewise-linear spectrum: kink count verified by the operator") {
  const Spectrum s = make_piecewise_linear_spectrum(50, 6, 2);
  CHECK(count_above(second_difference(s.values), 1e-9) == 6);
}

TEST_CASE("piecewise-linear spectrum: kink counts hold across seeds") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int target = 1 + static_cast<int>(seed % 8);
    const Spectrum s = make_piecewise_linear_spectrum(100, target, seed);
    CHECK(count_above(second_difference(s.values), 1e-9) == target);
    CHECK(s.values.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("piecewise-linear spectrum: infeasible kink count") {
  CHECK_THROWS_AS(make_piecewise_linear_spectrum(100, 99, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_piecewise_linear_spectrum(100, 0, 1), std::invalid_argument);
}

TEST_CASE("qd surrogate: normalized peak") {
  const FrequencyGrid grid(200, 1.0);
  const Spectrum s = make_quantum_dot_surrogate(QdSurrogateParams::defaults(), grid);
  CHECK(s.values.maxCoeff() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("qd surrogate: pure background is monotone decreasing") {
  const FrequencyGrid grid(100, 1.0);
  QdSurrogateParams p;
  p.background_amplitude = 1.0;
  p.background_decay = 0.7;
  const Spectrum s = make_quantum_dot_surrogate(p, grid);
  for (int i = 1; i < s.size(); ++i) CHECK(s.values[i] < s.values[i - 1]);
}

TEST_CASE("qd surrogate: matches closed-form Lorentzian") {
  const FrequencyGrid grid(128, 1.0);
  QdSurrogateParams p;
  const double center = grid.omega(40);
  p.peak_centers = {center};
  p.peak_widths = {0.05};
  p.peak_heights = {2.0};
  const Spectrum s = make_quantum_dot_surrogate(p, grid);
  // Independent evaluation, then the same normalization.
  Eigen::VectorXd expect(grid.n_points());
  for (int i = 0; i < grid.n_points(); ++i) {
    const double d = grid.omega(i) - center;
    expect[i] = 2.0 * 0.05 * 0.05 / (d * d + 0.05 * 0.05);
  }
  expect /= expect.maxCoeff();
  CHECK((s.values - expect).cwiseAbs().maxCoeff() < 1e-14);
  int argmax = 0;
  s.values.maxCoeff(&argmax);
  CHECK(argmax == 40);
}

TEST_CASE("qd surrogate: degenerate input rejected") {
  const FrequencyGrid grid(16, 1.0);
  QdSurrogateParams p;
  p.background_amplitude = 0.0;
  CHECK_THROWS_AS(make_quantum_dot_surrogate(p, grid), std::invalid_argument);
}

TEST_CASE("second difference: affine kernel") {
  Eigen::VectorXd ramp(50);
  for (int i = 0; i < 50; ++i) ramp[i] = 3.5 * i + 2.0;
  CHECK(second_difference(ramp).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("second difference: unit spike stencil") {
  Eigen::VectorXd spike = Eigen::VectorXd::Zero(10);
  spike[4] = 1.0;
  const Eigen::VectorXd dd = second_difference(spike);
  CHECK(dd[2] == 1.0);
  CHECK(dd[3] == -2.0);
  CHECK(dd[4] == 1.0);
  for (int i = 0; i < 8; ++i)
    if (i < 2 || i > 4) CHECK(dd[i] == 0.0);
}

TEST_CASE("second difference: matches the naive stencil loop") {
  Rng rng(99);
  Eigen::VectorXd v(37);
  for (int i = 0; i < 37; ++i) v[i] = rng.normal();
  const Eigen::VectorXd fast = second_difference(v);
  for (int i = 0; i + 2 < 37; ++i) {
    const double naive = v[i + 2] - 2.0 * v[i + 1] + v[i];
    CHECK(fast[i] == doctest::Approx(naive).epsilon(1e-15));
  }
}

TEST_CASE("second difference: requires three points") {
  CHECK_THROWS_AS(second_difference(Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("integrate curvature: round trip") {
  const Spectrum s = make_piecewise_linear_spectrum(60, 5, 17);
  const Eigen::VectorXd delta = second_difference(s.values);
  const Eigen::VectorXd back =
      integrate_curvature(delta, {s.values[0], s.values[59]});
  CHECK((back - s.values).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((second_difference(back) - delta).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("integrate curvature: zero curvature through zero anchors") {
  const Eigen::VectorXd s = integrate_curvature(Eigen::VectorXd::Zero(8), {0.0, 0.0});
  CHECK(s.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("integrate curvature: zero curvature interpolates the anchors") {
  const Eigen::VectorXd s = integrate_curvature(Eigen::VectorXd::Zero(8), {0.0, 1.0});
  for (int i = 0; i < 10; ++i)
    CHECK(s[i] == doctest::Approx(static_cast<double>(i) / 9.0).epsilon(1e-12));
}

TEST_CASE("l2 error: basic values and the summation oracle") {
  const Spectrum a = make_sparse_spectrum(30, 3, 1, 1.0);
  CHECK(l2_error(a, a) == 0.0);

  const Spectrum zero(a.grid, Eigen::VectorXd::Zero(30));
  CHECK(l2_error(zero, a) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(5);
  Eigen::VectorXd u(30), v(30);
  for (int i = 0; i < 30; ++i) {
    u[i] = rng.uniform01();
    v[i] = rng.uniform01();
  }
  double acc = 0.0;
  for (int i = 0; i < 30; ++i) acc += (u[i] - v[i]) * (u[i] - v[i]);
  CHECK(l2_error(u, v) == doctest::Approx(std::sqrt(acc)).epsilon(1e-14));
}

TEST_CASE("l2 error: grid mismatch rejected") {
  const Spectrum a = make_sparse_spectrum(30, 3, 1, 1.0);
  const Spectrum b(FrequencyGrid(30, 2.0), a.values);
  CHECK_THROWS_AS(l2_error(a, b), std::invalid_argument);
}

TEST_CASE("grid: circulant spacing and band bookkeeping") {
  const FrequencyGrid g(16, 0.5, GridMode::Circulant);
  CHECK(g.delta_omega() == doctest::Approx(2.0 * std::numbers::pi / 8.0));
  CHECK(g.band_points() == 8);  // half the circle lies inside omega_c = pi/tau
  const FrequencyGrid h(16, 0.5);
  CHECK(h.band_points() == 16);
  CHECK(h.omega(15) == doctest::Approx(std::numbers::pi / 0.5));
}
