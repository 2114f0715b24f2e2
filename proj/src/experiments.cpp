// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/experiments.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "qns/forward.hpp"
#include "qns/rng.hpp"

namespace qns {

namespace {

// Deterministic parallel map: results land in preallocated slots, so the
// output is independent of the thread count.
template <typename Fn>
void parallel_for(int jobs, int count, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> cursor{0};
  const int workers = std::min(jobs, count);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = cursor.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

FrequencyGrid grid_of(const SweepSpec& spec) {
  return FrequencyGrid(spec.n_grid, spec.tau, spec.grid_mode);
}

Spectrum trial_spectrum(const SweepSpec& spec, const FrequencyGrid& grid,
                        int trial) {
  const std::uint64_t s =
      derive_seed(spec.seed, 0x73706563ULL, static_cast<std::uint64_t>(trial));
  switch (spec.family) {
    case SpectrumFamily::Sparse:
      return make_sparse_spectrum_on(grid, spec.sparsity, s, 1.0);
    case SpectrumFamily::PiecewiseLinear:
      return make_piecewise_linear_spectrum_on(grid, spec.sparsity, s);
    case SpectrumFamily::QdSurrogate:
      return make_quantum_dot_surrogate(spec.qd_params, grid);
  }
  throw std::logic_error("trial_spectrum: unknown family");
}

// j indices for Fourier rows, drawn from [0, M]: without replacement while
// K <= M+1, with replacement beyond that.
std::vector<int> draw_j_indices(int k, int m, std::uint64_t seed) {
  Rng rng(seed);
  if (k <= m + 1) {
    std::vector<int> pool(static_cast<std::size_t>(m + 1));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i)
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(rng.uniform_int(i, m))]);
    pool.resize(static_cast<std::size_t>(k));
    return pool;
  }
  std::vector<int> out(static_cast<std::size_t>(k));
  for (auto& j : out) j = rng.uniform_int(0, m);
  return out;
}

struct TrialData {
  Eigen::MatrixXd f;  // quadrature-weighted design: chi ~= f * S
  Eigen::VectorXd chi;
  std::vector<int> j_indices;  // Fourier methods
  double mean_pulses = 0.0;
};

TrialData build_trial_data(const SweepSpec& spec, const FrequencyGrid& grid,
                           const Spectrum& spectrum, int k, int trial) {
  TrialData data;
  const std::uint64_t seq_seed = derive_seed(
      spec.seed, 0x73657100ULL + static_cast<std::uint64_t>(k),
      static_cast<std::uint64_t>(trial));
  const std::uint64_t shot_seed = derive_seed(
      spec.seed, 0x73686f00ULL + static_cast<std::uint64_t>(k),
      static_cast<std::uint64_t>(trial));
  const std::optional<int> shots =
      spec.n2 > 0 ? std::optional<int>(spec.n2) : std::nullopt;

  switch (spec.method) {
    case Method::CsR:
    case Method::CsRTgv: {
      std::vector<SequenceSpec> seqs;
      seqs.reserve(static_cast<std::size_t>(k));
      double pulses = 0.0;
      for (int i = 0; i < k; ++i) {
        RademacherSequence seq = sample_rademacher(
            spec.m_segments, spec.rademacher_p,
            derive_seed(seq_seed, 1, static_cast<std::uint64_t>(i)));
        pulses += static_cast<double>(pulse_times(seq).size());
        seqs.emplace_back(std::move(seq));
      }
      data.mean_pulses = pulses / std::max(1, k);
      auto [matrix, record] = assemble_measurements(seqs, spectrum, shots, shot_seed);
      data.f = std::move(matrix.rows);
      data.chi = std::move(record.chi);
      break;
    }
    case Method::CsTgv: {
      data.j_indices = draw_j_indices(k, spec.m_segments, seq_seed);
      if (spec.n1 <= 0) {
        // Idealized filter mode: cosine rows, synthetic noiseless chi.
        data.f.resize(k, grid.n_points());
        for (int i = 0; i < k; ++i)
          data.f.row(i) = fourier_filter_ideal(data.j_indices[static_cast<std::size_t>(i)], grid)
                              .transpose();
        data.chi = data.f * spectrum.values * grid.delta_omega();
      } else {
        std::vector<SequenceSpec> seqs;
        seqs.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
          FourierEnsemble ens;
          ens.j_index = data.j_indices[static_cast<std::size_t>(i)];
          ens.m_segments = spec.m_segments;
          ens.n_realizations = spec.n1;
          ens.seed = derive_seed(seq_seed, 2, static_cast<std::uint64_t>(i));
          seqs.emplace_back(ens);
        }
        auto [matrix, record] = assemble_measurements(seqs, spectrum, shots, shot_seed);
        data.f = std::move(matrix.rows);
        data.chi = std::move(record.chi);
      }
      break;
    }
    case Method::Cpmg: {
      const double total_time = spec.tau * static_cast<double>(spec.m_segments);
      std::vector<SequenceSpec> seqs;
      seqs.reserve(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i)
        seqs.emplace_back(CpmgSequence{i + 1, total_time});
      auto [matrix, record] = assemble_measurements(seqs, spectrum, shots, shot_seed);
      data.f = std::move(matrix.rows);
      data.chi = std::move(record.chi);
      break;
    }
  }
  // Absorb the quadrature weight so the solver estimates S in its own units.
  data.f *= grid.delta_omega();
  return data;
}

struct WeightsChoice {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

WeightsChoice choose_weights(const SweepSpec& spec, const TrialData& first_trial) {
  const LambdaPolicy& pol = spec.lambda_policy;
  WeightsChoice w;
  switch (pol.kind) {
    case LambdaPolicy::Kind::Fixed:
      if (spec.method == Method::CsRTgv) {
        w.lambda1 = spec.solver.lambda1;
        w.lambda2 = spec.solver.lambda2;
      } else {
        w.lambda1 = spec.solver.lambda;
      }
      break;
    case LambdaPolicy::Kind::Scaled: {
      const double scale =
          (first_trial.f.transpose() * first_trial.chi).cwiseAbs().maxCoeff();
      w.lambda1 = pol.c1 * scale;
      w.lambda2 = pol.c2 * scale;
      break;
    }
    case LambdaPolicy::Kind::CvFirstTrial: {
      std::vector<std::pair<double, double>> grid;
      const auto lambdas =
          default_lambda_grid(first_trial.f, first_trial.chi, pol.cv_points);
      Program prog = Program::L1;
      if (spec.method == Method::CsTgv) prog = Program::Tgv;
      if (spec.method == Method::CsRTgv) prog = Program::L1Tgv;
      if (prog == Program::L1Tgv) {
        for (double l1 : lambdas)
          for (double l2 : lambdas) grid.emplace_back(l1, l2);
      } else {
        for (double l : lambdas) grid.emplace_back(l, 0.0);
      }
      const CvResult cv =
          cross_validate(first_trial.f, first_trial.chi, grid, pol.cv_folds,
                         derive_seed(spec.seed, 0x63760000ULL), prog, spec.solver);
      w.lambda1 = cv.lambda1;
      w.lambda2 = cv.lambda2;
      break;
    }
  }
  return w;
}

struct TrialOutcome {
  double error = 0.0;
  double pulses = 0.0;
  bool converged = true;
};

TrialOutcome run_trial(const SweepSpec& spec, const FrequencyGrid& grid, int k,
                       int trial, const WeightsChoice& weights) {
  const Spectrum spectrum = trial_spectrum(spec, grid, trial);
  const TrialData data = build_trial_data(spec, grid, spectrum, k, trial);
  SolverConfig cfg = spec.solver;
  ReconstructionResult res;
  switch (spec.method) {
    case Method::CsR:
      cfg.lambda = weights.lambda1;
      res = solve_l1(data.f, data.chi, cfg);
      break;
    case Method::CsTgv:
      cfg.lambda = weights.lambda2 > 0.0 ? weights.lambda2 : weights.lambda1;
      res = solve_tgv(data.f, data.chi, cfg);
      break;
    case Method::CsRTgv:
      cfg.lambda1 = weights.lambda1;
      cfg.lambda2 = weights.lambda2;
      res = solve_l1_tgv(data.f, data.chi, cfg);
      break;
    case Method::Cpmg:
      res = solve_nnls(data.f, data.chi);
      break;
  }
  TrialOutcome out;
  out.error = l2_error(res.spectrum_estimate, spectrum.values, /*relative=*/true);
  out.pulses = data.mean_pulses;
  out.converged = res.converged;
  return out;
}

void finalize_point(SweepPoint& point) {
  const auto n = static_cast<double>(point.errors.size());
  if (n == 0) return;
  const double mean =
      std::accumulate(point.errors.begin(), point.errors.end(), 0.0) / n;
  double var = 0.0;
  for (double e : point.errors) var += (e - mean) * (e - mean);
  var = n > 1 ? var / (n - 1.0) : 0.0;
  point.mean_error = mean;
  point.ci_half_width = n > 1 ? 1.96 * std::sqrt(var / n) : 0.0;
}

}  // namespace

SweepResult accuracy_vs_k(const SweepSpec& spec) {
  if (spec.k_values.empty())
    throw std::invalid_argument("accuracy_vs_k: empty K list");
  if (spec.n_trials < 1)
    throw std::invalid_argument("accuracy_vs_k: n_trials < 1");
  const FrequencyGrid grid = grid_of(spec);
  SweepResult result;
  result.spec = spec;
  result.points.reserve(spec.k_values.size());
  for (int k : spec.k_values) {
    SweepPoint point;
    point.k = k;
    point.errors.assign(static_cast<std::size_t>(spec.n_trials), 0.0);
    point.pulse_counts.assign(static_cast<std::size_t>(spec.n_trials), 0.0);
    std::vector<unsigned char> ok(static_cast<std::size_t>(spec.n_trials), 1);

    // Weight selection may need the first trial's data.
    const Spectrum first_spec = trial_spectrum(spec, grid, 0);
    const TrialData first_data = build_trial_data(spec, grid, first_spec, k, 0);
    const WeightsChoice weights = choose_weights(spec, first_data);
    point.lambda1 = weights.lambda1;
    point.lambda2 = weights.lambda2;

    parallel_for(spec.jobs, spec.n_trials, [&](int trial) {
      const TrialOutcome out = run_trial(spec, grid, k, trial, weights);
      point.errors[static_cast<std::size_t>(trial)] = out.error;
      point.pulse_counts[static_cast<std::size_t>(trial)] = out.pulses;
      ok[static_cast<std::size_t>(trial)] = out.converged ? 1 : 0;
    });
    point.failed_trials = static_cast<int>(
        std::count(ok.begin(), ok.end(), static_cast<unsigned char>(0)));
    finalize_point(point);
    result.points.push_back(std::move(point));
  }
  return result;
}

std::optional<int> critical_k(const SweepResult& result, double threshold) {
  for (const auto& p : result.points)
    if (p.mean_error < threshold) return p.k;
  return std::nullopt;
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_linear: need >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    rss += r * r;
  }
  fit.rss = rss;
  fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  return fit;
}

QuadraticFit fit_quadratic(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("fit_quadratic: need >= 3 points");
  Eigen::MatrixXd design(static_cast<int>(x.size()), 3);
  Eigen::VectorXd target(static_cast<int>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    design(static_cast<int>(i), 0) = x[i] * x[i];
    design(static_cast<int>(i), 1) = x[i];
    design(static_cast<int>(i), 2) = 1.0;
    target[static_cast<int>(i)] = y[i];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
  QuadraticFit fit;
  fit.a = coef[0];
  fit.b = coef[1];
  fit.c = coef[2];
  fit.rss = (target - design * coef).squaredNorm();
  const double my = target.mean();
  const double syy = (target.array() - my).square().sum();
  fit.r_squared = syy > 0.0 ? 1.0 - fit.rss / syy : 1.0;
  return fit;
}

ScalingReport kc_scaling(const std::vector<std::pair<double, double>>& s_to_kc,
                         const std::vector<std::pair<double, double>>& n_to_kc) {
  if (s_to_kc.size() < 4 || n_to_kc.size() < 4)
    throw std::invalid_argument("kc_scaling: need >= 4 points per fit");
  std::vector<double> s, kc_s, logn, kc_n;
  for (const auto& [a, b] : s_to_kc) {
    s.push_back(a);
    kc_s.push_back(b);
  }
  for (const auto& [a, b] : n_to_kc) {
    logn.push_back(std::log(a));
    kc_n.push_back(b);
  }
  ScalingReport report;
  report.kc_vs_s = fit_linear(s, kc_s);
  report.kc_vs_logn = fit_quadratic(logn, kc_n);
  report.kc_vs_logn_linear = fit_linear(logn, kc_n);
  return report;
}

QdComparison qd_comparison(const QdComparisonSpec& spec) {
  if (spec.n_set_values.empty())
    throw std::invalid_argument("qd_comparison: empty N_set list");
  SweepSpec base;
  base.family = SpectrumFamily::QdSurrogate;
  base.qd_params = spec.qd_params;
  base.n_grid = spec.n_grid;
  base.m_segments = spec.m_segments;
  base.tau = spec.tau;
  base.k_values = spec.n_set_values;
  base.n_trials = spec.n_trials;
  base.n1 = 0;
  base.n2 = 0;
  base.seed = spec.seed;
  base.solver = spec.solver;
  base.jobs = spec.jobs;

  base.grid_mode = GridMode::General;  // shared in-band grid for all methods

  QdComparison out;
  {
    SweepSpec s = base;
    s.method = Method::CsTgv;
    s.lambda_policy = spec.cs_tgv_policy;
    out.cs_tgv = accuracy_vs_k(s);
  }
  {
    SweepSpec s = base;
    s.method = Method::CsRTgv;
    s.m_segments = 2 * spec.n_grid;  // kernel-width spacing on the in-band grid
    s.lambda_policy = spec.cs_r_tgv_policy;
    s.seed = derive_seed(spec.seed, 0x72746776ULL);
    out.cs_r_tgv = accuracy_vs_k(s);
  }
  {
    SweepSpec s = base;
    s.method = Method::Cpmg;
    s.n_trials = 1;  // deterministic rows and noiseless data
    out.cpmg = accuracy_vs_k(s);
  }
  return out;
}

double transition_width(const SweepResult& result, double hi_frac, double lo_frac) {
  if (result.points.empty()) return std::numeric_limits<double>::infinity();
  const double e0 = result.points.front().mean_error;
  double k_hi = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : result.points) {
    if (std::isnan(k_hi) && p.mean_error <= hi_frac * e0) k_hi = p.k;
    if (p.mean_error <= lo_frac * e0)
      return static_cast<double>(p.k) - (std::isnan(k_hi) ? p.k : k_hi);
  }
  return std::numeric_limits<double>::infinity();
}

PulseBudgetResult pulse_budget_study(const std::vector<double>& p_values,
                                     const SweepSpec& base) {
  PulseBudgetResult out;
  for (double p : p_values) {
    if (p <= 0.0 || p >= 1.0)
      throw std::invalid_argument("pulse_budget_study: p outside (0, 1)");
    SweepSpec spec = base;
    spec.method = Method::CsRTgv;
    spec.rademacher_p = p;
    SweepResult sweep = accuracy_vs_k(spec);
    double pulses = 0.0;
    std::size_t count = 0;
    for (const auto& point : sweep.points) {
      for (double c : point.pulse_counts) {
        pulses += c;
        ++count;
      }
    }
    out.p_values.push_back(p);
    out.mean_pulse_counts.push_back(count ? pulses / static_cast<double>(count) : 0.0);
    out.expected_pulse_counts.push_back(expected_pulse_count(base.m_segments, p));
    out.sweeps.push_back(std::move(sweep));
  }
  return out;
}

std::vector<double> pava_non_increasing(const std::vector<double>& values) {
  // Pool adjacent violators on the reversed (non-decreasing) problem.
  std::vector<double> level;
  std::vector<double> weight;
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    level.push_back(*it);
    weight.push_back(1.0);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const double w = weight.back() + weight[weight.size() - 2];
      const double v = (level.back() * weight.back() +
                        level[level.size() - 2] * weight[weight.size() - 2]) / w;
      level.pop_back();
      weight.pop_back();
      level.back() = v;
      weight.back() = w;
    }
  }
  std::vector<double> fit;
  fit.reserve(values.size());
  for (std::size_t i = 0; i < level.size(); ++i)
    for (int r = 0; r < static_cast<int>(weight[i]); ++r) fit.push_back(level[i]);
  std::reverse(fit.begin(), fit.end());
  return fit;
}

}  // namespace qns
