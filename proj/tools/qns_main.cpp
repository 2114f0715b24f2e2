// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: config-driven generation, simulation,
// reconstruction, sweeps and reports. Exit codes: 0 success, 2 config error,
// 3 I/O or missing-input error.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "qns/experiments.hpp"
#include "qns/rng.hpp"
#include "qns/serialize.hpp"
#include "qns/svg.hpp"

namespace fs = std::filesystem;
using qns::Json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- schema --
// Strict validation: every key must be known, required keys present.
void check_keys(const Json& j, const std::string& where,
                const std::vector<std::string>& allowed,
                const std::vector<std::string>& required = {}) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError(where + ": unknown key '" + k + "'");
  }
  for (const auto& k : required)
    if (!j.contains(k)) throw ConfigError(where + ": missing key '" + k + "'");
}

qns::FrequencyGrid parse_grid(const Json& j) {
  check_keys(j, "grid", {"n", "tau", "mode", "omega_c"}, {"n", "tau"});
  try {
    return qns::grid_from_json(j);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

qns::Spectrum parse_spectrum(const Json& j, const qns::FrequencyGrid& grid,
                             std::uint64_t default_seed) {
  check_keys(j, "spectrum",
             {"family", "s", "s_star", "norm", "seed", "peak_centers",
              "peak_widths", "peak_heights", "background_amplitude",
              "background_decay", "band_scaled_defaults"},
             {"family"});
  const std::string family = j.at("family").get<std::string>();
  const std::uint64_t seed =
      j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed;
  try {
    if (family == "sparse") {
      return qns::make_sparse_spectrum_on(
          grid, j.at("s").get<int>(), seed,
          j.contains("norm") ? j.at("norm").get<double>() : 1.0);
    }
    if (family == "piecewise_linear") {
      return qns::make_piecewise_linear_spectrum_on(grid, j.at("s_star").get<int>(),
                                                    seed);
    }
    if (family == "qd_surrogate") {
      qns::QdSurrogateParams p;
      if (j.contains("band_scaled_defaults") && j.at("band_scaled_defaults").get<bool>()) {
        p = qns::QdSurrogateParams::defaults(grid.omega_c());
      } else {
        p.peak_centers = j.at("peak_centers").get<std::vector<double>>();
        p.peak_widths = j.at("peak_widths").get<std::vector<double>>();
        p.peak_heights = j.at("peak_heights").get<std::vector<double>>();
        p.background_amplitude = j.at("background_amplitude").get<double>();
        p.background_decay = j.at("background_decay").get<double>();
      }
      return qns::make_quantum_dot_surrogate(p, grid);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("spectrum: ") + e.what());
  }
  throw ConfigError("spectrum: unknown family '" + family + "'");
}

std::vector<qns::SequenceSpec> parse_sequences(const Json& j,
                                               const qns::FrequencyGrid& grid,
                                               std::uint64_t seed) {
  check_keys(j, "sequences", {"type", "k", "m", "p", "n1", "n_set", "j_indices"},
             {"type"});
  const std::string type = j.at("type").get<std::string>();
  std::vector<qns::SequenceSpec> out;
  try {
    if (type == "rademacher") {
      const int k = j.at("k").get<int>();
      const int m = j.at("m").get<int>();
      const double p = j.contains("p") ? j.at("p").get<double>() : 0.5;
      for (int i = 0; i < k; ++i)
        out.emplace_back(qns::sample_rademacher(
            m, p, qns::derive_seed(seed, 0x726164ULL, static_cast<std::uint64_t>(i))));
      return out;
    }
    if (type == "fourier_ensemble") {
      const int k = j.at("k").get<int>();
      const int m = j.at("m").get<int>();
      const int n1 = j.contains("n1") ? j.at("n1").get<int>() : 100;
      std::vector<int> js;
      if (j.contains("j_indices")) {
        js = j.at("j_indices").get<std::vector<int>>();
        if (static_cast<int>(js.size()) != k)
          throw ConfigError("sequences: j_indices length differs from k");
      } else {
        qns::Rng rng(qns::derive_seed(seed, 0x6a647277ULL));
        std::vector<int> pool(static_cast<std::size_t>(m + 1));
        for (int i = 0; i <= m; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < k && i <= m; ++i)
          std::swap(pool[static_cast<std::size_t>(i)],
                    pool[static_cast<std::size_t>(rng.uniform_int(i, m))]);
        pool.resize(static_cast<std::size_t>(k));
        js = pool;
      }
      for (int i = 0; i < k; ++i) {
        qns::FourierEnsemble ens;
        ens.j_index = js[static_cast<std::size_t>(i)];
        ens.m_segments = m;
        ens.n_realizations = n1;
        ens.seed = qns::derive_seed(seed, 0x656e73ULL, static_cast<std::uint64_t>(i));
        out.emplace_back(ens);
      }
      return out;
    }
    if (type == "cpmg") {
      const int n_set = j.at("n_set").get<int>();
      const int m = j.contains("m") ? j.at("m").get<int>() : grid.n_points();
      const double total_time = grid.tau() * static_cast<double>(m);
      for (int n = 1; n <= n_set; ++n)
        out.emplace_back(qns::CpmgSequence{n, total_time});
      return out;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("sequences: ") + e.what());
  }
  throw ConfigError("sequences: unknown type '" + type + "'");
}

struct SolverChoice {
  std::string method = "l1";
  qns::SolverConfig cfg;
  std::string policy = "fixed";  // fixed | scaled | cv
  double c1 = 0.0, c2 = 0.0;
  int cv_folds = 5, cv_points = 12;
  bool weights_from_sigma = false;
};

SolverChoice parse_solver(const Json& j) {
  check_keys(j, "solver",
             {"method", "lambda", "lambda1", "lambda2", "rho", "tol", "max_iter",
              "nonneg", "policy", "c1", "c2", "cv_folds", "cv_points",
              "weights_from_sigma", "boundary"},
             {"method"});
  SolverChoice out;
  out.method = j.at("method").get<std::string>();
  if (out.method != "l1" && out.method != "tgv" && out.method != "l1_tgv" &&
      out.method != "curvature_l1" && out.method != "nnls")
    throw ConfigError("solver: unknown method '" + out.method + "'");
  if (j.contains("lambda")) out.cfg.lambda = j.at("lambda").get<double>();
  if (j.contains("lambda1")) out.cfg.lambda1 = j.at("lambda1").get<double>();
  if (j.contains("lambda2")) out.cfg.lambda2 = j.at("lambda2").get<double>();
  if (j.contains("rho")) out.cfg.rho = j.at("rho").get<double>();
  if (j.contains("tol")) {
    out.cfg.tol_primal = j.at("tol").get<double>();
    out.cfg.tol_dual = out.cfg.tol_primal;
  }
  if (j.contains("max_iter")) out.cfg.max_iter = j.at("max_iter").get<int>();
  if (j.contains("nonneg")) out.cfg.nonneg = j.at("nonneg").get<bool>();
  if (j.contains("policy")) out.policy = j.at("policy").get<std::string>();
  if (out.policy != "fixed" && out.policy != "scaled" && out.policy != "cv")
    throw ConfigError("solver: unknown policy '" + out.policy + "'");
  if (j.contains("c1")) out.c1 = j.at("c1").get<double>();
  if (j.contains("c2")) out.c2 = j.at("c2").get<double>();
  if (j.contains("cv_folds")) out.cv_folds = j.at("cv_folds").get<int>();
  if (j.contains("cv_points")) out.cv_points = j.at("cv_points").get<int>();
  if (j.contains("weights_from_sigma"))
    out.weights_from_sigma = j.at("weights_from_sigma").get<bool>();
  if (j.contains("boundary")) {
    const auto b = j.at("boundary").get<std::vector<double>>();
    if (b.size() != 2) throw ConfigError("solver: boundary needs two anchors");
    out.cfg.boundary = {b[0], b[1]};
  }
  return out;
}

// ------------------------------------------------------------- presets --
Json preset_config(const std::string& name);

Json load_config(const std::string& config_path, const std::string& preset,
                 std::optional<std::uint64_t> seed_override,
                 const std::string& out_override, int jobs) {
  Json cfg;
  if (!preset.empty()) {
    cfg = preset_config(preset);
  } else if (!config_path.empty()) {
    try {
      cfg = Json::parse(qns::read_text_file(config_path));
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config parse: ") + e.what());
    }
  } else {
    throw ConfigError("either --config or --preset is required");
  }
  check_keys(cfg, "config",
             {"seed", "out_dir", "grid", "spectrum", "sequences", "shots",
              "solver", "sweep", "bundle"});
  if (seed_override) cfg["seed"] = *seed_override;
  if (!cfg.contains("seed")) cfg["seed"] = 1;
  if (!out_override.empty()) cfg["out_dir"] = out_override;
  if (!cfg.contains("out_dir")) {
    const char* env = std::getenv("QNS_OUT_DIR");
    cfg["out_dir"] = env ? env : "out";
  }
  if (jobs > 0 && cfg.contains("sweep")) cfg["sweep"]["jobs"] = jobs;
  return cfg;
}

// Provenance hash over the experiment-defining part of the config: the
// output location must not change result bytes.
std::string experiment_hash(const Json& cfg) {
  Json c = cfg;
  c.erase("out_dir");
  return qns::config_hash(c);
}

fs::path ensure_out_dir(const Json& cfg) {
  const fs::path dir = cfg.at("out_dir").get<std::string>();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

std::optional<int> parse_shots(const Json& cfg) {
  if (!cfg.contains("shots") || cfg.at("shots").is_null()) return std::nullopt;
  check_keys(cfg.at("shots"), "shots", {"n2"}, {"n2"});
  const int n2 = cfg.at("shots").at("n2").get<int>();
  if (n2 < 1) throw ConfigError("shots: n2 < 1");
  return n2;
}

// ------------------------------------------------------------ commands --
int cmd_generate(const Json& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  if (!cfg.contains("grid") || !cfg.contains("spectrum"))
    throw ConfigError("generate: needs grid and spectrum sections");
  const qns::FrequencyGrid grid = parse_grid(cfg.at("grid"));
  const qns::Spectrum spectrum = parse_spectrum(cfg.at("spectrum"), grid, seed);
  const std::string hash = experiment_hash(cfg);

  qns::write_text_file(dir / "spectrum.csv", qns::spectrum_to_csv(spectrum));
  Json sj = qns::spectrum_to_json(spectrum);
  sj["config_hash"] = hash;
  qns::write_text_file(dir / "spectrum.json", sj.dump(2) + "\n");

  if (cfg.contains("sequences")) {
    const auto seqs = parse_sequences(cfg.at("sequences"), grid, seed);
    Json arr = Json::array();
    for (const auto& s : seqs) arr.push_back(qns::sequence_to_json(s));
    Json out{{"config_hash", hash}, {"sequences", arr}};
    qns::write_text_file(dir / "sequences.json", out.dump(2) + "\n");
  }
  std::cout << "generate: wrote spectrum (and sequences) to " << dir << "\n";
  return 0;
}

Json simulate_to_json(const Json& cfg) {
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  if (!cfg.contains("grid") || !cfg.contains("spectrum") || !cfg.contains("sequences"))
    throw ConfigError("simulate: needs grid, spectrum and sequences sections");
  const qns::FrequencyGrid grid = parse_grid(cfg.at("grid"));
  const qns::Spectrum spectrum = parse_spectrum(cfg.at("spectrum"), grid, seed);
  const auto shots = parse_shots(cfg);

  const Json& seq_json = cfg.at("sequences");
  const bool ideal_fourier =
      seq_json.at("type").get<std::string>() == "fourier_ensemble" &&
      seq_json.contains("n1") && seq_json.at("n1").get<int>() == 0;
  if (ideal_fourier) {
    // Idealized filter mode: exact cosine rows, synthetic noiseless chi.
    if (shots) throw ConfigError("simulate: ideal fourier rows (n1 = 0) are noiseless");
    Json probe = seq_json;
    probe["n1"] = 1;  // realization count unused below
    const auto seqs = parse_sequences(probe, grid, seed);
    qns::MeasurementMatrix matrix;
    matrix.rows.resize(static_cast<int>(seqs.size()), grid.n_points());
    matrix.delta_omega = grid.delta_omega();
    qns::MeasurementRecord record;
    record.chi.resize(static_cast<int>(seqs.size()));
    record.chi_sigma = Eigen::VectorXd::Zero(static_cast<int>(seqs.size()));
    record.clipped.assign(seqs.size(), false);
    record.seed = seed;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      const auto& ens = std::get<qns::FourierEnsemble>(seqs[i]);
      const Eigen::VectorXd row = qns::fourier_filter_ideal(ens.j_index, grid);
      matrix.rows.row(static_cast<int>(i)) = row.transpose();
      matrix.row_meta.push_back({"fourier_ensemble", ens.m_segments, 0.5,
                                 ens.j_index, 0, 0, 0.0, ens.seed});
      record.chi[static_cast<int>(i)] = qns::decay_exponent(row, spectrum);
    }
    record.chi_ideal = record.chi;
    Json bundle =
        qns::bundle_to_json(matrix, record, grid, qns::spectrum_to_json(spectrum));
    bundle["config_hash"] = experiment_hash(cfg);
    return bundle;
  }

  const auto seqs = parse_sequences(seq_json, grid, seed);
  const auto [matrix, record] = qns::assemble_measurements(
      seqs, spectrum, shots, qns::derive_seed(seed, 0x73686f74ULL));
  Json bundle = qns::bundle_to_json(matrix, record, grid, qns::spectrum_to_json(spectrum));
  bundle["config_hash"] = experiment_hash(cfg);
  return bundle;
}

int cmd_simulate(const Json& cfg) {
  const fs::path dir = ensure_out_dir(cfg);
  const Json bundle = simulate_to_json(cfg);
  qns::write_text_file(dir / "bundle.json", bundle.dump() + "\n");
  std::cout << "simulate: wrote " << (dir / "bundle.json") << "\n";
  return 0;
}

int cmd_reconstruct(const Json& cfg, const std::string& bundle_path, bool plot) {
  const fs::path dir = ensure_out_dir(cfg);
  Json bundle_json;
  if (!bundle_path.empty()) {
    try {
      bundle_json = Json::parse(qns::read_text_file(bundle_path));
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    } catch (const std::exception& e) {
      throw IoError(std::string("malformed bundle: ") + e.what());
    }
  } else if (cfg.contains("bundle")) {
    try {
      bundle_json = Json::parse(qns::read_text_file(cfg.at("bundle").get<std::string>()));
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
  } else {
    bundle_json = simulate_to_json(cfg);  // inline simulation
    qns::write_text_file(dir / "bundle.json", bundle_json.dump() + "\n");
  }
  qns::MeasurementBundle bundle;
  try {
    bundle = qns::bundle_from_json(bundle_json);
  } catch (const std::exception& e) {
    throw IoError(std::string("malformed bundle: ") + e.what());
  }
  if (!cfg.contains("solver")) throw ConfigError("reconstruct: needs a solver section");
  const SolverChoice choice = parse_solver(cfg.at("solver"));

  // Quadrature-weighted design so the estimate is in spectrum units.
  Eigen::MatrixXd f = bundle.matrix.rows * bundle.matrix.delta_omega;
  const Eigen::VectorXd& chi = bundle.record.chi;

  qns::SolverConfig scfg = choice.cfg;
  if (choice.weights_from_sigma && bundle.record.chi_sigma.size() == f.rows() &&
      bundle.record.chi_sigma.maxCoeff() > 0.0) {
    Eigen::VectorXd w(f.rows());
    for (int i = 0; i < f.rows(); ++i)
      w[i] = 1.0 / std::max(bundle.record.chi_sigma[i], 1e-12);
    w /= w.maxCoeff();
    scfg.weights = w;
  }
  const double scale = (f.transpose() * chi).cwiseAbs().maxCoeff();
  if (choice.policy == "scaled") {
    scfg.lambda = choice.c1 > 0 ? choice.c1 * scale : choice.c2 * scale;
    scfg.lambda1 = choice.c1 * scale;
    scfg.lambda2 = choice.c2 * scale;
    if (choice.method == "tgv" || choice.method == "curvature_l1")
      scfg.lambda = choice.c2 * scale;
  } else if (choice.policy == "cv") {
    std::vector<std::pair<double, double>> grid_points;
    const auto lambdas = qns::default_lambda_grid(f, chi, choice.cv_points);
    qns::Program prog = qns::Program::L1;
    if (choice.method == "tgv") prog = qns::Program::Tgv;
    if (choice.method == "l1_tgv") prog = qns::Program::L1Tgv;
    if (prog == qns::Program::L1Tgv) {
      for (double a : lambdas)
        for (double b : lambdas) grid_points.emplace_back(a, b);
    } else {
      for (double a : lambdas) grid_points.emplace_back(a, 0.0);
    }
    const qns::CvResult cv =
        qns::cross_validate(f, chi, grid_points, choice.cv_folds,
                            cfg.at("seed").get<std::uint64_t>(), prog, scfg);
    scfg.lambda = cv.lambda1;
    scfg.lambda1 = cv.lambda1;
    scfg.lambda2 = cv.lambda2;
    if (choice.method == "tgv") scfg.lambda = cv.lambda1;
  }

  qns::ReconstructionResult result;
  if (choice.method == "l1") {
    result = qns::solve_l1(f, chi, scfg);
  } else if (choice.method == "tgv") {
    result = qns::solve_tgv(f, chi, scfg);
  } else if (choice.method == "l1_tgv") {
    result = qns::solve_l1_tgv(f, chi, scfg);
  } else if (choice.method == "nnls") {
    result = qns::solve_nnls(f, chi);
  } else {  // curvature_l1
    std::vector<int> js;
    for (const auto& meta : bundle.matrix.row_meta) {
      if (meta.type != "fourier_ensemble")
        throw ConfigError("curvature_l1 needs fourier rows with known j indices");
      js.push_back(meta.j_index);
    }
    // design on raw rows; the routine applies the quadrature weight itself
    result = qns::solve_curvature_l1(bundle.matrix.rows, chi, js,
                                     bundle.matrix.delta_omega, scfg);
  }

  Json rj = qns::result_to_json(result);
  rj["config_hash"] = experiment_hash(cfg);
  double err_abs = -1.0, err_rel = -1.0;
  if (!bundle.truth.is_null()) {
    const qns::Spectrum truth = qns::spectrum_from_json(bundle.truth);
    err_abs = qns::l2_error(result.spectrum_estimate, truth.values, false);
    err_rel = qns::l2_error(result.spectrum_estimate, truth.values, true);
    rj["error_l2"] = err_abs;
    rj["error_l2_relative"] = err_rel;
  }
  qns::write_text_file(dir / "result.json", rj.dump(2) + "\n");

  if (plot) {
    qns::SvgPlot fig("reconstruction", "omega", "spectral density");
    std::vector<double> xs, est, truth_vals;
    for (int i = 0; i < bundle.grid.n_points(); ++i) {
      xs.push_back(bundle.grid.omega(i));
      est.push_back(result.spectrum_estimate[i]);
    }
    if (!bundle.truth.is_null()) {
      const qns::Spectrum truth = qns::spectrum_from_json(bundle.truth);
      for (int i = 0; i < truth.size(); ++i) truth_vals.push_back(truth.values[i]);
      fig.add_line(xs, truth_vals, "#1f77b4", "truth");
    }
    fig.add_points(xs, est, "#d62728", "estimate");
    qns::write_text_file(dir / "reconstruction.svg", fig.render());
  }
  std::cout << "reconstruct: converged=" << (result.converged ? "yes" : "no")
            << " iterations=" << result.iterations;
  if (err_rel >= 0) std::cout << " relative_l2_error=" << err_rel;
  std::cout << "\n";
  return 0;
}

qns::SweepSpec parse_sweep_spec(const Json& j) {
  try {
    return qns::sweep_spec_from_json(j);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
}

void write_sweep_outputs(const fs::path& dir, const std::string& stem,
                         const qns::SweepResult& result, const Json& cfg,
                         bool plot, Json& summary_points) {
  qns::write_text_file(dir / (stem + ".csv"), qns::sweep_result_to_csv(result));
  Json rj = qns::sweep_result_to_json(result);
  rj["config_hash"] = experiment_hash(cfg);
  summary_points[stem] = rj;
  if (plot) {
    qns::SvgPlot fig(stem, "number of sequence sets", "relative L2 error");
    std::vector<double> xs, ys, err;
    for (const auto& p : result.points) {
      xs.push_back(p.k);
      ys.push_back(p.mean_error);
      err.push_back(p.ci_half_width);
    }
    fig.add_line(xs, ys, "#d62728", "mean error");
    fig.add_error_bars(xs, ys, err, "#d62728");
    qns::write_text_file(dir / (stem + ".svg"), fig.render());
  }
}

int cmd_sweep(const Json& cfg, bool plot) {
  const fs::path dir = ensure_out_dir(cfg);
  if (!cfg.contains("sweep")) throw ConfigError("sweep: needs a sweep section");
  const Json& sj = cfg.at("sweep");
  const std::string kind =
      sj.contains("kind") ? sj.at("kind").get<std::string>() : "accuracy_vs_k";
  Json summary{{"config_hash", experiment_hash(cfg)}, {"kind", kind}};
  Json points = Json::object();

  if (kind == "accuracy_vs_k") {
    Json spec_json = sj;
    spec_json.erase("kind");
    double threshold = 0.5;
    if (spec_json.contains("kc_threshold")) {
      threshold = spec_json.at("kc_threshold").get<double>();
      spec_json.erase("kc_threshold");
    }
    const qns::SweepSpec spec = parse_sweep_spec(spec_json);
    const qns::SweepResult result = qns::accuracy_vs_k(spec);
    write_sweep_outputs(dir, "sweep", result, cfg, plot, points);
    const auto kc = qns::critical_k(result, threshold);
    summary["k_c"] = kc ? Json(*kc) : Json();
    summary["kc_threshold"] = threshold;
  } else if (kind == "qd_comparison") {
    check_keys(sj, "sweep",
               {"kind", "n_grid", "m_segments", "tau", "n_set_values", "n_trials",
                "seed", "jobs", "c_tgv", "c_l1", "c_curv"},
               {"n_set_values"});
    qns::QdComparisonSpec spec;
    if (sj.contains("n_grid")) spec.n_grid = sj.at("n_grid").get<int>();
    if (sj.contains("m_segments")) spec.m_segments = sj.at("m_segments").get<int>();
    if (sj.contains("tau")) spec.tau = sj.at("tau").get<double>();
    spec.qd_params = qns::QdSurrogateParams::defaults(std::numbers::pi / spec.tau);
    spec.n_set_values = sj.at("n_set_values").get<std::vector<int>>();
    if (sj.contains("n_trials")) spec.n_trials = sj.at("n_trials").get<int>();
    if (sj.contains("seed")) spec.seed = sj.at("seed").get<std::uint64_t>();
    if (sj.contains("jobs")) spec.jobs = sj.at("jobs").get<int>();
    spec.cs_tgv_policy.kind = qns::LambdaPolicy::Kind::Scaled;
    spec.cs_tgv_policy.c2 = sj.contains("c_tgv") ? sj.at("c_tgv").get<double>() : 1e-5;
    spec.cs_r_tgv_policy.kind = qns::LambdaPolicy::Kind::Scaled;
    spec.cs_r_tgv_policy.c1 = sj.contains("c_l1") ? sj.at("c_l1").get<double>() : 1e-5;
    spec.cs_r_tgv_policy.c2 = sj.contains("c_curv") ? sj.at("c_curv").get<double>() : 1e-5;
    spec.solver.nonneg = true;
    const qns::QdComparison out = qns::qd_comparison(spec);
    write_sweep_outputs(dir, "cs_tgv", out.cs_tgv, cfg, plot, points);
    write_sweep_outputs(dir, "cs_r_tgv", out.cs_r_tgv, cfg, plot, points);
    write_sweep_outputs(dir, "cpmg", out.cpmg, cfg, plot, points);
    summary["transition_width_cs_r_tgv"] = qns::transition_width(out.cs_r_tgv);
    summary["transition_width_cpmg"] = qns::transition_width(out.cpmg);
  } else if (kind == "pulse_budget") {
    Json spec_json = sj;
    spec_json.erase("kind");
    std::vector<double> p_values = {0.5, 0.1, 0.05};
    if (spec_json.contains("p_values")) {
      p_values = spec_json.at("p_values").get<std::vector<double>>();
      spec_json.erase("p_values");
    }
    const qns::SweepSpec base = parse_sweep_spec(spec_json);
    const qns::PulseBudgetResult out = qns::pulse_budget_study(p_values, base);
    Json budget = Json::array();
    for (std::size_t i = 0; i < out.p_values.size(); ++i) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "budget_p%02d",
                    static_cast<int>(std::lround(out.p_values[i] * 100)));
      write_sweep_outputs(dir, stem, out.sweeps[i], cfg, plot, points);
      budget.push_back(Json{{"p", out.p_values[i]},
                            {"mean_pulses", out.mean_pulse_counts[i]},
                            {"expected_pulses", out.expected_pulse_counts[i]}});
    }
    summary["pulse_budget"] = budget;
  } else if (kind == "kc_scaling") {
    check_keys(sj, "sweep",
               {"kind", "s_values", "n_values", "n_grid", "tau", "k_max",
                "n_trials", "n_trials_n_sweep", "n2", "seed", "jobs", "c1",
                "kc_threshold"},
               {"s_values", "n_values"});
    const auto s_values = sj.at("s_values").get<std::vector<int>>();
    const auto n_values = sj.at("n_values").get<std::vector<int>>();
    const double threshold =
        sj.contains("kc_threshold") ? sj.at("kc_threshold").get<double>() : 0.5;
    auto run_kc = [&](int n, int s, int trials) -> std::optional<int> {
      qns::SweepSpec spec;
      spec.method = qns::Method::CsR;
      spec.family = qns::SpectrumFamily::Sparse;
      spec.grid_mode = qns::GridMode::Circulant;
      spec.n_grid = n;
      spec.m_segments = n;
      spec.tau = sj.contains("tau") ? sj.at("tau").get<double>() : 0.1;
      spec.sparsity = s;
      const int k_max = sj.contains("k_max") ? sj.at("k_max").get<int>() : 30;
      for (int k = 1; k <= k_max; ++k) spec.k_values.push_back(k);
      spec.n_trials = trials;
      spec.n2 = sj.contains("n2") ? sj.at("n2").get<int>() : 5000;
      spec.seed = sj.contains("seed") ? sj.at("seed").get<std::uint64_t>() : 20260808ULL;
      spec.lambda_policy.kind = qns::LambdaPolicy::Kind::Scaled;
      spec.lambda_policy.c1 = sj.contains("c1") ? sj.at("c1").get<double>() : 1e-4;
      spec.solver.nonneg = true;
      spec.jobs = sj.contains("jobs") ? sj.at("jobs").get<int>() : 1;
      return qns::critical_k(qns::accuracy_vs_k(spec), threshold);
    };
    const int trials = sj.contains("n_trials") ? sj.at("n_trials").get<int>() : 40;
    const int trials_n =
        sj.contains("n_trials_n_sweep") ? sj.at("n_trials_n_sweep").get<int>() : trials;
    const int base_n = sj.contains("n_grid") ? sj.at("n_grid").get<int>() : 100;
    std::vector<std::pair<double, double>> s_kc, n_kc;
    Json s_json = Json::array(), n_json = Json::array();
    for (int s : s_values) {
      const auto kc = run_kc(base_n, s, trials);
      if (kc) s_kc.emplace_back(s, *kc);
      s_json.push_back(Json{{"s", s}, {"k_c", kc ? Json(*kc) : Json()}});
    }
    for (int n : n_values) {
      const auto kc = run_kc(n, 2, trials_n);
      if (kc) n_kc.emplace_back(n, *kc);
      n_json.push_back(Json{{"n", n}, {"k_c", kc ? Json(*kc) : Json()}});
    }
    summary["kc_vs_s"] = s_json;
    summary["kc_vs_n"] = n_json;
    const qns::ScalingReport rep = qns::kc_scaling(s_kc, n_kc);
    summary["fit_linear_in_s"] = Json{{"slope", rep.kc_vs_s.slope},
                                      {"intercept", rep.kc_vs_s.intercept},
                                      {"r_squared", rep.kc_vs_s.r_squared}};
    summary["fit_quadratic_in_logn"] =
        Json{{"a", rep.kc_vs_logn.a},
             {"b", rep.kc_vs_logn.b},
             {"c", rep.kc_vs_logn.c},
             {"r_squared", rep.kc_vs_logn.r_squared},
             {"rss", rep.kc_vs_logn.rss},
             {"rss_linear_in_logn", rep.kc_vs_logn_linear.rss}};
  } else {
    throw ConfigError("sweep: unknown kind '" + kind + "'");
  }

  summary["results"] = points;
  qns::write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "sweep: wrote summary to " << (dir / "summary.json") << "\n";
  return 0;
}

int cmd_report(const std::string& summary_path) {
  Json summary;
  try {
    summary = Json::parse(qns::read_text_file(summary_path));
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  } catch (const std::exception& e) {
    throw IoError(std::string("malformed summary: ") + e.what());
  }
  std::cout << "kind: " << summary.value("kind", std::string("?")) << "\n";
  std::cout << "config_hash: " << summary.value("config_hash", std::string("?")) << "\n";
  if (summary.contains("k_c"))
    std::cout << "K_c: " << summary.at("k_c").dump() << "\n";
  if (summary.contains("fit_linear_in_s"))
    std::cout << "linear fit in s: " << summary.at("fit_linear_in_s").dump() << "\n";
  if (summary.contains("fit_quadratic_in_logn"))
    std::cout << "quadratic fit in log N: " << summary.at("fit_quadratic_in_logn").dump()
              << "\n";
  if (summary.contains("pulse_budget"))
    std::cout << "pulse budget: " << summary.at("pulse_budget").dump() << "\n";
  if (summary.contains("results")) {
    for (const auto& [name, rj] : summary.at("results").items()) {
      std::cout << name << ":";
      for (const auto& p : rj.at("points"))
        std::cout << " " << p.at("k").get<int>() << ":"
                  << p.at("mean_error").get<double>();
      std::cout << "\n";
    }
  }
  return 0;
}

// Built-in experiment presets, one per shipped figure-style run.
Json preset_config(const std::string& name) {
  if (name == "fig1a") {
    return Json::parse(R"({
      "seed": 9017,
      "grid": {"n": 100, "tau": 0.2, "mode": "general"},
      "spectrum": {"family": "piecewise_linear", "s_star": 4, "seed": 6},
      "sequences": {"type": "fourier_ensemble", "k": 20, "m": 50, "n1": 100},
      "shots": {"n2": 50},
      "solver": {"method": "tgv", "policy": "scaled", "c2": 1e-1,
                 "nonneg": false, "weights_from_sigma": true}
    })");
  }
  if (name == "fig2a") {
    return Json::parse(R"({
      "seed": 81,
      "grid": {"n": 100, "tau": 0.1, "mode": "circulant"},
      "spectrum": {"family": "sparse", "s": 4, "norm": 1.0, "seed": 701},
      "sequences": {"type": "rademacher", "k": 20, "m": 100, "p": 0.5},
      "shots": {"n2": 5000},
      "solver": {"method": "l1", "policy": "scaled", "c1": 1e-4, "nonneg": true}
    })");
  }
  if (name == "fig1b") {
    return Json::parse(R"({
      "seed": 11,
      "sweep": {"kind": "accuracy_vs_k", "method": "CS_TGV",
                "family": "piecewise_linear", "grid_mode": "general",
                "n_grid": 100, "m_segments": 100, "tau": 0.1, "sparsity": 4,
                "qd_params": {"peak_centers": [], "peak_widths": [], "peak_heights": [],
                               "background_amplitude": 1.0, "background_decay": 1.0},
                "k_values": [10, 15, 20, 25, 30, 35, 40, 50, 60],
                "n_trials": 40, "n1": 0, "n2": 0, "rademacher_p": 0.5,
                "seed": 11, "jobs": 1,
                "solver": {"lambda": 0, "lambda1": 0, "lambda2": 0, "rho": 1.0,
                            "tol_primal": 1e-8, "tol_dual": 1e-8, "max_iter": 20000,
                            "nonneg": false},
                "lambda_policy": {"kind": "scaled", "c1": 0, "c2": 1e-4,
                                   "cv_folds": 5, "cv_points": 12}}
    })");
  }
  if (name == "fig2b") {
    return Json::parse(R"({
      "seed": 20260808,
      "sweep": {"kind": "accuracy_vs_k", "method": "CS_R", "family": "sparse",
                "grid_mode": "circulant", "n_grid": 100, "m_segments": 100,
                "tau": 0.1, "sparsity": 3,
                "qd_params": {"peak_centers": [], "peak_widths": [], "peak_heights": [],
                               "background_amplitude": 1.0, "background_decay": 1.0},
                "k_values": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15],
                "n_trials": 40, "n1": 0, "n2": 5000, "rademacher_p": 0.5,
                "seed": 20260808, "jobs": 1, "kc_threshold": 0.5,
                "solver": {"lambda": 0, "lambda1": 0, "lambda2": 0, "rho": 1.0,
                            "tol_primal": 1e-8, "tol_dual": 1e-8, "max_iter": 20000,
                            "nonneg": true},
                "lambda_policy": {"kind": "scaled", "c1": 1e-4, "c2": 0,
                                   "cv_folds": 5, "cv_points": 12}}
    })");
  }
  if (name == "fig2c") {
    return Json::parse(R"({
      "seed": 20260808,
      "sweep": {"kind": "kc_scaling", "s_values": [2, 3, 4, 5, 6],
                "n_values": [50, 100, 200, 400], "n_grid": 100, "tau": 0.1,
                "k_max": 30, "n_trials": 40, "n_trials_n_sweep": 120,
                "n2": 5000, "seed": 20260808, "jobs": 2, "c1": 1e-4}
    })");
  }
  if (name == "fig3a") {
    return Json::parse(R"({
      "seed": 31,
      "grid": {"n": 200, "tau": 0.05, "mode": "general"},
      "spectrum": {"family": "qd_surrogate", "band_scaled_defaults": true},
      "sequences": {"type": "fourier_ensemble", "k": 70, "m": 200, "n1": 0},
      "solver": {"method": "tgv", "policy": "scaled", "c2": 1e-5, "nonneg": true,
                 "max_iter": 60000}
    })");
  }
  if (name == "fig3b") {
    return Json::parse(R"({
      "seed": 32,
      "grid": {"n": 200, "tau": 0.05, "mode": "general"},
      "spectrum": {"family": "qd_surrogate", "band_scaled_defaults": true},
      "sequences": {"type": "rademacher", "k": 90, "m": 400, "p": 0.5},
      "solver": {"method": "l1_tgv", "policy": "scaled", "c1": 1e-5, "c2": 1e-5,
                 "nonneg": true}
    })");
  }
  if (name == "fig3c") {
    return Json::parse(R"({
      "seed": 99,
      "sweep": {"kind": "qd_comparison", "n_grid": 200, "m_segments": 200,
                "tau": 0.05,
                "n_set_values": [10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110],
                "n_trials": 10, "seed": 99, "jobs": 2}
    })");
  }
  if (name == "fig4") {
    return Json::parse(R"({
      "seed": 44,
      "sweep": {"kind": "pulse_budget", "p_values": [0.5, 0.1, 0.05],
                "method": "CS_R+TGV", "family": "qd_surrogate",
                "grid_mode": "general", "n_grid": 100, "m_segments": 200,
                "tau": 0.1, "sparsity": 4,
                "qd_params": {"peak_centers": [4.5, 9.5, 14.5],
                               "peak_widths": [0.18, 0.22, 0.28],
                               "peak_heights": [1.0, 0.75, 0.55],
                               "background_amplitude": 0.3,
                               "background_decay": 5.5},
                "k_values": [20, 35, 50, 65, 80, 95, 110],
                "n_trials": 10, "n1": 0, "n2": 0, "rademacher_p": 0.5,
                "seed": 44, "jobs": 2,
                "solver": {"lambda": 0, "lambda1": 0, "lambda2": 0, "rho": 1.0,
                            "tol_primal": 1e-8, "tol_dual": 1e-8, "max_iter": 20000,
                            "nonneg": true},
                "lambda_policy": {"kind": "scaled", "c1": 1e-5, "c2": 1e-5,
                                   "cv_folds": 5, "cv_points": 12}}
    })");
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qubit noise spectroscopy: simulation and compressed reconstruction"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir, bundle_path, summary_path;
  std::optional<std::uint64_t> seed;
  bool plot = false;
  int jobs = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (JSON)");
    sub->add_option("--preset", preset, "built-in preset name (fig1a .. fig4)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the global seed");
    sub->add_option("--jobs", jobs, "parallel trial workers");
  };

  CLI::App* generate = app.add_subcommand("generate", "write spectrum and sequence files");
  add_common(generate);
  CLI::App* simulate = app.add_subcommand("simulate", "write a measurement bundle");
  add_common(simulate);
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "solve a measurement bundle");
  add_common(reconstruct);
  reconstruct->add_option("--bundle", bundle_path, "measurement bundle to solve");
  reconstruct->add_flag("--plot", plot, "emit an SVG overlay plot");
  CLI::App* sweep = app.add_subcommand("sweep", "run an experiment sweep");
  add_common(sweep);
  sweep->add_flag("--plot", plot, "emit SVG error curves");
  CLI::App* report = app.add_subcommand("report", "summarize a sweep summary.json");
  report->add_option("--summary", summary_path, "path to summary.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) return cmd_report(summary_path);
    const Json cfg = load_config(config_path, preset, seed, out_dir, jobs);
    if (generate->parsed()) return cmd_generate(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (reconstruct->parsed()) return cmd_reconstruct(cfg, bundle_path, plot);
    if (sweep->parsed()) return cmd_sweep(cfg, plot);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
