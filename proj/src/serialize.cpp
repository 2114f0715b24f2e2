// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qns {

namespace {

Json vector_to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& x : j) v[i++] = x.get<double>();
  return v;
}

}  // namespace

Json grid_to_json(const FrequencyGrid& grid) {
  return Json{{"n", grid.n_points()},
              {"tau", grid.tau()},
              {"mode", grid.mode() == GridMode::Circulant ? "circulant" : "general"},
              {"omega_c", grid.omega_c()}};
}

FrequencyGrid grid_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  const double tau = j.at("tau").get<double>();
  GridMode mode = GridMode::General;
  if (j.contains("mode")) {
    const std::string m = j.at("mode").get<std::string>();
    if (m == "circulant") mode = GridMode::Circulant;
    else if (m != "general")
      throw std::invalid_argument("grid_from_json: unknown mode " + m);
  }
  const double omega_c = j.contains("omega_c") ? j.at("omega_c").get<double>() : 0.0;
  return FrequencyGrid(n, tau, mode, omega_c);
}

Json spectrum_to_json(const Spectrum& spectrum) {
  return Json{{"grid", grid_to_json(spectrum.grid)},
              {"values", vector_to_json(spectrum.values)}};
}

Spectrum spectrum_from_json(const Json& j) {
  return Spectrum(grid_from_json(j.at("grid")), vector_from_json(j.at("values")));
}

std::string spectrum_to_csv(const Spectrum& spectrum) {
  std::ostringstream out;
  out.precision(17);
  out << "omega,value\n";
  for (int i = 0; i < spectrum.size(); ++i)
    out << spectrum.grid.omega(i) << "," << spectrum.values[i] << "\n";
  return out.str();
}

Eigen::VectorXd spectrum_values_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("omega,value", 0) != 0)
    throw std::invalid_argument("spectrum csv: missing omega,value header");
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("spectrum csv: malformed line");
    vals.push_back(std::stod(line.substr(comma + 1)));
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

Json sequence_to_json(const SequenceSpec& seq, bool include_signs) {
  if (const auto* rad = std::get_if<RademacherSequence>(&seq)) {
    Json j{{"type", "rademacher"},
           {"M", rad->m_segments},
           {"p", rad->p},
           {"seed", rad->seed}};
    if (include_signs) j["signs"] = rad->signs;
    return j;
  }
  if (const auto* ens = std::get_if<FourierEnsemble>(&seq)) {
    return Json{{"type", "fourier_ensemble"},
                {"M", ens->m_segments},
                {"j", ens->j_index},
                {"n1", ens->n_realizations},
                {"seed", ens->seed}};
  }
  const auto& cpmg = std::get<CpmgSequence>(seq);
  return Json{{"type", "cpmg"},
              {"n_pulses", cpmg.n_pulses},
              {"total_time", cpmg.total_time}};
}

SequenceSpec sequence_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "rademacher") {
    RademacherSequence seq = sample_rademacher(j.at("M").get<int>(),
                                               j.at("p").get<double>(),
                                               j.at("seed").get<std::uint64_t>());
    if (j.contains("signs")) {
      const auto signs = j.at("signs").get<std::vector<int>>();
      if (signs != seq.signs)
        throw std::invalid_argument("sequence_from_json: signs do not match seed");
    }
    return seq;
  }
  if (type == "fourier_ensemble") {
    FourierEnsemble ens;
    ens.m_segments = j.at("M").get<int>();
    ens.j_index = j.at("j").get<int>();
    ens.n_realizations = j.at("n1").get<int>();
    ens.seed = j.at("seed").get<std::uint64_t>();
    return ens;
  }
  if (type == "cpmg") {
    return CpmgSequence{j.at("n_pulses").get<int>(),
                        j.at("total_time").get<double>()};
  }
  throw std::invalid_argument("sequence_from_json: unknown type " + type);
}

namespace {

Json row_meta_to_json(const RowMeta& meta) {
  return Json{{"type", meta.type},       {"M", meta.m_segments},
              {"p", meta.p},             {"j", meta.j_index},
              {"n1", meta.n_realizations}, {"n_pulses", meta.n_pulses},
              {"total_time", meta.total_time}, {"seed", meta.seed}};
}

RowMeta row_meta_from_json(const Json& j) {
  RowMeta meta;
  meta.type = j.at("type").get<std::string>();
  meta.m_segments = j.at("M").get<int>();
  meta.p = j.at("p").get<double>();
  meta.j_index = j.at("j").get<int>();
  meta.n_realizations = j.at("n1").get<int>();
  meta.n_pulses = j.at("n_pulses").get<int>();
  meta.total_time = j.at("total_time").get<double>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  return meta;
}

}  // namespace

Json bundle_to_json(const MeasurementMatrix& matrix, const MeasurementRecord& record,
                    const FrequencyGrid& grid, const Json& truth) {
  Json rows = Json::array();
  for (int r = 0; r < matrix.rows.rows(); ++r)
    for (int c = 0; c < matrix.rows.cols(); ++c) rows.push_back(matrix.rows(r, c));
  Json meta = Json::array();
  for (const auto& m : matrix.row_meta) meta.push_back(row_meta_to_json(m));
  Json j{{"grid", grid_to_json(grid)},
         {"delta_omega", matrix.delta_omega},
         {"k", matrix.rows.rows()},
         {"n", matrix.rows.cols()},
         {"row_meta", meta},
         {"f_row_major", rows},
         {"chi", vector_to_json(record.chi)},
         {"chi_ideal", vector_to_json(record.chi_ideal)},
         {"chi_sigma", vector_to_json(record.chi_sigma)},
         {"clipped", record.clipped},
         {"shots", record.shots},
         {"seed", record.seed}};
  if (!truth.is_null()) j["truth"] = truth;
  return j;
}

MeasurementBundle bundle_from_json(const Json& j) {
  MeasurementBundle bundle;
  bundle.grid = grid_from_json(j.at("grid"));
  const int k = j.at("k").get<int>();
  const int n = j.at("n").get<int>();
  bundle.matrix.delta_omega = j.at("delta_omega").get<double>();
  bundle.matrix.rows.resize(k, n);
  const auto& flat = j.at("f_row_major");
  if (static_cast<int>(flat.size()) != k * n)
    throw std::invalid_argument("bundle_from_json: row data size mismatch");
  int idx = 0;
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < n; ++c)
      bundle.matrix.rows(r, c) = flat[static_cast<std::size_t>(idx++)].get<double>();
  for (const auto& m : j.at("row_meta"))
    bundle.matrix.row_meta.push_back(row_meta_from_json(m));
  if (static_cast<int>(bundle.matrix.row_meta.size()) != k)
    throw std::invalid_argument("bundle_from_json: row_meta count mismatch");
  bundle.record.chi = vector_from_json(j.at("chi"));
  bundle.record.chi_ideal = vector_from_json(j.at("chi_ideal"));
  bundle.record.chi_sigma = vector_from_json(j.at("chi_sigma"));
  bundle.record.clipped = j.at("clipped").get<std::vector<bool>>();
  bundle.record.shots = j.at("shots").get<int>();
  bundle.record.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("truth")) bundle.truth = j.at("truth");
  return bundle;
}

Json result_to_json(const ReconstructionResult& result) {
  return Json{{"estimate", vector_to_json(result.spectrum_estimate)},
              {"objective_trace", result.objective_trace},
              {"converged", result.converged},
              {"iterations", result.iterations},
              {"lambda_used", result.lambda_used},
              {"lambda1_used", result.lambda1_used},
              {"lambda2_used", result.lambda2_used},
              {"primal_residual", result.primal_residual},
              {"dual_residual", result.dual_residual},
              {"warnings", result.warnings}};
}

ReconstructionResult result_from_json(const Json& j) {
  ReconstructionResult r;
  r.spectrum_estimate = vector_from_json(j.at("estimate"));
  r.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  r.converged = j.at("converged").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.lambda_used = j.at("lambda_used").get<double>();
  r.lambda1_used = j.at("lambda1_used").get<double>();
  r.lambda2_used = j.at("lambda2_used").get<double>();
  r.primal_residual = j.at("primal_residual").get<double>();
  r.dual_residual = j.at("dual_residual").get<double>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

namespace {

std::string method_name(Method m) {
  switch (m) {
    case Method::CsTgv: return "CS_TGV";
    case Method::CsR: return "CS_R";
    case Method::CsRTgv: return "CS_R+TGV";
    case Method::Cpmg: return "CPMG";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "CS_TGV") return Method::CsTgv;
  if (name == "CS_R") return Method::CsR;
  if (name == "CS_R+TGV") return Method::CsRTgv;
  if (name == "CPMG") return Method::Cpmg;
  throw std::invalid_argument("unknown method " + name);
}

std::string family_name(SpectrumFamily f) {
  switch (f) {
    case SpectrumFamily::Sparse: return "sparse";
    case SpectrumFamily::PiecewiseLinear: return "piecewise_linear";
    case SpectrumFamily::QdSurrogate: return "qd_surrogate";
  }
  return "?";
}

SpectrumFamily family_from_name(const std::string& name) {
  if (name == "sparse") return SpectrumFamily::Sparse;
  if (name == "piecewise_linear") return SpectrumFamily::PiecewiseLinear;
  if (name == "qd_surrogate") return SpectrumFamily::QdSurrogate;
  throw std::invalid_argument("unknown spectrum family " + name);
}

Json qd_params_to_json(const QdSurrogateParams& p) {
  return Json{{"peak_centers", p.peak_centers},
              {"peak_widths", p.peak_widths},
              {"peak_heights", p.peak_heights},
              {"background_amplitude", p.background_amplitude},
              {"background_decay", p.background_decay}};
}

QdSurrogateParams qd_params_from_json(const Json& j) {
  QdSurrogateParams p;
  p.peak_centers = j.at("peak_centers").get<std::vector<double>>();
  p.peak_widths = j.at("peak_widths").get<std::vector<double>>();
  p.peak_heights = j.at("peak_heights").get<std::vector<double>>();
  p.background_amplitude = j.at("background_amplitude").get<double>();
  p.background_decay = j.at("background_decay").get<double>();
  return p;
}

Json policy_to_json(const LambdaPolicy& p) {
  std::string kind = "fixed";
  if (p.kind == LambdaPolicy::Kind::Scaled) kind = "scaled";
  if (p.kind == LambdaPolicy::Kind::CvFirstTrial) kind = "cv_first_trial";
  return Json{{"kind", kind}, {"c1", p.c1}, {"c2", p.c2},
              {"cv_folds", p.cv_folds}, {"cv_points", p.cv_points}};
}

LambdaPolicy policy_from_json(const Json& j) {
  LambdaPolicy p;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fixed") p.kind = LambdaPolicy::Kind::Fixed;
  else if (kind == "scaled") p.kind = LambdaPolicy::Kind::Scaled;
  else if (kind == "cv_first_trial") p.kind = LambdaPolicy::Kind::CvFirstTrial;
  else throw std::invalid_argument("unknown lambda policy " + kind);
  p.c1 = j.at("c1").get<double>();
  p.c2 = j.at("c2").get<double>();
  p.cv_folds = j.at("cv_folds").get<int>();
  p.cv_points = j.at("cv_points").get<int>();
  return p;
}

Json solver_to_json(const SolverConfig& cfg) {
  return Json{{"lambda", cfg.lambda},   {"lambda1", cfg.lambda1},
              {"lambda2", cfg.lambda2}, {"rho", cfg.rho},
              {"tol_primal", cfg.tol_primal}, {"tol_dual", cfg.tol_dual},
              {"max_iter", cfg.max_iter},     {"nonneg", cfg.nonneg}};
}

SolverConfig solver_from_json(const Json& j) {
  SolverConfig cfg;
  cfg.lambda = j.at("lambda").get<double>();
  cfg.lambda1 = j.at("lambda1").get<double>();
  cfg.lambda2 = j.at("lambda2").get<double>();
  cfg.rho = j.at("rho").get<double>();
  cfg.tol_primal = j.at("tol_primal").get<double>();
  cfg.tol_dual = j.at("tol_dual").get<double>();
  cfg.max_iter = j.at("max_iter").get<int>();
  cfg.nonneg = j.at("nonneg").get<bool>();
  return cfg;
}

}  // namespace

Json sweep_spec_to_json(const SweepSpec& spec) {
  return Json{{"method", method_name(spec.method)},
              {"family", family_name(spec.family)},
              {"grid_mode",
               spec.grid_mode == GridMode::Circulant ? "circulant" : "general"},
              {"n_grid", spec.n_grid},
              {"m_segments", spec.m_segments},
              {"tau", spec.tau},
              {"sparsity", spec.sparsity},
              {"qd_params", qd_params_to_json(spec.qd_params)},
              {"k_values", spec.k_values},
              {"n_trials", spec.n_trials},
              {"n1", spec.n1},
              {"n2", spec.n2},
              {"rademacher_p", spec.rademacher_p},
              {"seed", spec.seed},
              {"solver", solver_to_json(spec.solver)},
              {"lambda_policy", policy_to_json(spec.lambda_policy)},
              {"jobs", spec.jobs}};
}

SweepSpec sweep_spec_from_json(const Json& j) {
  SweepSpec spec;
  spec.method = method_from_name(j.at("method").get<std::string>());
  spec.family = family_from_name(j.at("family").get<std::string>());
  const std::string mode = j.at("grid_mode").get<std::string>();
  if (mode == "circulant") spec.grid_mode = GridMode::Circulant;
  else if (mode == "general") spec.grid_mode = GridMode::General;
  else throw std::invalid_argument("unknown grid mode " + mode);
  spec.n_grid = j.at("n_grid").get<int>();
  spec.m_segments = j.at("m_segments").get<int>();
  spec.tau = j.at("tau").get<double>();
  spec.sparsity = j.at("sparsity").get<int>();
  spec.qd_params = qd_params_from_json(j.at("qd_params"));
  spec.k_values = j.at("k_values").get<std::vector<int>>();
  spec.n_trials = j.at("n_trials").get<int>();
  spec.n1 = j.at("n1").get<int>();
  spec.n2 = j.at("n2").get<int>();
  spec.rademacher_p = j.at("rademacher_p").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.solver = solver_from_json(j.at("solver"));
  spec.lambda_policy = policy_from_json(j.at("lambda_policy"));
  spec.jobs = j.at("jobs").get<int>();
  return spec;
}

Json sweep_result_to_json(const SweepResult& result) {
  Json points = Json::array();
  for (const auto& p : result.points) {
    points.push_back(Json{{"k", p.k},
                          {"mean_error", p.mean_error},
                          {"ci_half_width", p.ci_half_width},
                          {"failed_trials", p.failed_trials},
                          {"lambda1", p.lambda1},
                          {"lambda2", p.lambda2},
                          {"errors", p.errors},
                          {"pulse_counts", p.pulse_counts}});
  }
  const Json spec = sweep_spec_to_json(result.spec);
  return Json{{"spec", spec}, {"spec_hash", config_hash(spec)}, {"points", points}};
}

std::string sweep_result_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "k,trial,error,pulses\n";
  for (const auto& p : result.points)
    for (std::size_t t = 0; t < p.errors.size(); ++t)
      out << p.k << "," << t << "," << p.errors[t] << "," << p.pulse_counts[t]
          << "\n";
  return out.str();
}

std::string config_hash(const Json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qns
