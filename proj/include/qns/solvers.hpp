// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qns {

struct SolverConfig {
  double lambda = 0.0;   // penalty weight for the single-penalty programs
  double lambda1 = 0.0;  // combined program: sparsity weight
  double lambda2 = 0.0;  // combined program: curvature weight
  double rho = 1.0;      // splitting penalty (residual-balancing adapted)
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
  int max_iter = 20000;
  bool nonneg = true;
  std::optional<Eigen::VectorXd> weights;  // per-measurement, ~1/sigma
  std::pair<double, double> boundary = {0.0, 0.0};  // curvature-route anchors
};

// Output of every reconstruction program. objective_trace records the best
// objective value reached up to each iteration (non-increasing). The dual
// vectors are the splitting certificates used by kkt_residual.
struct ReconstructionResult {
  Eigen::VectorXd spectrum_estimate;
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;
  double lambda_used = 0.0;
  double lambda1_used = 0.0;
  double lambda2_used = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  Eigen::VectorXd dual_point;       // subgradient certificate for the point penalty
  Eigen::VectorXd dual_curvature;   // certificate for the curvature penalty
  std::vector<std::string> warnings;
};

// argmin 1/2 ||chi - F S||^2 + lambda ||S||_1  (optionally S >= 0).
ReconstructionResult solve_l1(const Eigen::MatrixXd& f, const Eigen::VectorXd& chi,
                              const SolverConfig& cfg);

// argmin 1/2 ||chi - F S||^2 + lambda ||D2 S||_1  (optionally S >= 0).
ReconstructionResult solve_tgv(const Eigen::MatrixXd& f, const Eigen::VectorXd& chi,
                               const SolverConfig& cfg);

// argmin 1/2 ||chi - F S||^2 + lambda1 ||S||_1 + lambda2 ||D2 S||_1.
ReconstructionResult solve_l1_tgv(const Eigen::MatrixXd& f,
                                  const Eigen::VectorXd& chi,
                                  const SolverConfig& cfg);

// Two-step curvature-domain route for ideal Fourier rows with known j_k:
// recovers the curvature vector by an L1 program posed exactly in the
// curvature domain (rows mapped through the double-integration operator with
// the configured boundary anchors), then integrates. Rows with j = 0 are
// dropped with a warning; numerically fragile under noise by construction.
ReconstructionResult solve_curvature_l1(const Eigen::MatrixXd& f,
                                        const Eigen::VectorXd& chi,
                                        const std::vector<int>& j_indices,
                                        double delta_omega,
                                        const SolverConfig& cfg);

// min ||chi - F S||^2 s.t. S >= 0 via Lawson-Hanson active sets.
ReconstructionResult solve_nnls(const Eigen::MatrixXd& f, const Eigen::VectorXd& chi,
                                int max_iter = 0);

enum class Program { L1, Tgv, L1Tgv };

// Max-norm KKT violation at the returned point, using the solver's dual
// certificates: stationarity, subgradient validity and primal feasibility.
double kkt_residual(const Eigen::MatrixXd& f, const Eigen::VectorXd& chi,
                    const ReconstructionResult& result, Program program,
                    const SolverConfig& cfg);

struct CvResult {
  double lambda1 = 0.0;  // selected weights (lambda2 = 0 for 1-d grids)
  double lambda2 = 0.0;
  std::size_t selected_index = 0;
  std::vector<double> mean_residuals;  // per grid point
};

// K-fold cross-validation over measurement rows; selects the grid point with
// the smallest mean held-out squared residual, breaking ties (within 1e-12
// relative) toward the strongest regularization. Deterministic per seed.
CvResult cross_validate(const Eigen::MatrixXd& f, const Eigen::VectorXd& chi,
                        const std::vector<std::pair<double, double>>& weight_grid,
                        int folds, std::uint64_t seed, Program program,
                        const SolverConfig& base);

// 30 logarithmic points spanning [1e-5, 1e+1] * ||F^T chi||_inf.
std::vector<double> default_lambda_grid(const Eigen::MatrixXd& f,
                                        const Eigen::VectorXd& chi,
                                        int points = 30);

// Dense second-difference operator as a matrix, (N-2) x N.
Eigen::MatrixXd second_difference_matrix(int n);

}  // namespace qns
