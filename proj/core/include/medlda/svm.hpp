#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medlda/var_core.hpp"

namespace medlda::svm {

struct SolverOptions {
  double tolerance = 1e-6;   // KKT residual and duality gap
  long max_passes = 100000;  // one pass = one update per data point
};

// Linear epsilon-insensitive SVR without a bias term:
//   min_w 1/2 |w|^2 + C sum_d (xi_d + xi*_d)
//   s.t. y_d - w.x_d <= eps + xi_d,  w.x_d - y_d <= eps + xi*_d,  xi, xi* >= 0
struct SvrInstance {
  RowMatrix x;  // one point per row
  Vector y;
  double c = 1.0;
  double epsilon = 0.0;

  int size() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
  void validate() const;
};

struct SvrSolution {
  Vector weights;
  Vector mu;       // multiplier of y - w.x <= eps + xi
  Vector mu_star;  // multiplier of w.x - y <= eps + xi*
  double dual_objective = 0.0;
  double primal_objective = 0.0;
  long passes = 0;
  bool converged = false;

  // mu - mu_star; the solver works in this signed form.
  Vector coefficients() const { return mu - mu_star; }
};

double svr_primal_objective(const SvrInstance& inst, const Vector& weights);
double svr_dual_objective(const SvrInstance& inst, const Vector& mu, const Vector& mu_star);

// Greedy coordinate ascent on the dual, one (mu_d, mu*_d) pair at a time,
// always picking the worst KKT violator. `warm_start` holds signed
// coefficients mu - mu* and is clipped into the box.
SvrSolution solve_svr(const SvrInstance& inst, const SolverOptions& options = {},
                      const std::optional<Vector>& warm_start = std::nullopt);

// Multi-class SVM dual over expected topic features:
//   max_mu -1/2 |sum_d sum_{y != y_d} mu_d(y) df_d(y)|^2 + sum mu
//   s.t. mu >= 0, sum_{y != y_d} mu_d(y) <= C
// where df_d(y) = f(y_d, zbar_d) - f(y, zbar_d) and f(y, z) places z in
// block y of an M*K vector.
struct McSvmInstance {
  RowMatrix features;       // D x K, E[zbar_d]
  std::vector<int> labels;  // zero-based
  int classes = 2;
  double c = 1.0;

  int size() const { return static_cast<int>(features.rows()); }
  int topics() const { return static_cast<int>(features.cols()); }
  void validate() const;
};

struct McSvmSolution {
  Vector lambda;     // M*K, class blocks of length K
  RowMatrix mu;      // D x M; mu(d, y_d) is unused and kept at zero
  double dual_objective = 0.0;
  double primal_objective = 0.0;
  std::vector<double> dual_trace;  // after each pass
  long passes = 0;
  bool converged = false;
};

// f(y, z): z in block y (zero-based), zeros elsewhere.
Vector feature_vector(int label, const Vector& zbar, int classes);

// lambda = sum_d sum_{y != y_d} mu_d(y) df_d(y).
Vector mc_lambda_from_duals(const McSvmInstance& inst, const RowMatrix& mu);
double mc_primal_objective(const McSvmInstance& inst, const Vector& lambda);
double mc_dual_objective(const McSvmInstance& inst, const RowMatrix& mu);

// Cyclic block coordinate ascent: each document's multipliers (plus the
// implicit slack C - sum mu_d) form a scaled simplex, improved by exact line
// search along one coordinate pair at a time.
McSvmSolution solve_multiclass_svm(const McSvmInstance& inst, const SolverOptions& options = {},
                                   const std::optional<RowMatrix>& warm_start = std::nullopt);

struct KktReport {
  double max_primal_violation = 0.0;  // weight/multiplier mismatch and box violations
  double max_complementarity_violation = 0.0;
  double duality_gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;

  std::string to_text() const;
};

KktReport kkt_report(const SvrSolution& solution, const SvrInstance& inst);
KktReport kkt_report(const McSvmSolution& solution, const McSvmInstance& inst);

}  // namespace medlda::svm
