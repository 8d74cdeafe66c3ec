#pragma once

#include <span>
#include <vector>

#include "medlda/corpus.hpp"
#include "medlda/svm.hpp"
#include "medlda/train_config.hpp"
#include "medlda/var_core.hpp"

namespace medlda {

inline constexpr double kDelta2Floor = 1e-6;

enum class RegressionVariant {
  kFull,     // max-margin training on top of supervised LDA; q(eta) = N(lambda, Sigma)
  kPartial,  // max-margin training on top of unsupervised LDA; q(eta) = N(lambda, I)
};

// Gaussian posterior over the regression weights.
struct RegressionHead {
  RegressionVariant variant = RegressionVariant::kFull;
  Vector lambda;
  Matrix sigma;
  double delta2 = 1.0;  // response noise variance; unused by the partial variant

  Matrix eta_second_moment() const { return sigma + lambda * lambda.transpose(); }
};

struct RegressionDuals {
  Vector mu;
  Vector mu_star;

  Vector coefficients() const { return mu - mu_star; }
  static RegressionDuals zeros(int docs) { return {Vector::Zero(docs), Vector::Zero(docs)}; }
};

double epsilon_hinge(double residual, double epsilon);

// Per-token phi update of the full variant:
//   phi ∝ exp(E[log theta] + log beta_w + y/(N d2) E[eta]
//             - (2 E[eta eta^T] others + diag E[eta eta^T]) / (2 N^2 d2)
//             + E[eta] (mu - mu*) / N)
// with others = sum of the document's other phi rows.
Vector phi_update_full(int term, const Vector& gamma, const TopicModelParams& params,
                       const RegressionHead& head, const Vector& phi_others, double y, double mu,
                       double mu_star, int token_count);

// Per-token phi update of the partial variant (no response-likelihood terms).
Vector phi_update_partial(int term, const Vector& gamma, const TopicModelParams& params,
                          const Vector& e_eta, double mu, double mu_star, int token_count);

// q(eta) of the full variant for fixed multipliers:
//   Sigma = (I + E[A^T A] / d2)^-1,  lambda = Sigma sum_d (mu_d - mu*_d + y_d/d2) E[zbar_d]
RegressionHead posterior_eta_full(std::span<const Vector> zbar_means, const Matrix& zbar_outer_sum,
                                  const Vector& y, double delta2, const RegressionDuals& duals);

// q(eta) of the partial variant: N(sum_d (mu_d - mu*_d) E[zbar_d], I).
RegressionHead posterior_eta_partial(std::span<const Vector> zbar_means,
                                     const RegressionDuals& duals);

// Change of variables that turns the full variant's q(eta) mean problem
// (quadratic form Sigma^-1, linear drift nu = sum_d y_d/d2 E[zbar_d]) into a
// standard SVR. With Sigma^-1 = U^T U:
//   x_d = U^-T E[zbar_d],  y'_d = y_d - nu^T Sigma E[zbar_d],
//   lambda' = U (lambda - Sigma nu).
struct SvrTransform {
  svm::SvrInstance instance;
  Matrix u;         // upper-triangular Cholesky factor of Sigma^-1
  Vector sigma_nu;  // Sigma nu

  Vector to_lambda(const Vector& lambda_prime) const;
  Vector to_prime(const Vector& lambda) const;
};

SvrTransform svr_transform(const Matrix& sigma, std::span<const Vector> zbar_means,
                           const Vector& y, double delta2, double c, double epsilon);

// Objective of the q(eta) mean problem in the original coordinates:
//   1/2 lambda^T Sigma^-1 lambda - lambda^T nu + C sum eps-hinge(y_d - lambda.E[zbar_d]).
double eta_mean_objective(const Vector& lambda, const Matrix& sigma,
                          std::span<const Vector> zbar_means, const Vector& y, double delta2,
                          double c, double epsilon);

// delta2 = (y^T y - 2 y^T E[A] lambda + tr(E[A^T A] E[eta eta^T])) / D, floored.
double update_delta2(const Vector& y, std::span<const Vector> zbar_means,
                     const Matrix& zbar_outer_sum, const RegressionHead& head);

// -E[log N(y | eta^T zbar, d2)] for one document.
double gaussian_response_nll(double y, const ZbarMoments& moments, const Vector& lambda,
                             const Matrix& eta_second_moment, double delta2);

// Full-variant E-step for one document, in place. `coef` is mu_d - mu*_d and
// is only read under DualCoupling::kPreviousDuals.
int e_step_full(std::span<const int> tokens, const TopicModelParams& params,
                const RegressionHead& head, double y, double coef, double c, double epsilon,
                DualCoupling coupling, DocVariational& var, const InnerSchedule& schedule);

int e_step_partial(std::span<const int> tokens, const TopicModelParams& params,
                   const RegressionHead& head, double y, double coef, double c, double epsilon,
                   DualCoupling coupling, DocVariational& var, const InnerSchedule& schedule);

// Training objectives evaluated at a state.
//   P1: KL(q(eta) || N(0,I)) + sum_d [L^u_d + response NLL_d] + C sum eps-hinge
//   P2: sum_d L^u_d + KL(q(eta) || N(0,I)) + C sum eps-hinge
double objective_p1(const std::vector<std::vector<int>>& tokens, std::span<const DocVariational> vars,
                    const TopicModelParams& params, const RegressionHead& head, const Vector& y,
                    double c, double epsilon);
double objective_p2(const std::vector<std::vector<int>>& tokens, std::span<const DocVariational> vars,
                    const TopicModelParams& params, const RegressionHead& head, const Vector& y,
                    double c, double epsilon);

struct RegressionModel {
  TopicModelParams params;
  RegressionHead head;
  RegressionDuals duals;
  std::vector<double> trace;  // objective after each outer iteration
  double c = 0.0;
  double epsilon = 0.0;
};

RegressionModel train_regression(const Corpus& corpus, const ResponseVector& responses,
                                 const TrainConfig& config, RegressionVariant variant);

// E[eta]^T E[zbar] with an unsupervised E-step on the document.
double predict_regression(const RegressionModel& model, const Document& doc,
                          const InnerSchedule& schedule = {});
std::vector<double> predict_regression(const RegressionModel& model, const Corpus& corpus,
                                       const InnerSchedule& schedule = {}, int threads = 1);

}  // namespace medlda
