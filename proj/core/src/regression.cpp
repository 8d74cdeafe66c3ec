#include "medlda/regression.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "margin_step.hpp"
#include "medlda/error.hpp"
#include "parallel.hpp"

namespace medlda {

void TrainConfig::validate() const {
  if (topics < 1) throw ValidationError("topic count must be >= 1");
  if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("C must be >= 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be >= 0");
  if (em_max_iter < 1) throw ValidationError("EM iteration cap must be >= 1");
  if (!(em_rel_tol >= 0.0)) throw ValidationError("EM tolerance must be >= 0");
  if (inner.max_iter < 1) throw ValidationError("inner iteration cap must be >= 1");
  if (!(solver_tol > 0.0)) throw ValidationError("solver tolerance must be positive");
  if (threads < 1) throw ValidationError("thread count must be >= 1");
}

double epsilon_hinge(double residual, double epsilon) {
  return std::max(0.0, std::abs(residual) - epsilon);
}

namespace {

// Supervised exponent terms of the full update that do not depend on the
// margin multiplier: y/(N d2) lambda - (2 S others + diag S) / (2 N^2 d2).
Vector full_response_terms(const RegressionHead& head, const Matrix& second, const Vector& others,
                           double y, int n) {
  const double nd = static_cast<double>(n);
  return (y / (nd * head.delta2)) * head.lambda -
         (2.0 * second * others + second.diagonal()) / (2.0 * nd * nd * head.delta2);
}

void check_token(int term, const TopicModelParams& params) {
  if (term < 0 || term >= params.vocab_size()) {
    throw ValidationError("term id " + std::to_string(term) + " outside vocabulary");
  }
}

}  // namespace

Vector phi_update_full(int term, const Vector& gamma, const TopicModelParams& params,
                       const RegressionHead& head, const Vector& phi_others, double y, double mu,
                       double mu_star, int token_count) {
  check_token(term, params);
  const double nd = static_cast<double>(token_count);
  Vector logits = dirichlet_expectation(gamma) + params.log_beta().col(term) +
                  full_response_terms(head, head.eta_second_moment(), phi_others, y, token_count) +
                  head.lambda * ((mu - mu_star) / nd);
  softmax_inplace(logits);
  return logits;
}

Vector phi_update_partial(int term, const Vector& gamma, const TopicModelParams& params,
                          const Vector& e_eta, double mu, double mu_star, int token_count) {
  check_token(term, params);
  Vector logits = dirichlet_expectation(gamma) + params.log_beta().col(term);
  const double coef = mu - mu_star;
  if (coef != 0.0) logits += e_eta * (coef / static_cast<double>(token_count));
  softmax_inplace(logits);
  return logits;
}

RegressionHead posterior_eta_full(std::span<const Vector> zbar_means, const Matrix& zbar_outer_sum,
                                  const Vector& y, double delta2, const RegressionDuals& duals) {
  const auto k = zbar_outer_sum.rows();
  const auto n = static_cast<Eigen::Index>(zbar_means.size());
  if (y.size() != n || duals.mu.size() != n || duals.mu_star.size() != n) {
    throw ValidationError("posterior: one response and multiplier pair per document required");
  }
  const Matrix precision = Matrix::Identity(k, k) + zbar_outer_sum / delta2;
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) throw NumericalError("Cholesky of I + E[A^T A]/delta2 failed");
  Vector a = Vector::Zero(k);
  for (Eigen::Index d = 0; d < n; ++d) {
    a += (duals.mu(d) - duals.mu_star(d) + y(d) / delta2) * zbar_means[static_cast<std::size_t>(d)];
  }
  RegressionHead head;
  head.variant = RegressionVariant::kFull;
  head.sigma = llt.solve(Matrix::Identity(k, k));
  head.sigma = 0.5 * (head.sigma + head.sigma.transpose()).eval();
  head.lambda = llt.solve(a);
  head.delta2 = delta2;
  return head;
}

RegressionHead posterior_eta_partial(std::span<const Vector> zbar_means,
                                     const RegressionDuals& duals) {
  if (zbar_means.empty()) throw ValidationError("posterior: no documents");
  const auto k = zbar_means.front().size();
  RegressionHead head;
  head.variant = RegressionVariant::kPartial;
  head.lambda = Vector::Zero(k);
  for (std::size_t d = 0; d < zbar_means.size(); ++d) {
    const auto i = static_cast<Eigen::Index>(d);
    head.lambda += (duals.mu(i) - duals.mu_star(i)) * zbar_means[d];
  }
  head.sigma = Matrix::Identity(k, k);
  head.delta2 = 1.0;
  return head;
}

Vector SvrTransform::to_lambda(const Vector& lambda_prime) const {
  return u.triangularView<Eigen::Upper>().solve(lambda_prime) + sigma_nu;
}

Vector SvrTransform::to_prime(const Vector& lambda) const { return u * (lambda - sigma_nu); }

SvrTransform svr_transform(const Matrix& sigma, std::span<const Vector> zbar_means,
                           const Vector& y, double delta2, double c, double epsilon) {
  const auto k = sigma.rows();
  const auto n = static_cast<Eigen::Index>(zbar_means.size());
  if (y.size() != n) throw ValidationError("svr_transform: one response per document required");
  Eigen::LLT<Matrix> sigma_llt(sigma);
  if (sigma_llt.info() != Eigen::Success) throw NumericalError("Sigma is not positive definite");
  const Matrix precision = sigma_llt.solve(Matrix::Identity(k, k));
  Eigen::LLT<Matrix> llt(0.5 * (precision + precision.transpose()));
  if (llt.info() != Eigen::Success) throw NumericalError("Cholesky of Sigma^-1 failed");

  SvrTransform t;
  t.u = llt.matrixU();
  Vector nu = Vector::Zero(k);
  for (Eigen::Index d = 0; d < n; ++d) nu += (y(d) / delta2) * zbar_means[static_cast<std::size_t>(d)];
  t.sigma_nu = sigma * nu;

  t.instance.x.resize(n, k);
  t.instance.y.resize(n);
  for (Eigen::Index d = 0; d < n; ++d) {
    const Vector& z = zbar_means[static_cast<std::size_t>(d)];
    // x_d = U^-T z  <=>  U^T x_d = z
    t.instance.x.row(d) = t.u.transpose().triangularView<Eigen::Lower>().solve(z).transpose();
    t.instance.y(d) = y(d) - t.sigma_nu.dot(z);
  }
  t.instance.c = c;
  t.instance.epsilon = epsilon;
  return t;
}

double eta_mean_objective(const Vector& lambda, const Matrix& sigma,
                          std::span<const Vector> zbar_means, const Vector& y, double delta2,
                          double c, double epsilon) {
  const auto k = sigma.rows();
  const Matrix precision = sigma.llt().solve(Matrix::Identity(k, k));
  Vector nu = Vector::Zero(k);
  double loss = 0.0;
  for (std::size_t d = 0; d < zbar_means.size(); ++d) {
    const auto i = static_cast<Eigen::Index>(d);
    nu += (y(i) / delta2) * zbar_means[d];
    loss += epsilon_hinge(y(i) - lambda.dot(zbar_means[d]), epsilon);
  }
  return 0.5 * lambda.dot(precision * lambda) - lambda.dot(nu) + c * loss;
}

double update_delta2(const Vector& y, std::span<const Vector> zbar_means,
                     const Matrix& zbar_outer_sum, const RegressionHead& head) {
  const auto n = static_cast<Eigen::Index>(zbar_means.size());
  if (n == 0 || y.size() != n) throw ValidationError("update_delta2: shape mismatch");
  double cross = 0.0;
  for (Eigen::Index d = 0; d < n; ++d) cross += y(d) * zbar_means[static_cast<std::size_t>(d)].dot(head.lambda);
  const double quad = (zbar_outer_sum * head.eta_second_moment()).trace();
  const double value = (y.squaredNorm() - 2.0 * cross + quad) / static_cast<double>(n);
  return std::max(value, kDelta2Floor);
}

double gaussian_response_nll(double y, const ZbarMoments& moments, const Vector& lambda,
                             const Matrix& eta_second_moment, double delta2) {
  const double expected_sq =
      y * y - 2.0 * y * lambda.dot(moments.mean) + (eta_second_moment * moments.outer).trace();
  return 0.5 * std::log(2.0 * std::numbers::pi * delta2) + expected_sq / (2.0 * delta2);
}

int e_step_full(std::span<const int> tokens, const TopicModelParams& params,
                const RegressionHead& head, double y, double coef, double c, double epsilon,
                DualCoupling coupling, DocVariational& var, const InnerSchedule& schedule) {
  const int n = static_cast<int>(tokens.size());
  const double nd = static_cast<double>(n);
  const Matrix second = head.eta_second_moment();
  const Vector dir = head.lambda / nd;
  return coordinate_ascent(tokens, params, var, schedule,
                           [&](int, const Vector& base, const Vector& others) {
                             Vector logits = base + full_response_terms(head, second, others, y, n);
                             if (coupling == DualCoupling::kPreviousDuals) {
                               if (coef != 0.0) logits += dir * coef;
                               softmax_inplace(logits);
                               return logits;
                             }
                             return detail::exact_regression_row(logits, dir, dir.dot(others), y, c,
                                                                 epsilon);
                           });
}

int e_step_partial(std::span<const int> tokens, const TopicModelParams& params,
                   const RegressionHead& head, double y, double coef, double c, double epsilon,
                   DualCoupling coupling, DocVariational& var, const InnerSchedule& schedule) {
  const double nd = static_cast<double>(tokens.size());
  const Vector dir = head.lambda / nd;
  return coordinate_ascent(tokens, params, var, schedule,
                           [&](int, const Vector& base, const Vector& others) {
                             if (coupling == DualCoupling::kPreviousDuals) {
                               Vector logits = base;
                               if (coef != 0.0) logits += dir * coef;
                               softmax_inplace(logits);
                               return logits;
                             }
                             return detail::exact_regression_row(base, dir, dir.dot(others), y, c,
                                                                 epsilon);
                           });
}

namespace {

void check_vars(const std::vector<std::vector<int>>& tokens, std::span<const DocVariational> vars,
                const Vector& y) {
  if (tokens.size() != vars.size() || static_cast<Eigen::Index>(tokens.size()) != y.size()) {
    throw ValidationError("objective: documents, variational states and responses must align");
  }
}

}  // namespace

double objective_p1(const std::vector<std::vector<int>>& tokens, std::span<const DocVariational> vars,
                    const TopicModelParams& params, const RegressionHead& head, const Vector& y,
                    double c, double epsilon) {
  check_vars(tokens, vars, y);
  const Matrix second = head.eta_second_moment();
  double value = gaussian_kl_to_standard(head.lambda, head.sigma);
  double loss = 0.0;
  for (std::size_t d = 0; d < tokens.size(); ++d) {
    const auto moments = zbar_moments(vars[d].phi);
    value += lda_bound(tokens[d], vars[d], params);
    value += gaussian_response_nll(y(static_cast<Eigen::Index>(d)), moments, head.lambda, second,
                                   head.delta2);
    loss += epsilon_hinge(y(static_cast<Eigen::Index>(d)) - head.lambda.dot(moments.mean), epsilon);
  }
  return value + c * loss;
}

double objective_p2(const std::vector<std::vector<int>>& tokens, std::span<const DocVariational> vars,
                    const TopicModelParams& params, const RegressionHead& head, const Vector& y,
                    double c, double epsilon) {
  check_vars(tokens, vars, y);
  double value = gaussian_kl_to_standard(head.lambda, head.sigma);
  double loss = 0.0;
  for (std::size_t d = 0; d < tokens.size(); ++d) {
    value += lda_bound(tokens[d], vars[d], params);
    loss += epsilon_hinge(y(static_cast<Eigen::Index>(d)) - head.lambda.dot(zbar_mean(vars[d].phi)),
                          epsilon);
  }
  return value + c * loss;
}

RegressionModel train_regression(const Corpus& corpus, const ResponseVector& responses,
                                 const TrainConfig& config, RegressionVariant variant) {
  config.validate();
  if (config.topics < 2) throw ValidationError("topic count must be >= 2");
  if (responses.is_categorical()) throw ValidationError("regression needs continuous responses");
  check_aligned(corpus, responses);

  const int n_docs = corpus.size();
  const int k = config.topics;
  const auto tokens = expand_tokens(corpus);
  const Vector y = Eigen::Map<const Vector>(responses.values().data(), n_docs);
  const bool full = variant == RegressionVariant::kFull;

  RegressionModel model{TopicModelParams::random(k, corpus.vocab_size(), config.seed),
                        RegressionHead{}, RegressionDuals::zeros(n_docs), {}, config.c,
                        config.epsilon};
  model.head.variant = variant;
  model.head.lambda = Vector::Zero(k);
  model.head.sigma = Matrix::Identity(k, k);
  if (full) {
    const double mean = y.mean();
    model.head.delta2 = std::max((y.array() - mean).square().sum() / n_docs, kDelta2Floor);
  }

  std::vector<DocVariational> vars;
  vars.reserve(static_cast<std::size_t>(n_docs));
  for (const auto& t : tokens) vars.push_back(init_variational(static_cast<int>(t.size()), model.params.alpha()));

  std::vector<Vector> means(static_cast<std::size_t>(n_docs));
  std::vector<Matrix> outers(static_cast<std::size_t>(n_docs));
  svm::SolverOptions solver;
  solver.tolerance = config.solver_tol;

  for (int iter = 0; iter < config.em_max_iter; ++iter) {
    // E-step against the previous q(eta) and multipliers.
    const Vector coefs = model.duals.coefficients();
    detail::parallel_for(n_docs, config.threads, [&](int d) {
      const auto i = static_cast<std::size_t>(d);
      if (full) {
        e_step_full(tokens[i], model.params, model.head, y(d), coefs(d), config.c, config.epsilon,
                    config.coupling, vars[i], config.inner);
      } else {
        e_step_partial(tokens[i], model.params, model.head, y(d), coefs(d), config.c,
                       config.epsilon, config.coupling, vars[i], config.inner);
      }
      if (full) {
        auto m = zbar_moments(vars[i].phi);
        means[i] = std::move(m.mean);
        outers[i] = std::move(m.outer);
      } else {
        means[i] = zbar_mean(vars[i].phi);
      }
    });

    // q(eta) and the multipliers.
    if (full) {
      Matrix outer_sum = Matrix::Zero(k, k);
      for (const auto& o : outers) outer_sum += o;
      RegressionHead head = posterior_eta_full(means, outer_sum, y, model.head.delta2,
                                               RegressionDuals::zeros(n_docs));
      if (config.c > 0.0) {
        const SvrTransform transform =
            svr_transform(head.sigma, means, y, model.head.delta2, config.c, config.epsilon);
        const auto sol = svm::solve_svr(transform.instance, solver, model.duals.coefficients());
        head.lambda = transform.to_lambda(sol.weights);
        model.duals = {sol.mu, sol.mu_star};
      }
      model.head = std::move(head);
      // M-step.
      model.params.set_beta(update_beta(tokens, vars, k, corpus.vocab_size()));
      model.head.delta2 = update_delta2(y, means, outer_sum, model.head);
      model.trace.push_back(
          objective_p1(tokens, vars, model.params, model.head, y, config.c, config.epsilon));
    } else {
      if (config.c > 0.0) {
        svm::SvrInstance inst;
        inst.x.resize(n_docs, k);
        for (int d = 0; d < n_docs; ++d) inst.x.row(d) = means[static_cast<std::size_t>(d)].transpose();
        inst.y = y;
        inst.c = config.c;
        inst.epsilon = config.epsilon;
        const auto sol = svm::solve_svr(inst, solver, model.duals.coefficients());
        model.duals = {sol.mu, sol.mu_star};
        model.head.lambda = sol.weights;
      }
      model.params.set_beta(update_beta(tokens, vars, k, corpus.vocab_size()));
      model.trace.push_back(
          objective_p2(tokens, vars, model.params, model.head, y, config.c, config.epsilon));
    }

    const auto t = model.trace.size();
    if (t >= 2) {
      const double prev = model.trace[t - 2];
      if (std::abs(prev - model.trace[t - 1]) <= config.em_rel_tol * std::abs(prev)) break;
    }
  }
  return model;
}

double predict_regression(const RegressionModel& model, const Document& doc,
                          const InnerSchedule& schedule) {
  const auto tokens = doc.tokens();
  const auto var = infer_document(tokens, model.params, schedule);
  return model.head.lambda.dot(zbar_mean(var.phi));
}

std::vector<double> predict_regression(const RegressionModel& model, const Corpus& corpus,
                                       const InnerSchedule& schedule, int threads) {
  const auto zbar = infer_topic_proportions(corpus, model.params, schedule, threads);
  std::vector<double> out;
  out.reserve(zbar.size());
  for (const auto& z : zbar) out.push_back(model.head.lambda.dot(z));
  return out;
}

}  // namespace medlda
