#include "medlda/baselines.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "medlda/classification.hpp"
#include "medlda/error.hpp"
#include "medlda/regression.hpp"
#include "parallel.hpp"

namespace medlda {
namespace {

std::vector<DocVariational> initial_states(const std::vector<std::vector<int>>& tokens,
                                           const Vector& alpha) {
  std::vector<DocVariational> vars;
  vars.reserve(tokens.size());
  for (const auto& t : tokens) vars.push_back(init_variational(static_cast<int>(t.size()), alpha));
  return vars;
}

bool converged(const std::vector<double>& trace, double rel_tol) {
  const auto t = trace.size();
  if (t < 2) return false;
  return std::abs(trace[t - 2] - trace[t - 1]) <= rel_tol * std::abs(trace[t - 2]);
}

Vector slda_terms(const SldaHead& head, const Matrix& second, const Vector& others, double y, int n) {
  const double nd = static_cast<double>(n);
  return (y / (nd * head.delta2)) * head.eta -
         (2.0 * second * others + second.diagonal()) / (2.0 * nd * nd * head.delta2);
}

}  // namespace

LdaModel train_lda(const Corpus& corpus, const TrainConfig& config) {
  config.validate();
  const auto tokens = expand_tokens(corpus);
  LdaModel model{TopicModelParams::random(config.topics, corpus.vocab_size(), config.seed), {}, {}};
  auto vars = initial_states(tokens, model.params.alpha());
  for (int iter = 0; iter < config.em_max_iter; ++iter) {
    detail::parallel_for(corpus.size(), config.threads, [&](int d) {
      const auto i = static_cast<std::size_t>(d);
      lda_e_step(tokens[i], model.params, vars[i], config.inner);
    });
    model.params.set_beta(update_beta(tokens, vars, config.topics, corpus.vocab_size()));
    double bound = 0.0;
    for (std::size_t d = 0; d < tokens.size(); ++d) bound += lda_bound(tokens[d], vars[d], model.params);
    model.trace.push_back(bound);
    if (converged(model.trace, config.em_rel_tol)) break;
  }
  model.gammas.reserve(vars.size());
  for (auto& v : vars) model.gammas.push_back(std::move(v.gamma));
  return model;
}

Vector phi_update_slda(int term, const Vector& gamma, const TopicModelParams& params,
                       const SldaHead& head, const Vector& phi_others, double y, int token_count) {
  if (term < 0 || term >= params.vocab_size()) {
    throw ValidationError("term id " + std::to_string(term) + " outside vocabulary");
  }
  const Matrix second = head.eta * head.eta.transpose();
  Vector logits = dirichlet_expectation(gamma) + params.log_beta().col(term) +
                  slda_terms(head, second, phi_others, y, token_count);
  softmax_inplace(logits);
  return logits;
}

SldaHead slda_normal_equations(std::span<const Vector> zbar_means, const Matrix& zbar_outer_sum,
                               const Vector& y) {
  const auto k = zbar_outer_sum.rows();
  Vector rhs = Vector::Zero(k);
  for (std::size_t d = 0; d < zbar_means.size(); ++d) rhs += y(static_cast<Eigen::Index>(d)) * zbar_means[d];
  SldaHead head;
  Eigen::LLT<Matrix> llt(zbar_outer_sum);
  if (llt.info() != Eigen::Success) {
    llt.compute(zbar_outer_sum + 1e-8 * Matrix::Identity(k, k));
    head.regularized = true;
    if (llt.info() != Eigen::Success) throw NumericalError("sLDA normal equations are singular");
  }
  head.eta = llt.solve(rhs);
  return head;
}

SldaModel train_slda_regression(const Corpus& corpus, const ResponseVector& responses,
                                const TrainConfig& config) {
  config.validate();
  if (responses.is_categorical()) throw ValidationError("sLDA regression needs continuous responses");
  check_aligned(corpus, responses);
  const int n_docs = corpus.size();
  const int k = config.topics;
  const auto tokens = expand_tokens(corpus);
  const Vector y = Eigen::Map<const Vector>(responses.values().data(), n_docs);

  SldaModel model{TopicModelParams::random(k, corpus.vocab_size(), config.seed), {}, {}};
  model.head.eta = Vector::Zero(k);
  model.head.delta2 = std::max((y.array() - y.mean()).square().sum() / n_docs, kDelta2Floor);
  auto vars = initial_states(tokens, model.params.alpha());
  std::vector<Vector> means(static_cast<std::size_t>(n_docs));
  std::vector<Matrix> outers(static_cast<std::size_t>(n_docs));

  for (int iter = 0; iter < config.em_max_iter; ++iter) {
    const Matrix second = model.head.eta * model.head.eta.transpose();
    detail::parallel_for(n_docs, config.threads, [&](int d) {
      const auto i = static_cast<std::size_t>(d);
      const int n = static_cast<int>(tokens[i].size());
      coordinate_ascent(tokens[i], model.params, vars[i], config.inner,
                        [&](int, const Vector& base, const Vector& others) {
                          Vector logits = base + slda_terms(model.head, second, others, y(d), n);
                          softmax_inplace(logits);
                          return logits;
                        });
      auto m = zbar_moments(vars[i].phi);
      means[i] = std::move(m.mean);
      outers[i] = std::move(m.outer);
    });
    Matrix outer_sum = Matrix::Zero(k, k);
    for (const auto& o : outers) outer_sum += o;

    SldaHead head = slda_normal_equations(means, outer_sum, y);
    head.regularized = head.regularized || model.head.regularized;
    RegressionHead point{RegressionVariant::kFull, head.eta, Matrix::Zero(k, k), 1.0};
    head.delta2 = update_delta2(y, means, outer_sum, point);
    model.head = std::move(head);
    model.params.set_beta(update_beta(tokens, vars, k, corpus.vocab_size()));

    const Matrix eta_outer = model.head.eta * model.head.eta.transpose();
    double bound = 0.0;
    for (std::size_t d = 0; d < tokens.size(); ++d) {
      bound += lda_bound(tokens[d], vars[d], model.params);
      bound += gaussian_response_nll(y(static_cast<Eigen::Index>(d)), {means[d], outers[d]},
                                     model.head.eta, eta_outer, model.head.delta2);
    }
    model.trace.push_back(bound);
    if (converged(model.trace, config.em_rel_tol)) break;
  }
  return model;
}

std::vector<double> predict_slda(const SldaModel& model, const Corpus& corpus,
                                 const InnerSchedule& schedule, int threads) {
  const auto zbar = infer_topic_proportions(corpus, model.params, schedule, threads);
  std::vector<double> out;
  out.reserve(zbar.size());
  for (const auto& z : zbar) out.push_back(model.head.eta.dot(z));
  return out;
}

namespace {

RowMatrix stack(const std::vector<Vector>& rows) {
  RowMatrix x(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : rows.front().size());
  for (std::size_t d = 0; d < rows.size(); ++d) x.row(static_cast<Eigen::Index>(d)) = rows[d].transpose();
  return x;
}

}  // namespace

TwoStageRegressor train_two_stage_svr(const TopicModelParams& params, const Corpus& corpus,
                                      const ResponseVector& responses, double c, double epsilon,
                                      const InnerSchedule& schedule, int threads) {
  if (responses.is_categorical()) throw ValidationError("LDA+SVR needs continuous responses");
  check_aligned(corpus, responses);
  svm::SvrInstance inst;
  inst.x = stack(infer_topic_proportions(corpus, params, schedule, threads));
  inst.y = Eigen::Map<const Vector>(responses.values().data(), corpus.size());
  inst.c = c;
  inst.epsilon = epsilon;
  return {params, svm::solve_svr(inst).weights};
}

std::vector<double> predict_two_stage(const TwoStageRegressor& model, const Corpus& corpus,
                                      const InnerSchedule& schedule, int threads) {
  const auto zbar = infer_topic_proportions(corpus, model.params, schedule, threads);
  std::vector<double> out;
  out.reserve(zbar.size());
  for (const auto& z : zbar) out.push_back(model.weights.dot(z));
  return out;
}

TwoStageClassifier train_two_stage_svm(const TopicModelParams& params, const Corpus& corpus,
                                       const ResponseVector& labels, double c,
                                       const InnerSchedule& schedule, int threads) {
  if (!labels.is_categorical()) throw ValidationError("LDA+SVM needs categorical responses");
  check_aligned(corpus, labels);
  svm::McSvmInstance inst;
  inst.features = stack(infer_topic_proportions(corpus, params, schedule, threads));
  inst.labels.assign(labels.labels().begin(), labels.labels().end());
  inst.classes = labels.class_count();
  inst.c = c;
  return {params, inst.classes, svm::solve_multiclass_svm(inst).lambda};
}

std::vector<int> predict_two_stage(const TwoStageClassifier& model, const Corpus& corpus,
                                   const InnerSchedule& schedule, int threads) {
  const auto zbar = infer_topic_proportions(corpus, model.params, schedule, threads);
  const ClassificationHead head{model.classes, model.lambda};
  std::vector<int> out;
  out.reserve(zbar.size());
  for (const auto& z : zbar) out.push_back(argmax_class(head, z));
  return out;
}

RowMatrix word_frequencies(const Corpus& corpus, int vocab_size) {
  if (corpus.vocab_size() > vocab_size) throw ValidationError("corpus vocabulary exceeds model vocabulary");
  RowMatrix x = RowMatrix::Zero(corpus.size(), vocab_size);
  for (int d = 0; d < corpus.size(); ++d) {
    const double n = corpus[d].token_count();
    for (const auto& tc : corpus[d].terms()) x(d, tc.term) = tc.count / n;
  }
  return x;
}

WordFrequencySvr train_word_frequency_svr(const Corpus& corpus, const ResponseVector& responses,
                                          double c, double epsilon) {
  if (responses.is_categorical()) throw ValidationError("word-frequency SVR needs continuous responses");
  check_aligned(corpus, responses);
  svm::SvrInstance inst;
  inst.x = word_frequencies(corpus, corpus.vocab_size());
  inst.y = Eigen::Map<const Vector>(responses.values().data(), corpus.size());
  inst.c = c;
  inst.epsilon = epsilon;
  return {svm::solve_svr(inst).weights};
}

std::vector<double> predict_word_frequency_svr(const WordFrequencySvr& model, const Corpus& corpus) {
  const RowMatrix x = word_frequencies(corpus, static_cast<int>(model.weights.size()));
  const Vector pred = x * model.weights;
  return {pred.data(), pred.data() + pred.size()};
}

SldaThresholdClassifier train_slda_threshold(const Corpus& corpus, const ResponseVector& labels,
                                             const TrainConfig& config) {
  if (!labels.is_categorical() || labels.class_count() != 2) {
    throw ValidationError("the sLDA threshold classifier needs two classes");
  }
  std::vector<double> targets;
  targets.reserve(labels.labels().size());
  for (int l : labels.labels()) targets.push_back(l == 1 ? 1.0 : 0.0);
  return {train_slda_regression(corpus, ResponseVector::continuous(std::move(targets)), config)};
}

std::vector<int> predict_slda_threshold(const SldaThresholdClassifier& model, const Corpus& corpus,
                                        const InnerSchedule& schedule, int threads) {
  std::vector<int> out;
  for (double v : predict_slda(model.regression, corpus, schedule, threads)) out.push_back(v > 0.5 ? 1 : 0);
  return out;
}

}  // namespace medlda
