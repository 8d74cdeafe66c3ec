#include "medlda/classification.hpp"

#include <algorithm>
#include <string>

#include "margin_step.hpp"
#include "medlda/error.hpp"
#include "parallel.hpp"

namespace medlda {
namespace {

// Row y holds (lambda_{y_d} - lambda_y) / N; row y_d is zero.
RowMatrix margin_directions(const ClassificationHead& head, int label, int token_count) {
  const int k = head.topics();
  RowMatrix dirs = RowMatrix::Zero(head.classes, k);
  for (int y = 0; y < head.classes; ++y) {
    if (y == label) continue;
    dirs.row(y) = ((head.block(label) - head.block(y)) / static_cast<double>(token_count)).transpose();
  }
  return dirs;
}

Vector class_shift(const RowMatrix& dirs, const Vector& mu_row, int label, bool& any) {
  Vector shift = Vector::Zero(dirs.cols());
  any = false;
  for (Eigen::Index y = 0; y < dirs.rows(); ++y) {
    if (y == label || mu_row(y) == 0.0) continue;
    shift += mu_row(y) * dirs.row(y).transpose();
    any = true;
  }
  return shift;
}

void check_label(int label, int classes) {
  if (label < 0 || label >= classes) {
    throw ValidationError("class " + std::to_string(label + 1) + " out of range 1.." +
                          std::to_string(classes));
  }
}

}  // namespace

Vector phi_update_class(int term, const Vector& gamma, const TopicModelParams& params,
                        const ClassificationHead& head, const Vector& mu_row, int label,
                        int token_count) {
  if (term < 0 || term >= params.vocab_size()) {
    throw ValidationError("term id " + std::to_string(term) + " outside vocabulary");
  }
  check_label(label, head.classes);
  Vector logits = dirichlet_expectation(gamma) + params.log_beta().col(term);
  bool any = false;
  const Vector shift = class_shift(margin_directions(head, label, token_count), mu_row, label, any);
  if (any) logits += shift;
  softmax_inplace(logits);
  return logits;
}

ClassificationHead posterior_eta_class(std::span<const Vector> zbar_means, std::span<const int> labels,
                                       const ClassDuals& duals, int classes) {
  if (zbar_means.size() != labels.size() ||
      static_cast<Eigen::Index>(labels.size()) != duals.mu.rows()) {
    throw ValidationError("posterior: one label and multiplier row per document required");
  }
  const auto k = zbar_means.empty() ? 0 : zbar_means.front().size();
  ClassificationHead head{classes, Vector::Zero(classes * k)};
  for (std::size_t d = 0; d < zbar_means.size(); ++d) {
    const int yd = labels[d];
    check_label(yd, classes);
    for (int y = 0; y < classes; ++y) {
      const double m = duals.mu(static_cast<Eigen::Index>(d), y);
      if (y == yd || m == 0.0) continue;
      head.lambda.segment(yd * k, k) += m * zbar_means[d];
      head.lambda.segment(y * k, k) -= m * zbar_means[d];
    }
  }
  return head;
}

int e_step_class(std::span<const int> tokens, const TopicModelParams& params,
                 const ClassificationHead& head, int label, const Vector& mu_row, double c,
                 DualCoupling coupling, DocVariational& var, const InnerSchedule& schedule) {
  check_label(label, head.classes);
  const RowMatrix dirs = margin_directions(head, label, static_cast<int>(tokens.size()));
  bool any = false;
  const Vector shift = class_shift(dirs, mu_row, label, any);
  return coordinate_ascent(tokens, params, var, schedule,
                           [&](int, const Vector& base, const Vector& others) {
                             if (coupling == DualCoupling::kPreviousDuals) {
                               Vector logits = base;
                               if (any) logits += shift;
                               softmax_inplace(logits);
                               return logits;
                             }
                             return detail::exact_classification_row(base, dirs, others, label, c);
                           });
}

double objective_p3(const std::vector<std::vector<int>>& tokens, std::span<const DocVariational> vars,
                    const TopicModelParams& params, const ClassificationHead& head,
                    std::span<const int> labels, double c) {
  if (tokens.size() != vars.size() || tokens.size() != labels.size()) {
    throw ValidationError("objective: documents, variational states and labels must align");
  }
  double value = 0.5 * head.lambda.squaredNorm();
  double loss = 0.0;
  for (std::size_t d = 0; d < tokens.size(); ++d) {
    value += lda_bound(tokens[d], vars[d], params);
    const Vector z = zbar_mean(vars[d].phi);
    const int yd = labels[d];
    const double own = head.block(yd).dot(z);
    double worst = 0.0;
    for (int y = 0; y < head.classes; ++y) {
      if (y != yd) worst = std::max(worst, 1.0 - (own - head.block(y).dot(z)));
    }
    loss += worst;
  }
  return value + c * loss;
}

ClassificationModel train_classification(const Corpus& corpus, const ResponseVector& labels,
                                         const TrainConfig& config) {
  config.validate();
  if (config.topics < 2) throw ValidationError("topic count must be >= 2");
  if (!labels.is_categorical()) throw ValidationError("classification needs categorical responses");
  check_aligned(corpus, labels);
  const int m = labels.class_count();
  const auto y = labels.labels();
  {
    std::vector<int> seen(static_cast<std::size_t>(m), 0);
    for (int l : y) seen[static_cast<std::size_t>(l)] = 1;
    for (int l = 0; l < m; ++l) {
      if (!seen[static_cast<std::size_t>(l)]) {
        throw ValidationError("class " + std::to_string(l + 1) + " has no training documents");
      }
    }
  }

  const int n_docs = corpus.size();
  const int k = config.topics;
  const auto tokens = expand_tokens(corpus);
  ClassificationModel model{TopicModelParams::random(k, corpus.vocab_size(), config.seed),
                            ClassificationHead{m, Vector::Zero(static_cast<Eigen::Index>(m) * k)},
                            ClassDuals{RowMatrix::Zero(n_docs, m)},
                            {},
                            {},
                            config.c};
  std::vector<DocVariational> vars;
  vars.reserve(static_cast<std::size_t>(n_docs));
  for (const auto& t : tokens) vars.push_back(init_variational(static_cast<int>(t.size()), model.params.alpha()));
  std::vector<Vector> means(static_cast<std::size_t>(n_docs));
  svm::SolverOptions solver;
  solver.tolerance = config.solver_tol;

  for (int iter = 0; iter < config.em_max_iter; ++iter) {
    detail::parallel_for(n_docs, config.threads, [&](int d) {
      const auto i = static_cast<std::size_t>(d);
      e_step_class(tokens[i], model.params, model.head, y[i], model.duals.mu.row(d).transpose(),
                   config.c, config.coupling, vars[i], config.inner);
      means[i] = zbar_mean(vars[i].phi);
    });

    if (config.c > 0.0) {
      svm::McSvmInstance inst;
      inst.features.resize(n_docs, k);
      for (int d = 0; d < n_docs; ++d) inst.features.row(d) = means[static_cast<std::size_t>(d)].transpose();
      inst.labels.assign(y.begin(), y.end());
      inst.classes = m;
      inst.c = config.c;
      auto sol = svm::solve_multiclass_svm(inst, solver, model.duals.mu);
      model.head.lambda = std::move(sol.lambda);
      model.duals.mu = std::move(sol.mu);
    }
    model.params.set_beta(update_beta(tokens, vars, k, corpus.vocab_size()));
    model.trace.push_back(objective_p3(tokens, vars, model.params, model.head, y, config.c));

    const auto t = model.trace.size();
    if (t >= 2) {
      const double prev = model.trace[t - 2];
      if (std::abs(prev - model.trace[t - 1]) <= config.em_rel_tol * std::abs(prev)) break;
    }
  }
  model.train_zbar = std::move(means);
  return model;
}

int argmax_class(const ClassificationHead& head, const Vector& zbar) {
  int best = 0;
  double best_score = head.block(0).dot(zbar);
  for (int y = 1; y < head.classes; ++y) {
    const double s = head.block(y).dot(zbar);
    if (s > best_score) {
      best = y;
      best_score = s;
    }
  }
  return best;
}

int predict_class(const ClassificationModel& model, const Document& doc, const InnerSchedule& schedule) {
  const auto tokens = doc.tokens();
  return argmax_class(model.head, zbar_mean(infer_document(tokens, model.params, schedule).phi));
}

std::vector<int> predict_class(const ClassificationModel& model, const Corpus& corpus,
                               const InnerSchedule& schedule, int threads) {
  const auto zbar = infer_topic_proportions(corpus, model.params, schedule, threads);
  std::vector<int> out;
  out.reserve(zbar.size());
  for (const auto& z : zbar) out.push_back(argmax_class(model.head, z));
  return out;
}

Matrix class_average_topics(std::span<const Vector> zbar_means, std::span<const int> labels,
                            int classes) {
  if (zbar_means.size() != labels.size()) throw ValidationError("one label per document required");
  const auto k = zbar_means.empty() ? 0 : zbar_means.front().size();
  Matrix table = Matrix::Zero(classes, k);
  std::vector<int> counts(static_cast<std::size_t>(classes), 0);
  for (std::size_t d = 0; d < zbar_means.size(); ++d) {
    check_label(labels[d], classes);
    table.row(labels[d]) += zbar_means[d].transpose();
    ++counts[static_cast<std::size_t>(labels[d])];
  }
  for (int y = 0; y < classes; ++y) {
    if (counts[static_cast<std::size_t>(y)] > 0) table.row(y) /= counts[static_cast<std::size_t>(y)];
  }
  return table;
}

}  // namespace medlda
