#include "medlda/var_core.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "medlda/error.hpp"
#include "parallel.hpp"

namespace medlda {

TopicModelParams::TopicModelParams(Vector alpha, Matrix beta) : alpha_(std::move(alpha)) {
  if (alpha_.size() < 1) throw ValidationError("topic count must be >= 1");
  for (Eigen::Index k = 0; k < alpha_.size(); ++k) {
    if (!(alpha_(k) > 0.0)) throw ValidationError("alpha entries must be positive");
  }
  set_beta(std::move(beta));
}

TopicModelParams TopicModelParams::symmetric(Matrix beta) {
  const auto k = beta.rows();
  return TopicModelParams(Vector::Constant(k, 1.0 / static_cast<double>(k)), std::move(beta));
}

TopicModelParams TopicModelParams::random(int topics, int vocab_size, std::uint64_t seed) {
  if (topics < 1 || vocab_size < 1) throw ValidationError("topics and vocabulary must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix beta(topics, vocab_size);
  for (int k = 0; k < topics; ++k) {
    for (int w = 0; w < vocab_size; ++w) beta(k, w) = 1.0 / vocab_size + unif(rng);
    beta.row(k) /= beta.row(k).sum();
  }
  return symmetric(std::move(beta));
}

void TopicModelParams::set_beta(Matrix beta) {
  if (beta.rows() != alpha_.size()) throw ValidationError("beta must have K rows");
  if (beta.cols() < 1) throw ValidationError("beta must have at least one column");
  for (Eigen::Index k = 0; k < beta.rows(); ++k) {
    if ((beta.row(k).array() <= 0.0).any() || !beta.row(k).allFinite()) {
      throw ValidationError("beta row " + std::to_string(k) + " has a nonpositive entry");
    }
    if (std::abs(beta.row(k).sum() - 1.0) > 1e-9) {
      throw ValidationError("beta row " + std::to_string(k) + " does not sum to 1");
    }
  }
  beta_ = std::move(beta);
  log_beta_ = beta_.array().log().matrix();
}

DocVariational init_variational(int token_count, const Vector& alpha) {
  const auto k = alpha.size();
  DocVariational var;
  var.phi = RowMatrix::Constant(token_count, k, 1.0 / static_cast<double>(k));
  var.gamma = alpha.array() + static_cast<double>(token_count) / static_cast<double>(k);
  return var;
}

Vector dirichlet_expectation(const Vector& gamma) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k) {
    if (!(gamma(k) > 0.0)) throw ValidationError("Dirichlet parameter must be positive");
    total += gamma(k);
  }
  const double psi_total = boost::math::digamma(total);
  Vector out(gamma.size());
  for (Eigen::Index k = 0; k < gamma.size(); ++k) out(k) = boost::math::digamma(gamma(k)) - psi_total;
  return out;
}

Vector update_gamma(const Vector& alpha, const RowMatrix& phi) {
  return alpha + phi.colwise().sum().transpose();
}

Vector zbar_mean(const RowMatrix& phi) {
  return phi.colwise().sum().transpose() / static_cast<double>(phi.rows());
}

ZbarMoments zbar_moments(const RowMatrix& phi) {
  const auto n = phi.rows();
  const auto k = phi.cols();
  const Vector sum = phi.colwise().sum().transpose();
  // sum_{n != m} phi_n phi_m^T = s s^T - sum_n phi_n phi_n^T
  Matrix outer(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      double self = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) self += phi(i, a) * phi(i, b);
      double v = sum(a) * sum(b) - self;
      if (a == b) v += sum(a);
      outer(a, b) = v;
      outer(b, a) = v;
    }
  }
  const double inv_n2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  return {sum / static_cast<double>(n), outer * inv_n2};
}

double lda_bound(std::span<const int> tokens, const DocVariational& var,
                 const TopicModelParams& params) {
  const int k_topics = params.topics();
  const Vector elog = dirichlet_expectation(var.gamma);
  const Vector& alpha = params.alpha();
  using boost::math::lgamma;

  // -E[log p(theta | alpha)]
  double value = -lgamma(alpha.sum());
  for (int k = 0; k < k_topics; ++k) value += lgamma(alpha(k)) - (alpha(k) - 1.0) * elog(k);
  // -H(q(theta)) = E[log q(theta)]
  value += lgamma(var.gamma.sum());
  for (int k = 0; k < k_topics; ++k) value += -lgamma(var.gamma(k)) + (var.gamma(k) - 1.0) * elog(k);

  for (std::size_t n = 0; n < tokens.size(); ++n) {
    const auto w = tokens[n];
    for (int k = 0; k < k_topics; ++k) {
      const double p = var.phi(static_cast<Eigen::Index>(n), k);
      if (p > 0.0) value += p * (std::log(p) - elog(k) - params.log_beta()(k, w));
    }
  }
  return value;
}

double gaussian_kl_to_standard(const Vector& mean, const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive definite");
  const Matrix& l = llt.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  return 0.5 * (cov.trace() + mean.squaredNorm() - static_cast<double>(mean.size()) - log_det);
}

void softmax_inplace(Vector& logits) {
  const double mx = logits.maxCoeff();
  logits = (logits.array() - mx).exp().matrix();
  logits /= logits.sum();
}

std::vector<std::vector<int>> expand_tokens(const Corpus& corpus) {
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(corpus.size()));
  for (const auto& doc : corpus.documents()) out.push_back(doc.tokens());
  return out;
}

BetaTally::BetaTally(int topics, int vocab_size) : counts_(Matrix::Zero(topics, vocab_size)) {}

void BetaTally::add(std::span<const int> tokens, const RowMatrix& phi) {
  for (std::size_t n = 0; n < tokens.size(); ++n) {
    counts_.col(tokens[n]) += phi.row(static_cast<Eigen::Index>(n)).transpose();
  }
}

Matrix BetaTally::normalized() const {
  Matrix beta = counts_.array() + kBetaFloor;
  for (Eigen::Index k = 0; k < beta.rows(); ++k) beta.row(k) /= beta.row(k).sum();
  return beta;
}

Matrix update_beta(const std::vector<std::vector<int>>& tokens,
                   std::span<const DocVariational> vars, int topics, int vocab_size) {
  if (tokens.size() != vars.size()) throw ValidationError("one phi matrix per document required");
  BetaTally tally(topics, vocab_size);
  for (std::size_t d = 0; d < tokens.size(); ++d) {
    if (vars[d].phi.rows() != static_cast<Eigen::Index>(tokens[d].size()) ||
        vars[d].phi.cols() != topics) {
      throw ValidationError("phi shape does not match document " + std::to_string(d));
    }
    tally.add(tokens[d], vars[d].phi);
  }
  return tally.normalized();
}

Matrix update_beta(const Corpus& corpus, std::span<const DocVariational> vars, int topics) {
  return update_beta(expand_tokens(corpus), vars, topics, corpus.vocab_size());
}

int lda_e_step(std::span<const int> tokens, const TopicModelParams& params, DocVariational& var,
               const InnerSchedule& schedule) {
  return coordinate_ascent(tokens, params, var, schedule,
                           [](int, const Vector& base, const Vector&) {
                             Vector row = base;
                             softmax_inplace(row);
                             return row;
                           });
}

DocVariational infer_document(std::span<const int> tokens, const TopicModelParams& params,
                              const InnerSchedule& schedule) {
  for (int w : tokens) {
    if (w < 0 || w >= params.vocab_size()) {
      throw ValidationError("term id " + std::to_string(w) + " outside model vocabulary of size " +
                            std::to_string(params.vocab_size()));
    }
  }
  DocVariational var = init_variational(static_cast<int>(tokens.size()), params.alpha());
  lda_e_step(tokens, params, var, schedule);
  return var;
}

std::vector<Vector> infer_topic_proportions(const Corpus& corpus, const TopicModelParams& params,
                                            const InnerSchedule& schedule, int threads) {
  if (corpus.vocab_size() > params.vocab_size()) {
    throw ValidationError("corpus vocabulary size " + std::to_string(corpus.vocab_size()) +
                          " exceeds model vocabulary size " + std::to_string(params.vocab_size()));
  }
  std::vector<Vector> out(static_cast<std::size_t>(corpus.size()));
  detail::parallel_for(corpus.size(), threads, [&](int d) {
    const auto tokens = corpus[d].tokens();
    out[static_cast<std::size_t>(d)] = zbar_mean(infer_document(tokens, params, schedule).phi);
  });
  return out;
}

}  // namespace medlda
