#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "medlda/corpus.hpp"

namespace medlda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Added to every topic-term tally before row normalization.
inline constexpr double kBetaFloor = 1e-10;

// Topic count K, Dirichlet parameter alpha, and the K x V topic matrix beta.
// log(beta) is cached alongside beta; set_beta keeps them in sync.
class TopicModelParams {
 public:
  TopicModelParams(Vector alpha, Matrix beta);

  // alpha fixed at 1/K per component.
  static TopicModelParams symmetric(Matrix beta);
  // Random positive rows, deterministic in the seed.
  static TopicModelParams random(int topics, int vocab_size, std::uint64_t seed);

  int topics() const { return static_cast<int>(alpha_.size()); }
  int vocab_size() const { return static_cast<int>(beta_.cols()); }
  const Vector& alpha() const { return alpha_; }
  const Matrix& beta() const { return beta_; }
  const Matrix& log_beta() const { return log_beta_; }

  void set_beta(Matrix beta);

 private:
  Vector alpha_;
  Matrix beta_;
  Matrix log_beta_;
};

// Per-document variational parameters: Dirichlet gamma (K) and one topic
// distribution per token (rows of phi, N x K).
struct DocVariational {
  Vector gamma;
  RowMatrix phi;
};

// Uniform phi and gamma = alpha + N/K.
DocVariational init_variational(int token_count, const Vector& alpha);

struct ZbarMoments {
  Vector mean;   // E[zbar]
  Matrix outer;  // E[zbar zbar^T]
};

// E[log theta] under Dirichlet(gamma): psi(gamma_k) - psi(sum gamma).
Vector dirichlet_expectation(const Vector& gamma);

// gamma = alpha + sum_n phi_n.
Vector update_gamma(const Vector& alpha, const RowMatrix& phi);

Vector zbar_mean(const RowMatrix& phi);
ZbarMoments zbar_moments(const RowMatrix& phi);

// Negative ELBO of one document under unsupervised LDA. Entries of phi may be
// off the simplex; this is only used by finite-difference checks.
double lda_bound(std::span<const int> tokens, const DocVariational& var,
                 const TopicModelParams& params);

// KL(N(mean, cov) || N(0, I)).
double gaussian_kl_to_standard(const Vector& mean, const Matrix& cov);

// In-place normalization of log-weights onto the simplex, max-shifted.
void softmax_inplace(Vector& logits);

// Expanded token ids per document.
std::vector<std::vector<int>> expand_tokens(const Corpus& corpus);

// Accumulates sum_d sum_n 1(w_dn = w) phi_dnk; documents are added in
// whatever order the caller chooses, so call sites add them in corpus order.
class BetaTally {
 public:
  BetaTally(int topics, int vocab_size);
  void add(std::span<const int> tokens, const RowMatrix& phi);
  // Floors every cell, then normalizes rows.
  Matrix normalized() const;

 private:
  Matrix counts_;
};

Matrix update_beta(const std::vector<std::vector<int>>& tokens,
                   std::span<const DocVariational> vars, int topics, int vocab_size);
Matrix update_beta(const Corpus& corpus, std::span<const DocVariational> vars, int topics);

struct InnerSchedule {
  int max_iter = 20;
  double gamma_tol = 1e-5;  // on max |delta gamma| / K
};

// Alternates a phi sweep and a gamma update. For each token i the callback
// receives (i, base, others) where base = E[log theta] + log beta[:, w_i] and
// others = sum of the other rows of phi; it returns the new row. Returns the
// number of sweeps performed.
template <typename TokenUpdate>
int coordinate_ascent(std::span<const int> tokens, const TopicModelParams& params,
                      DocVariational& var, const InnerSchedule& schedule, TokenUpdate&& update) {
  const int k_topics = params.topics();
  const auto n_tokens = static_cast<Eigen::Index>(tokens.size());
  Vector base(k_topics);
  Vector others(k_topics);
  int sweeps = 0;
  while (sweeps < schedule.max_iter) {
    ++sweeps;
    const Vector elog = dirichlet_expectation(var.gamma);
    Vector sum = var.phi.colwise().sum().transpose();
    for (Eigen::Index i = 0; i < n_tokens; ++i) {
      base = elog + params.log_beta().col(tokens[static_cast<std::size_t>(i)]);
      others = sum - var.phi.row(i).transpose();
      const Vector row = update(static_cast<int>(i), base, others);
      var.phi.row(i) = row.transpose();
      sum = others + row;
    }
    Vector gamma = update_gamma(params.alpha(), var.phi);
    const double change = (gamma - var.gamma).cwiseAbs().maxCoeff() / k_topics;
    var.gamma = std::move(gamma);
    if (change < schedule.gamma_tol) break;
  }
  return sweeps;
}

// Unsupervised E-step in place (warm start from var).
int lda_e_step(std::span<const int> tokens, const TopicModelParams& params, DocVariational& var,
               const InnerSchedule& schedule);

// Unsupervised inference from the uniform start; used at test time by every
// model, since responses are unknown there.
DocVariational infer_document(std::span<const int> tokens, const TopicModelParams& params,
                              const InnerSchedule& schedule = {});

// E[zbar] of every document under unsupervised inference.
std::vector<Vector> infer_topic_proportions(const Corpus& corpus, const TopicModelParams& params,
                                            const InnerSchedule& schedule = {}, int threads = 1);

}  // namespace medlda
