#include "medlda/synth.hpp"

#include <map>
#include <random>

#include "medlda/error.hpp"

namespace medlda {

void SynthConfig::validate() const {
  if (docs < 1 || topics < 1 || vocab < topics || doc_length < 1) {
    throw ValidationError("synthetic sizes need docs >= 1, 1 <= topics <= vocab, length >= 1");
  }
  if (response == SynthResponse::kClassification && classes < 2) {
    throw ValidationError("synthetic classification needs at least 2 classes");
  }
  if (!(doc_alpha > 0.0)) throw ValidationError("document Dirichlet parameter must be positive");
  if (!(leak >= 0.0 && leak <= 1.0)) throw ValidationError("leak must lie in [0, 1]");
  if (!(noise >= 0.0)) throw ValidationError("noise must be >= 0");
}

SynthData generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const int k = cfg.topics;
  const int v = cfg.vocab;
  std::mt19937_64 rng(cfg.seed);

  auto owner = [&](int w) { return std::min(k - 1, static_cast<int>(static_cast<long long>(w) * k / v)); };
  Matrix beta = Matrix::Constant(k, v, cfg.leak / v);
  std::vector<int> block_size(static_cast<std::size_t>(k), 0);
  for (int w = 0; w < v; ++w) ++block_size[static_cast<std::size_t>(owner(w))];
  for (int w = 0; w < v; ++w) {
    const int t = owner(w);
    beta(t, w) += (1.0 - cfg.leak) / block_size[static_cast<std::size_t>(t)];
  }

  Vector eta;
  if (cfg.response == SynthResponse::kClassification) {
    eta = Vector::Zero(static_cast<Eigen::Index>(cfg.classes) * k);
    for (int y = 0; y < cfg.classes; ++y) {
      for (int t = 0; t < k; ++t) {
        if (t % cfg.classes == y) eta(y * k + t) = 1.0;
      }
    }
  } else {
    eta = Vector::Zero(k);
    for (int t = 0; t < k; ++t) eta(t) = k == 1 ? 0.0 : cfg.eta_scale * (-1.0 + 2.0 * t / (k - 1));
  }

  std::gamma_distribution<double> gamma(cfg.doc_alpha, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::discrete_distribution<int>> word_dist;
  word_dist.reserve(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) {
    const Vector row = beta.row(t).transpose();
    word_dist.emplace_back(row.data(), row.data() + v);
  }

  std::vector<Document> docs;
  std::vector<Vector> zbar;
  std::vector<double> values;
  std::vector<int> labels;
  docs.reserve(static_cast<std::size_t>(cfg.docs));
  for (int d = 0; d < cfg.docs; ++d) {
    Vector theta(k);
    for (int t = 0; t < k; ++t) theta(t) = gamma(rng);
    if (theta.sum() <= 0.0) theta.setConstant(1.0);
    theta /= theta.sum();
    std::discrete_distribution<int> topic_dist(theta.data(), theta.data() + k);

    Vector z = Vector::Zero(k);
    std::map<int, int> counts;
    for (int n = 0; n < cfg.doc_length; ++n) {
      const int t = topic_dist(rng);
      z(t) += 1.0;
      ++counts[word_dist[static_cast<std::size_t>(t)](rng)];
    }
    z /= cfg.doc_length;

    std::vector<TermCount> terms;
    terms.reserve(counts.size());
    for (const auto& [w, c] : counts) terms.push_back({w, c});

    switch (cfg.response) {
      case SynthResponse::kRegression:
        values.push_back(eta.dot(z) + cfg.noise * gauss(rng));
        break;
      case SynthResponse::kWordFrequency: {
        double y = 0.0;
        for (const auto& tc : terms) y += static_cast<double>(tc.count) / cfg.doc_length * eta(owner(tc.term));
        values.push_back(y + cfg.noise * gauss(rng));
        break;
      }
      case SynthResponse::kClassification: {
        int best = 0;
        double best_score = eta.segment(0, k).dot(z);
        for (int y = 1; y < cfg.classes; ++y) {
          const double s = eta.segment(y * k, k).dot(z);
          if (s > best_score) {
            best = y;
            best_score = s;
          }
        }
        labels.push_back(best);
        break;
      }
    }
    docs.emplace_back(std::move(terms));
    zbar.push_back(std::move(z));
  }

  ResponseVector responses = cfg.response == SynthResponse::kClassification
                                 ? ResponseVector::categorical(std::move(labels), cfg.classes)
                                 : ResponseVector::continuous(std::move(values));
  return {Corpus(std::move(docs), v), std::move(responses), std::move(beta), std::move(eta),
          std::move(zbar)};
}

}  // namespace medlda
