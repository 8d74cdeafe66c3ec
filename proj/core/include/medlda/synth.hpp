#pragma once

#include <cstdint>
#include <vector>

#include "medlda/corpus.hpp"
#include "medlda/var_core.hpp"

namespace medlda {

enum class SynthResponse {
  kRegression,      // y = eta . zbar + noise
  kClassification,  // y = argmax_y eta_y . zbar
  kWordFrequency,   // y = sum_w (count_w / N) eta_{topic owning w} + noise
};

// Planted-topic corpus. Topic k puts 1 - leak of its mass uniformly on the
// k-th contiguous block of V/K terms and spreads `leak` over the whole
// vocabulary. theta_d ~ Dirichlet(doc_alpha), every document has doc_length
// tokens.
struct SynthConfig {
  int docs = 200;
  int topics = 4;
  int vocab = 400;
  int doc_length = 60;
  int classes = 2;
  double doc_alpha = 0.3;
  double leak = 0.1;
  double noise = 0.0;       // standard deviation of the Gaussian response noise
  double eta_scale = 1.0;   // regression weights span [-eta_scale, eta_scale]
  SynthResponse response = SynthResponse::kRegression;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthData {
  Corpus corpus;
  ResponseVector responses;
  Matrix beta;                // K x V planted topics
  Vector eta;                 // K weights, or M blocks of K for classification
  std::vector<Vector> zbar;   // empirical topic-assignment frequencies
};

// Regression weights: K values evenly spaced on [-eta_scale, eta_scale].
// Classification: block y has ones on the topics k with k mod M = y.
SynthData generate_synthetic(const SynthConfig& config);

}  // namespace medlda
