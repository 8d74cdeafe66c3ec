#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace medlda {

struct TermCount {
  int term = 0;
  int count = 0;

  friend bool operator==(const TermCount&, const TermCount&) = default;
};

// A bag-of-words document. Term ids are zero-based and strictly increasing;
// every count is at least one.
class Document {
 public:
  explicit Document(std::vector<TermCount> terms);

  std::span<const TermCount> terms() const { return terms_; }
  int unique_terms() const { return static_cast<int>(terms_.size()); }
  int token_count() const { return token_count_; }

  // Term id of every token, with repeated terms expanded in term order.
  std::vector<int> tokens() const;

  friend bool operator==(const Document&, const Document&) = default;

 private:
  std::vector<TermCount> terms_;
  int token_count_ = 0;
};

class Corpus {
 public:
  Corpus(std::vector<Document> documents, int vocab_size);

  int vocab_size() const { return vocab_size_; }
  int size() const { return static_cast<int>(documents_.size()); }
  const Document& operator[](int d) const { return documents_[static_cast<std::size_t>(d)]; }
  std::span<const Document> documents() const { return documents_; }
  long long total_tokens() const;

  Corpus subset(std::span<const int> indices) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::vector<Document> documents_;
  int vocab_size_ = 0;
};

enum class ResponseKind { kContinuous, kCategorical };

// Per-document responses aligned with corpus order. Categorical labels are
// stored zero-based; files and user-facing output use 1..M.
class ResponseVector {
 public:
  static ResponseVector continuous(std::vector<double> values);
  static ResponseVector categorical(std::vector<int> labels, int class_count);

  ResponseKind kind() const { return kind_; }
  bool is_categorical() const { return kind_ == ResponseKind::kCategorical; }
  int size() const;
  int class_count() const { return class_count_; }

  // Precondition: continuous.
  std::span<const double> values() const { return values_; }
  // Precondition: categorical. Zero-based.
  std::span<const int> labels() const { return labels_; }

  ResponseVector subset(std::span<const int> indices) const;

  friend bool operator==(const ResponseVector&, const ResponseVector&) = default;

 private:
  ResponseKind kind_ = ResponseKind::kContinuous;
  std::vector<double> values_;
  std::vector<int> labels_;
  int class_count_ = 0;
};

// LDA-C format: one document per line, "U id:count id:count ...".
Corpus parse_ldac(std::istream& in, int vocab_size);
Corpus parse_ldac(const std::string& text, int vocab_size);
std::string serialize_ldac(const Corpus& corpus);

// One value per line. Categorical files hold one-based labels; when
// class_count is absent it is taken as the largest label seen.
ResponseVector load_responses(std::istream& in, ResponseKind kind,
                              std::optional<int> class_count = std::nullopt);
ResponseVector load_responses(const std::string& text, ResponseKind kind,
                              std::optional<int> class_count = std::nullopt);
std::string serialize_responses(const ResponseVector& responses);

// Throws ValidationError unless the corpus and responses have equal length.
void check_aligned(const Corpus& corpus, const ResponseVector& responses);

struct DataSplit {
  std::vector<int> indices;  // positions in the source corpus, ascending
  Corpus corpus;
  ResponseVector responses;
};

// Deterministic given the seed. Categorical responses are split per class so
// that every class with two or more documents keeps one in training.
std::pair<DataSplit, DataSplit> split_corpus(const Corpus& corpus, const ResponseVector& responses,
                                             double test_fraction, std::uint64_t seed);

// Fold id in [0, folds) per document; deterministic given the seed.
std::vector<int> assign_folds(int doc_count, int folds, std::uint64_t seed);

}  // namespace medlda
