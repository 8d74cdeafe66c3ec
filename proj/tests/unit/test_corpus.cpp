#include <doctest.h>

#include <functional>
#include <set>
#include <sstream>

#include "medlda/corpus.hpp"
#include "medlda/error.hpp"

using namespace medlda;

namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

Corpus small_corpus(int docs) {
  std::vector<Document> out;
  for (int d = 0; d < docs; ++d) out.emplace_back(std::vector<TermCount>{{d % 5, 1 + d % 3}});
  return Corpus(std::move(out), 5);
}

}  // namespace

TEST_CASE("parse_ldac reads unique count and pairs") {
  const Corpus c = parse_ldac(std::string("2 0:1 3:2\n"), 5);
  REQUIRE(c.size() == 1);
  CHECK(c[0].terms().size() == 2);
  CHECK(c[0].terms()[0] == TermCount{0, 1});
  CHECK(c[0].terms()[1] == TermCount{3, 2});
  CHECK(c[0].token_count() == 3);
  CHECK(c[0].tokens() == std::vector<int>{0, 3, 3});
}

TEST_CASE("parse_ldac rejects bad input") {
  CHECK(error_of([] { parse_ldac(std::string("1 5:1\n"), 4); }).find("term id 5") != std::string::npos);
  const auto mismatch = error_of([] { parse_ldac(std::string("3 0:1 1:1\n"), 5); });
  CHECK(mismatch.find("unique-count mismatch: declared 3, found 2") != std::string::npos);
  CHECK(error_of([] { parse_ldac(std::string("1 0-1\n"), 5); }).find("malformed pair") != std::string::npos);
  CHECK(error_of([] { parse_ldac(std::string(""), 5); }).find("zero documents") != std::string::npos);
  CHECK(error_of([] { parse_ldac(std::string("1 0:1\n\n1 1:1\n"), 5); }).find("blank line") != std::string::npos);
  CHECK(error_of([] { parse_ldac(std::string("2 1:1 1:2\n"), 5); }).find("duplicate") != std::string::npos);
  CHECK(error_of([] { parse_ldac(std::string("1 1:0\n"), 5); }).find("count") != std::string::npos);
}

TEST_CASE("parse_ldac sorts pairs and round-trips through serialize") {
  const Corpus c = parse_ldac(std::string("3 4:1 0:2 2:1\n1 1:7\n"), 5);
  CHECK(c[0].terms()[0].term == 0);
  CHECK(c[0].terms()[2].term == 4);
  const Corpus again = parse_ldac(serialize_ldac(c), 5);
  CHECK(again == c);
}

TEST_CASE("document invariants") {
  CHECK_THROWS_AS(Document(std::vector<TermCount>{}), ValidationError);
  CHECK_THROWS_AS(Document(std::vector<TermCount>{{2, 1}, {1, 1}}), ValidationError);
  CHECK_THROWS_AS(Document(std::vector<TermCount>{{1, 0}}), ValidationError);
  CHECK_THROWS_AS(Corpus({Document({{7, 1}})}, 5), ValidationError);
}

TEST_CASE("load_responses parses both kinds") {
  const auto cont = load_responses(std::string("0.5\n-1.2\n"), ResponseKind::kContinuous);
  REQUIRE(cont.size() == 2);
  CHECK(cont.values()[0] == doctest::Approx(0.5));
  CHECK(cont.values()[1] == doctest::Approx(-1.2));

  const auto cat = load_responses(std::string("1\n2\n1\n"), ResponseKind::kCategorical, 2);
  CHECK(std::vector<int>(cat.labels().begin(), cat.labels().end()) == std::vector<int>{0, 1, 0});
  CHECK(cat.class_count() == 2);

  CHECK(error_of([] { load_responses(std::string("3\n"), ResponseKind::kCategorical, 2); })
            .find("out of range") != std::string::npos);
  CHECK(error_of([] { load_responses(std::string("abc\n"), ResponseKind::kContinuous); })
            .find("non-numeric") != std::string::npos);
  const auto round = load_responses(serialize_responses(cat), ResponseKind::kCategorical, 2);
  CHECK(round == cat);
}

TEST_CASE("check_aligned reports length mismatch") {
  const Corpus c = small_corpus(3);
  CHECK_THROWS_AS(check_aligned(c, ResponseVector::continuous({1.0, 2.0})), ValidationError);
  CHECK_NOTHROW(check_aligned(c, ResponseVector::continuous({1.0, 2.0, 3.0})));
}

TEST_CASE("split_corpus partitions deterministically") {
  const Corpus c = small_corpus(10);
  std::vector<double> y(10);
  for (int i = 0; i < 10; ++i) y[static_cast<std::size_t>(i)] = i;
  const auto r = ResponseVector::continuous(y);
  const auto [train, test] = split_corpus(c, r, 0.2, 7);
  CHECK(train.indices.size() == 8);
  CHECK(test.indices.size() == 2);
  std::set<int> all(train.indices.begin(), train.indices.end());
  for (int i : test.indices) CHECK(all.insert(i).second);
  CHECK(all.size() == 10);
  CHECK(train.corpus.size() == 8);
  CHECK(test.responses.size() == 2);

  const auto [train2, test2] = split_corpus(c, r, 0.2, 7);
  CHECK(train2.indices == train.indices);
  CHECK(test2.indices == test.indices);
}

TEST_CASE("split_corpus keeps every class in training") {
  const Corpus c = small_corpus(12);
  std::vector<int> labels = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
  const auto r = ResponseVector::categorical(labels, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto [train, test] = split_corpus(c, r, 0.5, seed);
    std::set<int> seen(train.responses.labels().begin(), train.responses.labels().end());
    CHECK(seen.size() == 2);
    CHECK(train.indices.size() + test.indices.size() == 12);
  }
}

TEST_CASE("split_corpus rejects empty sides") {
  const Corpus one = small_corpus(1);
  CHECK(error_of([&] { split_corpus(one, ResponseVector::continuous({1.0}), 0.5, 1); }).find("empty") !=
        std::string::npos);
}

TEST_CASE("assign_folds balances and validates") {
  const auto folds = assign_folds(11, 5, 3);
  std::vector<int> count(5, 0);
  for (int f : folds) ++count[static_cast<std::size_t>(f)];
  for (int n : count) CHECK((n == 2 || n == 3));
  CHECK(assign_folds(11, 5, 3) == folds);
  CHECK_THROWS_AS(assign_folds(3, 5, 1), ValidationError);
  CHECK_THROWS_AS(assign_folds(3, 1, 1), ValidationError);
}
