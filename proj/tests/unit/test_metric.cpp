#include <random>
#include <stdexcept>

#include "doctest.h"
#include "einst/metric.hpp"
#include "oracles.hpp"

using namespace einst;

namespace {

std::vector<std::string> words(const TokenSeq& t) { return {t.tokens().begin(), t.tokens().end()}; }

TokenSeq seq(std::vector<std::string> v) { return TokenSeq(std::move(v)); }

std::vector<std::string> random_tokens(std::mt19937_64& gen, std::size_t max_len, int alphabet) {
  std::vector<std::string> out(gen() % (max_len + 1));
  for (auto& t : out) t = std::string(1, static_cast<char>('a' + gen() % alphabet));
  return out;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
  CHECK(words(tokenize("Sort the given input ascendingly.")) ==
        std::vector<std::string>{"sort", "the", "given", "input", "ascendingly"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  ,.;  ").empty());
  CHECK(words(tokenize("85°F = 29.44°C")) == std::vector<std::string>{"85", "f", "29", "44", "c"});
  CHECK(words(tokenize("[-4, 2, 5]")) == std::vector<std::string>{"4", "2", "5"});
}

TEST_CASE("tokenize keeps letters outside ASCII") {
  CHECK(words(tokenize("Café ÜBER naïve")) == std::vector<std::string>{"café", "über", "naïve"});
  CHECK(words(tokenize("你好，世界")) == std::vector<std::string>{"你好", "世界"});
  CHECK(words(tokenize("a\u2014b")) == std::vector<std::string>{"a", "b"});
  // Stray continuation byte acts as a separator.
  CHECK(words(tokenize(std::string("ab\x80" "cd"))) == std::vector<std::string>{"ab", "cd"});
}

TEST_CASE("TokenSeq rejects empty tokens") {
  CHECK_THROWS_AS(TokenSeq({"a", ""}), std::invalid_argument);
}

TEST_CASE("lcs_length examples") {
  CHECK(lcs_length(seq({"a", "b", "c"}), seq({"a", "c"})) == 2);
  CHECK(lcs_length(seq({}), seq({"x", "y"})) == 0);
  CHECK(lcs_length(seq({"q", "w", "e"}), seq({"q", "w", "e"})) == 3);
  CHECK(oracle::lcs({"a", "b", "c"}, {"a", "c"}) == 2);
}

TEST_CASE("lcs_length matches the brute-force oracle on small inputs") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_tokens(gen, 7, 3);
    const auto b = random_tokens(gen, 7, 3);
    const auto expected = oracle::lcs(a, b);
    REQUIRE(oracle::lcs_recursive(a, b) == expected);
    REQUIRE(lcs_length(TokenSeq(a), TokenSeq(b)) == expected);
  }
}

TEST_CASE("rouge_l examples") {
  const auto s = rouge_l("85°F = 29.44°C", "29.44°C");
  CHECK(s.f1 == doctest::Approx(0.75));
  CHECK(s.precision == doctest::Approx(0.6));
  CHECK(s.recall == doctest::Approx(1.0));
  CHECK(rouge_l("the same words", "The same, words!").f1 == 1.0);
  CHECK(rouge_l("alpha beta", "gamma delta").f1 == 0.0);
  CHECK(rouge_l("", "anything").f1 == 0.0);
  CHECK(rouge_l("", "").f1 == 0.0);
}

TEST_CASE("rouge_l properties on random pairs") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_tokens(gen, 9, 4);
    const auto b = random_tokens(gen, 9, 4);
    const auto ab = rouge_l(TokenSeq(a), TokenSeq(b));
    const auto ba = rouge_l(TokenSeq(b), TokenSeq(a));
    REQUIRE(ab.f1 == ba.f1);
    REQUIRE(ab.precision == ba.recall);
    REQUIRE(ab.f1 >= 0.0);
    REQUIRE(ab.f1 <= 1.0);
    REQUIRE(ab.f1 == oracle::rouge_f1(a, b));
    if (!a.empty()) REQUIRE(rouge_l(TokenSeq(a), TokenSeq(a)).f1 == 1.0);
  }
}
