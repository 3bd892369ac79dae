#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace einst {

// Ordered lowercase word tokens. Never holds an empty token.
class TokenSeq {
 public:
  TokenSeq() = default;
  // Throws std::invalid_argument if any token is empty.
  explicit TokenSeq(std::vector<std::string> tokens);

  std::span<const std::string> tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;

 private:
  std::vector<std::string> tokens_;
};

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

// Lowercases and splits UTF-8 text into maximal alphanumeric runs.
//
// ASCII letters and digits are word characters. Non-ASCII code points are
// word characters too, except the punctuation and symbol blocks
// (U+0080-U+00BF, U+00D7, U+00F7, U+2000-U+2BFF, U+3000-U+303F,
// U+FE30-U+FE4F, U+FF00-U+FF0F, U+FF1A-U+FF20), so "29.44°C" splits at
// the degree sign. Lowercasing covers ASCII and Latin-1. Malformed UTF-8
// bytes act as separators.
TokenSeq tokenize(std::string_view text);

// Length of the longest common subsequence. O(|a|*|b|) time,
// O(min(|a|,|b|)) memory.
std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

// Rouge-L F-measure with beta = 1. Any empty side scores 0 across the board.
// f1 is computed as 2*lcs/(|a|+|b|), which is exactly symmetric.
RougeScore rouge_l(const TokenSeq& candidate, const TokenSeq& reference);

// Convenience: tokenize both sides and score.
RougeScore rouge_l(std::string_view candidate, std::string_view reference);

}  // namespace einst
