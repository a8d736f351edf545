#ifndef GECFORGE_SENTENCE_HPP
#define GECFORGE_SENTENCE_HPP

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gecforge {

/// A whitespace-free token sequence. Joining with single spaces and
/// re-splitting is the identity.
struct Sentence {
  std::vector<std::string> tokens;

  Sentence() = default;
  explicit Sentence(std::vector<std::string> toks) : tokens(std::move(toks)) {}

  /// Splits pre-tokenized text on runs of whitespace.
  static Sentence from_text(std::string_view text);

  std::string str() const;
  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }

  auto operator<=>(const Sentence&) const = default;
  bool operator==(const Sentence&) const = default;
};

std::vector<std::string> split_whitespace(std::string_view text);

/// Rule-based tokenizer for raw text: whitespace split, then punctuation is
/// peeled off word edges into separate tokens (clitics such as 's and n't
/// are kept whole).
Sentence tokenize_raw(std::string_view text);

/// Collapses internal whitespace runs to one space and trims the ends.
std::string normalize_space(std::string_view text);

}  // namespace gecforge

#endif  // GECFORGE_SENTENCE_HPP
