#include "gecforge/sentence.hpp"

#include <cctype>

namespace gecforge {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_edge_punct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case '"': case '(': case ')': case '[': case ']': case '{': case '}':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

Sentence Sentence::from_text(std::string_view text) { return Sentence(split_whitespace(text)); }

std::string Sentence::str() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string normalize_space(std::string_view text) { return Sentence::from_text(text).str(); }

Sentence tokenize_raw(std::string_view text) {
  Sentence out;
  for (const auto& word : split_whitespace(text)) {
    std::size_t begin = 0;
    std::size_t end = word.size();
    std::vector<std::string> trailing;
    while (begin < end && is_edge_punct(word[begin])) {
      out.tokens.emplace_back(1, word[begin]);
      ++begin;
    }
    while (end > begin && is_edge_punct(word[end - 1])) {
      trailing.emplace_back(1, word[end - 1]);
      --end;
    }
    if (end > begin) {
      std::string core = word.substr(begin, end - begin);
      // n't and 's become their own tokens, as in treebank-style corpora.
      if (core.size() > 3 && core.compare(core.size() - 3, 3, "n't") == 0) {
        out.tokens.push_back(core.substr(0, core.size() - 3));
        out.tokens.emplace_back("n't");
      } else if (core.size() > 2 && core[core.size() - 2] == '\'' &&
                 std::isalpha(static_cast<unsigned char>(core.back()))) {
        out.tokens.push_back(core.substr(0, core.size() - 2));
        out.tokens.push_back(core.substr(core.size() - 2));
      } else {
        out.tokens.push_back(std::move(core));
      }
    }
    out.tokens.insert(out.tokens.end(), trailing.rbegin(), trailing.rend());
  }
  return out;
}

}  // namespace gecforge
