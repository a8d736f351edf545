#ifndef GECFORGE_SEQ2SEQ_VOCABULARY_HPP
#define GECFORGE_SEQ2SEQ_VOCABULARY_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gecforge/sentence.hpp"

namespace gecforge::seq2seq {

/// Token <-> id bijection with reserved ids pad=0, bos=1, eos=2, unk=3.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kReserved = 4;

  Vocabulary();

  /// Ids ordered by descending frequency, ties broken lexicographically.
  static Vocabulary build(const std::vector<Sentence>& corpus, std::size_t min_count = 1);
  /// Tokens for ids kReserved.. in order.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  /// Tokens from id kReserved onwards.
  std::vector<std::string> regular_tokens() const;

  std::vector<int> encode(const Sentence& s) const;
  /// Stops at the first eos; pad and bos are skipped.
  Sentence decode(const std::vector<int>& ids) const;

  /// FNV-1a over the token list; used to check checkpoint consistency.
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace gecforge::seq2seq

#endif  // GECFORGE_SEQ2SEQ_VOCABULARY_HPP
