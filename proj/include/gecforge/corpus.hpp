#ifndef GECFORGE_CORPUS_HPP
#define GECFORGE_CORPUS_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gecforge/sentence.hpp"

namespace gecforge {

/// One gold correction in M2 convention: tokens [start, end) of the source
/// are replaced by `replacement`. start == end inserts before `start`; an
/// empty replacement deletes.
struct EditAnnotation {
  int start = 0;
  int end = 0;
  std::string replacement;
  std::string error_type;
  int annotator = 0;

  bool is_insertion() const { return start == end; }
  bool operator==(const EditAnnotation&) const = default;
};

struct AnnotatedSentence {
  Sentence source;
  /// Edits keyed by annotator id. An annotator that marked the sentence
  /// correct ("noop") is present with an empty list.
  std::map<int, std::vector<EditAnnotation>> edits;

  bool operator==(const AnnotatedSentence&) const = default;
};

enum class Provenance { real, rule, neural };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

struct ParallelPair {
  Sentence source;  // errorful
  Sentence target;  // correct
  Provenance provenance = Provenance::real;

  bool operator==(const ParallelPair&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// M2 ----------------------------------------------------------------------

std::vector<AnnotatedSentence> parse_m2(std::string_view text);
std::string serialize_m2(const std::vector<AnnotatedSentence>& sentences);

std::vector<AnnotatedSentence> read_m2_file(const std::string& path);
void write_m2_file(const std::string& path, const std::vector<AnnotatedSentence>& sentences);

/// Throws ValidationError when an edit is out of range, a no-op, or when two
/// edits overlap (including two insertions at the same position).
void validate_edits(const Sentence& s, const std::vector<EditAnnotation>& edits);

/// Applies edits right to left so earlier offsets stay valid. Multi-token
/// replacements are split on whitespace.
Sentence apply_edits(const Sentence& s, std::vector<EditAnnotation> edits);

/// Builds (source, corrected) pairs from the given annotator's edits, or
/// the lowest annotator id present when that annotator is missing.
std::vector<ParallelPair> build_pairs(const std::vector<AnnotatedSentence>& corpus, int annotator = 0);

// Pair preprocessing ------------------------------------------------------

/// Keeps pairs whose two sides differ as token sequences; stable order.
std::vector<ParallelPair> filter_error_free(const std::vector<ParallelPair>& pairs);

struct DatasetMix {
  std::vector<ParallelPair> base;
  std::vector<ParallelPair> artificial_pool;
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

/// base plus a seeded k-subset of the pool drawn without replacement, with
/// the result shuffled by the same seed. Throws std::invalid_argument when
/// k exceeds the pool size.
std::vector<ParallelPair> mix_datasets(const DatasetMix& mix);

// Parallel TSV: source<TAB>target<TAB>provenance, LF endings.

std::vector<ParallelPair> parse_tsv(std::string_view text);
std::string serialize_tsv(const std::vector<ParallelPair>& pairs);
std::vector<ParallelPair> read_tsv_file(const std::string& path);
void write_tsv_file(const std::string& path, const std::vector<ParallelPair>& pairs);

/// One sentence per line, whitespace tokenized; blank lines are skipped.
std::vector<Sentence> parse_sentences(std::string_view text);
std::vector<Sentence> read_sentence_file(const std::string& path);
void write_sentence_file(const std::string& path, const std::vector<Sentence>& sentences);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace gecforge

#endif  // GECFORGE_CORPUS_HPP
