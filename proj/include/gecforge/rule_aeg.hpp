#ifndef GECFORGE_RULE_AEG_HPP
#define GECFORGE_RULE_AEG_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gecforge/corpus.hpp"
#include "gecforge/lm_scorer.hpp"

namespace gecforge {

enum class ErrorCategory { preposition, determiner, morphology };

std::string_view to_string(ErrorCategory c);
/// M2 error-type label written into the inverse edit ("Prep", "ArtOrDet", "Morph").
std::string_view error_type_label(ErrorCategory c);

/// Substitution alternatives for one category. The empty string stands for
/// the empty element (deletion). A morphology set carries no members; its
/// presence enables per-token morph_variants().
struct ConfusionSet {
  ErrorCategory category = ErrorCategory::preposition;
  std::vector<std::string> members;

  bool contains(std::string_view lowered) const;
};

struct Lexicon {
  ConfusionSet prepositions{ErrorCategory::preposition, {}};
  ConfusionSet determiners{ErrorCategory::determiner, {}};

  static Lexicon defaults();
  /// `[preposition]` / `[determiner]` sections, one member per line, `<eps>`
  /// for the empty element, `#` comments.
  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::string& path);

  /// Prepositions, determiners and (optionally) morphology, in that order.
  std::vector<ConfusionSet> confusion_sets(bool with_morphology = true) const;
};

/// Inflectional alternatives from suffix rules plus an irregular-form table.
/// Closed-class words and non-alphabetic tokens get none.
std::set<std::string> morph_variants(std::string_view token);

struct CandidateOptions {
  /// Also insert each non-empty preposition/determiner at every gap.
  bool allow_insertions = false;
};

struct ErrorCandidate {
  Sentence sentence;
  /// The correction that undoes the injected error, in coordinates of
  /// `sentence`.
  EditAnnotation edit;
  ErrorCategory category = ErrorCategory::preposition;
  double lm_logprob = std::numeric_limits<double>::quiet_NaN();
};

std::vector<ErrorCandidate> build_candidates(const Sentence& s, const std::vector<ConfusionSet>& sets,
                                             const CandidateOptions& options = {});

class CandidateScoringError : public ScorerError {
 public:
  CandidateScoringError(std::size_t index, const std::string& what)
      : ScorerError("scoring candidate " + std::to_string(index) + " failed: " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Fills lm_logprob for every candidate; order preserved.
std::vector<ErrorCandidate> score_candidates(std::vector<ErrorCandidate> cands, LmScorer& scorer);

/// Index into `cands` of the candidate chosen to avoid the most probable
/// sentence: ranks by lm_logprob (descending, stable), drops rank 1, and
/// samples uniformly among the next `top_m`. nullopt with fewer than two
/// candidates.
std::optional<std::size_t> select_errorful_index(const std::vector<ErrorCandidate>& cands, std::uint64_t seed,
                                                 std::size_t top_m = 5);

std::optional<ErrorCandidate> select_errorful(const std::vector<ErrorCandidate>& cands, std::uint64_t seed,
                                              std::size_t top_m = 5);

struct RuleAegOptions {
  CandidateOptions candidates;
  std::size_t top_m = 5;
};

struct GeneratedCorpus {
  std::vector<ParallelPair> pairs;
  /// Categories of the injected errors, parallel to `pairs`.
  std::vector<ErrorCategory> categories;
  /// Inverse edits, parallel to `pairs`.
  std::vector<EditAnnotation> corrections;
  std::size_t skipped = 0;
};

/// Raised when the scorer fails mid-run. Carries everything produced
/// before the failing sentence.
class GenerationAborted : public std::runtime_error {
 public:
  GenerationAborted(std::size_t sentence_index, GeneratedCorpus partial, const std::string& what)
      : std::runtime_error("rule error generation aborted at sentence " + std::to_string(sentence_index) + " (" +
                           std::to_string(partial.pairs.size()) + " pairs done): " + what),
        sentence_index_(sentence_index),
        partial_(std::move(partial)) {}
  std::size_t sentence_index() const { return sentence_index_; }
  const GeneratedCorpus& partial() const { return partial_; }

 private:
  std::size_t sentence_index_;
  GeneratedCorpus partial_;
};

/// One injected error per clean sentence; (errorful, clean) pairs tagged
/// Provenance::rule. Sentence i draws from derive_seed(seed, i), so the
/// result does not depend on processing order.
GeneratedCorpus generate_corpus(const std::vector<Sentence>& clean, const std::vector<ConfusionSet>& sets,
                                LmScorer& scorer, std::uint64_t seed, const RuleAegOptions& options = {});

}  // namespace gecforge

#endif  // GECFORGE_RULE_AEG_HPP
