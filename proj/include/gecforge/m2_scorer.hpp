#ifndef GECFORGE_M2_SCORER_HPP
#define GECFORGE_M2_SCORER_HPP

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "gecforge/corpus.hpp"

namespace gecforge::m2 {

/// A system edit: source tokens [start, end) rewritten to `replacement`.
struct SystemEdit {
  int start = 0;
  int end = 0;
  std::string replacement;

  auto operator<=>(const SystemEdit&) const = default;
  bool operator==(const SystemEdit&) const = default;
};

/// Alignment-graph node: i source tokens and j hypothesis tokens consumed.
struct LatticeNode {
  int src = 0;
  int hyp = 0;
  auto operator<=>(const LatticeNode&) const = default;
};

struct LatticeArc {
  int from = 0;  // node indices
  int to = 0;
  bool is_match = false;
  SystemEdit edit;
};

/// Union of all minimum-cost Levenshtein alignments between source and
/// hypothesis, plus merged arcs. Nodes are sorted, which is a topological
/// order; node 0 is (0,0) and the last node is (|src|, |hyp|).
struct EditLattice {
  std::vector<LatticeNode> nodes;
  std::vector<LatticeArc> arcs;
  std::vector<std::vector<int>> out_arcs;  // per node, indices into arcs

  int start() const { return 0; }
  int finish() const { return static_cast<int>(nodes.size()) - 1; }
  /// Distinct non-match edits on any arc.
  std::vector<SystemEdit> edits() const;
};

struct LatticeOptions {
  /// Most unchanged tokens a merged edit may span.
  int merge_window = 2;
};

EditLattice extract_edit_lattice(const Sentence& source, const Sentence& hypothesis, const LatticeOptions& options = {});

struct MatchCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<SystemEdit> chosen;
};

/// True when the system edit equals some gold edit (same span, same
/// replacement after whitespace normalization).
bool matches_gold(const SystemEdit& e, const std::vector<EditAnnotation>& gold);

/// Counts for a fixed path. tp counts distinct gold edits hit.
MatchCounts count_path(const std::vector<SystemEdit>& path_edits, const std::vector<EditAnnotation>& gold);

/// Path through the lattice with the most gold-matching edit arcs; ties go
/// to fewer edits, then to the lexicographically smallest edit list.
MatchCounts max_match(const EditLattice& lattice, const std::vector<EditAnnotation>& gold);

/// F-beta with P = tp/(tp+fp) and R = tp/(tp+fn), where 0/0 counts as 1.
/// Throws std::invalid_argument on negative counts.
double f_beta(int tp, int fp, int fn, double beta);

struct SentenceScore {
  std::size_t index = 0;
  int annotator = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f_score = 1.0;
  std::vector<SystemEdit> edits;
};

struct ScoreReport {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double beta = 0.5;
  double precision = 1.0;
  double recall = 1.0;
  double f_score = 1.0;        // micro: from accumulated counts
  double macro_f_score = 1.0;  // mean of per-sentence scores
  std::vector<SentenceScore> sentences;
};

struct ScoreOptions {
  double beta = 0.5;
  LatticeOptions lattice;
};

/// Scores each hypothesis against every annotator of its gold sentence,
/// keeps the annotator with the best sentence F (lower id on ties) and
/// micro-accumulates counts. Throws std::invalid_argument on a length
/// mismatch.
ScoreReport score_corpus(const std::vector<Sentence>& hypotheses, const std::vector<AnnotatedSentence>& gold,
                         const ScoreOptions& options = {});

std::string report_json(const ScoreReport& report);
std::string report_table(const ScoreReport& report);

}  // namespace gecforge::m2

#endif  // GECFORGE_M2_SCORER_HPP
