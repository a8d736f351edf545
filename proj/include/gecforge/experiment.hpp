#ifndef GECFORGE_EXPERIMENT_HPP
#define GECFORGE_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gecforge/corpus.hpp"
#include "gecforge/lm_scorer.hpp"
#include "gecforge/micro_lang.hpp"
#include "gecforge/rule_aeg.hpp"
#include "gecforge/seq2seq/trainer.hpp"

namespace gecforge::experiment {

enum class AegKind { rule, neural };
std::string_view to_string(AegKind k);
AegKind parse_aeg_kind(std::string_view text);

enum class Template { self, cross, small_base, artificial_only };
std::string_view to_string(Template t);
Template parse_template(std::string_view text);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // Data. With use_micro the four corpora are synthesized.
  bool use_micro = true;
  std::uint64_t micro_seed = 7;
  micro::MicroCorpusSizes micro_sizes;
  std::string base_corpus;  // .tsv or .m2
  std::string dev_corpus;   // .tsv or .m2
  std::string test_corpus;  // .m2
  std::string monolingual_corpus;

  // Error generation.
  AegKind aeg_kind = AegKind::rule;
  std::string lexicon;  // empty: built-in sets
  int lm_order = 3;
  double lm_k = 0.1;
  std::size_t top_m = 5;
  bool allow_insertions = false;
  std::uint64_t aeg_seed = 11;

  seq2seq::TrainConfig gec;
  seq2seq::TrainConfig aeg;

  std::vector<std::size_t> mix_sizes{0};
  std::vector<std::uint64_t> seeds{1};
  std::size_t small_base = 200;

  std::string scorer = "local";
  std::string output_dir = "results";

  /// Throws ConfigError.
  void validate(Template t) const;
};

/// Sectioned key = value text. Unknown sections or keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

struct ResultCell {
  std::string gec_model;
  std::string aeg_model;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::optional<double> f_score;  // nullopt when the cell failed
  std::string status = "ok";

  bool operator==(const ResultCell&) const = default;
};

struct ResultTable {
  std::string name;
  std::vector<std::string> notes;
  std::vector<ResultCell> cells;

  /// Median F over seeds for the cells at `size`, ignoring failed cells.
  std::optional<double> median(std::size_t size) const;
  const ResultCell* find(std::size_t size, std::uint64_t seed) const;

  bool operator==(const ResultTable&) const = default;
};

/// TSV: `# name` line, `# note:` lines, a header row, one row per cell.
std::string to_tsv(const ResultTable& table);
ResultTable from_tsv(std::string_view text);
std::string to_json(const ResultTable& table);
ResultTable from_json(std::string_view text);
/// Sizes as columns, seeds as rows, one block per (gec, aeg) model pair.
std::string to_grid(const ResultTable& table);

struct ExperimentData {
  std::vector<ParallelPair> base;
  std::vector<ParallelPair> dev;
  std::vector<AnnotatedSentence> test;
  std::vector<Sentence> monolingual;
};

/// Loads corpora from files, or synthesizes them for micro runs. File-based
/// base corpora are filtered to error-containing pairs.
ExperimentData load_data(const ExperimentConfig& cfg);

/// Selects one (size, seed) cell; others are skipped.
struct CellFilter {
  std::size_t size = 0;
  std::uint64_t seed = 0;
};

struct RunOptions {
  std::optional<CellFilter> only;
  /// Overrides the configured scorer (the local n-gram model trained on the
  /// monolingual corpus is used otherwise).
  std::shared_ptr<LmScorer> scorer;
  /// Progress messages; silent when empty.
  std::function<void(const std::string&)> log;
};

/// Tag of the one shipped correction/generation architecture.
inline constexpr std::string_view kModelTag = "gru-attn";

/// Artificial pairs from the configured source. Rule generation scores with
/// the local n-gram model (or the bridge); neural generation trains a
/// generation-direction model on the full base first.
std::vector<ParallelPair> build_artificial_pool(const ExperimentConfig& cfg, const ExperimentData& data, AegKind kind,
                                                const RunOptions& options, std::vector<std::string>* notes = nullptr);

/// Trains a correction model on base plus `size` pool pairs and scores it on
/// the test set. Returns the corpus-level F0.5.
double run_cell(const ExperimentConfig& cfg, const ExperimentData& data, const std::vector<ParallelPair>& base,
                const std::vector<ParallelPair>& pool, std::size_t size, std::uint64_t seed);

/// Self-paired: each AEG paired with the same architecture as the corrector.
ResultTable run_exp_self_paired(const ExperimentConfig& cfg, const RunOptions& options = {});
/// Cross-paired: one AEG source's corpus shared by every GEC training.
ResultTable run_exp_cross_paired(const ExperimentConfig& cfg, AegKind aeg_source, const RunOptions& options = {});
/// Small base: corrector trained on a small slice of the base.
ResultTable run_exp_small_base(const ExperimentConfig& cfg, const RunOptions& options = {});
/// Artificial only: corrector trained on artificial pairs only. When a small-base
/// table is given, notes compare the medians size by size.
ResultTable run_exp_artificial_only(const ExperimentConfig& cfg, const RunOptions& options = {},
                                    const ResultTable* small_base_reference = nullptr);

ResultTable run_template(Template t, const ExperimentConfig& cfg, const RunOptions& options = {});

}  // namespace gecforge::experiment

#endif  // GECFORGE_EXPERIMENT_HPP
