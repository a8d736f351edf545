#ifndef GECFORGE_NGRAM_LM_HPP
#define GECFORGE_NGRAM_LM_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gecforge/lm_scorer.hpp"
#include "gecforge/sentence.hpp"

namespace gecforge {

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";

/// Add-k smoothed n-gram model over the highest order, with a uniform
/// distribution for contexts never seen in training. |V| counts observed
/// tokens plus </s> and <unk>; the <s> padding symbol is not predictable
/// and is not part of V.
class NGramModel {
 public:
  using Context = std::vector<std::string>;

  struct ContextCounts {
    std::map<std::string, std::int64_t> next;
    std::int64_t total = 0;
    bool operator==(const ContextCounts&) const = default;
  };

  NGramModel() = default;

  /// Counts every n-gram of order 1..`order` over sentences padded with
  /// order-1 start symbols and one end symbol. Throws on an empty corpus
  /// or order < 1 or k <= 0.
  static NGramModel train(const std::vector<Sentence>& corpus, int order, double k);

  int order() const { return order_; }
  double k() const { return k_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::set<std::string>& vocabulary() const { return vocab_; }

  /// Raw counts for a context of any length < order (no padding applied).
  const ContextCounts* counts(const Context& context) const;

  /// Natural-log sentence probability, including the end-of-sentence term.
  double logprob(const Sentence& s) const;

  /// P(w | context) for every w in V. The context is right-aligned to the
  /// model order, padded on the left with <s>; OOV tokens become <unk>.
  std::map<std::string, double> next_distribution(const Context& context) const;

  double prob(const Context& context, const std::string& token) const;

  /// Plain-text count file: a header line, then sorted
  /// `context<TAB>token<TAB>count` rows (context tokens space-joined).
  std::string serialize() const;
  static NGramModel deserialize(std::string_view text);

  bool operator==(const NGramModel&) const = default;

 private:
  Context scoring_context(const Context& history) const;
  std::string map_token(const std::string& token) const;

  int order_ = 1;
  double k_ = 1.0;
  std::set<std::string> vocab_;
  std::map<Context, ContextCounts> counts_;
};

/// LmScorer backed by a trained n-gram model. Immutable and thread-safe.
class NGramScorer final : public LmScorer {
 public:
  explicit NGramScorer(NGramModel model) : model_(std::move(model)) {}
  std::vector<double> score_batch(const std::vector<Sentence>& sentences) override;
  std::string name() const override { return "ngram-" + std::to_string(model_.order()); }
  const NGramModel& model() const { return model_; }

 private:
  NGramModel model_;
};

}  // namespace gecforge

#endif  // GECFORGE_NGRAM_LM_HPP
