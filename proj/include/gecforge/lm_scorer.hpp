#ifndef GECFORGE_LM_SCORER_HPP
#define GECFORGE_LM_SCORER_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gecforge/sentence.hpp"

namespace gecforge {

class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full-sentence natural-log probability scorer.
class LmScorer {
 public:
  virtual ~LmScorer() = default;
  /// One finite log-probability per input, in order. Throws ScorerError.
  virtual std::vector<double> score_batch(const std::vector<Sentence>& sentences) = 0;
  virtual std::string name() const = 0;

  double score(const Sentence& s) { return score_batch({s}).front(); }
};

struct BridgeHealth {
  std::string model;
  bool ready = false;
};

/// Client for the language-model bridge service:
///   POST /score  {"sentences":[...]} -> {"logprobs":[...]}
///   GET  /health -> {"model":"...","ready":bool}
/// Batches larger than `max_batch` are split client-side.
class HttpLmScorer final : public LmScorer {
 public:
  explicit HttpLmScorer(std::string base_url, std::size_t max_batch = 64, double timeout_seconds = 30.0);

  std::vector<double> score_batch(const std::vector<Sentence>& sentences) override;
  std::string name() const override;
  /// nullopt when the service cannot be reached.
  std::optional<BridgeHealth> health() const;

 private:
  std::vector<double> score_chunk(const std::vector<Sentence>& chunk) const;

  std::string base_url_;
  std::size_t max_batch_;
  double timeout_seconds_;
};

/// Parses "http://host:port" (path ignored). Throws std::invalid_argument.
struct Endpoint {
  std::string scheme;
  std::string host;
  int port = 80;
};
Endpoint parse_endpoint(const std::string& url);

/// Resolves a scorer endpoint setting: the GEC_FORGE_SCORER_URL environment
/// variable wins over `configured`; "local" or empty means no bridge.
std::string resolve_scorer_endpoint(const std::string& configured);

/// Returns the bridge client when `endpoint` names a reachable, ready
/// service. Otherwise returns `fallback` when given, or throws ScorerError.
std::shared_ptr<LmScorer> connect_scorer(const std::string& endpoint, std::shared_ptr<LmScorer> fallback);

}  // namespace gecforge

#endif  // GECFORGE_LM_SCORER_HPP
