#ifndef GECFORGE_SEQ2SEQ_TRAINER_HPP
#define GECFORGE_SEQ2SEQ_TRAINER_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gecforge/corpus.hpp"
#include "gecforge/seq2seq/model.hpp"

namespace gecforge::seq2seq {

enum class Direction { correction, generation };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

struct TrainConfig {
  int embed_dim = 24;
  int hidden_dim = 32;
  double learning_rate = 1.0;
  std::size_t batch_size = 8;
  int max_epochs = 30;
  int patience = 3;
  std::uint64_t seed = 1;
  std::size_t beam_width = 3;
  std::size_t max_decode_length = 40;
  double clip_norm = 5.0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Tracks dev loss across epochs and says when to stop.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}
  /// Records the dev loss of the next epoch (1-based). Returns true when
  /// training should stop after it.
  bool observe(double dev_loss);
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  bool improved_last() const { return epochs_ == best_epoch_; }

 private:
  int patience_;
  int epochs_ = 0;
  int best_epoch_ = 0;
  int since_best_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  bool stopped_early = false;
};

struct TrainResult {
  Seq2SeqModel<double> model;
  TrainHistory history;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Swaps each pair's sides for the generation direction.
std::vector<ParallelPair> orient(const std::vector<ParallelPair>& pairs, Direction direction);

/// Encoded (source ids, target ids) examples for a model's vocabularies.
struct Example {
  std::vector<int> source;
  std::vector<int> target;
};
std::vector<Example> encode_pairs(const Seq2SeqModel<double>& model, const std::vector<ParallelPair>& oriented);

/// Mean over examples of the per-example mean token cross-entropy.
double mean_loss(const Seq2SeqModel<double>& model, const std::vector<Example>& examples);

/// Loss and gradient averaged over a batch.
double batch_gradient(const Seq2SeqModel<double>& model, const std::vector<Example>& batch,
                      Seq2SeqParams<double>& grads);

/// One plain SGD update with global gradient-norm clipping. Returns the
/// pre-clipping gradient norm.
double sgd_step(Seq2SeqModel<double>& model, Seq2SeqParams<double>& grads, double learning_rate, double clip_norm);

/// Minibatch SGD with clipping; evaluates dev loss after every epoch and
/// keeps the parameters of the best dev epoch. Vocabularies come from the
/// (oriented) training pairs. Throws TrainingDiverged on a non-finite loss.
TrainResult train(const std::vector<ParallelPair>& pairs, const std::vector<ParallelPair>& dev, Direction direction,
                  const TrainConfig& config);

/// As above but continues from an existing model (its vocabularies are kept).
TrainResult train_from(Seq2SeqModel<double> model, const std::vector<ParallelPair>& pairs,
                       const std::vector<ParallelPair>& dev, Direction direction, const TrainConfig& config);

Sentence decode(const Seq2SeqModel<double>& model, const Sentence& source, std::size_t beam_width,
                std::size_t max_length);
Sentence greedy(const Seq2SeqModel<double>& model, const Sentence& source, std::size_t max_length);

/// Decode length budget for a source sentence: min(cap, 2 * |source| + 5).
std::size_t decode_length(const Sentence& source, std::size_t cap);

struct NeuralCorpus {
  std::vector<ParallelPair> pairs;
  std::size_t dropped = 0;
};

/// Decodes each clean sentence with a generation-direction model and emits
/// (hypothesis, clean) pairs tagged Provenance::neural, dropping hypotheses
/// identical to their input (or empty).
NeuralCorpus generate_neural_corpus(const Seq2SeqModel<double>& model, const std::vector<Sentence>& clean,
                                    const TrainConfig& config);

}  // namespace gecforge::seq2seq

#endif  // GECFORGE_SEQ2SEQ_TRAINER_HPP
