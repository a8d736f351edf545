#include "gecforge/seq2seq/trainer.hpp"

#include <cmath>
#include <numeric>

#include "gecforge/rng.hpp"
#include "gecforge/seq2seq/beam_search.hpp"

namespace gecforge::seq2seq {

std::string_view to_string(Direction d) { return d == Direction::correction ? "correction" : "generation"; }

Direction parse_direction(std::string_view text) {
  if (text == "correction") return Direction::correction;
  if (text == "generation") return Direction::generation;
  throw std::invalid_argument("unknown direction '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (embed_dim < 1 || hidden_dim < 1) throw std::invalid_argument("embedding and hidden sizes must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (max_epochs < 1) throw std::invalid_argument("max epochs must be positive");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (beam_width < 1) throw std::invalid_argument("beam width must be positive");
  if (max_decode_length < 1) throw std::invalid_argument("max decode length must be positive");
  if (!(clip_norm > 0.0)) throw std::invalid_argument("clip norm must be positive");
}

bool EarlyStopper::observe(double dev_loss) {
  ++epochs_;
  if (dev_loss < best_loss_) {
    best_loss_ = dev_loss;
    best_epoch_ = epochs_;
    since_best_ = 0;
    return false;
  }
  return ++since_best_ >= patience_;
}

std::vector<ParallelPair> orient(const std::vector<ParallelPair>& pairs, Direction direction) {
  if (direction == Direction::correction) return pairs;
  std::vector<ParallelPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(ParallelPair{p.target, p.source, p.provenance});
  return out;
}

std::vector<Example> encode_pairs(const Seq2SeqModel<double>& model, const std::vector<ParallelPair>& oriented) {
  std::vector<Example> out;
  out.reserve(oriented.size());
  for (const auto& p : oriented) {
    out.push_back(Example{model.source_vocab().encode(p.source), model.target_vocab().encode(p.target)});
  }
  return out;
}

double mean_loss(const Seq2SeqModel<double>& model, const std::vector<Example>& examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : examples) total += model.forward_loss(ex.source, ex.target);
  return total / static_cast<double>(examples.size());
}

double batch_gradient(const Seq2SeqModel<double>& model, const std::vector<Example>& batch,
                      Seq2SeqParams<double>& grads) {
  grads.set_zero();
  ForwardCache<double> cache;
  double loss = 0.0;
  for (const auto& ex : batch) {
    loss += model.forward_loss(ex.source, ex.target, &cache);
    model.backward(cache, grads);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  grads.scale(inv);
  return loss * inv;
}

double sgd_step(Seq2SeqModel<double>& model, Seq2SeqParams<double>& grads, double learning_rate, double clip_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  double factor = learning_rate;
  if (norm > clip_norm) factor *= clip_norm / norm;
  model.params().axpy(-factor, grads);
  return norm;
}

TrainResult train_from(Seq2SeqModel<double> model, const std::vector<ParallelPair>& pairs,
                       const std::vector<ParallelPair>& dev, Direction direction, const TrainConfig& config) {
  config.validate();
  if (pairs.empty()) throw std::invalid_argument("training set is empty");
  if (dev.empty()) throw std::invalid_argument("dev set is empty");

  const auto train_ex = encode_pairs(model, orient(pairs, direction));
  const auto dev_ex = encode_pairs(model, orient(dev, direction));

  Rng rng(derive_seed(config.seed, 0x7261696eULL));
  std::vector<std::size_t> order(train_ex.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto grads = Seq2SeqParams<double>::zeros(model.dims());
  EarlyStopper stopper(config.patience);
  TrainResult result{model, {}};
  std::vector<Example> batch;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_ex[order[i]]);
      const double loss = batch_gradient(model, batch, grads);
      if (!std::isfinite(loss) || !grads.all_finite()) {
        throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                               std::to_string(start) + " (learning rate " + std::to_string(config.learning_rate) + ")");
      }
      epoch_loss += loss * static_cast<double>(end - start);
      sgd_step(model, grads, config.learning_rate, config.clip_norm);
    }
    const double dev_loss = mean_loss(model, dev_ex);
    if (!std::isfinite(dev_loss)) throw TrainingDiverged("non-finite dev loss at epoch " + std::to_string(epoch));
    result.history.epochs.push_back(EpochRecord{epoch, epoch_loss / static_cast<double>(train_ex.size()), dev_loss});
    const bool stop = stopper.observe(dev_loss);
    if (stopper.improved_last()) result.model = model;
    if (stop) {
      result.history.stopped_early = true;
      break;
    }
  }
  result.history.best_epoch = stopper.best_epoch();
  return result;
}

TrainResult train(const std::vector<ParallelPair>& pairs, const std::vector<ParallelPair>& dev, Direction direction,
                  const TrainConfig& config) {
  config.validate();
  if (pairs.empty()) throw std::invalid_argument("training set is empty");
  const auto oriented = orient(pairs, direction);
  std::vector<Sentence> sources, targets;
  for (const auto& p : oriented) {
    sources.push_back(p.source);
    targets.push_back(p.target);
  }
  auto model = Seq2SeqModel<double>::initialize(Vocabulary::build(sources), Vocabulary::build(targets),
                                                config.embed_dim, config.hidden_dim,
                                                derive_seed(config.seed, 0x696e6974ULL));
  return train_from(std::move(model), pairs, dev, direction, config);
}

std::size_t decode_length(const Sentence& source, std::size_t cap) {
  return std::max<std::size_t>(1, std::min(cap, 2 * source.size() + 5));
}

Sentence decode(const Seq2SeqModel<double>& model, const Sentence& source, std::size_t beam_width,
                std::size_t max_length) {
  if (source.empty()) return {};
  const auto ids = model.source_vocab().encode(source);
  const auto session = model.start(ids);
  const auto best = beam_search(session, beam_width, decode_length(source, max_length));
  return model.target_vocab().decode(best.tokens);
}

Sentence greedy(const Seq2SeqModel<double>& model, const Sentence& source, std::size_t max_length) {
  if (source.empty()) return {};
  const auto ids = model.source_vocab().encode(source);
  const auto session = model.start(ids);
  return model.target_vocab().decode(greedy_decode(session, decode_length(source, max_length)).tokens);
}

NeuralCorpus generate_neural_corpus(const Seq2SeqModel<double>& model, const std::vector<Sentence>& clean,
                                    const TrainConfig& config) {
  NeuralCorpus out;
  for (const auto& s : clean) {
    Sentence hyp = decode(model, s, config.beam_width, config.max_decode_length);
    if (hyp.empty() || hyp == s) {
      ++out.dropped;
      continue;
    }
    out.pairs.push_back(ParallelPair{std::move(hyp), s, Provenance::neural});
  }
  return out;
}

}  // namespace gecforge::seq2seq
