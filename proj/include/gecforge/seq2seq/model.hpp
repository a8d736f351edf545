#ifndef GECFORGE_SEQ2SEQ_MODEL_HPP
#define GECFORGE_SEQ2SEQ_MODEL_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gecforge/seq2seq/vocabulary.hpp"

namespace gecforge::seq2seq {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct ModelDims {
  int embed = 0;
  int hidden = 0;
  int src_vocab = 0;
  int tgt_vocab = 0;

  bool operator==(const ModelDims&) const = default;
};

/// Gated recurrent cell. Gate blocks are stacked [update; reset; candidate]:
///   z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br)
///   n = tanh(Wn x + bn + r * (Un h)),  h' = (1 - z) * n + z * h
template <typename Scalar>
struct GruParams {
  Matrix<Scalar> W;  // 3H x in
  Matrix<Scalar> U;  // 3H x H
  Vector<Scalar> b;  // 3H

  void resize(int in, int hidden) {
    W.setZero(3 * hidden, in);
    U.setZero(3 * hidden, hidden);
    b.setZero(3 * hidden);
  }
  template <typename F>
  void for_each(std::string_view prefix, F&& f) {
    f(std::string(prefix) + ".W", W);
    f(std::string(prefix) + ".U", U);
    f(std::string(prefix) + ".b", b);
  }
};

/// All trainable tensors. Gradients use the same type.
template <typename Scalar>
struct Seq2SeqParams {
  Matrix<Scalar> src_embed;  // E x Vs, one column per token
  Matrix<Scalar> tgt_embed;  // E x Vt
  GruParams<Scalar> enc_fwd;
  GruParams<Scalar> enc_bwd;
  GruParams<Scalar> dec;
  Matrix<Scalar> init_W;  // H x 2H, maps [fwd_last; bwd_first] to the decoder start state
  Vector<Scalar> init_b;
  Matrix<Scalar> attn_W;  // H x 2H, bilinear score s^T W h_j
  Matrix<Scalar> comb_W;  // H x 3H, over [s; context]
  Vector<Scalar> comb_b;
  Matrix<Scalar> out_W;  // Vt x H
  Vector<Scalar> out_b;

  static Seq2SeqParams zeros(const ModelDims& d);

  /// Visits every tensor as f(name, tensor&) in a fixed order.
  template <typename F>
  void for_each(F&& f) {
    f(std::string("src_embed"), src_embed);
    f(std::string("tgt_embed"), tgt_embed);
    enc_fwd.for_each("enc_fwd", f);
    enc_bwd.for_each("enc_bwd", f);
    dec.for_each("dec", f);
    f(std::string("init_W"), init_W);
    f(std::string("init_b"), init_b);
    f(std::string("attn_W"), attn_W);
    f(std::string("comb_W"), comb_W);
    f(std::string("comb_b"), comb_b);
    f(std::string("out_W"), out_W);
    f(std::string("out_b"), out_b);
  }
  template <typename F>
  void for_each(F&& f) const {
    const_cast<Seq2SeqParams*>(this)->for_each([&](const std::string& name, auto& t) { f(name, std::as_const(t)); });
  }

  Eigen::Index parameter_count() const;
  Scalar squared_norm() const;
  bool all_finite() const;
  void set_zero();
  /// this += alpha * other
  void axpy(Scalar alpha, const Seq2SeqParams& other);
  void scale(Scalar factor);
};


/// Everything backward() needs from one forward pass.
template <typename Scalar>
struct ForwardCache {
  struct GruStep {
    Vector<Scalar> x, h_prev, z, r, n, un_h, h;
  };
  std::vector<int> source;
  std::vector<int> dec_inputs;   // bos, y_1 .. y_{T-1}
  std::vector<int> dec_targets;  // y_1 .. y_{T-1}, eos
  std::vector<GruStep> enc_fwd;  // position j
  std::vector<GruStep> enc_bwd;  // position j
  Matrix<Scalar> annotations;    // 2H x S
  Vector<Scalar> init_in;        // [fwd_S; bwd_1]
  Vector<Scalar> init_state;     // s_0
  std::vector<GruStep> dec;
  std::vector<Vector<Scalar>> attn_query;  // attn_W^T s_t
  std::vector<Vector<Scalar>> alpha;
  std::vector<Vector<Scalar>> combined_in;  // [s_t; c_t]
  std::vector<Vector<Scalar>> combined;     // tanh(comb_W u + b)
  std::vector<Vector<Scalar>> probs;        // softmax output
};

class VocabularyRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Encoder-decoder with a bidirectional gated-recurrent encoder and a
/// gated-recurrent decoder using bilinear dot-product attention.
template <typename Scalar>
class Seq2SeqModel {
 public:
  using Params = Seq2SeqParams<Scalar>;
  using Cache = ForwardCache<Scalar>;

  /// Decoder state carried between decode steps.
  struct DecodeState {
    Vector<Scalar> hidden;
  };

  /// Encoded source bound to a model; produces next-token log-probabilities.
  class Session {
   public:
    using State = DecodeState;
    Session(const Seq2SeqModel& model, Matrix<Scalar> annotations, Vector<Scalar> init_state)
        : model_(&model), annotations_(std::move(annotations)), init_(std::move(init_state)) {}

    int vocab_size() const { return model_->dims().tgt_vocab; }
    int eos_id() const { return Vocabulary::kEos; }
    bool can_emit(int id) const { return id != Vocabulary::kPad && id != Vocabulary::kBos; }
    State initial_state() const { return State{init_}; }
    int start_token() const { return Vocabulary::kBos; }
    /// Consumes `last_token` and returns the new state plus log P(next | ...).
    std::pair<State, Vector<double>> step(const State& state, int last_token) const;

   private:
    const Seq2SeqModel* model_;
    Matrix<Scalar> annotations_;
    Vector<Scalar> init_;
  };

  Seq2SeqModel() = default;
  Seq2SeqModel(Vocabulary src, Vocabulary tgt, ModelDims dims, Params params);

  /// Parameters drawn uniformly from [-0.08, 0.08] by a generator seeded with `seed`.
  static Seq2SeqModel initialize(Vocabulary src, Vocabulary tgt, int embed_dim, int hidden_dim, std::uint64_t seed);

  const ModelDims& dims() const { return dims_; }
  const Vocabulary& source_vocab() const { return src_vocab_; }
  const Vocabulary& target_vocab() const { return tgt_vocab_; }
  const Params& params() const { return params_; }
  Params& params() { return params_; }

  /// Throws std::logic_error naming the first inconsistent tensor.
  void check_shapes() const;

  /// Mean token cross-entropy of target (plus eos) given source. Ids must be
  /// in range; both sequences non-empty.
  Scalar forward_loss(std::span<const int> source, std::span<const int> target, Cache* cache = nullptr) const;

  /// Accumulates d(loss)/d(params) for the pass recorded in `cache` into `grads`.
  void backward(const Cache& cache, Params& grads) const;

  Session start(std::span<const int> source) const;

 private:
  void check_ids(std::span<const int> ids, int vocab, const char* side) const;

  Vocabulary src_vocab_;
  Vocabulary tgt_vocab_;
  ModelDims dims_;
  Params params_;
};

extern template struct Seq2SeqParams<double>;
extern template struct Seq2SeqParams<float>;
extern template class Seq2SeqModel<double>;
extern template class Seq2SeqModel<float>;

}  // namespace gecforge::seq2seq

#endif  // GECFORGE_SEQ2SEQ_MODEL_HPP
