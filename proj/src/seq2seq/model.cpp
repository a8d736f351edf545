#include "gecforge/seq2seq/model.hpp"

#include <cmath>
#include <string>

#include "gecforge/rng.hpp"

namespace gecforge::seq2seq {

namespace {

template <typename Scalar>
Vector<Scalar> sigmoid(const Vector<Scalar>& v) {
  return (Scalar(1) + (-v.array()).exp()).inverse().matrix();
}

template <typename Scalar>
Vector<Scalar> softmax(const Vector<Scalar>& v) {
  Vector<Scalar> e = (v.array() - v.maxCoeff()).exp().matrix();
  return e / e.sum();
}

template <typename Scalar>
typename ForwardCache<Scalar>::GruStep gru_forward(const GruParams<Scalar>& p, const Vector<Scalar>& x,
                                                   const Vector<Scalar>& h_prev) {
  const Eigen::Index H = h_prev.size();
  typename ForwardCache<Scalar>::GruStep s;
  Vector<Scalar> gx = p.W * x + p.b;
  Vector<Scalar> gh = p.U * h_prev;
  s.x = x;
  s.h_prev = h_prev;
  s.z = sigmoid<Scalar>(gx.segment(0, H) + gh.segment(0, H));
  s.r = sigmoid<Scalar>(gx.segment(H, H) + gh.segment(H, H));
  s.un_h = gh.segment(2 * H, H);
  s.n = (gx.segment(2 * H, H).array() + s.r.array() * s.un_h.array()).tanh().matrix();
  s.h = ((Scalar(1) - s.z.array()) * s.n.array() + s.z.array() * h_prev.array()).matrix();
  return s;
}

// Returns dx; adds the recurrent gradient into dh_prev.
template <typename Scalar>
Vector<Scalar> gru_backward(const GruParams<Scalar>& p, const typename ForwardCache<Scalar>::GruStep& s,
                            const Vector<Scalar>& dh, GruParams<Scalar>& g, Vector<Scalar>& dh_prev) {
  const Eigen::Index H = dh.size();
  auto z = s.z.array();
  auto r = s.r.array();
  auto n = s.n.array();
  Vector<Scalar> dgx(3 * H);
  Vector<Scalar> dgh(3 * H);
  auto da_n = (dh.array() * (Scalar(1) - z) * (Scalar(1) - n * n)).eval();
  auto da_z = (dh.array() * (s.h_prev.array() - n) * z * (Scalar(1) - z)).eval();
  auto da_r = (da_n * s.un_h.array() * r * (Scalar(1) - r)).eval();
  dgx << da_z.matrix(), da_r.matrix(), da_n.matrix();
  dgh << da_z.matrix(), da_r.matrix(), (da_n * r).matrix();

  g.W.noalias() += dgx * s.x.transpose();
  g.b += dgx;
  g.U.noalias() += dgh * s.h_prev.transpose();
  dh_prev = (dh.array() * z).matrix();
  dh_prev.noalias() += p.U.transpose() * dgh;
  return p.W.transpose() * dgx;
}

}  // namespace

template <typename Scalar>
Seq2SeqParams<Scalar> Seq2SeqParams<Scalar>::zeros(const ModelDims& d) {
  Seq2SeqParams p;
  p.src_embed.setZero(d.embed, d.src_vocab);
  p.tgt_embed.setZero(d.embed, d.tgt_vocab);
  p.enc_fwd.resize(d.embed, d.hidden);
  p.enc_bwd.resize(d.embed, d.hidden);
  p.dec.resize(d.embed, d.hidden);
  p.init_W.setZero(d.hidden, 2 * d.hidden);
  p.init_b.setZero(d.hidden);
  p.attn_W.setZero(d.hidden, 2 * d.hidden);
  p.comb_W.setZero(d.hidden, 3 * d.hidden);
  p.comb_b.setZero(d.hidden);
  p.out_W.setZero(d.tgt_vocab, d.hidden);
  p.out_b.setZero(d.tgt_vocab);
  return p;
}

template <typename Scalar>
Eigen::Index Seq2SeqParams<Scalar>::parameter_count() const {
  Eigen::Index n = 0;
  for_each([&](const std::string&, const auto& t) { n += t.size(); });
  return n;
}

template <typename Scalar>
Scalar Seq2SeqParams<Scalar>::squared_norm() const {
  Scalar total = 0;
  for_each([&](const std::string&, const auto& t) { total += t.squaredNorm(); });
  return total;
}

template <typename Scalar>
bool Seq2SeqParams<Scalar>::all_finite() const {
  bool ok = true;
  for_each([&](const std::string&, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

template <typename Scalar>
void Seq2SeqParams<Scalar>::set_zero() {
  for_each([](const std::string&, auto& t) { t.setZero(); });
}

template <typename Scalar>
void Seq2SeqParams<Scalar>::axpy(Scalar alpha, const Seq2SeqParams& other) {
  std::vector<const Scalar*> sources;
  other.for_each([&](const std::string&, const auto& t) { sources.push_back(t.data()); });
  std::size_t i = 0;
  for_each([&](const std::string&, auto& t) {
    using T = std::decay_t<decltype(t)>;
    t += alpha * Eigen::Map<const T>(sources[i++], t.rows(), t.cols());
  });
}

template <typename Scalar>
void Seq2SeqParams<Scalar>::scale(Scalar factor) {
  for_each([&](const std::string&, auto& t) { t *= factor; });
}

template <typename Scalar>
Seq2SeqModel<Scalar>::Seq2SeqModel(Vocabulary src, Vocabulary tgt, ModelDims dims, Params params)
    : src_vocab_(std::move(src)), tgt_vocab_(std::move(tgt)), dims_(dims), params_(std::move(params)) {
  check_shapes();
}

template <typename Scalar>
Seq2SeqModel<Scalar> Seq2SeqModel<Scalar>::initialize(Vocabulary src, Vocabulary tgt, int embed_dim, int hidden_dim,
                                                      std::uint64_t seed) {
  if (embed_dim < 1 || hidden_dim < 1) throw std::invalid_argument("model dimensions must be positive");
  ModelDims dims{embed_dim, hidden_dim, src.size(), tgt.size()};
  Params p = Params::zeros(dims);
  Rng rng(seed);
  p.for_each([&](const std::string&, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<Scalar>(uniform_real(rng, -0.08, 0.08));
  });
  return Seq2SeqModel(std::move(src), std::move(tgt), dims, std::move(p));
}

template <typename Scalar>
void Seq2SeqModel<Scalar>::check_shapes() const {
  const auto& d = dims_;
  if (d.src_vocab != src_vocab_.size() || d.tgt_vocab != tgt_vocab_.size()) {
    throw std::logic_error("vocabulary sizes disagree with model dimensions");
  }
  const Params expected = Params::zeros(d);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  expected.for_each([&](const std::string&, const auto& t) { shapes.emplace_back(t.rows(), t.cols()); });
  std::size_t i = 0;
  params_.for_each([&](const std::string& name, const auto& t) {
    if (t.rows() != shapes[i].first || t.cols() != shapes[i].second) {
      throw std::logic_error("tensor " + name + " has shape " + std::to_string(t.rows()) + "x" +
                             std::to_string(t.cols()) + ", expected " + std::to_string(shapes[i].first) + "x" +
                             std::to_string(shapes[i].second));
    }
    ++i;
  });
}

template <typename Scalar>
void Seq2SeqModel<Scalar>::check_ids(std::span<const int> ids, int vocab, const char* side) const {
  if (ids.empty()) throw std::invalid_argument(std::string(side) + " sequence is empty");
  for (int id : ids) {
    if (id < 0 || id >= vocab) {
      throw VocabularyRangeError(std::string(side) + " id " + std::to_string(id) + " outside vocabulary of size " +
                                 std::to_string(vocab));
    }
  }
}

template <typename Scalar>
Scalar Seq2SeqModel<Scalar>::forward_loss(std::span<const int> source, std::span<const int> target,
                                          Cache* cache) const {
  check_ids(source, dims_.src_vocab, "source");
  check_ids(target, dims_.tgt_vocab, "target");
  const auto& p = params_;
  const int H = dims_.hidden;
  const auto S = static_cast<Eigen::Index>(source.size());

  Cache local;
  Cache& c = cache ? *cache : local;
  c = Cache{};
  c.source.assign(source.begin(), source.end());
  c.dec_inputs.push_back(Vocabulary::kBos);
  c.dec_inputs.insert(c.dec_inputs.end(), target.begin(), target.end());
  c.dec_targets.assign(target.begin(), target.end());
  c.dec_targets.push_back(Vocabulary::kEos);

  c.enc_fwd.resize(static_cast<std::size_t>(S));
  c.enc_bwd.resize(static_cast<std::size_t>(S));
  Vector<Scalar> h = Vector<Scalar>::Zero(H);
  for (Eigen::Index j = 0; j < S; ++j) {
    c.enc_fwd[j] = gru_forward<Scalar>(p.enc_fwd, p.src_embed.col(source[j]), h);
    h = c.enc_fwd[j].h;
  }
  h.setZero();
  for (Eigen::Index j = S - 1; j >= 0; --j) {
    c.enc_bwd[j] = gru_forward<Scalar>(p.enc_bwd, p.src_embed.col(source[j]), h);
    h = c.enc_bwd[j].h;
  }
  c.annotations.resize(2 * H, S);
  for (Eigen::Index j = 0; j < S; ++j) {
    c.annotations.col(j) << c.enc_fwd[j].h, c.enc_bwd[j].h;
  }
  c.init_in.resize(2 * H);
  c.init_in << c.enc_fwd[S - 1].h, c.enc_bwd[0].h;
  c.init_state = (p.init_W * c.init_in + p.init_b).array().tanh().matrix();

  const std::size_t T = c.dec_targets.size();
  c.dec.resize(T);
  c.attn_query.resize(T);
  c.alpha.resize(T);
  c.combined_in.resize(T);
  c.combined.resize(T);
  c.probs.resize(T);
  Scalar loss = 0;
  Vector<Scalar> s = c.init_state;
  for (std::size_t t = 0; t < T; ++t) {
    c.dec[t] = gru_forward<Scalar>(p.dec, p.tgt_embed.col(c.dec_inputs[t]), s);
    s = c.dec[t].h;
    c.attn_query[t] = p.attn_W.transpose() * s;
    c.alpha[t] = softmax<Scalar>(c.annotations.transpose() * c.attn_query[t]);
    c.combined_in[t].resize(3 * H);
    c.combined_in[t] << s, c.annotations * c.alpha[t];
    c.combined[t] = (p.comb_W * c.combined_in[t] + p.comb_b).array().tanh().matrix();
    c.probs[t] = softmax<Scalar>(p.out_W * c.combined[t] + p.out_b);
    loss -= std::log(c.probs[t](c.dec_targets[t]));
  }
  return loss / static_cast<Scalar>(T);
}

template <typename Scalar>
void Seq2SeqModel<Scalar>::backward(const Cache& c, Params& g) const {
  const auto& p = params_;
  const int H = dims_.hidden;
  const std::size_t T = c.dec_targets.size();
  const auto S = static_cast<Eigen::Index>(c.source.size());
  const Scalar inv_T = Scalar(1) / static_cast<Scalar>(T);

  Matrix<Scalar> d_annot = Matrix<Scalar>::Zero(2 * H, S);
  Vector<Scalar> ds_next = Vector<Scalar>::Zero(H);
  Vector<Scalar> dh_prev(H);
  for (std::size_t ti = T; ti-- > 0;) {
    Vector<Scalar> dlogits = c.probs[ti] * inv_T;
    dlogits(c.dec_targets[ti]) -= inv_T;
    g.out_W.noalias() += dlogits * c.combined[ti].transpose();
    g.out_b += dlogits;

    Vector<Scalar> dpre =
        ((p.out_W.transpose() * dlogits).array() * (Scalar(1) - c.combined[ti].array().square())).matrix();
    g.comb_W.noalias() += dpre * c.combined_in[ti].transpose();
    g.comb_b += dpre;
    Vector<Scalar> du = p.comb_W.transpose() * dpre;
    Vector<Scalar> ds = du.head(H) + ds_next;
    Vector<Scalar> dctx = du.tail(2 * H);

    const Vector<Scalar>& alpha = c.alpha[ti];
    Vector<Scalar> dalpha = c.annotations.transpose() * dctx;
    d_annot.noalias() += dctx * alpha.transpose();
    Vector<Scalar> de = (alpha.array() * (dalpha.array() - alpha.dot(dalpha))).matrix();
    Vector<Scalar> dquery = c.annotations * de;
    d_annot.noalias() += c.attn_query[ti] * de.transpose();
    g.attn_W.noalias() += c.dec[ti].h * dquery.transpose();
    ds.noalias() += p.attn_W * dquery;

    Vector<Scalar> dx = gru_backward<Scalar>(p.dec, c.dec[ti], ds, g.dec, dh_prev);
    g.tgt_embed.col(c.dec_inputs[ti]) += dx;
    ds_next = dh_prev;
  }

  Vector<Scalar> dinit = (ds_next.array() * (Scalar(1) - c.init_state.array().square())).matrix();
  g.init_W.noalias() += dinit * c.init_in.transpose();
  g.init_b += dinit;
  Vector<Scalar> dinit_in = p.init_W.transpose() * dinit;

  Vector<Scalar> dnext = Vector<Scalar>::Zero(H);
  for (Eigen::Index j = S - 1; j >= 0; --j) {
    Vector<Scalar> dh = d_annot.col(j).head(H) + dnext;
    if (j == S - 1) dh += dinit_in.head(H);
    Vector<Scalar> dx = gru_backward<Scalar>(p.enc_fwd, c.enc_fwd[j], dh, g.enc_fwd, dh_prev);
    g.src_embed.col(c.source[j]) += dx;
    dnext = dh_prev;
  }
  dnext.setZero();
  for (Eigen::Index j = 0; j < S; ++j) {
    Vector<Scalar> dh = d_annot.col(j).tail(H) + dnext;
    if (j == 0) dh += dinit_in.tail(H);
    Vector<Scalar> dx = gru_backward<Scalar>(p.enc_bwd, c.enc_bwd[j], dh, g.enc_bwd, dh_prev);
    g.src_embed.col(c.source[j]) += dx;
    dnext = dh_prev;
  }
}

template <typename Scalar>
typename Seq2SeqModel<Scalar>::Session Seq2SeqModel<Scalar>::start(std::span<const int> source) const {
  check_ids(source, dims_.src_vocab, "source");
  const auto& p = params_;
  const int H = dims_.hidden;
  const auto S = static_cast<Eigen::Index>(source.size());
  Matrix<Scalar> annotations(2 * H, S);
  Vector<Scalar> h = Vector<Scalar>::Zero(H);
  for (Eigen::Index j = 0; j < S; ++j) {
    h = gru_forward<Scalar>(p.enc_fwd, p.src_embed.col(source[j]), h).h;
    annotations.col(j).head(H) = h;
  }
  Vector<Scalar> fwd_last = h;
  h.setZero();
  for (Eigen::Index j = S - 1; j >= 0; --j) {
    h = gru_forward<Scalar>(p.enc_bwd, p.src_embed.col(source[j]), h).h;
    annotations.col(j).tail(H) = h;
  }
  Vector<Scalar> init_in(2 * H);
  init_in << fwd_last, h;
  Vector<Scalar> init = (p.init_W * init_in + p.init_b).array().tanh().matrix();
  return Session(*this, std::move(annotations), std::move(init));
}

template <typename Scalar>
std::pair<typename Seq2SeqModel<Scalar>::DecodeState, Vector<double>> Seq2SeqModel<Scalar>::Session::step(
    const State& state, int last_token) const {
  const auto& p = model_->params_;
  const int H = model_->dims_.hidden;
  if (last_token < 0 || last_token >= model_->dims_.tgt_vocab) {
    throw VocabularyRangeError("decoder input id " + std::to_string(last_token) + " out of range");
  }
  Vector<Scalar> s = gru_forward<Scalar>(p.dec, p.tgt_embed.col(last_token), state.hidden).h;
  Vector<Scalar> alpha = softmax<Scalar>(annotations_.transpose() * (p.attn_W.transpose() * s));
  Vector<Scalar> u(3 * H);
  u << s, annotations_ * alpha;
  Vector<Scalar> combined = (p.comb_W * u + p.comb_b).array().tanh().matrix();
  Vector<Scalar> logits = p.out_W * combined + p.out_b;
  Vector<double> z = logits.template cast<double>();
  const double mx = z.maxCoeff();
  const double lse = mx + std::log((z.array() - mx).exp().sum());
  return {State{std::move(s)}, (z.array() - lse).matrix()};
}

template struct Seq2SeqParams<double>;
template struct Seq2SeqParams<float>;
template class Seq2SeqModel<double>;
template class Seq2SeqModel<float>;

}  // namespace gecforge::seq2seq
