#ifndef GECFORGE_SEQ2SEQ_BEAM_SEARCH_HPP
#define GECFORGE_SEQ2SEQ_BEAM_SEARCH_HPP

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gecforge::seq2seq {

/// A decoder that can be driven one token at a time. Any decoder that
/// satisfies this can be searched; the recurrent-attention model's Session
/// is one.
template <typename D>
concept StepDecoder = requires(const D& d, const typename D::State& s, int token) {
  typename D::State;
  { d.vocab_size() } -> std::convertible_to<int>;
  { d.eos_id() } -> std::convertible_to<int>;
  { d.can_emit(token) } -> std::convertible_to<bool>;
  { d.start_token() } -> std::convertible_to<int>;
  { d.initial_state() } -> std::convertible_to<typename D::State>;
  { d.step(s, token) } -> std::convertible_to<std::pair<typename D::State, Eigen::VectorXd>>;
};

template <typename State>
struct BeamHypothesis {
  std::vector<int> tokens;  // emitted ids, excluding the final eos
  double logprob = 0.0;
  bool finished = false;    // ended with eos; false means cut off at max length
  State state{};            // decoder state before consuming the last token
  int last_token = 0;
};

/// Complete hypotheses, best first (ties by token sequence).
template <typename State>
using NBest = std::vector<BeamHypothesis<State>>;

namespace detail {

template <typename State>
bool better(const BeamHypothesis<State>& a, const BeamHypothesis<State>& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  if (a.tokens != b.tokens) return a.tokens < b.tokens;
  return a.finished && !b.finished;
}

}  // namespace detail

/// Length-unnormalized beam search. Each step expands every live hypothesis
/// by every emittable token and keeps the best `beam_width`; those ending in
/// eos are complete. After `max_length` steps the survivors are
/// force-terminated. Stops early once no live hypothesis can beat the best
/// complete one (log-probabilities only decrease).
template <StepDecoder D>
NBest<typename D::State> beam_search_nbest(const D& decoder, std::size_t beam_width, std::size_t max_length) {
  using Hyp = BeamHypothesis<typename D::State>;
  if (beam_width < 1) throw std::invalid_argument("beam width must be >= 1");
  if (max_length < 1) throw std::invalid_argument("max decode length must be >= 1");

  std::vector<Hyp> live(1);
  live[0].state = decoder.initial_state();
  live[0].last_token = decoder.start_token();
  std::vector<Hyp> done;

  for (std::size_t step = 1; step <= max_length && !live.empty(); ++step) {
    std::vector<Hyp> expanded;
    for (const Hyp& h : live) {
      auto [next_state, logp] = decoder.step(h.state, h.last_token);
      for (int tok = 0; tok < decoder.vocab_size(); ++tok) {
        if (!decoder.can_emit(tok)) continue;
        Hyp child;
        child.tokens = h.tokens;
        child.logprob = h.logprob + logp(tok);
        child.state = next_state;
        child.last_token = tok;
        if (tok == decoder.eos_id()) {
          child.finished = true;
        } else {
          child.tokens.push_back(tok);
        }
        expanded.push_back(std::move(child));
      }
    }
    const std::size_t keep = std::min(beam_width, expanded.size());
    std::partial_sort(expanded.begin(), expanded.begin() + static_cast<std::ptrdiff_t>(keep), expanded.end(),
                      detail::better<typename D::State>);
    expanded.resize(keep);

    live.clear();
    for (Hyp& h : expanded) {
      if (h.finished) {
        done.push_back(std::move(h));
      } else if (step == max_length) {
        done.push_back(std::move(h));
      } else {
        live.push_back(std::move(h));
      }
    }
    if (!done.empty() && !live.empty()) {
      const double best_done =
          std::max_element(done.begin(), done.end(), [](const Hyp& a, const Hyp& b) { return a.logprob < b.logprob; })
              ->logprob;
      if (best_done >= live.front().logprob) break;
    }
  }
  std::sort(done.begin(), done.end(), detail::better<typename D::State>);
  return done;
}

template <StepDecoder D>
BeamHypothesis<typename D::State> beam_search(const D& decoder, std::size_t beam_width, std::size_t max_length) {
  return beam_search_nbest(decoder, beam_width, max_length).front();
}

/// Picks the most probable emittable token at each step (lowest id on ties).
template <StepDecoder D>
BeamHypothesis<typename D::State> greedy_decode(const D& decoder, std::size_t max_length) {
  BeamHypothesis<typename D::State> h;
  h.state = decoder.initial_state();
  h.last_token = decoder.start_token();
  for (std::size_t step = 0; step < max_length; ++step) {
    auto [next_state, logp] = decoder.step(h.state, h.last_token);
    int best = -1;
    for (int tok = 0; tok < decoder.vocab_size(); ++tok) {
      if (decoder.can_emit(tok) && (best < 0 || logp(tok) > logp(best))) best = tok;
    }
    h.logprob += logp(best);
    h.state = std::move(next_state);
    h.last_token = best;
    if (best == decoder.eos_id()) {
      h.finished = true;
      break;
    }
    h.tokens.push_back(best);
  }
  return h;
}

}  // namespace gecforge::seq2seq

#endif  // GECFORGE_SEQ2SEQ_BEAM_SEARCH_HPP
