#include "gecforge/ngram_lm.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "gecforge/corpus.hpp"

namespace gecforge {

NGramModel NGramModel::train(const std::vector<Sentence>& corpus, int order, double k) {
  if (corpus.empty()) throw std::invalid_argument("cannot train a language model on an empty corpus");
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
  if (!(k > 0.0)) throw std::invalid_argument("smoothing constant k must be > 0");

  NGramModel m;
  m.order_ = order;
  m.k_ = k;
  m.vocab_.emplace(kEos);
  m.vocab_.emplace(kUnk);

  const std::size_t pad = static_cast<std::size_t>(order - 1);
  for (const auto& s : corpus) {
    std::vector<std::string> padded(pad, std::string(kBos));
    padded.insert(padded.end(), s.tokens.begin(), s.tokens.end());
    padded.emplace_back(kEos);
    for (const auto& t : s.tokens) m.vocab_.insert(t);

    for (std::size_t p = pad; p < padded.size(); ++p) {
      for (std::size_t n = 1; n <= static_cast<std::size_t>(order); ++n) {
        Context ctx(padded.begin() + static_cast<std::ptrdiff_t>(p - (n - 1)),
                    padded.begin() + static_cast<std::ptrdiff_t>(p));
        auto& cc = m.counts_[std::move(ctx)];
        ++cc.next[padded[p]];
        ++cc.total;
      }
    }
  }
  return m;
}

const NGramModel::ContextCounts* NGramModel::counts(const Context& context) const {
  auto it = counts_.find(context);
  return it == counts_.end() ? nullptr : &it->second;
}

std::string NGramModel::map_token(const std::string& token) const {
  return vocab_.contains(token) ? token : std::string(kUnk);
}

NGramModel::Context NGramModel::scoring_context(const Context& history) const {
  const std::size_t need = static_cast<std::size_t>(order_ - 1);
  Context ctx;
  ctx.reserve(need);
  const std::size_t have = std::min(need, history.size());
  for (std::size_t i = have; i < need; ++i) ctx.emplace_back(kBos);
  for (std::size_t i = history.size() - have; i < history.size(); ++i) {
    ctx.push_back(history[i] == kBos ? std::string(kBos) : map_token(history[i]));
  }
  return ctx;
}

double NGramModel::prob(const Context& context, const std::string& token) const {
  const double v = static_cast<double>(vocab_.size());
  const ContextCounts* cc = counts(scoring_context(context));
  if (cc == nullptr || cc->total == 0) return 1.0 / v;
  auto it = cc->next.find(map_token(token));
  const double c = it == cc->next.end() ? 0.0 : static_cast<double>(it->second);
  return (c + k_) / (static_cast<double>(cc->total) + k_ * v);
}

double NGramModel::logprob(const Sentence& s) const {
  Context history;
  history.reserve(s.size());
  double total = 0.0;
  for (const auto& t : s.tokens) {
    total += std::log(prob(history, t));
    history.push_back(t);
  }
  total += std::log(prob(history, std::string(kEos)));
  return total;
}

std::map<std::string, double> NGramModel::next_distribution(const Context& context) const {
  std::map<std::string, double> dist;
  for (const auto& w : vocab_) dist.emplace(w, prob(context, w));
  return dist;
}

std::string NGramModel::serialize() const {
  std::ostringstream os;
  char kbuf[64];
  std::snprintf(kbuf, sizeof kbuf, "%.17g", k_);
  os << "#ngram order=" << order_ << " k=" << kbuf << " V=" << vocab_.size() << '\n';
  for (const auto& [ctx, cc] : counts_) {
    std::string ctx_text = Sentence(ctx).str();
    for (const auto& [tok, c] : cc.next) os << ctx_text << '\t' << tok << '\t' << c << '\n';
  }
  return os.str();
}

NGramModel NGramModel::deserialize(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, "missing n-gram header");
  NGramModel m;
  std::size_t declared_v = 0;
  if (std::sscanf(line.c_str(), "#ngram order=%d k=%lf V=%zu", &m.order_, &m.k_, &declared_v) != 3 ||
      m.order_ < 1 || !(m.k_ > 0.0)) {
    throw ParseError(1, "malformed n-gram header '" + line + "'");
  }
  m.vocab_.emplace(kEos);
  m.vocab_.emplace(kUnk);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError(line_no, "expected context<TAB>token<TAB>count");
    Context ctx = split_whitespace(std::string_view(line).substr(0, t1));
    std::string tok = line.substr(t1 + 1, t2 - t1 - 1);
    std::int64_t count = 0;
    try {
      count = std::stoll(line.substr(t2 + 1));
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed count");
    }
    if (count <= 0 || static_cast<int>(ctx.size()) >= m.order_) throw ParseError(line_no, "invalid n-gram row");
    auto& cc = m.counts_[ctx];
    cc.next[tok] += count;
    cc.total += count;
    if (ctx.empty()) m.vocab_.insert(tok);
  }
  if (m.vocab_.size() != declared_v) {
    throw ParseError(1, "header declares |V|=" + std::to_string(declared_v) + " but counts imply " +
                            std::to_string(m.vocab_.size()));
  }
  return m;
}

std::vector<double> NGramScorer::score_batch(const std::vector<Sentence>& sentences) {
  std::vector<double> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(model_.logprob(s));
  return out;
}

}  // namespace gecforge
