// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gecforge/experiment.hpp"
#include "gecforge/m2_scorer.hpp"
#include "gecforge/micro_lang.hpp"
#include "gecforge/ngram_lm.hpp"
#include "gecforge/rule_aeg.hpp"
#include "gecforge/seq2seq/beam_search.hpp"
#include "gecforge/seq2seq/trainer.hpp"
#include "oracles/grad_check.hpp"
#include "oracles/m2_instances.hpp"
#include "oracles/m2_oracle.hpp"
#include "oracles/table_decoder.hpp"

using namespace gecforge;
namespace ex = gecforge::experiment;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s  %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Sentence S(const char* t) { return Sentence::from_text(t); }

// Oracle equivalence of the M2 dynamic program.
Outcome m2_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240601);
  int mismatches = 0;
  std::size_t max_paths = 0;
  for (int i = 0; i < 200; ++i) {
    auto inst = oracles::random_m2_instance(rng);
    auto lat = m2::extract_edit_lattice(inst.source, inst.hypothesis);
    std::vector<std::vector<m2::SystemEdit>> paths;
    oracles::all_paths(lat, paths, static_cast<std::size_t>(-1));
    max_paths = std::max(max_paths, paths.size());
    auto dp = m2::max_match(lat, inst.gold);
    auto bf = oracles::brute_force_max_match(lat, inst.gold);
    if (dp.tp != bf.tp || dp.fp != bf.fp || dp.fn != bf.fn) ++mismatches;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {mismatches == 0 && secs < 60.0,
          fmt("200 pairs, %d count mismatches, largest lattice %zu paths, %.2fs (limit 60s)", mismatches, max_paths, secs)};
}

Outcome f_formula() {
  const double f = m2::f_beta(2, 1, 2, 0.5);
  const bool conventions = m2::f_beta(0, 0, 0, 0.5) == 1.0 && m2::f_beta(0, 3, 2, 0.5) == 0.0 &&
                           m2::f_beta(0, 0, 2, 0.5) == 0.0 && m2::f_beta(0, 2, 0, 0.5) == 0.0;
  return {f == 0.625 && conventions, fmt("F0.5(2,1,2) = %.17g, 0/0 and zero-tp conventions %s", f, conventions ? "hold" : "broken")};
}

Outcome gradient() {
  auto vocab = seq2seq::Vocabulary::from_tokens({"x"});
  auto model = seq2seq::Seq2SeqModel<double>::initialize(vocab, vocab, 3, 3, 42);
  Rng rng(5);
  model.params().for_each([&](const std::string&, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = uniform_real(rng, -0.8, 0.8);
  });
  auto r = oracles::check_gradient(model, {4, 3, 4, 2}, {3, 4, 4}, 1e-5, 60, 9);
  return {r.checked >= 50 && r.max_rel_error < 1e-4,
          fmt("%d params, max rel err %.3g (limit 1e-4), E=H=3, |V|=5", r.checked, r.max_rel_error)};
}

Outcome beam_exhaustive() {
  int instances = 0, bad = 0;
  double worst = 0.0;
  for (int vocab = 2; vocab <= 6; ++vocab) {
    for (std::size_t L = 1; L <= 4; ++L) {
      std::size_t width = 1;
      for (std::size_t i = 0; i < L; ++i) width *= static_cast<std::size_t>(vocab);
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        oracles::TableDecoder d{vocab, 0, seed * 977 + static_cast<std::uint64_t>(vocab * 10 + static_cast<int>(L))};
        auto b = seq2seq::beam_search(d, width, L);
        auto o = oracles::exhaustive_best(d, L);
        worst = std::max(worst, std::abs(b.logprob - o.logprob));
        if (b.tokens != o.tokens || std::abs(b.logprob - o.logprob) > 1e-9) ++bad;
        ++instances;
      }
      // The trained-model decoder has |V| = 6 with pad and bos blocked.
      if (vocab == 6) {
        auto v = seq2seq::Vocabulary::from_tokens({"x", "y"});
        auto model = seq2seq::Seq2SeqModel<double>::initialize(v, v, 3, 4, L);
        model.params().scale(15.0);
        const std::vector<int> src{4, 5, 4};
        auto session = model.start(src);
        auto b = seq2seq::beam_search(session, width, L);
        auto o = oracles::exhaustive_best(session, L);
        worst = std::max(worst, std::abs(b.logprob - o.logprob));
        if (b.tokens != o.tokens || std::abs(b.logprob - o.logprob) > 1e-9) ++bad;
        ++instances;
      }
    }
  }
  return {bad == 0, fmt("%d instances (|V| 2..6, L 1..4), %d mismatches, max score diff %.2g (tol 1e-9)", instances, bad, worst)};
}

Outcome overfit() {
  // Correction direction on 50 micro-language pairs.
  auto corpus = micro::generate({50, 1, 1, 1}, 99);
  seq2seq::TrainConfig cfg;
  cfg.embed_dim = 24;
  cfg.hidden_dim = 48;
  cfg.batch_size = 5;
  cfg.learning_rate = 0.5;
  cfg.max_epochs = 500;
  cfg.patience = 500;
  auto fit = seq2seq::train(corpus.base, corpus.base, seq2seq::Direction::correction, cfg);
  int exact = 0;
  for (const auto& p : corpus.base) exact += seq2seq::greedy(fit.model, p.source, 40) == p.target;
  const double train_acc = exact / 50.0;

  // Copy task: 200 training sequences over 12 symbols, judged on held-out ones.
  std::vector<std::string> symbols;
  for (char c = 'a'; c < 'a' + 12; ++c) symbols.emplace_back(1, c);
  Rng rng(123);
  auto random_seq = [&] {
    Sentence s;
    const std::size_t len = 3 + uniform_index(rng, 5);
    for (std::size_t i = 0; i < len; ++i) s.tokens.push_back(symbols[uniform_index(rng, symbols.size())]);
    return s;
  };
  std::vector<ParallelPair> train, dev, held;
  for (int i = 0; i < 200; ++i) {
    auto s = random_seq();
    train.push_back({s, s, Provenance::real});
  }
  for (int i = 0; i < 50; ++i) {
    auto s = random_seq();
    dev.push_back({s, s, Provenance::real});
  }
  for (int i = 0; i < 200; ++i) {
    auto s = random_seq();
    held.push_back({s, s, Provenance::real});
  }
  seq2seq::TrainConfig copy_cfg;
  copy_cfg.embed_dim = 24;
  copy_cfg.hidden_dim = 48;
  copy_cfg.batch_size = 5;
  copy_cfg.learning_rate = 0.5;
  copy_cfg.max_epochs = 300;
  copy_cfg.patience = 20;
  auto copy = seq2seq::train(train, dev, seq2seq::Direction::correction, copy_cfg);
  int copied = 0;
  for (const auto& p : held) copied += seq2seq::greedy(copy.model, p.source, 40) == p.target;
  const double held_acc = copied / 200.0;
  return {train_acc >= 0.95 && held_acc >= 0.99,
          fmt("50-pair train exact %.1f%% (>=95%%, %zu epochs); copy held-out %.1f%% (>=99%%, %zu epochs)",
              100 * train_acc, fit.history.epochs.size(), 100 * held_acc, copy.history.epochs.size())};
}

Outcome ngram() {
  const std::vector<Sentence> toy{S("a b"), S("a b"), S("a c")};
  auto m = NGramModel::train(toy, 2, 1.0);
  // |V| = {a, b, c, </s>, <unk>} = 5; c(a) = 3.
  const bool toy_ok = m.vocab_size() == 5 && m.prob({"a"}, "b") == 3.0 / 8.0 && m.prob({"a"}, "c") == 2.0 / 8.0 &&
                      m.prob({"a"}, "</s>") == 1.0 / 8.0 && m.prob({"<s>"}, "a") == 4.0 / 8.0 &&
                      m.prob({"b"}, "</s>") == 3.0 / 7.0 && m.prob({"q"}, "a") == 1.0 / 5.0;

  auto corpus = micro::generate({1, 1, 1, 500}, 3).monolingual;
  auto lm = NGramModel::train(corpus, 3, 0.1);
  std::vector<std::string> pool(lm.vocabulary().begin(), lm.vocabulary().end());
  pool.push_back("<s>");
  pool.push_back("never-seen");
  Rng rng(8);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> h;
    const std::size_t len = uniform_index(rng, 3);
    for (std::size_t j = 0; j < len; ++j) h.push_back(pool[uniform_index(rng, pool.size())]);
    double sum = 0.0;
    for (const auto& [w, p] : lm.next_distribution(h)) sum += p;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return {toy_ok && worst <= 1e-9,
          fmt("toy add-1 probabilities %s; max |sum-1| over 100 contexts %.2g (tol 1e-9)", toy_ok ? "exact" : "WRONG", worst)};
}

Outcome rule_aeg() {
  auto clean = micro::generate({1, 1, 1, 1200}, 5).monolingual;
  auto scorer = NGramScorer(NGramModel::train(clean, 3, 0.1));
  const auto sets = Lexicon::defaults().confusion_sets();
  auto g = generate_corpus(clean, sets, scorer, 17);
  std::size_t n = std::min<std::size_t>(1000, g.pairs.size());
  int one_edit = 0, restored = 0, avoided = 0;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < clean.size() && cursor < n; ++i) {
    auto cands = score_candidates(build_candidates(clean[i], sets), scorer);
    if (cands.size() < 2) continue;
    const auto& pair = g.pairs[cursor];
    const auto& edit = g.corrections[cursor];
    // One token-level edit: at most one token replaced by at most one token.
    const auto& src = pair.source.tokens;
    const auto& tgt = pair.target.tokens;
    std::size_t pre = 0;
    while (pre < src.size() && pre < tgt.size() && src[pre] == tgt[pre]) ++pre;
    std::size_t suf = 0;
    while (suf < src.size() - pre && suf < tgt.size() - pre && src[src.size() - 1 - suf] == tgt[tgt.size() - 1 - suf]) ++suf;
    const std::size_t src_span = src.size() - pre - suf, tgt_span = tgt.size() - pre - suf;
    const bool categorized = error_type_label(g.categories[cursor]) == edit.error_type;
    if (pair.source != pair.target && src_span <= 1 && tgt_span <= 1 && categorized) ++one_edit;
    if (apply_edits(pair.source, {edit}) == pair.target) ++restored;
    std::size_t top = 0;
    for (std::size_t c = 1; c < cands.size(); ++c) {
      if (cands[c].lm_logprob > cands[top].lm_logprob) top = c;
    }
    if (cands[top].sentence != pair.source || cands[top].edit != edit) ++avoided;
    ++cursor;
  }
  const int total = static_cast<int>(n);
  return {n == 1000 && one_edit == total && restored == total && avoided == total,
          fmt("%d pairs: %d single categorized edit, %d restored by inverse, %d avoid rank 1", total, one_edit, restored,
              avoided)};
}

ex::ExperimentConfig exp_config() {
  ex::ExperimentConfig cfg;
  cfg.aeg_kind = ex::AegKind::rule;
  cfg.gec.max_epochs = 30;
  cfg.gec.patience = 4;
  cfg.mix_sizes = {0, 1000};
  cfg.seeds = {1, 2, 3};
  cfg.small_base = 200;
  return cfg;
}

ex::ResultTable small_base_table;

Outcome small_base_direction() {
  small_base_table = ex::run_exp_small_base(exp_config());
  auto at0 = small_base_table.median(0), at1000 = small_base_table.median(1000);
  if (!at0 || !at1000) return {false, "missing cells"};
  return {*at1000 > *at0, fmt("median F0.5 size 0: %.4f, size 1000: %.4f (3 seeds, base 200)", *at0, *at1000)};
}

Outcome artificial_only_direction() {
  auto cfg = exp_config();
  cfg.mix_sizes = {1000};
  auto art = ex::run_exp_artificial_only(cfg, {}, &small_base_table);
  auto a = art.median(1000), mixed = small_base_table.median(1000);
  if (!a || !mixed) return {false, "missing cells"};
  return {*a < *mixed, fmt("artificial-only median %.4f vs mixed (200 real + 1000) %.4f", *a, *mixed)};
}

Outcome determinism() {
  const std::string first = ex::to_tsv(small_base_table);
  const std::string second = ex::to_tsv(ex::run_exp_small_base(exp_config()));
  auto cfg = exp_config();
  cfg.micro_sizes = {300, 50, 60, 400};
  cfg.mix_sizes = {0, 200};
  cfg.seeds = {1};
  cfg.gec.max_epochs = cfg.aeg.max_epochs = 8;
  const std::string self1 = ex::to_tsv(ex::run_exp_self_paired(cfg));
  const std::string self2 = ex::to_tsv(ex::run_exp_self_paired(cfg));
  const bool same = first == second && self1 == self2;
  return {same, fmt("small-base rerun %s, self-paired (neural AEG) rerun %s", first == second ? "identical" : "DIFFERS",
                    self1 == self2 ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  run("m2-oracle-equivalence", m2_oracle);
  run("f05-formula", f_formula);
  run("gradient-check", gradient);
  run("beam-exhaustive", beam_exhaustive);
  run("overfit-sanity", overfit);
  run("ngram-normalization", ngram);
  run("rule-aeg-round-trip", rule_aeg);
  run("small-base-direction", small_base_direction);
  run("artificial-only-direction", artificial_only_direction);
  run("determinism", determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
