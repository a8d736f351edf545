// Random (source, hypothesis, gold) instances for scorer oracle checks.
#ifndef GECFORGE_TESTS_M2_INSTANCES_HPP
#define GECFORGE_TESTS_M2_INSTANCES_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "gecforge/m2_scorer.hpp"
#include "gecforge/rng.hpp"

namespace oracles {

struct M2Instance {
  gecforge::Sentence source;
  gecforge::Sentence hypothesis;
  std::vector<gecforge::EditAnnotation> gold;
};

/// Source of 1..8 tokens, hypothesis 1..4 random token operations away,
/// gold a non-overlapping mix of lattice edits and random edits.
inline M2Instance random_m2_instance(gecforge::Rng& rng) {
  using gecforge::uniform_index;
  static const std::vector<std::string> words{"a", "b", "c", "d", "the", "of"};
  auto word = [&] { return words[uniform_index(rng, words.size())]; };

  M2Instance inst;
  const std::size_t len = 1 + uniform_index(rng, 8);
  for (std::size_t i = 0; i < len; ++i) inst.source.tokens.push_back(word());
  auto hyp = inst.source.tokens;
  const std::size_t ops = 1 + uniform_index(rng, 4);
  for (std::size_t k = 0; k < ops; ++k) {
    const auto op = uniform_index(rng, 3);
    if (op == 0 || hyp.empty()) {
      hyp.insert(hyp.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, hyp.size() + 1)), word());
    } else if (op == 1) {
      hyp[uniform_index(rng, hyp.size())] = word();
    } else if (hyp.size() > 1) {
      hyp.erase(hyp.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, hyp.size())));
    }
  }
  inst.hypothesis = gecforge::Sentence(hyp);

  std::vector<gecforge::EditAnnotation> pool;
  const auto lat = gecforge::m2::extract_edit_lattice(inst.source, inst.hypothesis);
  for (const auto& e : lat.edits()) {
    if (uniform_index(rng, 2)) pool.push_back({e.start, e.end, e.replacement, "T", 0});
  }
  const std::size_t extra = uniform_index(rng, 3);
  const int n = static_cast<int>(len);
  for (std::size_t k = 0; k < extra; ++k) {
    const int s = static_cast<int>(uniform_index(rng, len + 1));
    const int e = std::min(n, s + static_cast<int>(uniform_index(rng, 2)));
    std::string repl = uniform_index(rng, 3) ? word() : "";
    if (s == e && repl.empty()) repl = word();
    pool.push_back({s, e, repl, "T", 0});
  }
  gecforge::partial_shuffle(std::span<gecforge::EditAnnotation>(pool), pool.size(), rng);
  for (const auto& cand : pool) {
    bool clash = false;
    for (const auto& g : inst.gold) {
      const bool same_insert = cand.start == cand.end && g.start == g.end && cand.start == g.start;
      if (same_insert || (cand.start < g.end && g.start < cand.end) || (cand == g)) clash = true;
      // An insertion strictly inside a replaced span overlaps it too.
      if (cand.start == cand.end && g.start < cand.start && cand.start < g.end) clash = true;
      if (g.start == g.end && cand.start < g.start && g.start < cand.end) clash = true;
    }
    if (!clash) inst.gold.push_back(cand);
  }
  std::sort(inst.gold.begin(), inst.gold.end(),
            [](const auto& a, const auto& b) { return std::tie(a.start, a.end) < std::tie(b.start, b.end); });
  return inst;
}

}  // namespace oracles

#endif
