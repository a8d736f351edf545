// Exhaustive path enumeration over an edit lattice.
#ifndef GECFORGE_TESTS_M2_ORACLE_HPP
#define GECFORGE_TESTS_M2_ORACLE_HPP

#include <functional>
#include <vector>

#include "gecforge/m2_scorer.hpp"

namespace oracles {

/// Edit lists of every start-to-finish path. Stops after `limit` paths and
/// returns false in that case.
inline bool all_paths(const gecforge::m2::EditLattice& lat, std::vector<std::vector<gecforge::m2::SystemEdit>>& out,
                      std::size_t limit = 100000) {
  std::vector<gecforge::m2::SystemEdit> cur;
  bool ok = true;
  std::function<void(int)> rec = [&](int node) {
    if (!ok) return;
    if (node == lat.finish()) {
      if (out.size() >= limit) {
        ok = false;
        return;
      }
      out.push_back(cur);
      return;
    }
    for (int a : lat.out_arcs[static_cast<std::size_t>(node)]) {
      const auto& arc = lat.arcs[static_cast<std::size_t>(a)];
      if (!arc.is_match) cur.push_back(arc.edit);
      rec(arc.to);
      if (!arc.is_match) cur.pop_back();
    }
  };
  rec(lat.start());
  return ok;
}

/// Best path by: most distinct gold edits hit, then fewest edits, then the
/// lexicographically smallest edit list.
inline gecforge::m2::MatchCounts brute_force_max_match(const gecforge::m2::EditLattice& lat,
                                                       const std::vector<gecforge::EditAnnotation>& gold) {
  std::vector<std::vector<gecforge::m2::SystemEdit>> paths;
  all_paths(lat, paths, static_cast<std::size_t>(-1));
  gecforge::m2::MatchCounts best;
  bool have = false;
  for (const auto& p : paths) {
    auto c = gecforge::m2::count_path(p, gold);
    if (!have || c.tp > best.tp || (c.tp == best.tp && p.size() < best.chosen.size()) ||
        (c.tp == best.tp && p.size() == best.chosen.size() && p < best.chosen)) {
      best = c;
      best.chosen = p;
      have = true;
    }
  }
  return best;
}

}  // namespace oracles

#endif
