#include <doctest.h>

#include <algorithm>

#include "gecforge/m2_scorer.hpp"
#include "oracles/m2_instances.hpp"
#include "oracles/m2_oracle.hpp"

using namespace gecforge;
using namespace gecforge::m2;

namespace {
Sentence S(const char* t) { return Sentence::from_text(t); }
EditAnnotation G(int s, int e, std::string r, int ann = 0) { return {s, e, std::move(r), "T", ann}; }
bool has_edit(const EditLattice& l, SystemEdit e) {
  auto all = l.edits();
  return std::find(all.begin(), all.end(), e) != all.end();
}
}  // namespace

TEST_CASE("f_beta formula and conventions") {
  CHECK(f_beta(2, 1, 2, 0.5) == 0.625);
  CHECK(f_beta(0, 0, 0, 0.5) == 1.0);
  CHECK(f_beta(0, 3, 2, 0.5) == 0.0);
  CHECK(f_beta(0, 0, 2, 0.5) == 0.0);
  CHECK(f_beta(3, 0, 0, 1.0) == 1.0);
  CHECK_THROWS_AS(f_beta(-1, 0, 0, 0.5), std::invalid_argument);
}

TEST_CASE("lattice for a single substitution") {
  auto l = extract_edit_lattice(S("a b c"), S("a d c"));
  auto e = l.edits();
  REQUIRE(e.size() == 1);
  CHECK(e[0] == SystemEdit{1, 2, "d"});
}

TEST_CASE("identical sentences give only match arcs") {
  auto l = extract_edit_lattice(S("a b c"), S("a b c"));
  CHECK(l.edits().empty());
  CHECK(std::all_of(l.arcs.begin(), l.arcs.end(), [](const LatticeArc& a) { return a.is_match; }));
}

TEST_CASE("hand-built lattice with merged arcs") {
  auto l = extract_edit_lattice(S("He go to school"), S("He goes to the school"));
  CHECK(has_edit(l, {1, 2, "goes"}));
  CHECK(has_edit(l, {3, 3, "the"}));
  CHECK(has_edit(l, {1, 3, "goes to the"}));
  LatticeOptions narrow;
  narrow.merge_window = 0;
  CHECK_FALSE(has_edit(extract_edit_lattice(S("He go to school"), S("He goes to the school"), narrow), {1, 3, "goes to the"}));
}

TEST_CASE("max_match basics") {
  auto l = extract_edit_lattice(S("He go to school"), S("He goes to school"));
  auto c = max_match(l, {G(1, 2, "goes")});
  CHECK(c.tp == 1);
  CHECK(c.fp == 0);
  CHECK(c.fn == 0);
  auto same = max_match(extract_edit_lattice(S("a b c"), S("a b c")), {G(0, 1, "x"), G(2, 3, "y")});
  CHECK(same.tp == 0);
  CHECK(same.fp == 0);
  CHECK(same.fn == 2);
}

TEST_CASE("max_match prefers a merged gold edit") {
  auto l = extract_edit_lattice(S("He go to school"), S("He goes to the school"));
  auto c = max_match(l, {G(1, 3, "goes to the")});
  CHECK(c.tp == 1);
  CHECK(c.fp == 0);
  auto split = max_match(l, {G(1, 2, "goes"), G(3, 3, "the")});
  CHECK(split.tp == 2);
  CHECK(split.fp == 0);
}

TEST_CASE("whitespace in replacements is normalized") {
  CHECK(matches_gold({0, 1, "a b"}, {G(0, 1, "a  b ")}));
  CHECK_FALSE(matches_gold({0, 1, "A"}, {G(0, 1, "a")}));
}

TEST_CASE("dynamic program equals exhaustive path enumeration") {
  Rng rng(2024);
  int checked = 0;
  while (checked < 150) {
    auto inst = oracles::random_m2_instance(rng);
    auto lat = extract_edit_lattice(inst.source, inst.hypothesis);
    std::vector<std::vector<SystemEdit>> paths;
    if (!oracles::all_paths(lat, paths, 5000)) continue;
    auto dp = max_match(lat, inst.gold);
    auto bf = oracles::brute_force_max_match(lat, inst.gold);
    CHECK(dp.tp == bf.tp);
    CHECK(dp.fp == bf.fp);
    CHECK(dp.fn == bf.fn);
    CHECK(dp.chosen == bf.chosen);
    CHECK(dp.tp + dp.fn == static_cast<int>(inst.gold.size()));
    CHECK(dp.tp <= std::min<int>(static_cast<int>(inst.gold.size()), static_cast<int>(dp.chosen.size())));
    ++checked;
  }
}

TEST_CASE("corpus scoring") {
  std::vector<AnnotatedSentence> gold(2);
  gold[0].source = S("He go to school");
  gold[0].edits[0] = {G(1, 2, "goes")};
  gold[1].source = S("a cat sit");
  gold[1].edits[0] = {G(2, 3, "sits")};

  auto perfect = score_corpus({S("He goes to school"), S("a cat sits")}, gold);
  CHECK(perfect.f_score == 1.0);
  CHECK(perfect.tp == 2);

  auto lazy = score_corpus({gold[0].source, gold[1].source}, gold);
  CHECK(lazy.tp == 0);
  CHECK(lazy.fp == 0);
  CHECK(lazy.fn == 2);
  CHECK(lazy.precision == 1.0);
  CHECK(lazy.recall == 0.0);
  CHECK(lazy.f_score == 0.0);

  CHECK_THROWS_AS(score_corpus({S("x")}, gold), std::invalid_argument);
}

TEST_CASE("annotator with the better sentence F is used") {
  std::vector<AnnotatedSentence> gold(1);
  gold[0].source = S("a b c");
  gold[0].edits[0] = {G(0, 1, "x")};
  gold[0].edits[1] = {G(1, 2, "y")};
  auto r = score_corpus({S("a y c")}, gold);
  CHECK(r.sentences[0].annotator == 1);
  CHECK(r.tp == 1);
  CHECK(r.fp == 0);
  CHECK(r.fn == 0);
  // Ties go to the lower id.
  gold[0].edits[1] = {G(0, 1, "x")};
  CHECK(score_corpus({S("a y c")}, gold).sentences[0].annotator == 0);
}

TEST_CASE("an untouched error-free sentence does not move the score") {
  std::vector<AnnotatedSentence> gold(1);
  gold[0].source = S("He go to school");
  gold[0].edits[0] = {G(1, 2, "goes")};
  const auto base = score_corpus({S("He went to school")}, gold);
  auto more = gold;
  more.push_back({S("all good here"), {{0, {}}}});
  const auto extended = score_corpus({S("He went to school"), S("all good here")}, more);
  CHECK(extended.f_score == base.f_score);
  CHECK(extended.tp == base.tp);
}

TEST_CASE("report renderers") {
  std::vector<AnnotatedSentence> gold(1);
  gold[0].source = S("a b");
  gold[0].edits[0] = {G(1, 2, "c")};
  auto r = score_corpus({S("a c")}, gold);
  CHECK(report_json(r).find("\"tp\": 1") != std::string::npos);
  CHECK(report_table(r).find("F0.5") != std::string::npos);
}
