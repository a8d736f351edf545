#include "gecforge/micro_lang.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

namespace gecforge::micro {

namespace {

const std::vector<std::string> kNames = {"john", "mary", "tom", "anna"};
const std::vector<std::string> kAnimates = {"cat", "dog", "girl", "boy", "teacher", "student", "bird", "friend"};
const std::vector<std::string> kPlaces = {"park", "school", "house", "garden", "table", "chair", "river", "city"};
const std::vector<std::string> kAdjectives = {"big", "small", "tall", "young", "happy"};

enum class ObjectKind { place, animate, any };

struct VerbFrame {
  std::string base;
  std::string prep;  // empty for transitive verbs
  ObjectKind object;
  std::vector<std::string> places;  // allowed places when object == place
};

const std::vector<VerbFrame>& frames() {
  static const std::vector<VerbFrame> f = {
      {"walk", "to", ObjectKind::place, {"park", "school", "house", "garden", "city", "river"}},
      {"sit", "on", ObjectKind::place, {"table", "chair"}},
      {"live", "in", ObjectKind::place, {"house", "city"}},
      {"come", "from", ObjectKind::place, {"school", "park", "city", "house"}},
      {"look", "at", ObjectKind::any, {}},
      {"wait", "for", ObjectKind::animate, {}},
      {"talk", "with", ObjectKind::animate, {}},
      {"think", "about", ObjectKind::any, {}},
      {"like", "", ObjectKind::animate, {}},
      {"help", "", ObjectKind::animate, {}},
      {"call", "", ObjectKind::animate, {}},
  };
  return f;
}

const std::map<std::string, std::vector<std::string>>& prep_confusions() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"to", {"at", "in", "for"}},   {"on", {"in", "at"}},     {"in", {"at", "on"}},    {"at", {"to", "in"}},
      {"for", {"to", "about"}},      {"with", {"to", "for"}},  {"from", {"to", "of"}},  {"about", {"of", "for"}},
  };
  return m;
}

const std::string& pick(const std::vector<std::string>& v, Rng& rng) { return v[uniform_index(rng, v.size())]; }

bool chance(Rng& rng, double p) { return uniform_unit(rng) < p; }

std::string third_person(const std::string& base) { return base + "s"; }
std::string plural(const std::string& noun) { return noun + "s"; }

struct Lexical {
  std::set<std::string> verbs_base, verbs_3sg, nouns_sg, nouns_pl, names;
};

const Lexical& lexical() {
  static const Lexical lx = [] {
    Lexical l;
    for (const auto& fr : frames()) {
      l.verbs_base.insert(fr.base);
      l.verbs_3sg.insert(third_person(fr.base));
    }
    for (const auto& vec : {kAnimates, kPlaces}) {
      for (const auto& n : vec) {
        l.nouns_sg.insert(n);
        l.nouns_pl.insert(plural(n));
      }
    }
    l.names.insert(kNames.begin(), kNames.end());
    return l;
  }();
  return lx;
}

void push_adjective(std::vector<std::string>& out, Rng& rng) {
  if (chance(rng, 0.25)) out.push_back(pick(kAdjectives, rng));
}

// Returns true when the noun phrase is singular.
bool animate_np(std::vector<std::string>& out, Rng& rng) {
  const double u = uniform_unit(rng);
  if (u < 0.3) {
    out.push_back(pick(kNames, rng));
    return true;
  }
  if (u < 0.55) {
    out.emplace_back("the");
    push_adjective(out, rng);
    out.push_back(pick(kAnimates, rng));
    return true;
  }
  if (u < 0.7) {
    out.emplace_back("a");
    push_adjective(out, rng);
    out.push_back(pick(kAnimates, rng));
    return true;
  }
  out.emplace_back("the");
  push_adjective(out, rng);
  out.push_back(plural(pick(kAnimates, rng)));
  return false;
}

void place_np(std::vector<std::string>& out, const std::vector<std::string>& allowed, Rng& rng) {
  out.emplace_back("the");
  push_adjective(out, rng);
  out.push_back(pick(allowed, rng));
}

enum class SiteKind { det, prep, verb, noun, name };

struct Site {
  std::size_t index;
  SiteKind kind;
};

double site_weight(SiteKind k) {
  switch (k) {
    case SiteKind::det: return 3.0;
    case SiteKind::prep: return 3.0;
    case SiteKind::verb: return 2.0;
    case SiteKind::noun: return 1.0;
    case SiteKind::name: return 1.0;
  }
  return 1.0;
}

std::size_t weighted_pick(const std::vector<Site>& sites, Rng& rng) {
  double total = 0.0;
  for (const auto& s : sites) total += site_weight(s.kind);
  double u = uniform_unit(rng) * total;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    u -= site_weight(sites[i].kind);
    if (u < 0.0) return i;
  }
  return sites.size() - 1;
}

struct Op {
  enum Kind { substitute, remove, insert_before } kind = substitute;
  std::string token;  // substitute: new token; insert_before: inserted token
  const char* type = "";
};

Op plan_error(const std::string& tok, SiteKind kind, Rng& rng) {
  const auto& lx = lexical();
  switch (kind) {
    case SiteKind::det:
      if (chance(rng, 0.4)) return {Op::remove, "", "ArtOrDet"};
      return {Op::substitute, tok == "the" ? "a" : "the", "ArtOrDet"};
    case SiteKind::prep:
      if (chance(rng, 0.2)) return {Op::remove, "", "Prep"};
      return {Op::substitute, pick(prep_confusions().at(tok), rng), "Prep"};
    case SiteKind::verb:
      if (lx.verbs_3sg.contains(tok)) return {Op::substitute, tok.substr(0, tok.size() - 1), "SVA"};
      return {Op::substitute, third_person(tok), "SVA"};
    case SiteKind::noun:
      if (lx.nouns_pl.contains(tok)) return {Op::substitute, tok.substr(0, tok.size() - 1), "Nn"};
      return {Op::substitute, plural(tok), "Nn"};
    case SiteKind::name:
      return {Op::insert_before, "the", "ArtOrDet"};
  }
  return {};
}

}  // namespace

std::vector<std::string> vocabulary() {
  std::set<std::string> v = {"the", "a", ".", "today"};
  const auto& lx = lexical();
  for (const auto* s : {&lx.verbs_base, &lx.verbs_3sg, &lx.nouns_sg, &lx.nouns_pl, &lx.names}) v.insert(s->begin(), s->end());
  v.insert(kAdjectives.begin(), kAdjectives.end());
  for (const auto& fr : frames()) {
    if (!fr.prep.empty()) v.insert(fr.prep);
  }
  return {v.begin(), v.end()};
}

Sentence sample_sentence(Rng& rng) {
  std::vector<std::string> toks;
  const bool singular = animate_np(toks, rng);
  const auto& fr = frames()[uniform_index(rng, frames().size())];
  toks.push_back(singular ? third_person(fr.base) : fr.base);
  if (!fr.prep.empty()) toks.push_back(fr.prep);
  switch (fr.object) {
    case ObjectKind::place:
      place_np(toks, fr.places, rng);
      break;
    case ObjectKind::animate:
      animate_np(toks, rng);
      break;
    case ObjectKind::any:
      if (chance(rng, 0.5)) {
        place_np(toks, kPlaces, rng);
      } else {
        animate_np(toks, rng);
      }
      break;
  }
  if (chance(rng, 0.15)) toks.emplace_back("today");
  toks.emplace_back(".");
  return Sentence(std::move(toks));
}

LearnerSentence corrupt(const Sentence& clean, Rng& rng) {
  const auto& lx = lexical();
  std::vector<Site> sites;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const auto& t = clean.tokens[i];
    if (t == "the" || t == "a") sites.push_back({i, SiteKind::det});
    else if (prep_confusions().contains(t)) sites.push_back({i, SiteKind::prep});
    else if (lx.verbs_base.contains(t) || lx.verbs_3sg.contains(t)) sites.push_back({i, SiteKind::verb});
    else if (lx.nouns_sg.contains(t) || lx.nouns_pl.contains(t)) sites.push_back({i, SiteKind::noun});
    else if (lx.names.contains(t)) sites.push_back({i, SiteKind::name});
  }

  std::map<std::size_t, Op> ops;
  if (!sites.empty()) {
    const Site first = sites[weighted_pick(sites, rng)];
    ops.emplace(first.index, plan_error(clean.tokens[first.index], first.kind, rng));
    if (chance(rng, 0.4)) {
      std::vector<Site> rest;
      for (const auto& s : sites) {
        const auto gap = s.index > first.index ? s.index - first.index : first.index - s.index;
        if (gap >= 2) rest.push_back(s);
      }
      if (!rest.empty()) {
        const Site second = rest[weighted_pick(rest, rng)];
        ops.emplace(second.index, plan_error(clean.tokens[second.index], second.kind, rng));
      }
    }
  }

  LearnerSentence out;
  out.clean = clean;
  auto& edits = out.errorful.edits[0];
  std::vector<std::string> errorful;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const auto& tok = clean.tokens[i];
    const int p = static_cast<int>(errorful.size());
    auto it = ops.find(i);
    if (it == ops.end()) {
      errorful.push_back(tok);
      continue;
    }
    const Op& op = it->second;
    switch (op.kind) {
      case Op::substitute:
        edits.push_back(EditAnnotation{p, p + 1, tok, op.type, 0});
        errorful.push_back(op.token);
        break;
      case Op::remove:
        edits.push_back(EditAnnotation{p, p, tok, op.type, 0});
        break;
      case Op::insert_before:
        edits.push_back(EditAnnotation{p, p + 1, "", op.type, 0});
        errorful.push_back(op.token);
        errorful.push_back(tok);
        break;
    }
  }
  out.errorful.source = Sentence(std::move(errorful));
  return out;
}

MicroCorpus generate(const MicroCorpusSizes& sizes, std::uint64_t seed) {
  MicroCorpus corpus;
  auto learner_pairs = [&](std::size_t n, std::uint64_t stream) {
    Rng rng(derive_seed(seed, stream));
    std::vector<LearnerSentence> out;
    while (out.size() < n) {
      auto ls = corrupt(sample_sentence(rng), rng);
      if (ls.errorful.source != ls.clean) out.push_back(std::move(ls));
    }
    return out;
  };
  for (auto& ls : learner_pairs(sizes.base, 1)) {
    corpus.base.push_back(ParallelPair{ls.errorful.source, ls.clean, Provenance::real});
  }
  for (auto& ls : learner_pairs(sizes.dev, 2)) {
    corpus.dev.push_back(ParallelPair{ls.errorful.source, ls.clean, Provenance::real});
  }
  for (auto& ls : learner_pairs(sizes.test, 3)) corpus.test.push_back(std::move(ls.errorful));
  Rng mono(derive_seed(seed, 4));
  corpus.monolingual.reserve(sizes.monolingual);
  for (std::size_t i = 0; i < sizes.monolingual; ++i) corpus.monolingual.push_back(sample_sentence(mono));
  return corpus;
}

void emit(const MicroCorpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_tsv_file((fs::path(dir) / "base.tsv").string(), corpus.base);
  write_tsv_file((fs::path(dir) / "dev.tsv").string(), corpus.dev);
  write_m2_file((fs::path(dir) / "test.m2").string(), corpus.test);
  write_sentence_file((fs::path(dir) / "monolingual.txt").string(), corpus.monolingual);
}

}  // namespace gecforge::micro
