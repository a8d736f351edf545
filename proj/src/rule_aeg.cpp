#include "gecforge/rule_aeg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "gecforge/rng.hpp"

namespace gecforge {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_alpha_word(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
}

bool starts_upper(std::string_view s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s.front())); }

// Carries the capitalization of `like` over to `word`.
std::string match_case(std::string word, std::string_view like) {
  if (starts_upper(like) && !word.empty()) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  return word;
}

bool ends_with(std::string_view s, std::string_view suffix) { return s.size() >= suffix.size() && s.ends_with(suffix); }

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

const std::set<std::string>& closed_class() {
  static const std::set<std::string> words = {
      "the", "a", "an", "this", "that", "these", "those", "some", "any", "no", "every", "each", "my", "your",
      "his", "her", "its", "our", "their", "i", "you", "he", "she", "it", "we", "they", "me", "him", "us",
      "them", "and", "or", "but", "if", "not", "so", "as", "than", "then", "there", "here", "very", "too",
      "also", "on", "in", "at", "for", "to", "of", "with", "by", "about", "from", "into", "onto", "over",
      "under", "up", "down", "out", "off", "through", "during", "before", "after", "between", "against",
      "among", "will", "would", "can", "could", "shall", "should", "may", "might", "must", "yes", "always",
      "never", "often", "this", "thus", "less", "unless", "across", "because", "whether", "what", "who",
      "which", "where", "when", "why", "how", "all", "both", "many", "much", "few", "one", "two", "three"};
  return words;
}

// Irregular inflection families; any member maps to the rest.
const std::map<std::string, const std::vector<std::string>*>& irregular_families() {
  static const std::vector<std::vector<std::string>> families = {
      {"is", "are"},
      {"was", "were"},
      {"has", "have", "had", "having"},
      {"does", "do", "did", "doing", "done"},
      {"man", "men"},
      {"woman", "women"},
      {"child", "children"},
      {"person", "people"},
      {"foot", "feet"},
      {"tooth", "teeth"},
      {"mouse", "mice"},
      {"go", "goes", "went", "going", "gone"},
      {"come", "comes", "came", "coming"},
      {"take", "takes", "took", "taking", "taken"},
      {"make", "makes", "made", "making"},
      {"see", "sees", "saw", "seeing", "seen"},
      {"give", "gives", "gave", "giving", "given"},
      {"eat", "eats", "ate", "eating", "eaten"},
      {"run", "runs", "ran", "running"},
      {"sit", "sits", "sat", "sitting"},
      {"write", "writes", "wrote", "writing", "written"},
      {"get", "gets", "got", "getting", "gotten"},
      {"buy", "buys", "bought", "buying"},
      {"bring", "brings", "brought", "bringing"},
      {"think", "thinks", "thought", "thinking"},
      {"teach", "teaches", "taught", "teaching"},
      {"find", "finds", "found", "finding"},
      {"know", "knows", "knew", "knowing", "known"},
      {"like", "likes", "liked", "liking"},
      {"live", "lives", "lived", "living"},
      {"use", "uses", "used", "using"},
      {"move", "moves", "moved", "moving"},
  };
  static const auto index = [] {
    std::map<std::string, const std::vector<std::string>*> m;
    for (const auto& fam : families) {
      for (const auto& w : fam) m.emplace(w, &fam);
    }
    return m;
  }();
  return index;
}

// Plural noun / third-person singular.
std::string add_s(const std::string& stem) {
  if (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") || ends_with(stem, "ch") ||
      ends_with(stem, "sh")) {
    return stem + "es";
  }
  if (stem.size() >= 2 && stem.back() == 'y' && !is_vowel(stem[stem.size() - 2])) {
    return stem.substr(0, stem.size() - 1) + "ies";
  }
  return stem + "s";
}

std::string add_ed(const std::string& stem) {
  if (ends_with(stem, "e")) return stem + "d";
  if (stem.size() >= 2 && stem.back() == 'y' && !is_vowel(stem[stem.size() - 2])) {
    return stem.substr(0, stem.size() - 1) + "ied";
  }
  return stem + "ed";
}

std::string add_ing(const std::string& stem) {
  if (ends_with(stem, "e") && !ends_with(stem, "ee")) return stem.substr(0, stem.size() - 1) + "ing";
  return stem + "ing";
}

// stopp -> stop, plann -> plan; other doubled letters (add, call) stay.
std::string undouble(std::string stem) {
  if (stem.size() >= 4) {
    const char last = stem.back();
    if (last == stem[stem.size() - 2] && std::string_view("bgmnpt").find(last) != std::string_view::npos) {
      stem.pop_back();
    }
  }
  return stem;
}

std::set<std::string> lowered_variants(const std::string& w) {
  if (w.size() < 2 || !is_alpha_word(w) || closed_class().contains(w)) return {};
  if (auto it = irregular_families().find(w); it != irregular_families().end()) {
    return {it->second->begin(), it->second->end()};
  }
  if (ends_with(w, "ing") && w.size() >= 6) {
    std::string stem = undouble(w.substr(0, w.size() - 3));
    return {stem, add_s(stem), add_ed(stem)};
  }
  if (ends_with(w, "ed") && w.size() >= 5) {
    std::string stem = undouble(w.substr(0, w.size() - 2));
    return {stem, add_s(stem), add_ing(stem)};
  }
  if (ends_with(w, "ies") && w.size() >= 5) return {w.substr(0, w.size() - 3) + "y"};
  if (ends_with(w, "es") && w.size() >= 5) {
    std::string stem = w.substr(0, w.size() - 2);
    if (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") || ends_with(stem, "ch") ||
        ends_with(stem, "sh")) {
      return {stem};
    }
  }
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") && w.size() >= 3) {
    return {w.substr(0, w.size() - 1)};
  }
  return {add_s(w)};
}

ErrorCandidate make_candidate(const Sentence& s, ErrorCategory cat, std::size_t pos, std::optional<std::string> replace_with) {
  ErrorCandidate c;
  c.category = cat;
  c.sentence = s;
  const int i = static_cast<int>(pos);
  if (replace_with) {
    c.sentence.tokens[pos] = *replace_with;
    c.edit = EditAnnotation{i, i + 1, s.tokens[pos], std::string(error_type_label(cat)), 0};
  } else {
    c.sentence.tokens.erase(c.sentence.tokens.begin() + i);
    c.edit = EditAnnotation{i, i, s.tokens[pos], std::string(error_type_label(cat)), 0};
  }
  return c;
}

}  // namespace

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::preposition: return "preposition";
    case ErrorCategory::determiner: return "determiner";
    case ErrorCategory::morphology: return "morphology";
  }
  return "preposition";
}

std::string_view error_type_label(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::preposition: return "Prep";
    case ErrorCategory::determiner: return "ArtOrDet";
    case ErrorCategory::morphology: return "Morph";
  }
  return "Prep";
}

bool ConfusionSet::contains(std::string_view lowered) const {
  return !lowered.empty() && std::find(members.begin(), members.end(), lowered) != members.end();
}

Lexicon Lexicon::defaults() {
  Lexicon lex;
  lex.prepositions.members = {"on", "in", "at", "for", "to", "of", "with", "by", "about", "from", ""};
  lex.determiners.members = {"the", "a", "an", ""};
  return lex;
}

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  ConfusionSet* current = nullptr;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = normalize_space(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line == "[preposition]") {
      current = &lex.prepositions;
    } else if (line == "[determiner]") {
      current = &lex.determiners;
    } else if (line.front() == '[') {
      throw ParseError(line_no, "unknown lexicon section " + line);
    } else if (current == nullptr) {
      throw ParseError(line_no, "lexicon member outside a section");
    } else if (line.find(' ') != std::string::npos) {
      throw ParseError(line_no, "lexicon member must be a single token");
    } else {
      std::string member = line == "<eps>" ? std::string() : lower(line);
      if (std::find(current->members.begin(), current->members.end(), member) == current->members.end()) {
        current->members.push_back(std::move(member));
      }
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& path) { return parse(read_file(path)); }

std::vector<ConfusionSet> Lexicon::confusion_sets(bool with_morphology) const {
  std::vector<ConfusionSet> sets{prepositions, determiners};
  if (with_morphology) sets.push_back(ConfusionSet{ErrorCategory::morphology, {}});
  return sets;
}

std::set<std::string> morph_variants(std::string_view token) {
  const std::string w = lower(token);
  std::set<std::string> out;
  for (const auto& v : lowered_variants(w)) {
    if (v != w) out.insert(match_case(v, token));
  }
  return out;
}

std::vector<ErrorCandidate> build_candidates(const Sentence& s, const std::vector<ConfusionSet>& sets,
                                             const CandidateOptions& options) {
  std::vector<ErrorCandidate> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::string& tok = s.tokens[i];
    const std::string low = lower(tok);
    for (const auto& set : sets) {
      if (set.category == ErrorCategory::morphology) {
        for (const auto& v : morph_variants(tok)) out.push_back(make_candidate(s, set.category, i, v));
        continue;
      }
      if (!set.contains(low)) continue;
      for (const auto& m : set.members) {
        if (m == low) continue;
        if (m.empty()) {
          if (s.size() > 1) out.push_back(make_candidate(s, set.category, i, std::nullopt));
        } else {
          out.push_back(make_candidate(s, set.category, i, match_case(m, tok)));
        }
      }
    }
  }
  if (options.allow_insertions) {
    for (std::size_t gap = 0; gap <= s.size(); ++gap) {
      for (const auto& set : sets) {
        if (set.category == ErrorCategory::morphology) continue;
        for (const auto& m : set.members) {
          if (m.empty()) continue;
          ErrorCandidate c;
          c.category = set.category;
          c.sentence = s;
          c.sentence.tokens.insert(c.sentence.tokens.begin() + static_cast<std::ptrdiff_t>(gap),
                                   gap == 0 ? match_case(m, s.empty() ? std::string_view() : s.tokens[0]) : m);
          const int g = static_cast<int>(gap);
          c.edit = EditAnnotation{g, g + 1, "", std::string(error_type_label(set.category)), 0};
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

std::vector<ErrorCandidate> score_candidates(std::vector<ErrorCandidate> cands, LmScorer& scorer) {
  if (cands.empty()) return cands;
  std::vector<Sentence> batch;
  batch.reserve(cands.size());
  for (const auto& c : cands) batch.push_back(c.sentence);

  std::vector<double> scores;
  try {
    scores = scorer.score_batch(batch);
  } catch (const std::exception& batch_error) {
    // Locate the first candidate the scorer rejects on its own.
    for (std::size_t i = 0; i < batch.size(); ++i) {
      try {
        scorer.score(batch[i]);
      } catch (const std::exception& e) {
        throw CandidateScoringError(i, e.what());
      }
    }
    throw CandidateScoringError(0, batch_error.what());
  }
  if (scores.size() != cands.size()) throw CandidateScoringError(scores.size(), "scorer returned too few scores");
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!std::isfinite(scores[i])) throw CandidateScoringError(i, "non-finite log-probability");
    cands[i].lm_logprob = scores[i];
  }
  return cands;
}

std::optional<std::size_t> select_errorful_index(const std::vector<ErrorCandidate>& cands, std::uint64_t seed,
                                                 std::size_t top_m) {
  if (cands.size() < 2) return std::nullopt;
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cands[a].lm_logprob > cands[b].lm_logprob; });
  const std::size_t window = std::min(std::max<std::size_t>(top_m, 1), cands.size() - 1);
  Rng rng(seed);
  return order[1 + uniform_index(rng, window)];
}

std::optional<ErrorCandidate> select_errorful(const std::vector<ErrorCandidate>& cands, std::uint64_t seed,
                                              std::size_t top_m) {
  auto idx = select_errorful_index(cands, seed, top_m);
  if (!idx) return std::nullopt;
  return cands[*idx];
}

GeneratedCorpus generate_corpus(const std::vector<Sentence>& clean, const std::vector<ConfusionSet>& sets,
                                LmScorer& scorer, std::uint64_t seed, const RuleAegOptions& options) {
  GeneratedCorpus out;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    auto cands = build_candidates(clean[i], sets, options.candidates);
    if (cands.size() < 2) {
      ++out.skipped;
      continue;
    }
    try {
      cands = score_candidates(std::move(cands), scorer);
    } catch (const std::exception& e) {
      throw GenerationAborted(i, std::move(out), e.what());
    }
    auto chosen = select_errorful(cands, derive_seed(seed, i), options.top_m);
    out.pairs.push_back(ParallelPair{std::move(chosen->sentence), clean[i], Provenance::rule});
    out.categories.push_back(chosen->category);
    out.corrections.push_back(std::move(chosen->edit));
  }
  return out;
}

}  // namespace gecforge
