#include "gecforge/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gecforge/rng.hpp"

namespace gecforge {

namespace {

constexpr std::string_view kSep = "|||";
constexpr std::string_view kNone = "-NONE-";
constexpr std::string_view kNoop = "noop";

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_on(std::string_view text, std::string_view sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = text.find(sep, pos);
    if (hit == std::string_view::npos) {
      parts.push_back(text.substr(pos));
      return parts;
    }
    parts.push_back(text.substr(pos, hit - pos));
    pos = hit + sep.size();
  }
}

bool parse_int(std::string_view text, int& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool edit_order(const EditAnnotation& a, const EditAnnotation& b) {
  return std::tie(a.start, a.end) < std::tie(b.start, b.end);
}

std::string check_edit(const Sentence& s, const EditAnnotation& e) {
  const int n = static_cast<int>(s.size());
  if (e.start < 0 || e.end < e.start || e.end > n) {
    return "edit span [" + std::to_string(e.start) + ", " + std::to_string(e.end) +
           ") out of range for sentence of length " + std::to_string(n);
  }
  if (e.is_insertion() && normalize_space(e.replacement).empty()) {
    return "empty insertion at " + std::to_string(e.start) + " is a no-op";
  }
  return {};
}

// Edits must already be sorted by (start, end).
std::string check_overlaps(const std::vector<EditAnnotation>& sorted) {
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& prev = sorted[i - 1];
    const auto& cur = sorted[i];
    const bool overlap = cur.start < prev.end || (cur.is_insertion() && prev.is_insertion() && cur.start == prev.start);
    if (overlap) {
      return "edits [" + std::to_string(prev.start) + ", " + std::to_string(prev.end) + ") and [" +
             std::to_string(cur.start) + ", " + std::to_string(cur.end) + ") overlap";
    }
  }
  return {};
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::real: return "real";
    case Provenance::rule: return "rule";
    case Provenance::neural: return "neural";
  }
  return "real";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "real") return Provenance::real;
  if (text == "rule") return Provenance::rule;
  if (text == "neural") return Provenance::neural;
  throw std::invalid_argument("unknown provenance '" + std::string(text) + "'");
}

std::vector<AnnotatedSentence> parse_m2(std::string_view text) {
  std::vector<AnnotatedSentence> out;
  bool open = false;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      open = false;
      continue;
    }
    if (line.starts_with("S ") || line == "S") {
      AnnotatedSentence sent;
      sent.source = Sentence::from_text(line.substr(1));
      out.push_back(std::move(sent));
      open = true;
      continue;
    }
    if (!line.starts_with("A ")) throw ParseError(line_no, "expected an 'S' or 'A' line");
    if (!open) throw ParseError(line_no, "annotation line outside a sentence block");

    auto fields = split_on(line.substr(2), kSep);
    if (fields.size() != 6) {
      throw ParseError(line_no, "annotation line has " + std::to_string(fields.size()) + " fields, expected 6");
    }
    auto span = split_whitespace(fields[0]);
    EditAnnotation edit;
    if (span.size() != 2 || !parse_int(span[0], edit.start) || !parse_int(span[1], edit.end)) {
      throw ParseError(line_no, "malformed edit span '" + std::string(fields[0]) + "'");
    }
    if (!parse_int(fields[5], edit.annotator) || edit.annotator < 0) {
      throw ParseError(line_no, "malformed annotator id '" + std::string(fields[5]) + "'");
    }
    edit.error_type = std::string(fields[1]);
    AnnotatedSentence& sent = out.back();
    auto& bucket = sent.edits[edit.annotator];
    if (edit.error_type == kNoop) continue;

    edit.replacement = fields[2] == kNone ? std::string() : normalize_space(fields[2]);
    if (auto msg = check_edit(sent.source, edit); !msg.empty()) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + msg);
    }
    bucket.push_back(std::move(edit));
  }

  for (auto& sent : out) {
    for (auto& [annotator, edits] : sent.edits) {
      std::stable_sort(edits.begin(), edits.end(), edit_order);
      if (auto msg = check_overlaps(edits); !msg.empty()) {
        throw ValidationError("sentence '" + sent.source.str() + "', annotator " + std::to_string(annotator) +
                              ": " + msg);
      }
    }
  }
  return out;
}

std::string serialize_m2(const std::vector<AnnotatedSentence>& sentences) {
  std::ostringstream os;
  for (const auto& sent : sentences) {
    os << "S " << sent.source.str() << '\n';
    for (const auto& [annotator, edits] : sent.edits) {
      if (edits.empty()) {
        os << "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||" << annotator << '\n';
        continue;
      }
      for (const auto& e : edits) {
        os << "A " << e.start << ' ' << e.end << kSep << e.error_type << kSep << e.replacement << kSep
           << "REQUIRED" << kSep << kNone << kSep << annotator << '\n';
      }
    }
    os << '\n';
  }
  return os.str();
}

std::vector<AnnotatedSentence> read_m2_file(const std::string& path) { return parse_m2(read_file(path)); }

void write_m2_file(const std::string& path, const std::vector<AnnotatedSentence>& sentences) {
  write_file(path, serialize_m2(sentences));
}

void validate_edits(const Sentence& s, const std::vector<EditAnnotation>& edits) {
  for (const auto& e : edits) {
    if (auto msg = check_edit(s, e); !msg.empty()) throw ValidationError(msg);
  }
  auto sorted = edits;
  std::stable_sort(sorted.begin(), sorted.end(), edit_order);
  if (auto msg = check_overlaps(sorted); !msg.empty()) throw ValidationError(msg);
}

Sentence apply_edits(const Sentence& s, std::vector<EditAnnotation> edits) {
  validate_edits(s, edits);
  std::stable_sort(edits.begin(), edits.end(), edit_order);
  std::vector<std::string> tokens = s.tokens;
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    auto first = tokens.begin() + it->start;
    first = tokens.erase(first, tokens.begin() + it->end);
    auto repl = split_whitespace(it->replacement);
    tokens.insert(first, repl.begin(), repl.end());
  }
  return Sentence(std::move(tokens));
}

std::vector<ParallelPair> build_pairs(const std::vector<AnnotatedSentence>& corpus, int annotator) {
  std::vector<ParallelPair> out;
  out.reserve(corpus.size());
  for (const auto& sent : corpus) {
    ParallelPair pair{sent.source, sent.source, Provenance::real};
    if (!sent.edits.empty()) {
      auto it = sent.edits.find(annotator);
      if (it == sent.edits.end()) it = sent.edits.begin();
      pair.target = apply_edits(sent.source, it->second);
    }
    if (pair.source.empty() || pair.target.empty()) continue;
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<ParallelPair> filter_error_free(const std::vector<ParallelPair>& pairs) {
  std::vector<ParallelPair> out;
  std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(out),
               [](const ParallelPair& p) { return p.source != p.target; });
  return out;
}

std::vector<ParallelPair> mix_datasets(const DatasetMix& mix) {
  if (mix.k > mix.artificial_pool.size()) {
    throw std::invalid_argument("requested " + std::to_string(mix.k) + " artificial pairs but the pool holds " +
                                std::to_string(mix.artificial_pool.size()));
  }
  Rng rng(mix.seed);
  std::vector<std::size_t> order(mix.artificial_pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  partial_shuffle(std::span<std::size_t>(order), mix.k, rng);

  std::vector<ParallelPair> out = mix.base;
  out.reserve(mix.base.size() + mix.k);
  for (std::size_t i = 0; i < mix.k; ++i) out.push_back(mix.artificial_pool[order[i]]);
  shuffle(std::span<ParallelPair>(out), rng);
  return out;
}

std::vector<ParallelPair> parse_tsv(std::string_view text) {
  std::vector<ParallelPair> out;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_on(line, "\t");
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    ParallelPair pair;
    pair.source = Sentence::from_text(fields[0]);
    pair.target = Sentence::from_text(fields[1]);
    try {
      pair.provenance = parse_provenance(fields[2]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    if (pair.source.empty() || pair.target.empty()) throw ParseError(line_no, "empty side in parallel pair");
    out.push_back(std::move(pair));
  }
  return out;
}

std::string serialize_tsv(const std::vector<ParallelPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += p.source.str();
    out += '\t';
    out += p.target.str();
    out += '\t';
    out += to_string(p.provenance);
    out += '\n';
  }
  return out;
}

std::vector<ParallelPair> read_tsv_file(const std::string& path) { return parse_tsv(read_file(path)); }

void write_tsv_file(const std::string& path, const std::vector<ParallelPair>& pairs) {
  write_file(path, serialize_tsv(pairs));
}

std::vector<Sentence> parse_sentences(std::string_view text) {
  std::vector<Sentence> out;
  for (std::string_view line : split_lines(text)) {
    Sentence s = Sentence::from_text(line);
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sentence> read_sentence_file(const std::string& path) { return parse_sentences(read_file(path)); }

void write_sentence_file(const std::string& path, const std::vector<Sentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    out += s.str();
    out += '\n';
  }
  write_file(path, out);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace gecforge
