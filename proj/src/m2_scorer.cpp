#include "gecforge/m2_scorer.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gecforge::m2 {

namespace {

std::string join(const std::vector<std::string>& toks, int from, int to) {
  std::string out;
  for (int k = from; k < to; ++k) {
    if (k > from) out.push_back(' ');
    out += toks[static_cast<std::size_t>(k)];
  }
  return out;
}

struct PathLabel {
  bool reached = false;
  int tp = 0;
  std::vector<SystemEdit> edits;
};

bool label_better(int tp_a, const std::vector<SystemEdit>& a, int tp_b, const std::vector<SystemEdit>& b) {
  if (tp_a != tp_b) return tp_a > tp_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

std::vector<SystemEdit> EditLattice::edits() const {
  std::set<SystemEdit> seen;
  for (const auto& a : arcs) {
    if (!a.is_match) seen.insert(a.edit);
  }
  return {seen.begin(), seen.end()};
}

EditLattice extract_edit_lattice(const Sentence& source, const Sentence& hypothesis, const LatticeOptions& options) {
  const auto& src = source.tokens;
  const auto& hyp = hypothesis.tokens;
  const int n = static_cast<int>(src.size());
  const int m = static_cast<int>(hyp.size());
  const int W = m + 1;
  auto at = [W](int i, int j) { return static_cast<std::size_t>(i * W + j); };
  auto diag_cost = [&](int i, int j) { return src[static_cast<std::size_t>(i)] == hyp[static_cast<std::size_t>(j)] ? 0 : 1; };

  // Forward and backward edit distances; an arc is on some optimal
  // alignment iff fwd[u] + cost + bwd[v] equals the total distance.
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  std::vector<int> fwd(static_cast<std::size_t>((n + 1) * W), kInf);
  std::vector<int> bwd(fwd.size(), kInf);
  fwd[at(0, 0)] = 0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= m; ++j) {
      int& f = fwd[at(i, j)];
      if (i > 0) f = std::min(f, fwd[at(i - 1, j)] + 1);
      if (j > 0) f = std::min(f, fwd[at(i, j - 1)] + 1);
      if (i > 0 && j > 0) f = std::min(f, fwd[at(i - 1, j - 1)] + diag_cost(i - 1, j - 1));
    }
  }
  bwd[at(n, m)] = 0;
  for (int i = n; i >= 0; --i) {
    for (int j = m; j >= 0; --j) {
      int& b = bwd[at(i, j)];
      if (i < n) b = std::min(b, bwd[at(i + 1, j)] + 1);
      if (j < m) b = std::min(b, bwd[at(i, j + 1)] + 1);
      if (i < n && j < m) b = std::min(b, bwd[at(i + 1, j + 1)] + diag_cost(i, j));
    }
  }
  const int total = fwd[at(n, m)];

  EditLattice lat;
  std::map<LatticeNode, int> node_index;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= m; ++j) {
      if (fwd[at(i, j)] + bwd[at(i, j)] == total) {
        node_index.emplace(LatticeNode{i, j}, 0);
      }
    }
  }
  for (auto& [node, idx] : node_index) {
    idx = static_cast<int>(lat.nodes.size());
    lat.nodes.push_back(node);
  }
  lat.out_arcs.resize(lat.nodes.size());

  std::set<std::pair<int, int>> linked;
  auto add_arc = [&](const LatticeNode& u, const LatticeNode& v, bool is_match) {
    const int a = node_index.at(u);
    const int b = node_index.at(v);
    if (!linked.insert({a, b}).second) return;
    LatticeArc arc{a, b, is_match, SystemEdit{u.src, v.src, join(hyp, u.hyp, v.hyp)}};
    lat.out_arcs[static_cast<std::size_t>(a)].push_back(static_cast<int>(lat.arcs.size()));
    lat.arcs.push_back(std::move(arc));
  };

  for (const auto& u : lat.nodes) {
    const int base = fwd[at(u.src, u.hyp)];
    if (u.src < n && u.hyp < m) {
      const int c = diag_cost(u.src, u.hyp);
      if (base + c + bwd[at(u.src + 1, u.hyp + 1)] == total) add_arc(u, {u.src + 1, u.hyp + 1}, c == 0);
    }
    if (u.src < n && base + 1 + bwd[at(u.src + 1, u.hyp)] == total) add_arc(u, {u.src + 1, u.hyp}, false);
    if (u.hyp < m && base + 1 + bwd[at(u.src, u.hyp + 1)] == total) add_arc(u, {u.src, u.hyp + 1}, false);
  }

  // Merged arcs: any path of two or more base arcs that starts and ends
  // with an edit and passes through at most merge_window matches.
  const std::size_t base_arcs = lat.arcs.size();
  std::vector<std::vector<int>> base_out = lat.out_arcs;
  std::vector<std::pair<int, int>> merged;
  for (std::size_t a0 = 0; a0 < base_arcs; ++a0) {
    if (lat.arcs[a0].is_match) continue;
    struct Frame {
      int node;
      int matches;
    };
    std::vector<Frame> stack{{lat.arcs[a0].to, 0}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      for (int ai : base_out[static_cast<std::size_t>(f.node)]) {
        const auto& arc = lat.arcs[static_cast<std::size_t>(ai)];
        if (arc.is_match) {
          if (f.matches < options.merge_window) stack.push_back({arc.to, f.matches + 1});
        } else {
          merged.emplace_back(lat.arcs[a0].from, arc.to);
          stack.push_back({arc.to, f.matches});
        }
      }
    }
  }
  std::sort(merged.begin(), merged.end());
  for (const auto& [a, b] : merged) add_arc(lat.nodes[static_cast<std::size_t>(a)], lat.nodes[static_cast<std::size_t>(b)], false);
  return lat;
}

bool matches_gold(const SystemEdit& e, const std::vector<EditAnnotation>& gold) {
  const std::string repl = normalize_space(e.replacement);
  return std::any_of(gold.begin(), gold.end(), [&](const EditAnnotation& g) {
    return g.start == e.start && g.end == e.end && normalize_space(g.replacement) == repl;
  });
}

MatchCounts count_path(const std::vector<SystemEdit>& path_edits, const std::vector<EditAnnotation>& gold) {
  MatchCounts out;
  out.chosen = path_edits;
  std::set<std::size_t> hit;
  for (const auto& e : path_edits) {
    const std::string repl = normalize_space(e.replacement);
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (gold[g].start == e.start && gold[g].end == e.end && normalize_space(gold[g].replacement) == repl) {
        hit.insert(g);
        break;
      }
    }
  }
  out.tp = static_cast<int>(hit.size());
  out.fp = static_cast<int>(path_edits.size()) - out.tp;
  out.fn = static_cast<int>(gold.size()) - out.tp;
  return out;
}

MatchCounts max_match(const EditLattice& lattice, const std::vector<EditAnnotation>& gold) {
  std::vector<PathLabel> best(lattice.nodes.size());
  best[static_cast<std::size_t>(lattice.start())].reached = true;
  for (std::size_t u = 0; u < lattice.nodes.size(); ++u) {
    if (!best[u].reached) continue;
    for (int ai : lattice.out_arcs[u]) {
      const auto& arc = lattice.arcs[static_cast<std::size_t>(ai)];
      int tp = best[u].tp;
      std::vector<SystemEdit> edits = best[u].edits;
      if (!arc.is_match) {
        if (matches_gold(arc.edit, gold)) ++tp;
        edits.push_back(arc.edit);
      }
      PathLabel& dst = best[static_cast<std::size_t>(arc.to)];
      if (!dst.reached || label_better(tp, edits, dst.tp, dst.edits)) {
        dst.reached = true;
        dst.tp = tp;
        dst.edits = std::move(edits);
      }
    }
  }
  return count_path(best[static_cast<std::size_t>(lattice.finish())].edits, gold);
}

double f_beta(int tp, int fp, int fn, double beta) {
  if (tp < 0 || fp < 0 || fn < 0) throw std::invalid_argument("negative edit counts");
  const double p = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
  const double r = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
  const double b2 = beta * beta;
  const double denom = b2 * p + r;
  return denom == 0.0 ? 0.0 : (1.0 + b2) * p * r / denom;
}

ScoreReport score_corpus(const std::vector<Sentence>& hypotheses, const std::vector<AnnotatedSentence>& gold,
                         const ScoreOptions& options) {
  if (hypotheses.size() != gold.size()) {
    throw std::invalid_argument("hypothesis count " + std::to_string(hypotheses.size()) + " != gold count " +
                                std::to_string(gold.size()));
  }
  ScoreReport report;
  report.beta = options.beta;
  static const std::vector<EditAnnotation> kNoEdits;
  double macro = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto lattice = extract_edit_lattice(gold[i].source, hypotheses[i], options.lattice);
    std::map<int, const std::vector<EditAnnotation>*> annotators;
    for (const auto& [id, edits] : gold[i].edits) annotators.emplace(id, &edits);
    if (annotators.empty()) annotators.emplace(0, &kNoEdits);

    SentenceScore best;
    bool have = false;
    for (const auto& [id, edits] : annotators) {
      MatchCounts mc = max_match(lattice, *edits);
      const double f = f_beta(mc.tp, mc.fp, mc.fn, options.beta);
      if (!have || f > best.f_score) {
        have = true;
        best.index = i;
        best.annotator = id;
        best.tp = mc.tp;
        best.fp = mc.fp;
        best.fn = mc.fn;
        best.precision = mc.tp + mc.fp == 0 ? 1.0 : static_cast<double>(mc.tp) / (mc.tp + mc.fp);
        best.recall = mc.tp + mc.fn == 0 ? 1.0 : static_cast<double>(mc.tp) / (mc.tp + mc.fn);
        best.f_score = f;
        best.edits = std::move(mc.chosen);
      }
    }
    report.tp += best.tp;
    report.fp += best.fp;
    report.fn += best.fn;
    macro += best.f_score;
    report.sentences.push_back(std::move(best));
  }
  report.precision = report.tp + report.fp == 0 ? 1.0 : static_cast<double>(report.tp) / (report.tp + report.fp);
  report.recall = report.tp + report.fn == 0 ? 1.0 : static_cast<double>(report.tp) / (report.tp + report.fn);
  report.f_score = f_beta(report.tp, report.fp, report.fn, options.beta);
  report.macro_f_score = gold.empty() ? 1.0 : macro / static_cast<double>(gold.size());
  return report;
}

std::string report_json(const ScoreReport& report) {
  nlohmann::ordered_json j;
  j["tp"] = report.tp;
  j["fp"] = report.fp;
  j["fn"] = report.fn;
  j["beta"] = report.beta;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f_score"] = report.f_score;
  j["macro_f_score"] = report.macro_f_score;
  j["sentences"] = nlohmann::ordered_json::array();
  for (const auto& s : report.sentences) {
    nlohmann::ordered_json row;
    row["index"] = s.index;
    row["annotator"] = s.annotator;
    row["tp"] = s.tp;
    row["fp"] = s.fp;
    row["fn"] = s.fn;
    row["precision"] = s.precision;
    row["recall"] = s.recall;
    row["f_score"] = s.f_score;
    row["edits"] = nlohmann::ordered_json::array();
    for (const auto& e : s.edits) row["edits"].push_back({e.start, e.end, e.replacement});
    j["sentences"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string report_table(const ScoreReport& report) {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-12s %10d\n%-12s %10d\n%-12s %10d\n", "TP", report.tp, "FP", report.fp, "FN",
                report.fn);
  os << buf;
  std::snprintf(buf, sizeof buf, "%-12s %10.4f\n%-12s %10.4f\n", "Precision", report.precision, "Recall",
                report.recall);
  os << buf;
  std::snprintf(buf, sizeof buf, "F%-11.2g %10.4f\n", report.beta, report.f_score);
  os << buf;
  std::snprintf(buf, sizeof buf, "%-12s %10.4f\n", "macro F", report.macro_f_score);
  os << buf;
  return os.str();
}

}  // namespace gecforge::m2
