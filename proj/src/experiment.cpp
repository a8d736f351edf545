#include "gecforge/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gecforge/m2_scorer.hpp"
#include "gecforge/ngram_lm.hpp"
#include "gecforge/rng.hpp"

namespace gecforge::experiment {

std::string_view to_string(AegKind k) { return k == AegKind::rule ? "rule" : "neural"; }

AegKind parse_aeg_kind(std::string_view text) {
  if (text == "rule") return AegKind::rule;
  if (text == "neural") return AegKind::neural;
  throw ConfigError("unknown AEG kind '" + std::string(text) + "' (expected rule or neural)");
}

std::string_view to_string(Template t) {
  switch (t) {
    case Template::self: return "self";
    case Template::cross: return "cross";
    case Template::small_base: return "small-base";
    case Template::artificial_only: return "artificial-only";
  }
  return "self";
}

Template parse_template(std::string_view text) {
  if (text == "self") return Template::self;
  if (text == "cross") return Template::cross;
  if (text == "small-base") return Template::small_base;
  if (text == "artificial-only") return Template::artificial_only;
  throw ConfigError("unknown experiment template '" + std::string(text) + "'");
}

// Result tables ------------------------------------------------------------

namespace {

std::string format_f(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", f);
  return buf;
}

double round6(double f) { return std::round(f * 1e6) / 1e6; }

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

constexpr std::string_view kHeader = "gec_model\taeg_model\tsize\tseed\tf05\tstatus";

}  // namespace

std::optional<double> ResultTable::median(std::size_t size) const {
  std::vector<double> v;
  for (const auto& c : cells) {
    if (c.size == size && c.f_score) v.push_back(*c.f_score);
  }
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

const ResultCell* ResultTable::find(std::size_t size, std::uint64_t seed) const {
  for (const auto& c : cells) {
    if (c.size == size && c.seed == seed) return &c;
  }
  return nullptr;
}

std::string to_tsv(const ResultTable& table) {
  std::ostringstream os;
  os << "# name: " << one_line(table.name) << '\n';
  for (const auto& n : table.notes) os << "# note: " << one_line(n) << '\n';
  os << kHeader << '\n';
  for (const auto& c : table.cells) {
    os << c.gec_model << '\t' << c.aeg_model << '\t' << c.size << '\t' << c.seed << '\t'
       << (c.f_score ? format_f(*c.f_score) : "NA") << '\t' << one_line(c.status) << '\n';
  }
  return os.str();
}

ResultTable from_tsv(std::string_view text) {
  ResultTable t;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.starts_with("# name: ")) {
      t.name = line.substr(8);
      continue;
    }
    if (line.starts_with("# note: ")) {
      t.notes.push_back(line.substr(8));
      continue;
    }
    if (!header) {
      if (line != kHeader) throw ParseError(line_no, "expected result table header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, '\t')) f.push_back(field);
    if (f.size() != 6) throw ParseError(line_no, "expected 6 fields in result row");
    ResultCell c;
    c.gec_model = f[0];
    c.aeg_model = f[1];
    try {
      c.size = std::stoull(f[2]);
      c.seed = std::stoull(f[3]);
      if (f[4] != "NA") c.f_score = std::stod(f[4]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed number in result row");
    }
    c.status = f[5];
    t.cells.push_back(std::move(c));
  }
  if (!header) throw ParseError(line_no, "missing result table header");
  return t;
}

std::string to_json(const ResultTable& table) {
  nlohmann::ordered_json j;
  j["name"] = table.name;
  j["notes"] = table.notes;
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : table.cells) {
    nlohmann::ordered_json row;
    row["gec_model"] = c.gec_model;
    row["aeg_model"] = c.aeg_model;
    row["size"] = c.size;
    row["seed"] = c.seed;
    row["f05"] = c.f_score ? nlohmann::ordered_json(*c.f_score) : nlohmann::ordered_json(nullptr);
    row["status"] = c.status;
    j["cells"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

ResultTable from_json(std::string_view text) {
  ResultTable t;
  try {
    auto j = nlohmann::json::parse(text);
    t.name = j.at("name").get<std::string>();
    t.notes = j.at("notes").get<std::vector<std::string>>();
    for (const auto& row : j.at("cells")) {
      ResultCell c;
      c.gec_model = row.at("gec_model").get<std::string>();
      c.aeg_model = row.at("aeg_model").get<std::string>();
      c.size = row.at("size").get<std::size_t>();
      c.seed = row.at("seed").get<std::uint64_t>();
      if (!row.at("f05").is_null()) c.f_score = row.at("f05").get<double>();
      c.status = row.at("status").get<std::string>();
      t.cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed result table JSON: ") + e.what());
  }
  return t;
}

std::string to_grid(const ResultTable& table) {
  std::set<std::size_t> sizes;
  std::map<std::pair<std::string, std::string>, std::set<std::uint64_t>> blocks;
  for (const auto& c : table.cells) {
    sizes.insert(c.size);
    blocks[{c.gec_model, c.aeg_model}].insert(c.seed);
  }
  std::ostringstream os;
  os << table.name << '\n';
  char buf[64];
  for (const auto& [models, seeds] : blocks) {
    std::snprintf(buf, sizeof buf, "%-10s %-10s %6s", "GEC", "AEG", "seed");
    os << buf;
    for (auto s : sizes) {
      std::snprintf(buf, sizeof buf, " %9s", s == 0 ? "base" : ("+" + std::to_string(s)).c_str());
      os << buf;
    }
    os << '\n';
    for (auto seed : seeds) {
      std::snprintf(buf, sizeof buf, "%-10s %-10s %6llu", models.first.c_str(), models.second.c_str(),
                    static_cast<unsigned long long>(seed));
      os << buf;
      for (auto s : sizes) {
        const ResultCell* cell = nullptr;
        for (const auto& c : table.cells) {
          if (c.size == s && c.seed == seed && c.gec_model == models.first && c.aeg_model == models.second) cell = &c;
        }
        std::snprintf(buf, sizeof buf, " %9s",
                      cell == nullptr ? "-" : (cell->f_score ? format_f(100.0 * *cell->f_score).substr(0, 6).c_str() : "FAIL"));
        os << buf;
      }
      os << '\n';
    }
  }
  for (const auto& n : table.notes) os << "note: " << n << '\n';
  return os.str();
}

// Data ---------------------------------------------------------------------

namespace {

std::vector<ParallelPair> load_pairs(const std::string& path) {
  if (path.ends_with(".m2")) return filter_error_free(build_pairs(read_m2_file(path), 0));
  return filter_error_free(read_tsv_file(path));
}

void say(const RunOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

}  // namespace

ExperimentData load_data(const ExperimentConfig& cfg) {
  ExperimentData d;
  if (cfg.use_micro) {
    auto corpus = micro::generate(cfg.micro_sizes, cfg.micro_seed);
    d.base = std::move(corpus.base);
    d.dev = std::move(corpus.dev);
    d.test = std::move(corpus.test);
    d.monolingual = std::move(corpus.monolingual);
    return d;
  }
  d.base = load_pairs(cfg.base_corpus);
  d.dev = load_pairs(cfg.dev_corpus);
  d.test = read_m2_file(cfg.test_corpus);
  for (const auto& line : parse_sentences(read_file(cfg.monolingual_corpus))) {
    Sentence s = tokenize_raw(line.str());
    if (!s.empty()) d.monolingual.push_back(std::move(s));
  }
  return d;
}

// Pipeline -----------------------------------------------------------------

std::vector<ParallelPair> build_artificial_pool(const ExperimentConfig& cfg, const ExperimentData& data, AegKind kind,
                                                const RunOptions& options, std::vector<std::string>* notes) {
  std::vector<ParallelPair> pool;
  if (kind == AegKind::rule) {
    std::shared_ptr<LmScorer> scorer = options.scorer;
    if (!scorer) {
      auto local = std::make_shared<NGramScorer>(NGramModel::train(data.monolingual, cfg.lm_order, cfg.lm_k));
      scorer = connect_scorer(resolve_scorer_endpoint(cfg.scorer), local);
    }
    const Lexicon lex = cfg.lexicon.empty() ? Lexicon::defaults() : Lexicon::load(cfg.lexicon);
    RuleAegOptions opts;
    opts.top_m = cfg.top_m;
    opts.candidates.allow_insertions = cfg.allow_insertions;
    say(options, "rule AEG over " + std::to_string(data.monolingual.size()) + " sentences with " + scorer->name());
    auto gen = generate_corpus(data.monolingual, lex.confusion_sets(), *scorer, cfg.aeg_seed, opts);
    if (notes) {
      notes->push_back("rule AEG produced " + std::to_string(gen.pairs.size()) + " pairs, skipped " +
                       std::to_string(gen.skipped) + " sentences");
    }
    pool = filter_error_free(gen.pairs);
  } else {
    say(options, "training neural AEG on " + std::to_string(data.base.size()) + " pairs");
    auto aeg_cfg = cfg.aeg;
    aeg_cfg.seed = derive_seed(cfg.aeg.seed, cfg.aeg_seed);
    auto trained = seq2seq::train(data.base, data.dev, seq2seq::Direction::generation, aeg_cfg);
    auto gen = seq2seq::generate_neural_corpus(trained.model, data.monolingual, aeg_cfg);
    if (notes) {
      notes->push_back("neural AEG produced " + std::to_string(gen.pairs.size()) + " pairs, dropped " +
                       std::to_string(gen.dropped) + " identical outputs");
    }
    pool = std::move(gen.pairs);
  }
  if (notes && !cfg.mix_sizes.empty() && pool.size() < cfg.mix_sizes.back()) {
    notes->push_back("warning: artificial pool holds " + std::to_string(pool.size()) +
                     " pairs; larger mix sizes cannot be filled");
  }
  return pool;
}

double run_cell(const ExperimentConfig& cfg, const ExperimentData& data, const std::vector<ParallelPair>& base,
                const std::vector<ParallelPair>& pool, std::size_t size, std::uint64_t seed) {
  auto mix = mix_datasets(DatasetMix{base, pool, size, derive_seed(seed, size)});
  if (mix.empty()) throw ConfigError("cell has no training pairs");
  auto gec_cfg = cfg.gec;
  gec_cfg.seed = derive_seed(derive_seed(cfg.gec.seed, seed), size);
  auto trained = seq2seq::train(mix, data.dev, seq2seq::Direction::correction, gec_cfg);
  std::vector<Sentence> hyps;
  hyps.reserve(data.test.size());
  for (const auto& g : data.test) {
    hyps.push_back(seq2seq::decode(trained.model, g.source, gec_cfg.beam_width, gec_cfg.max_decode_length));
  }
  return m2::score_corpus(hyps, data.test).f_score;
}

namespace {

void run_sweep(ResultTable& table, const ExperimentConfig& cfg, const ExperimentData& data,
               const std::vector<ParallelPair>& base, const std::vector<ParallelPair>& pool, const std::string& aeg_tag,
               const RunOptions& options) {
  for (std::size_t size : cfg.mix_sizes) {
    for (std::uint64_t seed : cfg.seeds) {
      if (options.only && (options.only->size != size || options.only->seed != seed)) continue;
      ResultCell cell{std::string(kModelTag), aeg_tag, size, seed, std::nullopt, "ok"};
      try {
        cell.f_score = round6(run_cell(cfg, data, base, pool, size, seed));
        say(options, table.name + " size=" + std::to_string(size) + " seed=" + std::to_string(seed) +
                         " F0.5=" + format_f(*cell.f_score));
      } catch (const std::exception& e) {
        cell.status = std::string("failed: ") + e.what();
        say(options, table.name + " size=" + std::to_string(size) + " seed=" + std::to_string(seed) + " " + cell.status);
      }
      table.cells.push_back(std::move(cell));
    }
  }
}

std::string aeg_tag(AegKind k) { return k == AegKind::rule ? "rule" : std::string(kModelTag); }

}  // namespace

ResultTable run_exp_self_paired(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate(Template::self);
  const auto data = load_data(cfg);
  ResultTable table{"self", {}, {}};
  const auto pool = build_artificial_pool(cfg, data, AegKind::neural, options, &table.notes);
  run_sweep(table, cfg, data, data.base, pool, aeg_tag(AegKind::neural), options);
  return table;
}

ResultTable run_exp_cross_paired(const ExperimentConfig& cfg, AegKind aeg_source, const RunOptions& options) {
  cfg.validate(Template::cross);
  const auto data = load_data(cfg);
  ResultTable table{"cross", {}, {}};
  const auto pool = build_artificial_pool(cfg, data, aeg_source, options, &table.notes);
  run_sweep(table, cfg, data, data.base, pool, aeg_tag(aeg_source), options);
  return table;
}

ResultTable run_exp_small_base(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate(Template::small_base);
  const auto data = load_data(cfg);
  ResultTable table{"small-base", {}, {}};
  const std::size_t n = std::min(cfg.small_base, data.base.size());
  std::vector<ParallelPair> small(data.base.begin(), data.base.begin() + static_cast<std::ptrdiff_t>(n));
  table.notes.push_back("corrector base: " + std::to_string(n) + " of " + std::to_string(data.base.size()) +
                        " real pairs; AEG uses the full base");
  const auto pool = build_artificial_pool(cfg, data, cfg.aeg_kind, options, &table.notes);
  run_sweep(table, cfg, data, small, pool, aeg_tag(cfg.aeg_kind), options);
  return table;
}

ResultTable run_exp_artificial_only(const ExperimentConfig& cfg, const RunOptions& options,
                                    const ResultTable* small_base_reference) {
  cfg.validate(Template::artificial_only);
  const auto data = load_data(cfg);
  ResultTable table{"artificial-only", {}, {}};
  const auto pool = build_artificial_pool(cfg, data, cfg.aeg_kind, options, &table.notes);
  run_sweep(table, cfg, data, {}, pool, aeg_tag(cfg.aeg_kind), options);
  if (small_base_reference != nullptr) {
    for (std::size_t size : cfg.mix_sizes) {
      auto art = table.median(size);
      auto mixed = small_base_reference->median(size);
      if (!art || !mixed) continue;
      table.notes.push_back("size " + std::to_string(size) + ": artificial-only median F0.5 " + format_f(*art) +
                            " vs small-base mixed " + format_f(*mixed));
    }
  } else {
    table.notes.push_back("compare against the small-base template at the same sizes");
  }
  return table;
}

ResultTable run_template(Template t, const ExperimentConfig& cfg, const RunOptions& options) {
  switch (t) {
    case Template::self: return run_exp_self_paired(cfg, options);
    case Template::cross: return run_exp_cross_paired(cfg, cfg.aeg_kind, options);
    case Template::small_base: return run_exp_small_base(cfg, options);
    case Template::artificial_only: return run_exp_artificial_only(cfg, options);
  }
  return {};
}

}  // namespace gecforge::experiment
