#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gecforge/experiment.hpp"

namespace gecforge::experiment {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  T value{};
  if (!(is >> value) || !(is >> std::ws).eof()) throw ConfigError("invalid value '" + text + "' for " + key);
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    item = normalize_space(item);
    if (item.empty()) continue;
    out.push_back(parse_number<T>(key, item));
  }
  return out;
}

template <typename T>
std::string join_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
  std::string key;
  Setter set;
  Getter get;
};

struct Section {
  std::string name;
  std::vector<Field> fields;
};

std::vector<Field> train_fields(seq2seq::TrainConfig ExperimentConfig::*member) {
  using TC = seq2seq::TrainConfig;
  auto field_int = [member](const char* key, int TC::*m) {
    return Field{key, [=](ExperimentConfig& c, const std::string& k, const std::string& v) { (c.*member).*m = parse_number<int>(k, v); },
                 [=](const ExperimentConfig& c) { return std::to_string((c.*member).*m); }};
  };
  auto field_size = [member](const char* key, std::size_t TC::*m) {
    return Field{key, [=](ExperimentConfig& c, const std::string& k, const std::string& v) { (c.*member).*m = parse_number<std::size_t>(k, v); },
                 [=](const ExperimentConfig& c) { return std::to_string((c.*member).*m); }};
  };
  auto field_double = [member](const char* key, double TC::*m) {
    return Field{key, [=](ExperimentConfig& c, const std::string& k, const std::string& v) { (c.*member).*m = parse_number<double>(k, v); },
                 [=](const ExperimentConfig& c) { return format_double((c.*member).*m); }};
  };
  return {
      field_int("embed_dim", &TC::embed_dim),
      field_int("hidden_dim", &TC::hidden_dim),
      field_double("learning_rate", &TC::learning_rate),
      field_size("batch_size", &TC::batch_size),
      field_int("max_epochs", &TC::max_epochs),
      field_int("patience", &TC::patience),
      Field{"seed", [=](ExperimentConfig& c, const std::string& k, const std::string& v) { (c.*member).seed = parse_number<std::uint64_t>(k, v); },
            [=](const ExperimentConfig& c) { return std::to_string((c.*member).seed); }},
      field_size("beam_width", &TC::beam_width),
      field_size("max_decode_length", &TC::max_decode_length),
      field_double("clip_norm", &TC::clip_norm),
  };
}

template <typename T>
Field number_field(const char* key, T ExperimentConfig::*m) {
  return Field{key, [=](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*m = parse_number<T>(k, v); },
               [=](const ExperimentConfig& c) {
                 if constexpr (std::is_floating_point_v<T>) {
                   return format_double(c.*m);
                 } else {
                   return std::to_string(c.*m);
                 }
               }};
}

Field string_field(const char* key, std::string ExperimentConfig::*m) {
  return Field{key, [=](ExperimentConfig& c, const std::string&, const std::string& v) { c.*m = v; },
               [=](const ExperimentConfig& c) { return c.*m; }};
}

template <typename T>
Field micro_field(const char* key, T micro::MicroCorpusSizes::*m) {
  return Field{key, [=](ExperimentConfig& c, const std::string& k, const std::string& v) { c.micro_sizes.*m = parse_number<T>(k, v); },
               [=](const ExperimentConfig& c) { return std::to_string(c.micro_sizes.*m); }};
}

const std::vector<Section>& schema() {
  static const std::vector<Section> sections = {
      {"data",
       {
           Field{"source",
                 [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                   if (v != "micro" && v != "files") throw ConfigError("invalid value '" + v + "' for " + k);
                   c.use_micro = v == "micro";
                 },
                 [](const ExperimentConfig& c) { return std::string(c.use_micro ? "micro" : "files"); }},
           number_field("micro_seed", &ExperimentConfig::micro_seed),
           micro_field("micro_base", &micro::MicroCorpusSizes::base),
           micro_field("micro_dev", &micro::MicroCorpusSizes::dev),
           micro_field("micro_test", &micro::MicroCorpusSizes::test),
           micro_field("micro_monolingual", &micro::MicroCorpusSizes::monolingual),
           string_field("base", &ExperimentConfig::base_corpus),
           string_field("dev", &ExperimentConfig::dev_corpus),
           string_field("test", &ExperimentConfig::test_corpus),
           string_field("monolingual", &ExperimentConfig::monolingual_corpus),
       }},
      {"aeg",
       {
           Field{"kind", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.aeg_kind = parse_aeg_kind(v); },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.aeg_kind)); }},
           string_field("lexicon", &ExperimentConfig::lexicon),
           number_field("lm_order", &ExperimentConfig::lm_order),
           number_field("lm_k", &ExperimentConfig::lm_k),
           number_field("top_m", &ExperimentConfig::top_m),
           Field{"allow_insertions",
                 [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.allow_insertions = parse_bool(k, v); },
                 [](const ExperimentConfig& c) { return std::string(c.allow_insertions ? "true" : "false"); }},
           number_field("seed", &ExperimentConfig::aeg_seed),
       }},
      {"gec", train_fields(&ExperimentConfig::gec)},
      {"aeg_model", train_fields(&ExperimentConfig::aeg)},
      {"sweep",
       {
           Field{"mix_sizes",
                 [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.mix_sizes = parse_list<std::size_t>(k, v); },
                 [](const ExperimentConfig& c) { return join_list(c.mix_sizes); }},
           Field{"seeds",
                 [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.seeds = parse_list<std::uint64_t>(k, v); },
                 [](const ExperimentConfig& c) { return join_list(c.seeds); }},
           number_field("small_base", &ExperimentConfig::small_base),
       }},
      {"scorer", {string_field("endpoint", &ExperimentConfig::scorer)}},
      {"output", {string_field("dir", &ExperimentConfig::output_dir)}},
  };
  return sections;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is{std::string(text)};
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section_name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      throw ConfigError("config key '" + section_name + "' outside any section");
    }
    auto sec = std::find_if(schema().begin(), schema().end(), [&](const Section& s) { return s.name == section_name; });
    if (sec == schema().end()) throw ConfigError("unknown config section [" + section_name + "]");
    for (const auto& [key, node] : section) {
      auto field = std::find_if(sec->fields.begin(), sec->fields.end(), [&](const Field& f) { return f.key == key; });
      if (field == sec->fields.end()) throw ConfigError("unknown config key '" + key + "' in [" + section_name + "]");
      field->set(cfg, section_name + "." + key, normalize_space(node.data()));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  bool first = true;
  for (const auto& sec : schema()) {
    if (!first) os << '\n';
    first = false;
    os << '[' << sec.name << "]\n";
    for (const auto& f : sec.fields) os << f.key << " = " << f.get(cfg) << '\n';
  }
  return os.str();
}

void ExperimentConfig::validate(Template t) const {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (mix_sizes.empty()) throw ConfigError("mix_sizes must not be empty");
  if (!std::is_sorted(mix_sizes.begin(), mix_sizes.end())) throw ConfigError("mix_sizes must be sorted ascending");
  if (std::adjacent_find(mix_sizes.begin(), mix_sizes.end()) != mix_sizes.end()) {
    throw ConfigError("mix_sizes must not repeat");
  }
  if (t == Template::artificial_only && mix_sizes.front() == 0) {
    throw ConfigError("artificial-only runs need a positive artificial size: zero real and zero artificial pairs");
  }
  if (t == Template::small_base && small_base == 0) throw ConfigError("small_base must be positive");
  if (lm_order < 1) throw ConfigError("lm_order must be >= 1");
  if (!(lm_k > 0.0)) throw ConfigError("lm_k must be positive");
  if (top_m < 1) throw ConfigError("top_m must be >= 1");
  if (!use_micro) {
    if (base_corpus.empty() || dev_corpus.empty() || test_corpus.empty() || monolingual_corpus.empty()) {
      throw ConfigError("file-based runs need base, dev, test and monolingual corpora");
    }
  }
  try {
    gec.validate();
    aeg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace gecforge::experiment
