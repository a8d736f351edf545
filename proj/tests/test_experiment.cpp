#include <doctest.h>

#include "gecforge/experiment.hpp"

using namespace gecforge;
using namespace gecforge::experiment;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.micro_sizes = {60, 15, 20, 120};
  for (auto* tc : {&cfg.gec, &cfg.aeg}) {
    tc->embed_dim = 6;
    tc->hidden_dim = 8;
    tc->max_epochs = 3;
    tc->batch_size = 8;
  }
  cfg.mix_sizes = {0, 40};
  cfg.seeds = {1, 2};
  cfg.small_base = 30;
  return cfg;
}

}  // namespace

TEST_CASE("config text round trips and rejects unknown keys") {
  const std::string text =
      "[data]\nsource = micro\nmicro_seed = 5\n"
      "[aeg]\nkind = neural\ntop_m = 3\nallow_insertions = true\n"
      "[gec]\nhidden_dim = 16\nlearning_rate = 0.25\n"
      "[sweep]\nmix_sizes = 0, 200, 1000\nseeds = 1,2,3\n"
      "[scorer]\nendpoint = http://127.0.0.1:8000\n";
  auto cfg = parse_config(text);
  CHECK(cfg.micro_seed == 5);
  CHECK(cfg.aeg_kind == AegKind::neural);
  CHECK(cfg.top_m == 3);
  CHECK(cfg.allow_insertions);
  CHECK(cfg.gec.hidden_dim == 16);
  CHECK(cfg.gec.learning_rate == 0.25);
  CHECK(cfg.mix_sizes == std::vector<std::size_t>{0, 200, 1000});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(cfg.scorer == "http://127.0.0.1:8000");

  const std::string canonical = serialize_config(cfg);
  CHECK(serialize_config(parse_config(canonical)) == canonical);

  CHECK_THROWS_AS(parse_config("[gec]\nhiden_dim = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nope]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("stray = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[gec]\nhidden_dim = lots\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[aeg]\nkind = magic\n"), ConfigError);
}

TEST_CASE("validation") {
  auto cfg = tiny_config();
  CHECK_NOTHROW(cfg.validate(Template::self));
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(Template::self), ConfigError);
  cfg = tiny_config();
  cfg.mix_sizes.clear();
  CHECK_THROWS_AS(cfg.validate(Template::small_base), ConfigError);
  cfg.mix_sizes = {40, 0};
  CHECK_THROWS_AS(cfg.validate(Template::self), ConfigError);
  cfg.mix_sizes = {0};
  CHECK_THROWS_AS(cfg.validate(Template::artificial_only), ConfigError);
  cfg = tiny_config();
  cfg.use_micro = false;
  CHECK_THROWS_AS(cfg.validate(Template::self), ConfigError);
}

TEST_CASE("result tables round trip through TSV and JSON") {
  ResultTable t{"cross", {"a note"}, {}};
  t.cells.push_back({"gru-attn", "rule", 0, 1, 0.5, "ok"});
  t.cells.push_back({"gru-attn", "rule", 0, 2, 0.25, "ok"});
  t.cells.push_back({"gru-attn", "rule", 0, 3, 0.125, "ok"});
  t.cells.push_back({"gru-attn", "rule", 100, 1, std::nullopt, "failed: pool too small"});
  const std::string tsv = to_tsv(t);
  CHECK(from_tsv(tsv) == t);
  CHECK(to_tsv(from_tsv(tsv)) == tsv);
  const std::string js = to_json(t);
  CHECK(from_json(js) == t);
  CHECK(to_json(from_json(js)) == js);
  CHECK(*t.median(0) == 0.25);
  CHECK_FALSE(t.median(100).has_value());
  CHECK(t.find(100, 1)->status.starts_with("failed"));
  CHECK(to_grid(t).find("FAIL") != std::string::npos);
  CHECK_THROWS(from_tsv("no header\n"));
}

TEST_CASE("experiments are deterministic and every cell is present") {
  const auto cfg = tiny_config();
  auto t1 = run_exp_small_base(cfg);
  auto t2 = run_exp_small_base(cfg);
  CHECK(to_tsv(t1) == to_tsv(t2));
  CHECK(t1.cells.size() == 4);
  for (const auto& c : t1.cells) CHECK(c.status == "ok");
}

TEST_CASE("a single cell reproduces its row") {
  const auto cfg = tiny_config();
  auto full = run_exp_cross_paired(cfg, AegKind::rule);
  RunOptions only;
  only.only = CellFilter{40, 2};
  auto one = run_exp_cross_paired(cfg, AegKind::rule, only);
  REQUIRE(one.cells.size() == 1);
  CHECK(one.cells[0] == *full.find(40, 2));
}

TEST_CASE("a size-zero sweep is base-only training") {
  auto cfg = tiny_config();
  cfg.mix_sizes = {0};
  cfg.seeds = {1};
  auto t = run_exp_cross_paired(cfg, AegKind::rule);
  const auto data = load_data(cfg);
  CHECK(t.cells[0].f_score.value() == doctest::Approx(run_cell(cfg, data, data.base, {}, 0, 1)).epsilon(1e-6));
}

TEST_CASE("an oversized cell fails without stopping the sweep") {
  auto cfg = tiny_config();
  cfg.mix_sizes = {0, 100000};
  cfg.seeds = {1};
  auto t = run_exp_cross_paired(cfg, AegKind::rule);
  REQUIRE(t.cells.size() == 2);
  CHECK(t.cells[0].f_score.has_value());
  CHECK_FALSE(t.cells[1].f_score.has_value());
  CHECK(t.cells[1].status.starts_with("failed"));
  bool warned = false;
  for (const auto& n : t.notes) warned = warned || n.starts_with("warning");
  CHECK(warned);
}

TEST_CASE("artificial-only notes compare against a small-base table") {
  auto cfg = tiny_config();
  cfg.mix_sizes = {40};
  cfg.seeds = {1};
  auto small = run_exp_small_base(cfg);
  auto art = run_exp_artificial_only(cfg, {}, &small);
  REQUIRE(art.cells.size() == 1);
  bool compared = false;
  for (const auto& n : art.notes) compared = compared || n.find("artificial-only median") != std::string::npos;
  CHECK(compared);
}
