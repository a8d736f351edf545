// gec_forge: command-line front end for the error generation, correction
// and evaluation toolkit.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gecforge/corpus.hpp"
#include "gecforge/experiment.hpp"
#include "gecforge/lm_scorer.hpp"
#include "gecforge/m2_scorer.hpp"
#include "gecforge/micro_lang.hpp"
#include "gecforge/ngram_lm.hpp"
#include "gecforge/rule_aeg.hpp"
#include "gecforge/seq2seq/checkpoint.hpp"
#include "gecforge/seq2seq/trainer.hpp"

namespace fs = std::filesystem;
using namespace gecforge;

namespace {

void log_line(const std::string& msg) { std::cerr << "[gec_forge] " << msg << '\n'; }

std::vector<ParallelPair> load_pairs(const std::string& path, int annotator, bool keep_error_free) {
  std::vector<ParallelPair> pairs =
      path.ends_with(".m2") ? build_pairs(read_m2_file(path), annotator) : read_tsv_file(path);
  return keep_error_free ? pairs : filter_error_free(pairs);
}

std::vector<Sentence> load_raw(const std::string& path, bool pretokenized) {
  std::vector<Sentence> out;
  for (const auto& s : read_sentence_file(path)) {
    Sentence t = pretokenized ? s : tokenize_raw(s.str());
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::string tsv_to_json_path(const std::string& tsv) {
  fs::path p(tsv);
  p.replace_extension(".json");
  return p.string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Artificial error generation, GEC training and M2 evaluation"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Convert an M2 or TSV corpus to parallel TSV");
  std::string ingest_in, ingest_out;
  int ingest_annotator = 0;
  bool ingest_keep = false;
  ingest->add_option("-i,--input", ingest_in, "M2 or TSV corpus")->required()->check(CLI::ExistingFile);
  ingest->add_option("-o,--output", ingest_out, "Output TSV")->required();
  ingest->add_option("--annotator", ingest_annotator, "Annotator id used to build targets");
  ingest->add_flag("--keep-error-free", ingest_keep, "Keep pairs whose sides are identical");

  // lm-train
  auto* lm_train = app.add_subcommand("lm-train", "Train the local n-gram scorer");
  std::string lm_in, lm_out;
  int lm_order = 3;
  double lm_k = 0.1;
  bool lm_pretok = false;
  lm_train->add_option("-i,--input", lm_in, "Monolingual text, one sentence per line")->required()->check(CLI::ExistingFile);
  lm_train->add_option("-o,--output", lm_out, "Model file")->required();
  lm_train->add_option("--order", lm_order, "N-gram order")->check(CLI::PositiveNumber);
  lm_train->add_option("--k", lm_k, "Add-k smoothing constant")->check(CLI::PositiveNumber);
  lm_train->add_flag("--pretokenized", lm_pretok, "Split on whitespace only");

  // gen-errors
  auto* gen = app.add_subcommand("gen-errors", "Inject artificial errors into clean text");
  std::string gen_kind = "rule", gen_in, gen_out, gen_lm, gen_lexicon, gen_model, gen_scorer = "local";
  std::uint64_t gen_seed = 11;
  std::size_t gen_top_m = 5, gen_beam = 3, gen_max_len = 40;
  int gen_order = 3;
  double gen_k = 0.1;
  bool gen_insertions = false, gen_pretok = false;
  gen->add_option("--kind", gen_kind, "rule or neural")->check(CLI::IsMember({"rule", "neural"}));
  gen->add_option("-i,--input", gen_in, "Clean text, one sentence per line")->required()->check(CLI::ExistingFile);
  gen->add_option("-o,--output", gen_out, "Output TSV of (errorful, clean) pairs")->required();
  gen->add_option("--lm", gen_lm, "Serialized n-gram model (rule; default: train on the input)");
  gen->add_option("--order", gen_order, "N-gram order when training on the input");
  gen->add_option("--k", gen_k, "Add-k constant when training on the input");
  gen->add_option("--lexicon", gen_lexicon, "Confusion-set lexicon file (rule)");
  gen->add_option("--scorer", gen_scorer, "Bridge URL or 'local' (rule)");
  gen->add_option("--seed", gen_seed, "Selection seed (rule)");
  gen->add_option("--top-m", gen_top_m, "Candidates sampled after the top one (rule)");
  gen->add_flag("--insertions", gen_insertions, "Also inject spurious words (rule)");
  gen->add_option("--model", gen_model, "Generation-direction checkpoint (neural)");
  gen->add_option("--beam", gen_beam, "Beam width (neural)");
  gen->add_option("--max-length", gen_max_len, "Decode length cap (neural)");
  gen->add_flag("--pretokenized", gen_pretok, "Split on whitespace only");

  // train
  auto* train = app.add_subcommand("train", "Train a seq2seq corrector or error generator");
  std::string tr_direction = "correction", tr_train, tr_dev, tr_out;
  seq2seq::TrainConfig tc;
  train->add_option("--direction", tr_direction, "correction or generation")
      ->check(CLI::IsMember({"correction", "generation"}));
  train->add_option("--train", tr_train, "Training pairs (TSV or M2)")->required()->check(CLI::ExistingFile);
  train->add_option("--dev", tr_dev, "Dev pairs (TSV or M2)")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--output", tr_out, "Checkpoint path")->required();
  train->add_option("--embed", tc.embed_dim);
  train->add_option("--hidden", tc.hidden_dim);
  train->add_option("--lr", tc.learning_rate);
  train->add_option("--batch", tc.batch_size);
  train->add_option("--epochs", tc.max_epochs);
  train->add_option("--patience", tc.patience);
  train->add_option("--seed", tc.seed);
  train->add_option("--clip", tc.clip_norm);

  // decode
  auto* decode = app.add_subcommand("decode", "Decode sentences with a checkpoint");
  std::string dec_model, dec_in, dec_out;
  std::size_t dec_beam = 3, dec_max_len = 40;
  bool dec_greedy = false, dec_pretok = true;
  decode->add_option("-m,--model", dec_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  decode->add_option("-i,--input", dec_in, "Source sentences")->required()->check(CLI::ExistingFile);
  decode->add_option("-o,--output", dec_out, "Hypotheses (stdout when omitted)");
  decode->add_option("--beam", dec_beam, "Beam width")->check(CLI::PositiveNumber);
  decode->add_option("--max-length", dec_max_len, "Decode length cap")->check(CLI::PositiveNumber);
  decode->add_flag("--greedy", dec_greedy, "Greedy decoding");
  decode->add_flag("!--raw", dec_pretok, "Tokenize raw input first");

  // score
  auto* score = app.add_subcommand("score", "M2 scoring of hypotheses against gold edits");
  std::string sc_hyp, sc_gold, sc_json;
  double sc_beta = 0.5;
  int sc_window = 2;
  bool sc_json_stdout = false;
  score->add_option("--hyp", sc_hyp, "Hypotheses, one tokenized sentence per line")->required()->check(CLI::ExistingFile);
  score->add_option("--gold", sc_gold, "Gold M2 file")->required()->check(CLI::ExistingFile);
  score->add_option("--beta", sc_beta, "F-beta weight")->check(CLI::PositiveNumber);
  score->add_option("--merge-window", sc_window, "Max match arcs inside a merged edit")->check(CLI::NonNegativeNumber);
  score->add_option("--json-out", sc_json, "Also write the JSON report to a file");
  score->add_flag("--json", sc_json_stdout, "Print JSON instead of the table");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run an experiment template");
  std::string ex_template, ex_config, ex_out, ex_aeg_source, ex_reference;
  std::vector<std::uint64_t> ex_cell;
  exp->add_option("--template", ex_template, "self, cross, small-base or artificial-only")
      ->required()
      ->check(CLI::IsMember({"self", "cross", "small-base", "artificial-only"}));
  exp->add_option("--config", ex_config, "Experiment config file")->required()->check(CLI::ExistingFile);
  exp->add_option("--cell", ex_cell, "Re-run one cell: size,seed")->delimiter(',')->expected(2);
  exp->add_option("--out", ex_out, "Result TSV path (JSON is written next to it)");
  exp->add_option("--aeg-source", ex_aeg_source, "AEG source for cross (default: config)")
      ->check(CLI::IsMember({"rule", "neural"}));
  exp->add_option("--reference", ex_reference, "Small-base result TSV compared in artificial-only notes")
      ->check(CLI::ExistingFile);

  // micro-lang
  auto* micro = app.add_subcommand("micro-lang", "Generate the synthetic micro-language corpora");
  std::string ml_dir;
  micro::MicroCorpusSizes ml_sizes;
  std::uint64_t ml_seed = 7;
  micro->add_option("--emit", ml_dir, "Output directory")->required();
  micro->add_option("--seed", ml_seed);
  micro->add_option("--base", ml_sizes.base);
  micro->add_option("--dev", ml_sizes.dev);
  micro->add_option("--test", ml_sizes.test);
  micro->add_option("--monolingual", ml_sizes.monolingual);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) {
      auto pairs = load_pairs(ingest_in, ingest_annotator, ingest_keep);
      write_tsv_file(ingest_out, pairs);
      log_line("wrote " + std::to_string(pairs.size()) + " pairs to " + ingest_out);
    } else if (lm_train->parsed()) {
      auto model = NGramModel::train(load_raw(lm_in, lm_pretok), lm_order, lm_k);
      write_file(lm_out, model.serialize());
      log_line("wrote " + std::to_string(lm_order) + "-gram model to " + lm_out);
    } else if (gen->parsed()) {
      auto clean = load_raw(gen_in, gen_pretok);
      if (gen_kind == "rule") {
        std::shared_ptr<LmScorer> local;
        if (!gen_lm.empty()) {
          local = std::make_shared<NGramScorer>(NGramModel::deserialize(read_file(gen_lm)));
        } else {
          local = std::make_shared<NGramScorer>(NGramModel::train(clean, gen_order, gen_k));
        }
        auto scorer = connect_scorer(resolve_scorer_endpoint(gen_scorer), local);
        const Lexicon lex = gen_lexicon.empty() ? Lexicon::defaults() : Lexicon::load(gen_lexicon);
        RuleAegOptions opts;
        opts.top_m = gen_top_m;
        opts.candidates.allow_insertions = gen_insertions;
        auto out = generate_corpus(clean, lex.confusion_sets(), *scorer, gen_seed, opts);
        write_tsv_file(gen_out, out.pairs);
        log_line("wrote " + std::to_string(out.pairs.size()) + " pairs, skipped " + std::to_string(out.skipped));
      } else {
        if (gen_model.empty()) throw std::invalid_argument("--kind neural needs --model");
        auto ckpt = seq2seq::load_checkpoint(gen_model);
        if (ckpt.direction != seq2seq::Direction::generation) {
          log_line("warning: checkpoint was trained in the correction direction");
        }
        seq2seq::TrainConfig cfg;
        cfg.beam_width = gen_beam;
        cfg.max_decode_length = gen_max_len;
        auto out = seq2seq::generate_neural_corpus(ckpt.model, clean, cfg);
        write_tsv_file(gen_out, out.pairs);
        log_line("wrote " + std::to_string(out.pairs.size()) + " pairs, dropped " + std::to_string(out.dropped));
      }
    } else if (train->parsed()) {
      const auto direction = seq2seq::parse_direction(tr_direction);
      auto result = seq2seq::train(load_pairs(tr_train, 0, false), load_pairs(tr_dev, 0, false), direction, tc);
      for (const auto& e : result.history.epochs) {
        std::fprintf(stderr, "epoch %3d  train %.6f  dev %.6f\n", e.epoch, e.train_loss, e.dev_loss);
      }
      seq2seq::save_checkpoint(tr_out, {std::move(result.model), direction});
      log_line("best epoch " + std::to_string(result.history.best_epoch) + ", checkpoint " + tr_out);
    } else if (decode->parsed()) {
      auto ckpt = seq2seq::load_checkpoint(dec_model);
      std::vector<Sentence> hyps;
      for (const auto& src : load_raw(dec_in, dec_pretok)) {
        hyps.push_back(dec_greedy ? seq2seq::greedy(ckpt.model, src, dec_max_len)
                                  : seq2seq::decode(ckpt.model, src, dec_beam, dec_max_len));
      }
      if (dec_out.empty()) {
        for (const auto& h : hyps) std::cout << h.str() << '\n';
      } else {
        write_sentence_file(dec_out, hyps);
      }
    } else if (score->parsed()) {
      m2::ScoreOptions opts;
      opts.beta = sc_beta;
      opts.lattice.merge_window = sc_window;
      // Blank lines are empty hypotheses, so split by line rather than
      // through the sentence-file reader.
      std::vector<Sentence> hyps;
      std::istringstream hin(read_file(sc_hyp));
      for (std::string line; std::getline(hin, line);) hyps.push_back(Sentence::from_text(line));
      auto report = m2::score_corpus(hyps, read_m2_file(sc_gold), opts);
      if (!sc_json.empty()) write_file(sc_json, m2::report_json(report));
      std::cout << (sc_json_stdout ? m2::report_json(report) : m2::report_table(report));
    } else if (exp->parsed()) {
      auto cfg = experiment::load_config(ex_config);
      const auto tmpl = experiment::parse_template(ex_template);
      experiment::RunOptions opts;
      opts.log = log_line;
      if (!ex_cell.empty()) opts.only = experiment::CellFilter{static_cast<std::size_t>(ex_cell[0]), ex_cell[1]};
      experiment::ResultTable table;
      if (tmpl == experiment::Template::cross && !ex_aeg_source.empty()) {
        table = experiment::run_exp_cross_paired(cfg, experiment::parse_aeg_kind(ex_aeg_source), opts);
      } else if (tmpl == experiment::Template::artificial_only && !ex_reference.empty()) {
        const auto ref = experiment::from_tsv(read_file(ex_reference));
        table = experiment::run_exp_artificial_only(cfg, opts, &ref);
      } else {
        table = experiment::run_template(tmpl, cfg, opts);
      }
      std::string out = ex_out;
      if (out.empty()) {
        fs::create_directories(cfg.output_dir);
        out = (fs::path(cfg.output_dir) / (std::string(experiment::to_string(tmpl)) + ".tsv")).string();
      }
      write_file(out, experiment::to_tsv(table));
      write_file(tsv_to_json_path(out), experiment::to_json(table));
      std::cout << experiment::to_grid(table);
      log_line("wrote " + out);
    } else if (micro->parsed()) {
      micro::emit(micro::generate(ml_sizes, ml_seed), ml_dir);
      log_line("wrote micro-language corpora to " + ml_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "gec_forge: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
