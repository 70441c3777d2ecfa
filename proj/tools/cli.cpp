#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "absaug/augmenter.hpp"
#include "absaug/balancer.hpp"
#include "absaug/config.hpp"
#include "absaug/corpus.hpp"
#include "absaug/errors.hpp"
#include "absaug/evaluator.hpp"
#include "absaug/exporter.hpp"
#include "absaug/jsonl.hpp"
#include "absaug/log.hpp"
#include "absaug/pipeline.hpp"
#include "absaug/preference.hpp"
#include "absaug/reward.hpp"
#include "absaug/topic_model.hpp"

namespace absaug::cli {
namespace {

/// Flags shared by every command that talks to a model.
struct BackendFlags {
  std::string config;
  std::string backend;
  std::string mock_script;
  std::string model;
  std::string base_url;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--backend", backend, "mock or openai")
        ->check(CLI::IsMember({"mock", "openai"}));
    app.add_option("--mock-script", mock_script, "scripted completions for the mock backend")
        ->check(CLI::ExistingFile);
    app.add_option("--model", model, "model name for the openai backend");
    app.add_option("--base-url", base_url, "endpoint for the openai backend");
  }

  PipelineConfig load() const {
    PipelineConfig cfg = config.empty() ? PipelineConfig{} : load_config(config);
    for (auto* b : {&cfg.augmenter, &cfg.reward_model}) {
      if (!backend.empty()) b->kind = backend == "mock" ? BackendKind::mock : BackendKind::openai;
      if (!mock_script.empty()) b->mock_script = mock_script;
      if (!model.empty()) b->openai.model = model;
      if (!base_url.empty()) b->openai.base_url = base_url;
    }
    return cfg;
  }
};

Gateway make_gateway(const BackendConfig& b) { return Gateway(make_backend(b), b.gateway); }

std::string json_number(double v) { return nlohmann::json(v).dump(); }

std::string vector_json(const TopicVector& v) { return nlohmann::json(v.values).dump(); }

LdaModel load_model(const std::string& path) { return LdaModel::load(path); }

// --- subcommand state ---------------------------------------------------------

struct Options {
  bool verbose = false;
  bool quiet = false;

  struct {
    std::string in;
    std::string split = "train";
  } stats;

  struct {
    std::string in, out;
    std::uint64_t seed = 42;
  } balance;

  struct {
    std::string base, aug, out, setting = "standard";
  } merge;

  struct {
    std::string in, out;
    std::size_t n = 5;
    std::optional<std::int64_t> seed;
    BackendFlags backend;
  } augment;

  struct {
    std::string in, out, stopwords;
    std::size_t k = 10;
    double alpha = 0.1, beta = 0.01;
    std::size_t iterations = 200;
    std::uint64_t seed = 7;
  } lda_fit;

  struct {
    std::string model, text, in, out;
    std::size_t fold_in = kDefaultFoldInIterations;
  } lda_infer;

  struct {
    std::string model, a, b;
    std::size_t fold_in = kDefaultFoldInIterations;
  } lda_score;

  struct {
    std::string in, candidates, lda_model, out;
    std::size_t fold_in = kDefaultFoldInIterations;
    BackendFlags backend;
  } score;

  struct {
    std::string in, scored, out, skips;
    bool reward1_only = false, reward2_only = false;
  } prefs;

  struct {
    std::string in, out;
  } sft;

  struct {
    std::string in, predictions, save_predictions, json;
    BackendFlags backend;
  } evaluate;

  struct {
    std::string in, out_dir, setting, timestamp;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n, lda_k;
    bool reward1_only = false, reward2_only = false;
    BackendFlags backend;
  } pipeline;
};

// --- commands -------------------------------------------------------------------

void cmd_stats(const Options& o, std::ostream& out) {
  SkipReport skipped;
  const auto d = load_dataset(o.stats.in, o.stats.split == "test" ? Split::test : Split::train,
                              &skipped);
  out << format_stats(label_counts(d));
  if (skipped.total() > 0) {
    log::info("skipped " + std::to_string(skipped.conflict) + " conflict and " +
              std::to_string(skipped.null_target) + " NULL-target aspects");
  }
}

void cmd_balance(const Options& o, std::ostream& out) {
  const auto d = load_dataset(o.balance.in);
  const auto b = balance(d, o.balance.seed);
  save_jsonl(b, o.balance.out);
  out << format_stats(label_counts(b));
}

void cmd_merge(const Options& o, std::ostream& out) {
  const auto setting = parse_setting(o.merge.setting);
  const auto merged =
      merge_augmented(load_dataset(o.merge.base), load_dataset(o.merge.aug), *setting);
  save_jsonl(merged, o.merge.out);
  out << format_stats(label_counts(merged));
}

void cmd_augment(const Options& o, std::ostream& out) {
  const auto cfg = o.augment.backend.load();
  auto sampling = cfg.augmenter.sampling;
  if (o.augment.seed) sampling.seed = o.augment.seed;
  const auto d = load_dataset(o.augment.in);
  const auto gateway = make_gateway(cfg.augmenter);
  const auto pools = augment_all(d, o.augment.n, gateway, sampling);
  write_file(o.augment.out, write_candidates_jsonl(pools));
  std::size_t valid = 0;
  for (const auto& pool : pools) {
    valid += static_cast<std::size_t>(std::count_if(pool.begin(), pool.end(),
                                                     [](const auto& c) { return c.valid; }));
  }
  out << "candidates\t" << pools.size() * o.augment.n << "\nvalid\t" << valid << "\n";
}

void cmd_lda_fit(const Options& o, std::ostream& out) {
  const auto& f = o.lda_fit;
  LdaParams params{f.k, f.alpha, f.beta, f.iterations, f.seed};
  params.validate();
  Tokenizer tokenizer = f.stopwords.empty() ? Tokenizer() : Tokenizer::from_stopword_file(f.stopwords);
  const auto model = fit_lda(lda_corpus(load_dataset(f.in)), params, std::move(tokenizer));
  model.save(f.out);
  out << "topics\t" << model.topics() << "\nvocab\t" << model.vocab_size() << "\n";
}

void cmd_lda_infer(const Options& o, std::ostream& out) {
  const auto& f = o.lda_infer;
  const auto model = load_model(f.model);
  if (!f.text.empty()) {
    out << vector_json(infer(model, f.text, f.fold_in)) << "\n";
    return;
  }
  if (f.in.empty()) throw ConfigError("lda infer needs --text or --in");
  std::string lines;
  for (const auto& inst : load_dataset(f.in).instances) {
    nlohmann::ordered_json j;
    j["source_id"] = inst.source_id;
    j["topics"] = infer(model, inst.sentence, f.fold_in).values;
    append_jsonl(lines, j);
  }
  if (f.out.empty()) {
    out << lines;
  } else {
    write_file(f.out, lines);
  }
}

void cmd_lda_score(const Options& o, std::ostream& out) {
  const auto& f = o.lda_score;
  const auto model = load_model(f.model);
  out << json_number(relevance(infer(model, f.a, f.fold_in), infer(model, f.b, f.fold_in))) << "\n";
}

void cmd_score(const Options& o, std::ostream& out) {
  const auto& f = o.score;
  const auto cfg = f.backend.load();
  const auto d = load_dataset(f.in);
  const auto pools = read_candidates_jsonl(read_file(f.candidates), d);
  const auto model = load_model(f.lda_model);
  const auto gateway = make_gateway(cfg.reward_model);
  const auto scored = score_all(pools, model, gateway, RewardOptions{f.fold_in});
  write_file(f.out, write_scored_jsonl(scored));
  std::size_t consistent = 0, total = 0;
  for (const auto& pool : scored) {
    for (const auto& c : pool) {
      consistent += c.consistent ? 1 : 0;
      ++total;
    }
  }
  out << "scored\t" << total << "\nconsistent\t" << consistent << "\n";
}

void cmd_build_prefs(const Options& o, std::ostream& out) {
  const auto& f = o.prefs;
  const auto d = load_dataset(f.in);
  const auto pools = read_scored_jsonl(read_file(f.scored));
  if (pools.size() != d.size()) {
    throw DataError("scored file has " + std::to_string(pools.size()) + " pools for " +
                    std::to_string(d.size()) + " instances");
  }
  std::vector<std::string> prompts;
  prompts.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& inst = d.instances[i];
    if (!pools[i].empty() && pools[i].front().source_id != inst.source_id) {
      throw DataError("pool " + std::to_string(i) + " belongs to '" + pools[i].front().source_id +
                      "', expected '" + inst.source_id + "'");
    }
    prompts.push_back(build_prompt(inst));
  }
  const auto mode = f.reward1_only   ? SelectionMode::sentiment_only
                    : f.reward2_only ? SelectionMode::topic_only
                                     : SelectionMode::both;
  const auto built = build_preference_dataset(pools, prompts, mode);
  write_file(f.out, export_preferences(built.pairs));
  if (!f.skips.empty()) {
    std::string lines;
    for (const auto& s : built.skipped) {
      append_jsonl(lines, nlohmann::ordered_json{{"source_id", s.source_id}, {"reason", s.reason}});
    }
    write_file(f.skips, lines);
  }
  out << "pairs\t" << built.pairs.size() << "\nskipped\t" << built.skipped.size() << "\n";
}

void cmd_export_sft(const Options& o, std::ostream& out) {
  const auto d = load_dataset(o.sft.in);
  write_file(o.sft.out, export_sft(d));
  out << "records\t" << d.size() << "\n";
}

void cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto& f = o.evaluate;
  const auto gold = load_dataset(f.in, Split::test);
  std::vector<LabeledPrediction> predictions;
  if (!f.predictions.empty()) {
    predictions = read_predictions_jsonl(read_file(f.predictions));
  } else {
    const auto cfg = f.backend.load();
    auto run = predict_split(gold, make_gateway(cfg.reward_model));
    for (const auto& failure : run.failures) {
      err << "warning: prediction failed for '" << failure.source_id << "': " << failure.message
          << " (scored as unparseable)\n";
      run.predictions.emplace_back(failure.source_id, Prediction::unparseable);
    }
    predictions = std::move(run.predictions);
    if (!f.save_predictions.empty()) write_file(f.save_predictions, write_predictions_jsonl(predictions));
  }
  const auto report = evaluate(gold, predictions);
  if (!f.json.empty()) write_file(f.json, report.to_json().dump(2) + "\n");
  out << report.to_table();
}

void cmd_pipeline(const Options& o, std::ostream& out) {
  const auto& f = o.pipeline;
  PipelineConfig cfg = [&] {
    try {
      return f.backend.load();
    } catch (const Error& e) {
      throw StageError("config", e.what());
    }
  }();
  if (!f.in.empty()) cfg.input = f.in;
  if (!f.out_dir.empty()) cfg.output_dir = f.out_dir;
  if (!f.setting.empty()) cfg.setting = *parse_setting(f.setting);
  if (f.seed) cfg.seed = *f.seed;
  if (f.n) cfg.n_candidates = *f.n;
  if (f.lda_k) cfg.lda.topics = *f.lda_k;
  if (f.reward1_only) cfg.selection = SelectionMode::sentiment_only;
  if (f.reward2_only) cfg.selection = SelectionMode::topic_only;

  std::optional<Gateway> augmenter, reward_model;
  try {
    cfg.validate();
    augmenter.emplace(make_gateway(cfg.augmenter));
    reward_model.emplace(make_gateway(cfg.reward_model));
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("config", e.what());
  }

  const auto summary = run_pipeline(cfg, *augmenter, *reward_model,
                                    f.timestamp.empty() ? utc_timestamp() : f.timestamp);
  out << "base\t" << summary.base_size << "\npairs\t" << summary.pairs << "\nskipped\t"
      << summary.skipped << "\nsft\t" << summary.sft_records << "\nmanifest\t"
      << summary.files.manifest.string() << "\n";
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aspect-based sentiment data augmentation toolkit", "absaug"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("-v,--verbose", o.verbose, "log progress to stderr");
  app.add_flag("-q,--quiet", o.quiet, "log errors only");

  auto* stats = app.add_subcommand("stats", "label counts of a dataset");
  stats->add_option("--in", o.stats.in, "SemEval XML or JSONL")->required()->check(CLI::ExistingFile);
  stats->add_option("--split", o.stats.split)->check(CLI::IsMember({"train", "test"}));

  auto* balance_cmd = app.add_subcommand("balance", "oversample minority labels");
  balance_cmd->add_option("--in", o.balance.in)->required()->check(CLI::ExistingFile);
  balance_cmd->add_option("--out", o.balance.out)->required();
  balance_cmd->add_option("--seed", o.balance.seed);

  auto* merge = app.add_subcommand("merge", "append augmented instances to a base set");
  merge->add_option("--base", o.merge.base)->required()->check(CLI::ExistingFile);
  merge->add_option("--aug", o.merge.aug)->required()->check(CLI::ExistingFile);
  merge->add_option("--out", o.merge.out)->required();
  merge->add_option("--setting", o.merge.setting)->check(CLI::IsMember({"standard", "balanced"}));

  auto* augment_cmd = app.add_subcommand("augment", "sample candidate rewrites");
  augment_cmd->add_option("--in", o.augment.in)->required()->check(CLI::ExistingFile);
  augment_cmd->add_option("--out", o.augment.out)->required();
  augment_cmd->add_option("--n", o.augment.n, "candidates per instance")->check(CLI::PositiveNumber);
  augment_cmd->add_option("--seed", o.augment.seed, "generation seed; request i sends seed + i");
  o.augment.backend.attach(*augment_cmd);

  auto* lda = app.add_subcommand("lda", "topic model");
  lda->require_subcommand(1);
  auto* fit = lda->add_subcommand("fit", "fit on the unique original sentences of a dataset");
  fit->add_option("--in", o.lda_fit.in)->required()->check(CLI::ExistingFile);
  fit->add_option("--out", o.lda_fit.out)->required();
  fit->add_option("--lda-k", o.lda_fit.k, "number of topics")->check(CLI::PositiveNumber);
  fit->add_option("--alpha", o.lda_fit.alpha);
  fit->add_option("--beta", o.lda_fit.beta);
  fit->add_option("--iterations", o.lda_fit.iterations);
  fit->add_option("--seed", o.lda_fit.seed);
  fit->add_option("--stopwords", o.lda_fit.stopwords)->check(CLI::ExistingFile);
  auto* infer_cmd = lda->add_subcommand("infer", "topic vector of a text or of every instance");
  infer_cmd->add_option("--model", o.lda_infer.model)->required()->check(CLI::ExistingFile);
  auto* text_opt = infer_cmd->add_option("--text", o.lda_infer.text);
  infer_cmd->add_option("--in", o.lda_infer.in)->check(CLI::ExistingFile)->excludes(text_opt);
  infer_cmd->add_option("--out", o.lda_infer.out);
  infer_cmd->add_option("--fold-in", o.lda_infer.fold_in);
  auto* lda_score = lda->add_subcommand("score", "topic relevance of two texts");
  lda_score->add_option("--model", o.lda_score.model)->required()->check(CLI::ExistingFile);
  lda_score->add_option("--a", o.lda_score.a)->required();
  lda_score->add_option("--b", o.lda_score.b)->required();
  lda_score->add_option("--fold-in", o.lda_score.fold_in);

  auto* score_cmd = app.add_subcommand("score", "attach both rewards to candidates");
  score_cmd->add_option("--in", o.score.in, "the dataset the candidates were drawn for")
      ->required()
      ->check(CLI::ExistingFile);
  score_cmd->add_option("--candidates", o.score.candidates)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--lda-model", o.score.lda_model)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--out", o.score.out)->required();
  score_cmd->add_option("--fold-in", o.score.fold_in);
  o.score.backend.attach(*score_cmd);

  auto* prefs = app.add_subcommand("build-prefs", "select chosen/rejected pairs");
  prefs->add_option("--in", o.prefs.in)->required()->check(CLI::ExistingFile);
  prefs->add_option("--scored", o.prefs.scored)->required()->check(CLI::ExistingFile);
  prefs->add_option("--out", o.prefs.out)->required();
  prefs->add_option("--skips", o.prefs.skips);
  auto* r1 = prefs->add_flag("--reward1-only", o.prefs.reward1_only);
  prefs->add_flag("--reward2-only", o.prefs.reward2_only)->excludes(r1);

  auto* sft = app.add_subcommand("export-sft", "write prompt/completion records");
  sft->add_option("--in", o.sft.in)->required()->check(CLI::ExistingFile);
  sft->add_option("--out", o.sft.out)->required();

  auto* eval = app.add_subcommand("evaluate", "accuracy and macro-F1 on a test set");
  eval->add_option("--in", o.evaluate.in)->required()->check(CLI::ExistingFile);
  eval->add_option("--predictions", o.evaluate.predictions, "score a saved predictions file")
      ->check(CLI::ExistingFile);
  eval->add_option("--save-predictions", o.evaluate.save_predictions);
  eval->add_option("--json", o.evaluate.json, "also write the report as JSON");
  o.evaluate.backend.attach(*eval);

  auto* pipe = app.add_subcommand("pipeline", "run every stage and write a manifest");
  pipe->add_option("--in", o.pipeline.in)->check(CLI::ExistingFile);
  pipe->add_option("--out-dir", o.pipeline.out_dir);
  pipe->add_option("--setting", o.pipeline.setting)->check(CLI::IsMember({"standard", "balanced"}));
  pipe->add_option("--seed", o.pipeline.seed, "balancing seed");
  pipe->add_option("--n", o.pipeline.n, "candidates per instance")->check(CLI::PositiveNumber);
  pipe->add_option("--lda-k", o.pipeline.lda_k, "number of topics")->check(CLI::PositiveNumber);
  pipe->add_option("--timestamp", o.pipeline.timestamp, "manifest created_at (default: now)");
  auto* p1 = pipe->add_flag("--reward1-only", o.pipeline.reward1_only);
  pipe->add_flag("--reward2-only", o.pipeline.reward2_only)->excludes(p1);
  o.pipeline.backend.attach(*pipe);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (!args.empty()) err << "error: " << e.what() << "\n";
    err << app.help();
    return kExitUsage;
  }

  const auto previous = log::level();
  if (o.verbose) log::set_level(log::Level::info);
  if (o.quiet) log::set_level(log::Level::error);

  struct Command {
    CLI::App* app;
    std::string stage;
    std::function<void()> fn;
  };
  const std::vector<Command> commands{
      {stats, "stats", [&] { cmd_stats(o, out); }},
      {balance_cmd, "balance", [&] { cmd_balance(o, out); }},
      {merge, "merge", [&] { cmd_merge(o, out); }},
      {augment_cmd, "augment", [&] { cmd_augment(o, out); }},
      {fit, "lda fit", [&] { cmd_lda_fit(o, out); }},
      {infer_cmd, "lda infer", [&] { cmd_lda_infer(o, out); }},
      {lda_score, "lda score", [&] { cmd_lda_score(o, out); }},
      {score_cmd, "score", [&] { cmd_score(o, out); }},
      {prefs, "build-prefs", [&] { cmd_build_prefs(o, out); }},
      {sft, "export-sft", [&] { cmd_export_sft(o, out); }},
      {eval, "evaluate", [&] { cmd_evaluate(o, out, err); }},
      {pipe, "pipeline", [&] { cmd_pipeline(o, out); }},
  };

  int code = kExitOk;
  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      c.fn();
    } catch (const StageError& e) {
      err << "error: " << e.what() << "\n";
      code = kExitFailure;
    } catch (const std::exception& e) {
      err << "error: stage '" << c.stage << "' failed: " << e.what() << "\n";
      code = kExitFailure;
    }
    break;
  }
  log::set_level(previous);
  return code;
}

}  // namespace absaug::cli
