#include "absaug/pipeline.hpp"

#include <set>

#include "absaug/augmenter.hpp"
#include "absaug/balancer.hpp"
#include "absaug/corpus.hpp"
#include "absaug/exporter.hpp"
#include "absaug/hashing.hpp"
#include "absaug/jsonl.hpp"
#include "absaug/log.hpp"
#include "absaug/preference.hpp"
#include "absaug/reward.hpp"
#include "absaug/topic_model.hpp"

namespace absaug {
namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    log::info(std::string("stage ") + name);
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

nlohmann::ordered_json counts_json(const LabelCounts& c) {
  nlohmann::ordered_json j;
  for (Polarity p : kPolarities) j[std::string(to_string(p))] = c[p];
  return j;
}

std::size_t count_lines(std::string_view bytes) {
  return static_cast<std::size_t>(std::count(bytes.begin(), bytes.end(), '\n'));
}

DatasetDigest digest(const std::filesystem::path& path, std::string_view bytes) {
  return {path.filename().string(), sha256_hex(bytes), count_lines(bytes)};
}

}  // namespace

PipelineFiles PipelineFiles::in(const std::filesystem::path& dir) {
  return {dir / "base.jsonl",        dir / "candidates.jsonl", dir / "lda_model.json",
          dir / "scored.jsonl",      dir / "preferences.jsonl", dir / "skips.jsonl",
          dir / "merged.jsonl",      dir / "sft.jsonl",         dir / "manifest.json"};
}

std::vector<std::string> lda_corpus(const Dataset& d) {
  std::vector<std::string> corpus;
  std::set<std::string, std::less<>> seen;
  for (const auto& inst : d.instances) {
    if (inst.origin == Origin::original && seen.insert(inst.sentence).second) {
      corpus.push_back(inst.sentence);
    }
  }
  return corpus;
}

PipelineSummary run_pipeline(const PipelineConfig& config, const Gateway& augmenter,
                             const Gateway& reward_model, std::string timestamp) {
  stage("config", [&] { config.validate(); });

  PipelineSummary summary;
  summary.files = PipelineFiles::in(config.output_dir);
  const auto& files = summary.files;
  ManifestInput manifest;

  const std::string input_bytes = stage("load", [&] { return read_file(config.input); });
  const Dataset original = stage("load", [&] {
    auto d = load_dataset(config.input, Split::train);
    if (d.empty()) throw DataError("input dataset is empty");
    return d;
  });
  manifest.datasets["input"] = {config.input.filename().string(), sha256_hex(input_bytes),
                                original.size()};

  const Dataset base = stage("balance", [&] {
    Dataset b = config.setting == Setting::balanced ? balance(original, config.seed) : original;
    save_jsonl(b, files.base);
    return b;
  });
  summary.base_size = base.size();

  const auto pools = stage("augment", [&] {
    auto p = augment_all(base, config.n_candidates, augmenter, config.augmenter.sampling);
    write_file(files.candidates, write_candidates_jsonl(p));
    return p;
  });

  const LdaModel lda = stage("lda", [&] {
    const auto corpus = lda_corpus(original);
    Tokenizer tokenizer =
        config.stopwords.empty() ? Tokenizer() : Tokenizer::from_stopword_file(config.stopwords);
    auto model = fit_lda(corpus, config.lda, std::move(tokenizer));
    model.save(files.lda_model);
    return model;
  });

  const auto scored = stage("score", [&] {
    auto s = score_all(pools, lda, reward_model, RewardOptions{config.fold_in_iterations});
    write_file(files.scored, write_scored_jsonl(s));
    return s;
  });

  std::vector<std::optional<PreferencePair>> pair_for_pool(base.size());
  nlohmann::ordered_json branches = {{"normal", 0}, {"chosen_empty", 0}, {"rejected_empty", 0}};
  stage("build-prefs", [&] {
    std::vector<PreferencePair> pairs;
    std::string skips;
    for (std::size_t i = 0; i < scored.size(); ++i) {
      auto result = build_pair(scored[i], build_prompt(base.instances[i]), config.selection);
      if (auto* pair = std::get_if<PreferencePair>(&result)) {
        auto& slot = branches[std::string(to_string(pair->branch))];
        slot = slot.get<std::size_t>() + 1;
        pair_for_pool[i] = *pair;
        pairs.push_back(std::move(*pair));
      } else {
        const auto& skip = std::get<Skip>(result);
        append_jsonl(skips, nlohmann::ordered_json{{"source_id", skip.source_id},
                                                   {"pool", i},
                                                   {"reason", skip.reason}});
      }
    }
    summary.pairs = pairs.size();
    summary.skipped = base.size() - pairs.size();
    write_file(files.preferences, export_preferences(pairs));
    write_file(files.skips, skips);
  });

  const Dataset merged = stage("export", [&] {
    Dataset augmented{base.split, base.name, {}};
    augmented.instances.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      const auto& src = base.instances[i];
      const auto& pool = pools[i];
      const AugmentedCandidate* pick = nullptr;
      if (pair_for_pool[i] && pool[pair_for_pool[i]->chosen_index].valid) {
        pick = &pool[pair_for_pool[i]->chosen_index];
      } else {
        for (const auto& c : pool) {
          if (c.valid) {
            pick = &c;
            break;
          }
        }
      }
      Instance inst{src.sentence, src.aspect, src.label, src.source_id, Origin::augmented};
      if (pick) {
        inst.sentence = pick->text;
      } else {
        ++summary.augmentation_fallbacks;
        log::warn("no valid candidate for '" + src.source_id + "'; reusing the source sentence");
      }
      augmented.instances.push_back(std::move(inst));
    }
    auto m = merge_augmented(base, augmented, config.setting);
    save_jsonl(m, files.merged);
    write_file(files.sft, export_sft(m));
    return m;
  });
  summary.sft_records = merged.size();

  stage("manifest", [&] {
    manifest.config = describe(config);
    manifest.seeds["balance"] = static_cast<std::int64_t>(config.seed);
    manifest.seeds["lda"] = static_cast<std::int64_t>(config.lda.seed);
    manifest.seeds["generation"] = config.augmenter.sampling.seed;
    manifest.model_ids["augmenter"] = augmenter.backend_id();
    manifest.model_ids["reward_model"] = reward_model.backend_id();
    for (const auto& [role, path] :
         {std::pair{"base", files.base}, {"candidates", files.candidates},
          {"lda_model", files.lda_model}, {"scored", files.scored},
          {"preferences", files.preferences}, {"merged", files.merged}, {"sft", files.sft}}) {
      manifest.datasets[role] = digest(path, read_file(path));
    }
    for (const auto& [role, backend] :
         {std::pair{"augmenter_script", &config.augmenter}, {"reward_model_script", &config.reward_model}}) {
      if (backend->kind == BackendKind::mock) {
        manifest.datasets[role] = digest(backend->mock_script, read_file(backend->mock_script));
      }
    }

    std::size_t invalid = 0;
    for (const auto& pool : pools) {
      for (const auto& c : pool) invalid += c.valid ? 0 : 1;
    }
    manifest.counts["input_labels"] = counts_json(label_counts(original));
    manifest.counts["base_labels"] = counts_json(label_counts(base));
    manifest.counts["merged_labels"] = counts_json(label_counts(merged));
    manifest.counts["candidates"] = base.size() * config.n_candidates;
    manifest.counts["invalid_candidates"] = invalid;
    manifest.counts["pairs"] = summary.pairs;
    manifest.counts["skipped_pools"] = summary.skipped;
    manifest.counts["branches"] = branches;
    manifest.counts["augmentation_fallbacks"] = summary.augmentation_fallbacks;
    manifest.counts["sft_records"] = merged.size();
    manifest.timestamp = std::move(timestamp);
    write_file(files.manifest, export_manifest(manifest).dump(2) + "\n");
  });
  return summary;
}

}  // namespace absaug
