#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nnsi/classifier.hpp"
#include "nnsi/common.hpp"
#include "nnsi/corpus.hpp"
#include "nnsi/knn.hpp"
#include "nnsi/nnsi.hpp"
#include "nnsi/noise.hpp"
#include "nnsi/vectorize.hpp"

namespace nnsi {

struct ReportRow {
  std::string condition;     // baseline | nnsi | random_high | random_low
  std::string test_variant;  // clean | noisy
  std::string grid_param;    // none | pool_fraction | labeled_fraction
  double grid_value = 0;
  int repeat = 0;            // -1 marks a mean/stderr summary row
  double err = 0;
  double delta_err = 0;      // (err_baseline - err) / err_baseline
  int n_selected = 0;
  double selection_label_accuracy =
      std::numeric_limits<double>::quiet_NaN();
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
};

struct BenchmarkConfig {
  SynthSpec synth{33, 4, 0.10, 260, 0};
  NoiseSpec noise = default_stt_profile();
  SeverityMixture severity;
  SplitFractions fractions{0.07, 0.63, 0.30};
  VectorizerConfig vectorizer{1, 2, true, 3, 4, 2};
  TrainConfig hyper{1e-4, 200, 1e-5};
  NnsiConfig nnsi;
  std::uint64_t seed = 0;
};

// Clean labeled set, corrupted unlabeled pool (gold labels shadowed),
// and a clean/noisy test pair over the same held-out samples.
struct Benchmark {
  Corpus labeled;
  Corpus unlabeled;
  Corpus test_clean;
  Corpus test_noisy;
  std::vector<std::string> warnings;
};

inline Benchmark make_benchmark(const BenchmarkConfig& config) {
  SynthSpec synth = config.synth;
  synth.seed = hash_combine(config.seed, fnv1a("bench.synth"));
  // The generated corpus is intentionally not deduplicated: repeated
  // phrasings are what give the pool its near-duplicate density, and
  // each copy is corrupted independently downstream.
  Corpus corpus = generate(synth);

  SplitResult parts =
      split(corpus, config.fractions, hash_combine(config.seed, fnv1a("bench.split")));

  Benchmark bench;
  bench.labeled = std::move(parts.labeled);
  bench.test_clean = std::move(parts.test);
  bench.warnings = std::move(parts.warnings);

  NoiseSpec pool_noise = config.noise;
  pool_noise.seed = hash_combine(config.seed, fnv1a("bench.pool-noise"));
  bench.unlabeled = corrupt_corpus(parts.unlabeled, pool_noise, config.severity);

  NoiseSpec test_noise = config.noise;
  test_noise.seed = hash_combine(config.seed, fnv1a("bench.test-noise"));
  bench.test_noisy = corrupt_corpus(bench.test_clean, test_noise, config.severity);
  return bench;
}

inline std::vector<SparseVector> transform_all(const Vectorizer& vectorizer,
                                               const Corpus& corpus) {
  std::vector<SparseVector> out;
  out.reserve(corpus.size());
  for (const Sample& s : corpus.samples)
    out.push_back(vectorizer.transform(s.text));
  return out;
}

inline std::vector<int> labels_of(const Corpus& corpus) {
  std::vector<int> out;
  out.reserve(corpus.size());
  for (const Sample& s : corpus.samples) {
    if (!s.label) throw Error("labels_of: unlabeled sample '" + s.id + "'");
    out.push_back(*s.label);
  }
  return out;
}

// Fraction of test samples whose prediction differs from gold.
inline double evaluate(const LinearModel& model, const Vectorizer& vectorizer,
                       const Corpus& test) {
  if (test.samples.empty()) throw Error("evaluate: empty test set");
  std::size_t wrong = 0;
  for (const Sample& s : test.samples) {
    if (!s.label) throw Error("evaluate: test sample without label");
    if (predict(model, vectorizer.transform(s.text)) != *s.label) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(test.samples.size());
}

inline double relative_error_reduction(double err_baseline, double err) {
  return (err_baseline - err) / err_baseline;
}

// State shared across the conditions of one benchmark run: one
// baseline model, one score cache, one theta partition.
struct RunContext {
  Benchmark bench;
  Vectorizer vectorizer;
  LinearModel baseline;
  double err_clean = 0;
  double err_noisy = 0;
  std::map<std::string, ScoreVector> pool_scores;
  std::vector<std::string> high_ids;  // id-sorted
  std::vector<std::string> low_ids;
  double theta = 0;
  NnsiSelection selection;
  // audit against shadow gold labels
  double nnsi_label_accuracy = std::numeric_limits<double>::quiet_NaN();
  double baseline_high_accuracy = std::numeric_limits<double>::quiet_NaN();
};

inline RunContext prepare_run(Benchmark bench, const BenchmarkConfig& config) {
  RunContext ctx;
  ctx.bench = std::move(bench);

  std::vector<std::string> fit_texts;
  for (const Sample& s : ctx.bench.labeled.samples) fit_texts.push_back(s.text);
  for (const Sample& s : ctx.bench.unlabeled.samples)
    fit_texts.push_back(s.text);
  ctx.vectorizer = Vectorizer::fit(fit_texts, config.vectorizer);

  ctx.baseline = train(transform_all(ctx.vectorizer, ctx.bench.labeled),
                       labels_of(ctx.bench.labeled),
                       ctx.bench.labeled.num_classes(), config.hyper);
  ctx.err_clean = evaluate(ctx.baseline, ctx.vectorizer, ctx.bench.test_clean);
  ctx.err_noisy = evaluate(ctx.baseline, ctx.vectorizer, ctx.bench.test_noisy);

  std::vector<std::pair<std::string, SparseVector>> pool_vectors;
  for (const Corpus* corpus : {&ctx.bench.labeled, &ctx.bench.unlabeled})
    for (const Sample& s : corpus->samples) {
      SparseVector v = ctx.vectorizer.transform(s.text);
      ctx.pool_scores[s.id] = score(ctx.baseline, v);
      pool_vectors.push_back({s.id, std::move(v)});
    }

  std::map<std::string, ScoreVector> unlabeled_scores;
  std::vector<std::string> unlabeled_ids;
  for (const Sample& s : ctx.bench.unlabeled.samples) {
    unlabeled_ids.push_back(s.id);
    unlabeled_scores[s.id] = ctx.pool_scores.at(s.id);
  }

  const NnsiConfig& ncfg = config.nnsi;
  if (ncfg.theta_policy == ThetaPolicy::MedianOfUnlabeled) {
    std::vector<double> margins;
    for (const auto& [id, s] : unlabeled_scores)
      margins.push_back(ambiguity(s));
    ctx.theta = median_threshold(std::move(margins));
  } else {
    ctx.theta = ncfg.fixed_theta;
  }
  std::tie(ctx.high_ids, ctx.low_ids) =
      partition(unlabeled_scores, ctx.theta, ncfg.high_strict);

  NeighborIndex index = NeighborIndex::build(std::move(pool_vectors));
  auto neighbor_lists = index.precompute_all(ctx.high_ids, ncfg.neighbor_budget);
  ctx.selection =
      run_nnsi_core(ctx.pool_scores, neighbor_lists, unlabeled_ids, ncfg);

  // §-style audit: pseudo-label accuracy on the accepted set vs the
  // baseline argmax accuracy over the whole high-ambiguity set
  std::map<std::string, int> gold;
  for (const Sample& s : ctx.bench.unlabeled.samples)
    if (s.gold) gold[s.id] = *s.gold;
  if (!gold.empty() && !ctx.selection.accepted.empty()) {
    std::size_t nnsi_hits = 0, nnsi_total = 0;
    for (const NnsiRecord& r : ctx.selection.accepted) {
      auto it = gold.find(r.sample_id);
      if (it == gold.end()) continue;
      ++nnsi_total;
      if (r.assigned_label == it->second) ++nnsi_hits;
    }
    if (nnsi_total > 0)
      ctx.nnsi_label_accuracy =
          static_cast<double>(nnsi_hits) / static_cast<double>(nnsi_total);
    std::size_t base_hits = 0, base_total = 0;
    for (const auto& id : ctx.high_ids) {
      auto it = gold.find(id);
      if (it == gold.end()) continue;
      ++base_total;
      if (argmax(ctx.pool_scores.at(id)) == it->second) ++base_hits;
    }
    if (base_total > 0)
      ctx.baseline_high_accuracy =
          static_cast<double>(base_hits) / static_cast<double>(base_total);
  }
  return ctx;
}

namespace detail {

struct Augmentation {
  std::vector<std::pair<std::string, int>> added;  // (sample id, label)
};

// baseline training set plus the added (text, label) pairs, texts
// taken verbatim from the unlabeled pool
inline LinearModel retrain_augmented(const RunContext& ctx,
                                     const Augmentation& aug,
                                     const TrainConfig& hyper) {
  std::map<std::string, const Sample*> pool_by_id;
  for (const Sample& s : ctx.bench.unlabeled.samples) pool_by_id[s.id] = &s;

  std::vector<SparseVector> vectors =
      transform_all(ctx.vectorizer, ctx.bench.labeled);
  std::vector<int> labels = labels_of(ctx.bench.labeled);
  for (const auto& [id, label] : aug.added) {
    auto it = pool_by_id.find(id);
    if (it == pool_by_id.end())
      throw Error("retrain: added id not in pool: " + id);
    vectors.push_back(ctx.vectorizer.transform(it->second->text));
    labels.push_back(label);
  }
  return train(vectors, labels, ctx.bench.labeled.num_classes(), hyper);
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// sample-stddev / sqrt(n)
inline double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) /
         std::sqrt(static_cast<double>(v.size()));
}

}  // namespace detail

struct ExperimentConfig {
  BenchmarkConfig bench;
  std::vector<std::string> conditions = {"baseline", "nnsi", "random_high",
                                         "random_low"};
  int repeats = 3;        // random-condition draws per benchmark
  int num_seeds = 1;      // independent benchmark instances
  std::vector<double> pool_grid = {0.25, 0.5, 1.0};
  std::vector<double> fraction_grid = {0.01, 0.05, 0.25};
  int sweep_repeats = 10;
};

// Table-style comparison on one benchmark instance. Baseline and NNSI
// rows use `repeat`; random conditions add per-draw rows plus a
// repeat=-1 summary row carrying mean err and its standard error.
inline std::vector<ReportRow> run_conditions(const RunContext& ctx,
                                             const ExperimentConfig& config,
                                             const std::string& grid_param,
                                             double grid_value, int repeat) {
  std::vector<ReportRow> rows;
  auto has = [&](const char* name) {
    return std::find(config.conditions.begin(), config.conditions.end(),
                     name) != config.conditions.end();
  };
  auto emit = [&](const std::string& condition, const std::string& variant,
                  int rep, double err, double err_base, int n_selected,
                  double sel_acc, double se) {
    ReportRow row;
    row.condition = condition;
    row.test_variant = variant;
    row.grid_param = grid_param;
    row.grid_value = grid_value;
    row.repeat = rep;
    row.err = err;
    row.delta_err = relative_error_reduction(err_base, err);
    row.n_selected = n_selected;
    row.selection_label_accuracy = sel_acc;
    row.stderr_ = se;
    rows.push_back(std::move(row));
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (has("baseline")) {
    emit("baseline", "clean", repeat, ctx.err_clean, ctx.err_clean, 0, nan, nan);
    emit("baseline", "noisy", repeat, ctx.err_noisy, ctx.err_noisy, 0, nan, nan);
  }

  const int n_selected = static_cast<int>(ctx.selection.accepted.size());
  if (has("nnsi")) {
    if (n_selected == 0) {
      emit("nnsi", "clean", repeat, ctx.err_clean, ctx.err_clean, 0, nan, nan);
      emit("nnsi", "noisy", repeat, ctx.err_noisy, ctx.err_noisy, 0, nan, nan);
    } else {
      detail::Augmentation aug;
      for (const NnsiRecord& r : ctx.selection.accepted)
        aug.added.push_back({r.sample_id, r.assigned_label});
      LinearModel model =
          detail::retrain_augmented(ctx, aug, ctx.baseline.hyper);
      emit("nnsi", "clean", repeat,
           evaluate(model, ctx.vectorizer, ctx.bench.test_clean),
           ctx.err_clean, n_selected, ctx.nnsi_label_accuracy, nan);
      emit("nnsi", "noisy", repeat,
           evaluate(model, ctx.vectorizer, ctx.bench.test_noisy),
           ctx.err_noisy, n_selected, ctx.nnsi_label_accuracy, nan);
    }
  }

  // Random draws reuse the NNSI run's theta partition and match its
  // accepted count; labels are the baseline classifier's argmax.
  for (const char* which : {"random_high", "random_low"}) {
    if (!has(which)) continue;
    const bool high = std::string(which) == "random_high";
    const std::vector<std::string>& side = high ? ctx.high_ids : ctx.low_ids;
    int n_target = n_selected;
    if (n_target > static_cast<int>(side.size()))
      n_target = static_cast<int>(side.size());  // clamp, warning upstream
    std::vector<double> errs_clean, errs_noisy;
    for (int r = 0; r < config.repeats; ++r) {
      if (n_target == 0) {
        errs_clean.push_back(ctx.err_clean);
        errs_noisy.push_back(ctx.err_noisy);
      } else {
        std::vector<std::string> draw = side;
        Rng rng(hash_combine(config.bench.seed,
                             hash_combine(fnv1a(which),
                                          static_cast<std::uint64_t>(r))));
        rng.shuffle(draw);
        draw.resize(n_target);
        detail::Augmentation aug;
        std::size_t hits = 0, with_gold = 0;
        std::map<std::string, int> gold;
        for (const Sample& s : ctx.bench.unlabeled.samples)
          if (s.gold) gold[s.id] = *s.gold;
        for (const auto& id : draw) {
          int label = argmax(ctx.pool_scores.at(id));
          aug.added.push_back({id, label});
          auto it = gold.find(id);
          if (it != gold.end()) {
            ++with_gold;
            if (label == it->second) ++hits;
          }
        }
        double draw_acc = with_gold
                              ? static_cast<double>(hits) / with_gold
                              : nan;
        LinearModel model =
            detail::retrain_augmented(ctx, aug, ctx.baseline.hyper);
        double ec = evaluate(model, ctx.vectorizer, ctx.bench.test_clean);
        double en = evaluate(model, ctx.vectorizer, ctx.bench.test_noisy);
        errs_clean.push_back(ec);
        errs_noisy.push_back(en);
        emit(which, "clean", r, ec, ctx.err_clean, n_target, draw_acc, nan);
        emit(which, "noisy", r, en, ctx.err_noisy, n_target, draw_acc, nan);
      }
    }
    emit(which, "clean", -1, detail::mean(errs_clean), ctx.err_clean, n_target,
         nan, detail::standard_error(errs_clean));
    emit(which, "noisy", -1, detail::mean(errs_noisy), ctx.err_noisy, n_target,
         nan, detail::standard_error(errs_noisy));
  }
  return rows;
}

// Table-1-style experiment over num_seeds independent benchmark
// instances; `repeat` indexes the instance.
inline std::vector<ReportRow> experiment(const ExperimentConfig& config) {
  std::vector<ReportRow> rows;
  for (int i = 0; i < config.num_seeds; ++i) {
    BenchmarkConfig bench_cfg = config.bench;
    bench_cfg.seed = hash_combine(config.bench.seed,
                                  hash_combine(fnv1a("experiment.seed"),
                                               static_cast<std::uint64_t>(i)));
    RunContext ctx = prepare_run(make_benchmark(bench_cfg), bench_cfg);
    ExperimentConfig cfg = config;
    cfg.bench = bench_cfg;
    auto seed_rows = run_conditions(ctx, cfg, "none", 0.0, i);
    rows.insert(rows.end(), seed_rows.begin(), seed_rows.end());
  }
  return rows;
}

// Unlabeled pool-size sweep: subsample the pool, recompute theta on
// the subsample, rerun baseline + NNSI.
inline std::vector<ReportRow> pool_size_sweep(const ExperimentConfig& config) {
  std::vector<ReportRow> rows;
  for (double fraction : config.pool_grid) {
    if (fraction < 0) throw Error("pool_size_sweep: negative fraction");
    for (int i = 0; i < config.num_seeds; ++i) {
      BenchmarkConfig bench_cfg = config.bench;
      bench_cfg.seed = hash_combine(config.bench.seed,
                                    hash_combine(fnv1a("pool-sweep.seed"),
                                                 static_cast<std::uint64_t>(i)));
      Benchmark bench = make_benchmark(bench_cfg);

      if (fraction == 0.0) {
        // degenerate point: no pool, baseline only
        ExperimentConfig cfg = config;
        cfg.bench = bench_cfg;
        cfg.conditions = {"baseline"};
        Benchmark tiny = bench;  // keep 2 samples so the index can build
        tiny.unlabeled.samples.resize(
            std::min<std::size_t>(2, tiny.unlabeled.samples.size()));
        RunContext ctx = prepare_run(std::move(tiny), bench_cfg);
        auto r = run_conditions(ctx, cfg, "pool_fraction", fraction, i);
        rows.insert(rows.end(), r.begin(), r.end());
        continue;
      }

      std::size_t keep = static_cast<std::size_t>(
          std::llround(fraction * bench.unlabeled.samples.size()));
      keep = std::min(keep, bench.unlabeled.samples.size());
      std::vector<std::size_t> order(bench.unlabeled.samples.size());
      for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
      std::uint64_t frac_bits;
      std::memcpy(&frac_bits, &fraction, sizeof(frac_bits));
      Rng rng(hash_combine(bench_cfg.seed,
                           hash_combine(fnv1a("pool-sweep.subsample"),
                                        frac_bits)));
      rng.shuffle(order);
      order.resize(keep);
      std::sort(order.begin(), order.end());
      Corpus sub;
      sub.label_names = bench.unlabeled.label_names;
      for (std::size_t j : order)
        sub.samples.push_back(bench.unlabeled.samples[j]);
      bench.unlabeled = std::move(sub);

      ExperimentConfig cfg = config;
      cfg.bench = bench_cfg;
      cfg.conditions = {"baseline", "nnsi"};
      RunContext ctx = prepare_run(std::move(bench), bench_cfg);
      auto r = run_conditions(ctx, cfg, "pool_fraction", fraction, i);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  }
  return rows;
}

// Labeled-fraction sweep with repeated random splits: labeled part
// keeps clean text, the unlabeled pool and the noisy test variant are
// corrupted. `fraction` is the share of the non-test data that stays
// labeled.
inline std::vector<ReportRow> split_sweep(const ExperimentConfig& config) {
  std::vector<ReportRow> rows;
  const double test_fraction = config.bench.fractions.test;
  for (double fraction : config.fraction_grid) {
    if (fraction <= 0 || fraction >= 1)
      throw Error("split_sweep: fractions must lie in (0,1)");
    for (int r = 0; r < config.sweep_repeats; ++r) {
      BenchmarkConfig bench_cfg = config.bench;
      std::uint64_t frac_bits;
      std::memcpy(&frac_bits, &fraction, sizeof(frac_bits));
      bench_cfg.seed = hash_combine(
          config.bench.seed,
          hash_combine(fnv1a("split-sweep"),
                       hash_combine(frac_bits, static_cast<std::uint64_t>(r))));
      bench_cfg.fractions.labeled = fraction * (1.0 - test_fraction);
      bench_cfg.fractions.unlabeled = (1.0 - fraction) * (1.0 - test_fraction);
      bench_cfg.fractions.test = test_fraction;

      ExperimentConfig cfg = config;
      cfg.bench = bench_cfg;
      cfg.conditions = {"baseline", "nnsi"};
      RunContext ctx = prepare_run(make_benchmark(bench_cfg), bench_cfg);
      auto seed_rows =
          run_conditions(ctx, cfg, "labeled_fraction", fraction, r);
      rows.insert(rows.end(), seed_rows.begin(), seed_rows.end());
    }
  }
  return rows;
}

// ---- report I/O ----

inline nlohmann::json row_to_json(const ReportRow& row) {
  nlohmann::json j;
  j["condition"] = row.condition;
  j["test_variant"] = row.test_variant;
  j["grid_param"] = row.grid_param;
  j["grid_value"] = row.grid_value;
  j["repeat"] = row.repeat;
  j["err"] = row.err;
  j["delta_err"] = row.delta_err;
  j["n_selected"] = row.n_selected;
  if (std::isfinite(row.selection_label_accuracy))
    j["selection_label_accuracy"] = row.selection_label_accuracy;
  if (std::isfinite(row.stderr_)) j["stderr"] = row.stderr_;
  return j;
}

inline void append_report_jsonl(const std::vector<ReportRow>& rows,
                                const std::string& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot write report: " + path);
  for (const ReportRow& row : rows) out << row_to_json(row).dump() << "\n";
}

inline void write_report_csv(const std::vector<ReportRow>& rows,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write report: " + path);
  out << "condition,test_variant,grid_param,grid_value,repeat,err,delta_err,"
         "n_selected,selection_label_accuracy,stderr\n";
  out.precision(12);
  auto cell = [&](double v) {
    if (std::isfinite(v))
      out << v;
    // NaN prints as an empty cell
  };
  std::vector<ReportRow> sorted = rows;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     return std::tie(a.condition, a.grid_param, a.grid_value,
                                     a.repeat, a.test_variant) <
                            std::tie(b.condition, b.grid_param, b.grid_value,
                                     b.repeat, b.test_variant);
                   });
  for (const ReportRow& row : sorted) {
    out << row.condition << "," << row.test_variant << "," << row.grid_param
        << "," << row.grid_value << "," << row.repeat << "," << row.err << ","
        << row.delta_err << "," << row.n_selected << ",";
    cell(row.selection_label_accuracy);
    out << ",";
    cell(row.stderr_);
    out << "\n";
  }
}

inline void write_manifest(const nlohmann::json& config_json,
                           std::uint64_t seed, const std::string& path) {
  nlohmann::json manifest;
  manifest["config"] = config_json;
  manifest["config_hash"] = fnv1a(config_json.dump());
  manifest["seed"] = seed;
  manifest["artifact_versions"] = {{"model", 1}, {"vectorizer", 1}};
  auto now = std::chrono::system_clock::now();
  manifest["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest: " + path);
  out << manifest.dump(2) << "\n";
}

// ---- config (de)serialization for the CLI ----

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["synth"] = {{"num_intents", c.bench.synth.num_intents},
                {"templates_per_intent", c.bench.synth.templates_per_intent},
                {"paraphrase_rate", c.bench.synth.paraphrase_rate},
                {"samples_per_intent", c.bench.synth.samples_per_intent}};
  j["noise"] = {{"word_drop_rate", c.bench.noise.word_drop_rate},
                {"word_substitution_rate", c.bench.noise.word_substitution_rate},
                {"character_corruption_rate",
                 c.bench.noise.character_corruption_rate},
                {"homophone_swap_rate", c.bench.noise.homophone_swap_rate}};
  j["severity"] = {{"heavy_fraction", c.bench.severity.heavy_fraction},
                   {"heavy_multiplier", c.bench.severity.heavy_multiplier},
                   {"light_multiplier", c.bench.severity.light_multiplier}};
  j["fractions"] = {{"labeled", c.bench.fractions.labeled},
                    {"unlabeled", c.bench.fractions.unlabeled},
                    {"test", c.bench.fractions.test}};
  j["vectorizer"] = {{"word_ngram_min", c.bench.vectorizer.word_ngram_min},
                     {"word_ngram_max", c.bench.vectorizer.word_ngram_max},
                     {"use_char_ngrams", c.bench.vectorizer.use_char_ngrams},
                     {"char_ngram_min", c.bench.vectorizer.char_ngram_min},
                     {"char_ngram_max", c.bench.vectorizer.char_ngram_max},
                     {"min_df", c.bench.vectorizer.min_df}};
  j["classifier"] = {{"lambda", c.bench.hyper.lambda},
                     {"max_iters", c.bench.hyper.max_iters},
                     {"tol", c.bench.hyper.tol}};
  j["nnsi"] = {{"neighbor_budget", c.bench.nnsi.neighbor_budget},
               {"theta_policy",
                c.bench.nnsi.theta_policy == ThetaPolicy::Fixed ? "fixed"
                                                                : "median"},
               {"fixed_theta", c.bench.nnsi.fixed_theta},
               {"high_strict", c.bench.nnsi.high_strict},
               {"stop_strict", c.bench.nnsi.stop_strict},
               {"gold_neighbor_scores", c.bench.nnsi.gold_neighbor_scores}};
  j["conditions"] = c.conditions;
  j["repeats"] = c.repeats;
  j["num_seeds"] = c.num_seeds;
  j["pool_grid"] = c.pool_grid;
  j["fraction_grid"] = c.fraction_grid;
  j["sweep_repeats"] = c.sweep_repeats;
  return j;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  auto get = [](const nlohmann::json& obj, const char* key, auto& target) {
    if (obj.contains(key)) target = obj.at(key).get<std::decay_t<decltype(target)>>();
  };
  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    get(s, "num_intents", c.bench.synth.num_intents);
    get(s, "templates_per_intent", c.bench.synth.templates_per_intent);
    get(s, "paraphrase_rate", c.bench.synth.paraphrase_rate);
    get(s, "samples_per_intent", c.bench.synth.samples_per_intent);
  }
  if (j.contains("noise")) {
    const auto& s = j.at("noise");
    get(s, "word_drop_rate", c.bench.noise.word_drop_rate);
    get(s, "word_substitution_rate", c.bench.noise.word_substitution_rate);
    get(s, "character_corruption_rate",
        c.bench.noise.character_corruption_rate);
    get(s, "homophone_swap_rate", c.bench.noise.homophone_swap_rate);
  }
  if (j.contains("severity")) {
    const auto& s = j.at("severity");
    get(s, "heavy_fraction", c.bench.severity.heavy_fraction);
    get(s, "heavy_multiplier", c.bench.severity.heavy_multiplier);
    get(s, "light_multiplier", c.bench.severity.light_multiplier);
  }
  if (j.contains("fractions")) {
    const auto& s = j.at("fractions");
    get(s, "labeled", c.bench.fractions.labeled);
    get(s, "unlabeled", c.bench.fractions.unlabeled);
    get(s, "test", c.bench.fractions.test);
  }
  if (j.contains("vectorizer")) {
    const auto& s = j.at("vectorizer");
    get(s, "word_ngram_min", c.bench.vectorizer.word_ngram_min);
    get(s, "word_ngram_max", c.bench.vectorizer.word_ngram_max);
    get(s, "use_char_ngrams", c.bench.vectorizer.use_char_ngrams);
    get(s, "char_ngram_min", c.bench.vectorizer.char_ngram_min);
    get(s, "char_ngram_max", c.bench.vectorizer.char_ngram_max);
    get(s, "min_df", c.bench.vectorizer.min_df);
  }
  if (j.contains("classifier")) {
    const auto& s = j.at("classifier");
    get(s, "lambda", c.bench.hyper.lambda);
    get(s, "max_iters", c.bench.hyper.max_iters);
    get(s, "tol", c.bench.hyper.tol);
  }
  if (j.contains("nnsi")) {
    const auto& s = j.at("nnsi");
    get(s, "neighbor_budget", c.bench.nnsi.neighbor_budget);
    if (s.contains("theta_policy"))
      c.bench.nnsi.theta_policy =
          s.at("theta_policy").get<std::string>() == "fixed"
              ? ThetaPolicy::Fixed
              : ThetaPolicy::MedianOfUnlabeled;
    get(s, "fixed_theta", c.bench.nnsi.fixed_theta);
    get(s, "high_strict", c.bench.nnsi.high_strict);
    get(s, "stop_strict", c.bench.nnsi.stop_strict);
    get(s, "gold_neighbor_scores", c.bench.nnsi.gold_neighbor_scores);
  }
  get(j, "conditions", c.conditions);
  get(j, "repeats", c.repeats);
  get(j, "num_seeds", c.num_seeds);
  get(j, "pool_grid", c.pool_grid);
  get(j, "fraction_grid", c.fraction_grid);
  get(j, "sweep_repeats", c.sweep_repeats);
  return c;
}

}  // namespace nnsi
