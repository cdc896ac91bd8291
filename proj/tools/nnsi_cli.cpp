// Command-line front end: data generation, corruption, training,
// scoring, NNSI selection, and the experiment/sweep harness.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nnsi/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

nnsi::ExperimentConfig load_config(const std::string& path,
                                   std::uint64_t seed) {
  nnsi::ExperimentConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw nnsi::Error("cannot open config file: " + path);
    json j;
    in >> j;
    cfg = nnsi::experiment_config_from_json(j);
  }
  cfg.bench.seed = seed;
  cfg.bench.synth.seed = seed;
  cfg.bench.noise.seed = seed;
  return cfg;
}

void write_reports(const std::vector<nnsi::ReportRow>& rows,
                   const nnsi::ExperimentConfig& cfg, std::uint64_t seed,
                   const std::string& out_dir) {
  fs::create_directories(out_dir);
  nnsi::append_report_jsonl(rows, out_dir + "/report.jsonl");
  nnsi::write_report_csv(rows, out_dir + "/summary.csv");
  nnsi::write_manifest(nnsi::experiment_config_to_json(cfg), seed,
                       out_dir + "/manifest.json");
  std::cout << rows.size() << " report rows -> " << out_dir << "\n";
}

struct ModelArtifact {
  nnsi::Vectorizer vectorizer;
  nnsi::LinearModel model;
  std::vector<std::string> label_names;
};

void save_artifact(const ModelArtifact& artifact, const std::string& path) {
  json j;
  j["version"] = 1;
  j["vectorizer"] = artifact.vectorizer.to_json();
  j["model"] = nnsi::model_to_json(artifact.model);
  j["label_names"] = artifact.label_names;
  std::ofstream out(path);
  if (!out) throw nnsi::Error("cannot write model artifact: " + path);
  out << j.dump() << "\n";
}

ModelArtifact load_artifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nnsi::Error("cannot open model artifact: " + path);
  json j;
  in >> j;
  if (j.at("version").get<int>() != 1)
    throw nnsi::Error("unsupported model artifact version");
  return {nnsi::Vectorizer::from_json(j.at("vectorizer")),
          nnsi::model_from_json(j.at("model")),
          j.at("label_names").get<std::vector<std::string>>()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NNSI weak-supervision toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // accept global flags after the subcommand

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  app.add_option("--config", config_path, "JSON config file")
      ->expected(1);
  app.add_option("--seed", seed, "master random seed");
  app.add_option("--out", out_dir, "output directory");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
  std::string gen_out = "corpus.jsonl";
  gen->add_option("--file", gen_out, "output corpus path");

  // corrupt
  auto* cor = app.add_subcommand("corrupt", "apply STT-style noise");
  std::string cor_in, cor_out = "corrupted.jsonl";
  cor->add_option("--in", cor_in, "input corpus")->required();
  cor->add_option("--file", cor_out, "output corpus path");

  // train
  auto* trn = app.add_subcommand("train", "fit vectorizer and classifier");
  std::string trn_in, trn_model = "model.json";
  std::string trn_manifest;
  trn->add_option("--in", trn_in, "labeled training corpus")->required();
  trn->add_option("--model", trn_model, "model artifact path");
  trn->add_option("--labels", trn_manifest, "label manifest file");

  // score
  auto* sco = app.add_subcommand("score", "score a corpus with a model");
  std::string sco_in, sco_model = "model.json", sco_out = "scores.jsonl";
  sco->add_option("--in", sco_in, "corpus to score")->required();
  sco->add_option("--model", sco_model, "model artifact path");
  sco->add_option("--file", sco_out, "output scores path");

  // select
  auto* sel = app.add_subcommand("select", "run NNSI selection and labeling");
  std::string sel_labeled, sel_unlabeled, sel_model = "model.json";
  std::string sel_out = "selection";
  sel->add_option("--labeled", sel_labeled, "labeled corpus")->required();
  sel->add_option("--unlabeled", sel_unlabeled, "unlabeled corpus")->required();
  sel->add_option("--model", sel_model, "model artifact path");
  sel->add_option("--base", sel_out, "selection output base path");

  auto* exp = app.add_subcommand("experiment", "condition comparison run");
  auto* swp = app.add_subcommand("sweep-pool", "unlabeled pool-size sweep");
  auto* sws = app.add_subcommand("sweep-split", "labeled-fraction sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    nnsi::ExperimentConfig cfg = load_config(config_path, seed);

    if (gen->parsed()) {
      nnsi::Corpus corpus = nnsi::generate(cfg.bench.synth);
      nnsi::save_jsonl(corpus, gen_out);
      std::cout << corpus.size() << " samples, " << corpus.num_classes()
                << " intents -> " << gen_out << "\n";
    } else if (cor->parsed()) {
      nnsi::Corpus corpus = nnsi::load_jsonl(cor_in);
      nnsi::NoiseSpec noise = cfg.bench.noise;
      if (noise.word_drop_rate == 0 && noise.word_substitution_rate == 0 &&
          noise.character_corruption_rate == 0 &&
          noise.homophone_swap_rate == 0)
        noise = nnsi::default_stt_profile(seed);
      nnsi::save_jsonl(nnsi::corrupt_corpus(corpus, noise), cor_out);
      std::cout << corpus.size() << " samples corrupted -> " << cor_out
                << "\n";
    } else if (trn->parsed()) {
      std::optional<std::string> manifest;
      if (!trn_manifest.empty()) manifest = trn_manifest;
      nnsi::Corpus corpus = nnsi::load_jsonl(trn_in, manifest);
      std::vector<std::string> texts;
      for (const auto& s : corpus.samples) texts.push_back(s.text);
      nnsi::Vectorizer vectorizer =
          nnsi::Vectorizer::fit(texts, cfg.bench.vectorizer);
      nnsi::LinearModel model = nnsi::train(
          nnsi::transform_all(vectorizer, corpus), nnsi::labels_of(corpus),
          corpus.num_classes(), cfg.bench.hyper);
      save_artifact({vectorizer, model, corpus.label_names}, trn_model);
      std::cout << "trained on " << corpus.size() << " samples, final loss "
                << model.loss_history.back() << " -> " << trn_model << "\n";
    } else if (sco->parsed()) {
      ModelArtifact artifact = load_artifact(sco_model);
      nnsi::Corpus corpus = nnsi::load_jsonl(sco_in);
      std::ofstream out(sco_out);
      if (!out) throw nnsi::Error("cannot write scores: " + sco_out);
      for (const auto& s : corpus.samples) {
        nnsi::ScoreVector scores =
            nnsi::score(artifact.model, artifact.vectorizer.transform(s.text));
        json rec;
        rec["id"] = s.id;
        rec["scores"] = scores;
        rec["predicted"] = artifact.label_names.at(nnsi::argmax(scores));
        rec["margin"] = nnsi::ambiguity(scores);
        out << rec.dump() << "\n";
      }
      std::cout << corpus.size() << " samples scored -> " << sco_out << "\n";
    } else if (sel->parsed()) {
      ModelArtifact artifact = load_artifact(sel_model);
      nnsi::Corpus labeled = nnsi::load_jsonl(sel_labeled);
      nnsi::Corpus unlabeled = nnsi::load_jsonl(sel_unlabeled);
      labeled.label_names = artifact.label_names;
      unlabeled.label_names = artifact.label_names;
      nnsi::NnsiSelection selection =
          nnsi::run_nnsi(labeled, unlabeled, artifact.model,
                         artifact.vectorizer, cfg.bench.nnsi);
      nnsi::save_selection(selection, labeled, cfg.bench.nnsi, sel_out);
      std::cout << selection.accepted.size() << " accepted, "
                << selection.rejected.size() << " rejected, theta "
                << selection.theta << " -> " << sel_out << ".jsonl\n";
    } else if (exp->parsed()) {
      write_reports(nnsi::experiment(cfg), cfg, seed, out_dir);
    } else if (swp->parsed()) {
      write_reports(nnsi::pool_size_sweep(cfg), cfg, seed, out_dir);
    } else if (sws->parsed()) {
      write_reports(nnsi::split_sweep(cfg), cfg, seed, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
