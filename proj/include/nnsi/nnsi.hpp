#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nnsi/classifier.hpp"
#include "nnsi/common.hpp"
#include "nnsi/corpus.hpp"
#include "nnsi/knn.hpp"
#include "nnsi/vectorize.hpp"

namespace nnsi {

enum class ThetaPolicy { MedianOfUnlabeled, Fixed };

struct NnsiConfig {
  int neighbor_budget = 10;  // N
  ThetaPolicy theta_policy = ThetaPolicy::MedianOfUnlabeled;
  double fixed_theta = 0.0;
  // Boundary semantics: a sample is high-ambiguity iff margin < theta
  // (strict), and averaging stops at the first m with margin > theta
  // (strict). Both strict by default.
  bool high_strict = true;
  bool stop_strict = true;
  // Labeled neighbors contribute their classifier scores by default;
  // this switches them to gold one-hot vectors instead.
  bool gold_neighbor_scores = false;

  std::uint64_t config_hash() const {
    std::uint64_t h = fnv1a("nnsi-config-v1");
    h = hash_combine(h, static_cast<std::uint64_t>(neighbor_budget));
    h = hash_combine(h, static_cast<std::uint64_t>(theta_policy));
    std::uint64_t bits;
    std::memcpy(&bits, &fixed_theta, sizeof(bits));
    h = hash_combine(h, bits);
    h = hash_combine(h, static_cast<std::uint64_t>(high_strict));
    h = hash_combine(h, static_cast<std::uint64_t>(stop_strict));
    h = hash_combine(h, static_cast<std::uint64_t>(gold_neighbor_scores));
    return h;
  }
};

// Margin between the largest and second-largest score. Zero iff the
// top two scores tie.
inline double ambiguity(const ScoreVector& s) {
  if (s.size() < 2) throw Error("ambiguity: need at least 2 classes");
  double top = -1, second = -1;
  for (double v : s) {
    if (v > top) {
      second = top;
      top = v;
    } else if (v > second) {
      second = v;
    }
  }
  return top - second;
}

// Even count: mean of the two middle order statistics.
inline double median_threshold(std::vector<double> margins) {
  if (margins.empty()) throw Error("median_threshold: empty margin list");
  std::sort(margins.begin(), margins.end());
  std::size_t n = margins.size();
  if (n % 2 == 1) return margins[n / 2];
  return 0.5 * (margins[n / 2 - 1] + margins[n / 2]);
}

// high = margin below theta; the boundary goes to low under the
// default strict comparison. Output id-sorted.
inline std::pair<std::vector<std::string>, std::vector<std::string>> partition(
    const std::map<std::string, ScoreVector>& unlabeled_scores, double theta,
    bool high_strict = true) {
  std::pair<std::vector<std::string>, std::vector<std::string>> out;
  for (const auto& [id, s] : unlabeled_scores) {
    double margin = ambiguity(s);
    bool high = high_strict ? margin < theta : margin <= theta;
    (high ? out.first : out.second).push_back(id);
  }
  return out;
}

struct NnsiLabelResult {
  int label = -1;
  int m_used = 0;
  double final_margin = 0;
};

// Incremental neighbor score averaging. Neighbors must be ordered
// ascending by distance and cover the full budget. Returns the first
// m whose averaged margin clears theta, or nothing.
inline std::optional<NnsiLabelResult> nnsi_label(
    const ScoreVector& own_score,
    const std::vector<const ScoreVector*>& neighbor_scores, double theta,
    int neighbor_budget, bool stop_strict = true) {
  if (static_cast<int>(neighbor_scores.size()) < neighbor_budget)
    throw Error("nnsi_label: fewer neighbors than the budget");
  ScoreVector sum = own_score;
  for (int m = 1; m <= neighbor_budget; ++m) {
    const ScoreVector& nb = *neighbor_scores[m - 1];
    if (nb.size() != sum.size())
      throw Error("nnsi_label: score length mismatch");
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += nb[k];
    ScoreVector avg(sum.size());
    for (std::size_t k = 0; k < sum.size(); ++k)
      avg[k] = sum[k] / static_cast<double>(m + 1);
    double margin = ambiguity(avg);
    bool passes = stop_strict ? margin > theta : margin >= theta;
    if (passes) return NnsiLabelResult{argmax(avg), m, margin};
  }
  return std::nullopt;
}

struct NnsiRecord {
  std::string sample_id;
  int assigned_label = -1;
  int m_used = 0;
  double final_margin = 0;
  int baseline_label = -1;  // argmax of the classifier's own score
};

struct NnsiSelection {
  std::vector<NnsiRecord> accepted;  // id-sorted
  std::vector<std::string> rejected;
  double theta = 0;
};

// Single-pass core over precomputed scores and neighbor lists. Scores
// are never recomputed after relabeling; there is no feedback.
inline NnsiSelection run_nnsi_core(
    const std::map<std::string, ScoreVector>& pool_scores,
    const std::map<std::string, std::vector<Neighbor>>& neighbor_lists,
    const std::vector<std::string>& unlabeled_ids, const NnsiConfig& config) {
  NnsiSelection selection;
  std::map<std::string, ScoreVector> unlabeled_scores;
  for (const auto& id : unlabeled_ids) {
    auto it = pool_scores.find(id);
    if (it == pool_scores.end())
      throw Error("run_nnsi: no score for unlabeled id '" + id + "'");
    unlabeled_scores[id] = it->second;
  }

  if (config.theta_policy == ThetaPolicy::MedianOfUnlabeled) {
    std::vector<double> margins;
    margins.reserve(unlabeled_scores.size());
    for (const auto& [id, s] : unlabeled_scores)
      margins.push_back(ambiguity(s));
    selection.theta = median_threshold(std::move(margins));
  } else {
    selection.theta = config.fixed_theta;
  }

  auto [high_ids, low_ids] =
      partition(unlabeled_scores, selection.theta, config.high_strict);
  for (const auto& id : high_ids) {
    auto lists_it = neighbor_lists.find(id);
    if (lists_it == neighbor_lists.end())
      throw Error("run_nnsi: no neighbor list for '" + id + "'");
    const ScoreVector& own = pool_scores.at(id);
    std::vector<const ScoreVector*> nb_scores;
    nb_scores.reserve(lists_it->second.size());
    for (const Neighbor& nb : lists_it->second) {
      auto sit = pool_scores.find(nb.id);
      if (sit == pool_scores.end())
        throw Error("run_nnsi: no score for neighbor '" + nb.id + "'");
      nb_scores.push_back(&sit->second);
    }
    auto labeled = nnsi_label(own, nb_scores, selection.theta,
                              config.neighbor_budget, config.stop_strict);
    if (labeled) {
      selection.accepted.push_back({id, labeled->label, labeled->m_used,
                                    labeled->final_margin, argmax(own)});
    } else {
      selection.rejected.push_back(id);
    }
  }
  return selection;  // high_ids is id-sorted, so outputs already are
}

// End-to-end run: score the labeled+unlabeled union once with the
// baseline model, build the union neighbor index, and label the
// high-ambiguity half of the unlabeled pool.
inline NnsiSelection run_nnsi(const Corpus& labeled, const Corpus& unlabeled,
                              const LinearModel& model,
                              const Vectorizer& vectorizer,
                              const NnsiConfig& config) {
  std::map<std::string, ScoreVector> pool_scores;
  std::vector<std::pair<std::string, SparseVector>> pool_vectors;
  auto ingest = [&](const Corpus& corpus, bool gold_scores) {
    for (const Sample& s : corpus.samples) {
      SparseVector v = vectorizer.transform(s.text);
      if (gold_scores && s.label) {
        ScoreVector one_hot(model.num_classes, 0.0);
        one_hot[*s.label] = 1.0;
        pool_scores[s.id] = std::move(one_hot);
      } else {
        pool_scores[s.id] = score(model, v);
      }
      pool_vectors.push_back({s.id, std::move(v)});
    }
  };
  ingest(labeled, config.gold_neighbor_scores);
  ingest(unlabeled, false);

  NeighborIndex index = NeighborIndex::build(std::move(pool_vectors));

  std::vector<std::string> unlabeled_ids;
  unlabeled_ids.reserve(unlabeled.samples.size());
  for (const Sample& s : unlabeled.samples) unlabeled_ids.push_back(s.id);

  // neighbors are only consulted for the high-ambiguity side
  std::map<std::string, ScoreVector> unlabeled_scores;
  for (const auto& id : unlabeled_ids) unlabeled_scores[id] = pool_scores.at(id);
  double theta = config.theta_policy == ThetaPolicy::Fixed
                     ? config.fixed_theta
                     : [&] {
                         std::vector<double> margins;
                         for (const auto& [id, s] : unlabeled_scores)
                           margins.push_back(ambiguity(s));
                         return median_threshold(std::move(margins));
                       }();
  auto [high_ids, low_ids] =
      partition(unlabeled_scores, theta, config.high_strict);
  auto neighbor_lists =
      index.precompute_all(high_ids, config.neighbor_budget);

  return run_nnsi_core(pool_scores, neighbor_lists, unlabeled_ids, config);
}

// Selection artifacts: `<base>.jsonl` (accepted records),
// `<base>.rejected.txt`, `<base>.meta.json` (theta, N, config hash).
inline void save_selection(const NnsiSelection& selection,
                           const Corpus& label_space,
                           const NnsiConfig& config,
                           const std::string& base_path) {
  {
    std::ofstream out(base_path + ".jsonl");
    if (!out) throw Error("cannot write selection: " + base_path + ".jsonl");
    for (const NnsiRecord& r : selection.accepted) {
      nlohmann::json rec;
      rec["id"] = r.sample_id;
      rec["label"] = label_space.label_names.at(r.assigned_label);
      rec["m_used"] = r.m_used;
      rec["final_margin"] = r.final_margin;
      rec["baseline_label"] = label_space.label_names.at(r.baseline_label);
      out << rec.dump() << "\n";
    }
  }
  {
    std::ofstream out(base_path + ".rejected.txt");
    for (const auto& id : selection.rejected) out << id << "\n";
  }
  {
    nlohmann::json meta;
    meta["theta"] = selection.theta;
    meta["neighbor_budget"] = config.neighbor_budget;
    meta["config_hash"] = config.config_hash();
    meta["n_accepted"] = selection.accepted.size();
    meta["n_rejected"] = selection.rejected.size();
    std::ofstream out(base_path + ".meta.json");
    out << meta.dump(2) << "\n";
  }
}

}  // namespace nnsi
