// Independent reference implementations used only by tests. These are
// deliberately naive straight-line versions that do not share code with
// the library paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nnsi/classifier.hpp"
#include "nnsi/common.hpp"
#include "nnsi/knn.hpp"
#include "nnsi/nnsi.hpp"
#include "nnsi/vectorize.hpp"

namespace oracle {

// exhaustive pairwise-distance sort
inline std::vector<nnsi::Neighbor> brute_force_neighbors(
    const std::vector<std::pair<std::string, nnsi::SparseVector>>& pool,
    const std::string& query_id, int n) {
  const nnsi::SparseVector* query = nullptr;
  for (const auto& [id, v] : pool)
    if (id == query_id) query = &v;
  std::vector<nnsi::Neighbor> all;
  for (const auto& [id, v] : pool) {
    if (id == query_id) continue;
    all.push_back({id, nnsi::cosine_distance(*query, v)});
  }
  std::sort(all.begin(), all.end(),
            [](const nnsi::Neighbor& a, const nnsi::Neighbor& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return a.id < b.id;
            });
  all.resize(n);
  return all;
}

// margin between top-two scores, by full sort
inline double margin(const std::vector<double>& s) {
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  return sorted[sorted.size() - 1] - sorted[sorted.size() - 2];
}

struct BruteRecord {
  std::string id;
  int label;
  int m_used;
  double final_margin;
  int baseline_label;
};

struct BruteSelection {
  std::vector<BruteRecord> accepted;
  std::vector<std::string> rejected;
  double theta;
};

// Straight-line evaluation of the whole selection procedure: median
// threshold, strict-inequality partition, neighbor sort, incremental
// averaging with the first-passing-m stopping rule.
inline BruteSelection brute_force_nnsi(
    const std::map<std::string, std::vector<double>>& pool_scores,
    const std::vector<std::pair<std::string, nnsi::SparseVector>>& pool_vectors,
    const std::vector<std::string>& unlabeled_ids, int neighbor_budget) {
  BruteSelection out;

  std::vector<double> margins;
  for (const auto& id : unlabeled_ids)
    margins.push_back(margin(pool_scores.at(id)));
  std::sort(margins.begin(), margins.end());
  if (margins.size() % 2 == 1)
    out.theta = margins[margins.size() / 2];
  else
    out.theta =
        (margins[margins.size() / 2 - 1] + margins[margins.size() / 2]) / 2.0;

  std::vector<std::string> high;
  for (const auto& id : unlabeled_ids)
    if (margin(pool_scores.at(id)) < out.theta) high.push_back(id);
  std::sort(high.begin(), high.end());

  for (const auto& id : high) {
    auto neighbors = brute_force_neighbors(
        pool_vectors, id, neighbor_budget);
    const std::vector<double>& own = pool_scores.at(id);
    int baseline_label = 0;
    for (std::size_t k = 1; k < own.size(); ++k)
      if (own[k] > own[baseline_label]) baseline_label = static_cast<int>(k);

    bool accepted = false;
    for (int m = 1; m <= neighbor_budget; ++m) {
      std::vector<double> avg = own;
      for (int j = 0; j < m; ++j) {
        const std::vector<double>& nb = pool_scores.at(neighbors[j].id);
        for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += nb[k];
      }
      for (double& v : avg) v /= (m + 1);
      double mg = margin(avg);
      if (mg > out.theta) {
        int label = 0;
        for (std::size_t k = 1; k < avg.size(); ++k)
          if (avg[k] > avg[label]) label = static_cast<int>(k);
        out.accepted.push_back({id, label, m, mg, baseline_label});
        accepted = true;
        break;
      }
    }
    if (!accepted) out.rejected.push_back(id);
  }
  return out;
}

// central finite differences over every parameter
inline nnsi::LossGrad finite_difference_gradient(
    const nnsi::LinearModel& model,
    const std::vector<nnsi::SparseVector>& vectors,
    const std::vector<int>& labels, double step) {
  auto loss_at = [&](const nnsi::LinearModel& m) {
    return nnsi::loss_and_gradient(m, vectors, labels).loss;
  };
  nnsi::LossGrad out;
  out.loss = loss_at(model);
  out.grad_weights.resize(model.weights.size());
  out.grad_bias.resize(model.bias.size());
  nnsi::LinearModel probe = model;
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    probe.weights[j] = model.weights[j] + step;
    double up = loss_at(probe);
    probe.weights[j] = model.weights[j] - step;
    double down = loss_at(probe);
    probe.weights[j] = model.weights[j];
    out.grad_weights[j] = (up - down) / (2 * step);
  }
  for (std::size_t k = 0; k < model.bias.size(); ++k) {
    probe.bias[k] = model.bias[k] + step;
    double up = loss_at(probe);
    probe.bias[k] = model.bias[k] - step;
    double down = loss_at(probe);
    probe.bias[k] = model.bias[k];
    out.grad_bias[k] = (up - down) / (2 * step);
  }
  return out;
}

// random point on the probability simplex
inline std::vector<double> random_simplex(nnsi::Rng& rng, int m) {
  std::vector<double> s(m);
  double z = 0;
  for (double& v : s) {
    v = -std::log(1.0 - rng.uniform());
    z += v;
  }
  for (double& v : s) v /= z;
  return s;
}

// random unit-norm sparse vector with non-negative weights
inline nnsi::SparseVector random_unit_vector(nnsi::Rng& rng, int dim,
                                             int max_nnz) {
  nnsi::SparseVector v;
  v.dim = dim;
  int nnz = 1 + static_cast<int>(rng.below(max_nnz));
  std::vector<int> idx;
  for (int t = 0; t < nnz; ++t) idx.push_back(static_cast<int>(rng.below(dim)));
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  double norm_sq = 0;
  for (int i : idx) {
    double w = 0.05 + rng.uniform();
    v.indices.push_back(i);
    v.values.push_back(w);
    norm_sq += w * w;
  }
  double inv = 1.0 / std::sqrt(norm_sq);
  for (double& w : v.values) w *= inv;
  return v;
}

}  // namespace oracle
