#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nnsi/common.hpp"
#include "nnsi/vectorize.hpp"

namespace nnsi {

// Per-class confidence vector; a probability simplex point.
using ScoreVector = std::vector<double>;

struct TrainConfig {
  double lambda = 1e-4;   // L2 strength on weights (bias unregularized)
  int max_iters = 500;
  double tol = 1e-6;      // infinity-norm of the gradient
};

// Multinomial logistic regression. Weights are stored feature-major
// (weights[j * M + k]) so scoring walks contiguous memory per feature.
struct LinearModel {
  int num_classes = 0;
  int dim = 0;
  TrainConfig hyper;
  std::vector<double> weights;  // dim * num_classes
  std::vector<double> bias;     // num_classes
  std::vector<double> loss_history;  // accepted-step losses, not persisted
};

inline ScoreVector score(const LinearModel& model, const SparseVector& v) {
  if (v.dim != model.dim)
    throw Error("score: vector dimension " + std::to_string(v.dim) +
                " != model dimension " + std::to_string(model.dim));
  const int m = model.num_classes;
  ScoreVector logits(model.bias);
  for (std::size_t t = 0; t < v.indices.size(); ++t) {
    const double x = v.values[t];
    const double* w = &model.weights[static_cast<std::size_t>(v.indices[t]) * m];
    for (int k = 0; k < m; ++k) logits[k] += w[k] * x;
  }
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double z = 0;
  for (int k = 0; k < m; ++k) {
    logits[k] = std::exp(logits[k] - max_logit);
    z += logits[k];
  }
  for (int k = 0; k < m; ++k) logits[k] /= z;
  return logits;
}

// argmax; exact tie goes to the lowest index
inline int argmax(const ScoreVector& s) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(s.size()); ++k)
    if (s[k] > s[best]) best = k;
  return best;
}

inline int predict(const LinearModel& model, const SparseVector& v) {
  return argmax(score(model, v));
}

struct LossGrad {
  double loss = 0;
  std::vector<double> grad_weights;
  std::vector<double> grad_bias;
};

namespace detail {

// Mean cross-entropy + (lambda/2)*||W||^2; analytic gradient optional.
inline double objective(const std::vector<double>& weights,
                        const std::vector<double>& bias, int m, int dim,
                        double lambda,
                        const std::vector<SparseVector>& vectors,
                        const std::vector<int>& labels,
                        LossGrad* grad) {
  const std::size_t n = vectors.size();
  if (grad) {
    grad->grad_weights.assign(weights.size(), 0.0);
    grad->grad_bias.assign(bias.size(), 0.0);
  }
  double loss = 0;
  std::vector<double> logits(m);
  for (std::size_t i = 0; i < n; ++i) {
    const SparseVector& v = vectors[i];
    std::copy(bias.begin(), bias.end(), logits.begin());
    for (std::size_t t = 0; t < v.indices.size(); ++t) {
      const double x = v.values[t];
      const double* w = &weights[static_cast<std::size_t>(v.indices[t]) * m];
      for (int k = 0; k < m; ++k) logits[k] += w[k] * x;
    }
    double max_logit = *std::max_element(logits.begin(), logits.end());
    double z = 0;
    for (int k = 0; k < m; ++k) z += std::exp(logits[k] - max_logit);
    const int y = labels[i];
    loss += -(logits[y] - max_logit - std::log(z));
    if (grad) {
      for (int k = 0; k < m; ++k) {
        double p = std::exp(logits[k] - max_logit) / z;
        logits[k] = (p - (k == y ? 1.0 : 0.0)) / static_cast<double>(n);
      }
      for (std::size_t t = 0; t < v.indices.size(); ++t) {
        const double x = v.values[t];
        double* g =
            &grad->grad_weights[static_cast<std::size_t>(v.indices[t]) * m];
        for (int k = 0; k < m; ++k) g[k] += logits[k] * x;
      }
      for (int k = 0; k < m; ++k) grad->grad_bias[k] += logits[k];
    }
  }
  loss /= static_cast<double>(n);
  double reg = 0;
  for (double w : weights) reg += w * w;
  loss += 0.5 * lambda * reg;
  if (grad) {
    for (std::size_t j = 0; j < weights.size(); ++j)
      grad->grad_weights[j] += lambda * weights[j];
    grad->loss = loss;
  }
  return loss;
}

}  // namespace detail

inline LossGrad loss_and_gradient(const LinearModel& model,
                                  const std::vector<SparseVector>& vectors,
                                  const std::vector<int>& labels) {
  if (vectors.size() != labels.size())
    throw Error("loss_and_gradient: vectors/labels size mismatch");
  LossGrad lg;
  detail::objective(model.weights, model.bias, model.num_classes, model.dim,
                    model.hyper.lambda, vectors, labels, &lg);
  return lg;
}

// Deterministic full-batch gradient descent from zero initialization,
// with step-halving on loss increase. Accepted-step losses are
// non-increasing and recorded in loss_history.
inline LinearModel train(const std::vector<SparseVector>& vectors,
                         const std::vector<int>& labels, int num_classes,
                         const TrainConfig& hyper = {}) {
  if (vectors.empty()) throw Error("train: no training vectors");
  if (vectors.size() != labels.size())
    throw Error("train: vectors/labels size mismatch");
  if (num_classes < 2) throw Error("train: need at least 2 classes");
  int distinct = 0;
  {
    std::vector<char> seen(num_classes, 0);
    for (int y : labels) {
      if (y < 0 || y >= num_classes)
        throw Error("train: label out of range");
      if (!seen[y]) {
        seen[y] = 1;
        ++distinct;
      }
    }
  }
  if (distinct < 2) throw Error("train: only one class present");

  LinearModel model;
  model.num_classes = num_classes;
  model.dim = vectors.front().dim;
  for (const auto& v : vectors)
    if (v.dim != model.dim) throw Error("train: inconsistent vector dims");
  model.hyper = hyper;
  model.weights.assign(static_cast<std::size_t>(model.dim) * num_classes, 0.0);
  model.bias.assign(num_classes, 0.0);

  const int m = num_classes;
  LossGrad lg;
  double loss = detail::objective(model.weights, model.bias, m, model.dim,
                                  hyper.lambda, vectors, labels, &lg);
  model.loss_history.push_back(loss);
  double step = 1.0;
  std::vector<double> cand_w(model.weights.size());
  std::vector<double> cand_b(model.bias.size());

  for (int iter = 0; iter < hyper.max_iters; ++iter) {
    if (!std::isfinite(loss))
      throw Error("train: non-finite loss at iteration " +
                  std::to_string(iter));
    double gnorm = 0;
    for (double g : lg.grad_weights) gnorm = std::max(gnorm, std::abs(g));
    for (double g : lg.grad_bias) gnorm = std::max(gnorm, std::abs(g));
    if (gnorm < hyper.tol) break;

    double new_loss = 0;
    while (true) {
      for (std::size_t j = 0; j < cand_w.size(); ++j)
        cand_w[j] = model.weights[j] - step * lg.grad_weights[j];
      for (std::size_t k = 0; k < cand_b.size(); ++k)
        cand_b[k] = model.bias[k] - step * lg.grad_bias[k];
      new_loss = detail::objective(cand_w, cand_b, m, model.dim, hyper.lambda,
                                   vectors, labels, nullptr);
      if (std::isfinite(new_loss) && new_loss <= loss) break;
      step *= 0.5;
      if (step < 1e-14) return model;  // no descent direction left
    }
    model.weights.swap(cand_w);
    model.bias.swap(cand_b);
    loss = detail::objective(model.weights, model.bias, m, model.dim,
                             hyper.lambda, vectors, labels, &lg);
    model.loss_history.push_back(loss);
    step *= 2.0;
  }
  return model;
}

inline nlohmann::json model_to_json(const LinearModel& model) {
  nlohmann::json j;
  j["version"] = 1;
  j["num_classes"] = model.num_classes;
  j["dim"] = model.dim;
  j["lambda"] = model.hyper.lambda;
  j["max_iters"] = model.hyper.max_iters;
  j["tol"] = model.hyper.tol;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  return j;
}

inline LinearModel model_from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != 1)
    throw Error("unsupported model artifact version");
  LinearModel model;
  model.num_classes = j.at("num_classes").get<int>();
  model.dim = j.at("dim").get<int>();
  model.hyper.lambda = j.at("lambda").get<double>();
  model.hyper.max_iters = j.at("max_iters").get<int>();
  model.hyper.tol = j.at("tol").get<double>();
  model.weights = j.at("weights").get<std::vector<double>>();
  model.bias = j.at("bias").get<std::vector<double>>();
  if (model.weights.size() !=
          static_cast<std::size_t>(model.dim) * model.num_classes ||
      model.bias.size() != static_cast<std::size_t>(model.num_classes))
    throw Error("model artifact: shape mismatch");
  return model;
}

}  // namespace nnsi
