#include <doctest.h>

#include <cmath>

#include "nnsi/classifier.hpp"
#include "nnsi/common.hpp"
#include "oracles.hpp"

using namespace nnsi;

namespace {

SparseVector dense(std::vector<double> values) {
  SparseVector v;
  v.dim = static_cast<int>(values.size());
  for (int i = 0; i < v.dim; ++i) {
    if (values[i] != 0.0) {
      v.indices.push_back(i);
      v.values.push_back(values[i]);
    }
  }
  return v;
}

LinearModel zero_model(int num_classes, int dim) {
  LinearModel m;
  m.num_classes = num_classes;
  m.dim = dim;
  m.weights.assign(static_cast<std::size_t>(dim) * num_classes, 0.0);
  m.bias.assign(num_classes, 0.0);
  return m;
}

// well-separated random 5-class point cloud in 12 dimensions
void synthetic_problem(int n, std::vector<SparseVector>& vectors,
                       std::vector<int>& labels, std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    int y = static_cast<int>(rng.below(5));
    std::vector<double> x(12, 0.0);
    x[2 * y] = 1.0 + rng.uniform();
    x[2 * y + 1] = 0.5 + rng.uniform();
    x[10] = rng.uniform() * 0.3;  // shared noise coordinates
    x[11] = rng.uniform() * 0.3;
    double norm = 0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
    vectors.push_back(dense(x));
    labels.push_back(y);
  }
}

}  // namespace

TEST_CASE("zero model scores uniformly") {
  LinearModel m = zero_model(3, 4);
  ScoreVector s = score(m, dense({1, 0, 2, 0}));
  for (double v : s) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("softmax of a pure bias model") {
  LinearModel m = zero_model(2, 3);
  m.bias = {std::log(2.0), 0.0};
  ScoreVector s = score(m, dense({0, 0, 0}));
  CHECK(s[0] == doctest::Approx(2.0 / 3.0));
  CHECK(s[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("scores form a simplex point") {
  Rng rng(11);
  LinearModel m = zero_model(4, 10);
  for (auto& w : m.weights) w = rng.uniform() * 4 - 2;
  for (auto& b : m.bias) b = rng.uniform() - 0.5;
  for (int trial = 0; trial < 100; ++trial) {
    ScoreVector s = score(m, oracle::random_unit_vector(rng, 10, 6));
    double sum = 0;
    for (double v : s) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("score rejects dimension mismatch") {
  LinearModel m = zero_model(3, 4);
  CHECK_THROWS_AS(score(m, dense({1, 0})), Error);
}

TEST_CASE("predict takes the argmax with lowest-index ties") {
  CHECK(argmax({0.2, 0.5, 0.3}) == 1);
  CHECK(argmax({0.5, 0.5}) == 0);
  CHECK(argmax({0.25, 0.25, 0.25, 0.25}) == 0);
}

TEST_CASE("predict equals argmax of score") {
  Rng rng(3);
  LinearModel m = zero_model(5, 20);
  for (auto& w : m.weights) w = rng.uniform() * 2 - 1;
  for (int trial = 0; trial < 1000; ++trial) {
    SparseVector v = oracle::random_unit_vector(rng, 20, 8);
    CHECK(predict(m, v) == argmax(score(m, v)));
  }
}

TEST_CASE("loss of the zero model on one sample is ln 2") {
  LinearModel m = zero_model(2, 3);
  m.hyper.lambda = 0;
  auto lg = loss_and_gradient(m, {dense({1, 0, 0})}, {0});
  CHECK(lg.loss == doctest::Approx(std::log(2.0)));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    int m = 2 + static_cast<int>(rng.below(3));
    int dim = 4 + static_cast<int>(rng.below(6));
    LinearModel model = zero_model(m, dim);
    model.hyper.lambda = 1e-3;
    for (auto& w : model.weights) w = rng.uniform() - 0.5;
    for (auto& b : model.bias) b = rng.uniform() - 0.5;
    std::vector<SparseVector> vectors;
    std::vector<int> labels;
    for (int i = 0; i < 6; ++i) {
      vectors.push_back(oracle::random_unit_vector(rng, dim, dim));
      labels.push_back(static_cast<int>(rng.below(m)));
    }
    auto analytic = loss_and_gradient(model, vectors, labels);
    auto numeric =
        oracle::finite_difference_gradient(model, vectors, labels, 1e-5);
    double worst = 0;
    for (std::size_t j = 0; j < analytic.grad_weights.size(); ++j) {
      double denom = std::max(1e-8, std::abs(numeric.grad_weights[j]));
      worst = std::max(
          worst,
          std::abs(analytic.grad_weights[j] - numeric.grad_weights[j]) / denom);
    }
    for (std::size_t k = 0; k < analytic.grad_bias.size(); ++k) {
      double denom = std::max(1e-8, std::abs(numeric.grad_bias[k]));
      worst = std::max(
          worst,
          std::abs(analytic.grad_bias[k] - numeric.grad_bias[k]) / denom);
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("training separates two separable points") {
  std::vector<SparseVector> vectors = {dense({1, 0}), dense({0, 1})};
  std::vector<int> labels = {0, 1};
  TrainConfig hyper;
  hyper.lambda = 1e-3;
  LinearModel m = train(vectors, labels, 2, hyper);
  CHECK(score(m, vectors[0])[0] > 0.5);
  CHECK(score(m, vectors[1])[1] > 0.5);
}

TEST_CASE("zero iterations yields the uniform scorer") {
  std::vector<SparseVector> vectors = {dense({1, 0}), dense({0, 1})};
  TrainConfig hyper;
  hyper.max_iters = 0;
  LinearModel m = train(vectors, {0, 1}, 3, hyper);
  ScoreVector s = score(m, dense({0.3, 0.7}));
  for (double v : s) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("training fits a 200-sample synthetic 5-class problem") {
  std::vector<SparseVector> vectors;
  std::vector<int> labels;
  synthetic_problem(200, vectors, labels, 0);
  LinearModel m = train(vectors, labels, 5, {1e-4, 500, 1e-6});
  int correct = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    if (predict(m, vectors[i]) == labels[i]) ++correct;
  CHECK(correct >= 190);  // >= 0.95 training accuracy
}

TEST_CASE("training is bit-deterministic") {
  std::vector<SparseVector> vectors;
  std::vector<int> labels;
  synthetic_problem(80, vectors, labels, 4);
  LinearModel a = train(vectors, labels, 5, {1e-4, 100, 1e-6});
  LinearModel b = train(vectors, labels, 5, {1e-4, 100, 1e-6});
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  CHECK(a.loss_history == b.loss_history);
}

TEST_CASE("accepted-step losses never increase") {
  std::vector<SparseVector> vectors;
  std::vector<int> labels;
  synthetic_problem(120, vectors, labels, 9);
  LinearModel m = train(vectors, labels, 5, {1e-4, 200, 1e-6});
  REQUIRE(m.loss_history.size() > 2);
  for (std::size_t i = 1; i < m.loss_history.size(); ++i)
    CHECK(m.loss_history[i] <= m.loss_history[i - 1] + 1e-12);
}

TEST_CASE("a perfectly fit unregularized model is near-stationary") {
  std::vector<SparseVector> vectors = {dense({1, 0}), dense({0, 1})};
  std::vector<int> labels = {0, 1};
  LinearModel m = train(vectors, labels, 2, {0.0, 5000, 1e-6});
  auto lg = loss_and_gradient(m, vectors, labels);
  double gnorm = 0;
  for (double g : lg.grad_weights) gnorm = std::max(gnorm, std::abs(g));
  for (double g : lg.grad_bias) gnorm = std::max(gnorm, std::abs(g));
  CHECK(gnorm < 1e-3);
}

TEST_CASE("train rejects degenerate inputs") {
  std::vector<SparseVector> vectors = {dense({1, 0}), dense({0, 1})};
  CHECK_THROWS_AS(train(vectors, {0, 0}, 2, {}), Error);        // one class
  CHECK_THROWS_AS(train(vectors, {0}, 2, {}), Error);           // size mismatch
  CHECK_THROWS_AS(train({}, {}, 2, {}), Error);                 // empty
}

TEST_CASE("model artifact round-trips") {
  std::vector<SparseVector> vectors;
  std::vector<int> labels;
  synthetic_problem(50, vectors, labels, 2);
  LinearModel m = train(vectors, labels, 5, {1e-4, 50, 1e-6});
  LinearModel back = model_from_json(model_to_json(m));
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.num_classes == m.num_classes);
  for (const auto& v : vectors) CHECK(predict(back, v) == predict(m, v));
}
