#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "nnsi/common.hpp"
#include "nnsi/knn.hpp"
#include "oracles.hpp"

using namespace nnsi;

namespace {

SparseVector one_hot(int dim, int idx) {
  return SparseVector{{idx}, {1.0}, dim};
}

std::vector<std::pair<std::string, SparseVector>> random_pool(
    Rng& rng, int size, int dim) {
  std::vector<std::pair<std::string, SparseVector>> pool;
  for (int i = 0; i < size; ++i)
    pool.push_back({"p" + std::to_string(i),
                    oracle::random_unit_vector(rng, dim, 6)});
  return pool;
}

}  // namespace

TEST_CASE("build indexes every entry") {
  NeighborIndex index = NeighborIndex::build(
      {{"a", one_hot(3, 0)}, {"b", one_hot(3, 1)}, {"c", one_hot(3, 2)}});
  CHECK(index.size() == 3);
  CHECK(index.contains("b"));
  CHECK(!index.contains("z"));
}

TEST_CASE("build rejects duplicates and tiny pools") {
  CHECK_THROWS_AS(NeighborIndex::build({{"a", one_hot(2, 0)}}), Error);
  CHECK_THROWS_AS(NeighborIndex::build(
                      {{"a", one_hot(2, 0)}, {"a", one_hot(2, 1)}}),
                  Error);
}

TEST_CASE("orthogonal ties break by ascending id") {
  NeighborIndex index = NeighborIndex::build(
      {{"e1", one_hot(3, 0)}, {"e3", one_hot(3, 2)}, {"e2", one_hot(3, 1)}});
  auto result = index.query("e1", 2);
  REQUIRE(result.size() == 2);
  CHECK(result[0].id == "e2");
  CHECK(result[0].distance == doctest::Approx(1.0));
  CHECK(result[1].id == "e3");
}

TEST_CASE("query orders by distance") {
  double r = std::sqrt(0.5);
  NeighborIndex index = NeighborIndex::build({{"x", SparseVector{{0}, {1.0}, 2}},
                                              {"y", SparseVector{{0, 1}, {r, r}, 2}},
                                              {"z", SparseVector{{1}, {1.0}, 2}}});
  auto result = index.query("x", 2);
  CHECK(result[0].id == "y");
  CHECK(result[0].distance == doctest::Approx(1.0 - r));
  CHECK(result[1].id == "z");
  CHECK(result[1].distance == doctest::Approx(1.0));
}

TEST_CASE("query excludes the query id and validates arguments") {
  Rng rng(5);
  auto pool = random_pool(rng, 10, 12);
  NeighborIndex index = NeighborIndex::build(pool);
  auto result = index.query("p3", 9);
  for (const auto& nb : result) CHECK(nb.id != "p3");
  CHECK_THROWS_AS(index.query("missing", 2), Error);
  CHECK_THROWS_AS(index.query("p3", 10), Error);
  CHECK_THROWS_AS(index.query("p3", 0), Error);
}

TEST_CASE("query equals the exhaustive-sort oracle") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    // low dimension forces plenty of exact distance ties
    int dim = 4 + static_cast<int>(rng.below(20));
    auto pool = random_pool(rng, 50, dim);
    NeighborIndex index = NeighborIndex::build(pool);
    for (const char* qid : {"p0", "p17", "p49"}) {
      auto got = index.query(qid, 12);
      auto expected = oracle::brute_force_neighbors(pool, qid, 12);
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].id == expected[i].id);
        CHECK(got[i].distance == doctest::Approx(expected[i].distance).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("repeated builds answer identically") {
  Rng rng(1);
  auto pool = random_pool(rng, 30, 10);
  NeighborIndex a = NeighborIndex::build(pool);
  NeighborIndex b = NeighborIndex::build(pool);
  for (int i = 0; i < 30; ++i) {
    std::string id = "p" + std::to_string(i);
    CHECK(a.query(id, 5) == b.query(id, 5));
  }
}

TEST_CASE("precompute_all matches per-id queries") {
  Rng rng(13);
  auto pool = random_pool(rng, 50, 15);
  NeighborIndex index = NeighborIndex::build(pool);
  auto all = index.precompute_all(10);
  CHECK(all.size() == 50);
  for (const auto& [id, neighbors] : all)
    CHECK(neighbors == index.query(id, 10));
  CHECK(index.precompute_all({}, 10).empty());
}

TEST_CASE("neighbor cache round-trips and is invalidated by pool changes") {
  Rng rng(21);
  auto pool = random_pool(rng, 20, 10);
  NeighborIndex index = NeighborIndex::build(pool);
  auto lists = index.precompute_all(5);
  const char* path = "knn_cache_test.tsv";
  save_neighbor_cache(path, index.content_hash(), 5, lists);

  auto loaded = load_neighbor_cache(path, index.content_hash(), 5);
  REQUIRE(loaded.has_value());
  CHECK(*loaded == lists);

  // different n or different pool hash -> cache miss
  CHECK(!load_neighbor_cache(path, index.content_hash(), 6).has_value());
  CHECK(!load_neighbor_cache(path, index.content_hash() + 1, 5).has_value());
  std::remove(path);
}
