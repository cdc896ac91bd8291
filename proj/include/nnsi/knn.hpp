#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "nnsi/common.hpp"
#include "nnsi/vectorize.hpp"

namespace nnsi {

struct Neighbor {
  std::string id;
  double distance;

  bool operator==(const Neighbor& other) const {
    return id == other.id && distance == other.distance;
  }
};

// Exact cosine nearest-neighbor index over the full labeled+unlabeled
// union pool. Immutable after build. Retrieval is brute-force
// equivalent; an inverted index over the sparse supports just skips
// pairs with zero overlap (their distance is exactly 1).
class NeighborIndex {
 public:
  static NeighborIndex build(
      std::vector<std::pair<std::string, SparseVector>> pool) {
    if (pool.size() < 2) throw Error("NeighborIndex: need at least 2 entries");
    NeighborIndex index;
    index.entries_ = std::move(pool);
    int dim = index.entries_.front().second.dim;
    for (std::size_t i = 0; i < index.entries_.size(); ++i) {
      const auto& [id, vec] = index.entries_[i];
      if (vec.dim != dim) throw Error("NeighborIndex: inconsistent dims");
      if (!index.by_id_.emplace(id, i).second)
        throw Error("NeighborIndex: duplicate id '" + id + "'");
    }
    // entry order sorted by id: stable iteration for ties and hashing
    std::vector<std::size_t> order(index.entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return index.entries_[a].first < index.entries_[b].first;
    });
    std::vector<std::pair<std::string, SparseVector>> sorted;
    sorted.reserve(index.entries_.size());
    for (std::size_t i : order) sorted.push_back(std::move(index.entries_[i]));
    index.entries_ = std::move(sorted);
    index.by_id_.clear();
    for (std::size_t i = 0; i < index.entries_.size(); ++i)
      index.by_id_.emplace(index.entries_[i].first, i);

    index.postings_.assign(dim, {});
    for (std::size_t i = 0; i < index.entries_.size(); ++i) {
      const SparseVector& v = index.entries_[i].second;
      for (std::size_t t = 0; t < v.indices.size(); ++t)
        index.postings_[v.indices[t]].push_back(
            {static_cast<std::uint32_t>(i), v.values[t]});
    }
    return index;
  }

  std::size_t size() const { return entries_.size(); }

  const SparseVector& vector_of(const std::string& id) const {
    return entries_[position(id)].second;
  }

  bool contains(const std::string& id) const { return by_id_.count(id) > 0; }

  // First n neighbors of the entry `query_id`, self excluded, ordered
  // by (distance, id).
  std::vector<Neighbor> query(const std::string& query_id, int n) const {
    if (n <= 0) throw Error("query: n must be positive");
    if (static_cast<std::size_t>(n) >= entries_.size())
      throw Error("query: n must be smaller than the index size");
    std::size_t self = position(query_id);

    std::vector<double> dots(entries_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    const SparseVector& q = entries_[self].second;
    for (std::size_t t = 0; t < q.indices.size(); ++t) {
      const double x = q.values[t];
      for (const auto& [entry, value] : postings_[q.indices[t]]) {
        if (dots[entry] == 0.0) touched.push_back(entry);
        dots[entry] += value * x;
      }
    }

    std::vector<std::pair<double, std::uint32_t>> near;  // distance < 1 side
    near.reserve(touched.size());
    for (std::uint32_t entry : touched) {
      if (entry == self) continue;
      near.push_back({1.0 - dots[entry], entry});
    }
    std::sort(near.begin(), near.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return entries_[a.second].first < entries_[b.second].first;
    });

    // untouched entries sit at distance exactly 1, in id order (the
    // entry order is id-sorted); merge the two runs
    std::vector<Neighbor> result;
    result.reserve(n);
    std::vector<char> is_near(entries_.size(), 0);
    for (const auto& [d, entry] : near) is_near[entry] = 1;
    std::size_t ni = 0, ui = 0;
    while (static_cast<int>(result.size()) < n) {
      bool near_first;
      while (ui < entries_.size() &&
             (is_near[ui] || ui == self || dots[ui] != 0.0))
        ++ui;
      if (ni < near.size() && ui < entries_.size())
        near_first = near[ni].first < 1.0 ||
                     (near[ni].first == 1.0 &&
                      entries_[near[ni].second].first < entries_[ui].first);
      else
        near_first = ni < near.size();
      if (near_first) {
        result.push_back(
            {entries_[near[ni].second].first, near[ni].first});
        ++ni;
      } else {
        result.push_back({entries_[ui].first, 1.0});
        ++ui;
      }
    }
    return result;
  }

  // query(id, n) for each requested id
  std::map<std::string, std::vector<Neighbor>> precompute_all(
      const std::vector<std::string>& ids, int n) const {
    std::map<std::string, std::vector<Neighbor>> out;
    for (const auto& id : ids) out[id] = query(id, n);
    return out;
  }

  std::map<std::string, std::vector<Neighbor>> precompute_all(int n) const {
    std::vector<std::string> ids;
    ids.reserve(entries_.size());
    for (const auto& [id, vec] : entries_) ids.push_back(id);
    return precompute_all(ids, n);
  }

  // content hash over ids and vector payloads; keys the neighbor cache
  std::uint64_t content_hash() const {
    std::uint64_t h = fnv1a("neighbor-index-v1");
    for (const auto& [id, vec] : entries_) {
      h = hash_combine(h, fnv1a(id));
      h = hash_combine(h, static_cast<std::uint64_t>(vec.dim));
      for (std::size_t t = 0; t < vec.indices.size(); ++t) {
        h = hash_combine(h, static_cast<std::uint64_t>(vec.indices[t]));
        std::uint64_t bits;
        double v = vec.values[t];
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h = hash_combine(h, bits);
      }
    }
    return h;
  }

 private:
  std::size_t position(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw Error("unknown id '" + id + "'");
    return it->second;
  }

  struct Posting {
    std::uint32_t entry;
    double value;
  };

  std::vector<std::pair<std::string, SparseVector>> entries_;  // id-sorted
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<std::vector<Posting>> postings_;
};

// Cache file: header line `# pool <hex hash> n <n>`, then one line per
// query: `query_id<TAB>neighbor_id:distance,...`.
inline void save_neighbor_cache(
    const std::string& path, std::uint64_t pool_hash, int n,
    const std::map<std::string, std::vector<Neighbor>>& lists) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write neighbor cache: " + path);
  out << "# pool " << std::hex << pool_hash << std::dec << " n " << n << "\n";
  out.precision(17);
  for (const auto& [id, neighbors] : lists) {
    out << id << "\t";
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      if (i) out << ",";
      out << neighbors[i].id << ":" << neighbors[i].distance;
    }
    out << "\n";
  }
}

// Returns nothing if the cache does not match (pool hash or n); stale
// caches are treated as absent, not as errors.
inline std::optional<std::map<std::string, std::vector<Neighbor>>>
load_neighbor_cache(const std::string& path, std::uint64_t pool_hash, int n) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string header;
  if (!std::getline(in, header)) return std::nullopt;
  {
    std::istringstream hs(header);
    std::string hash_mark, pool_word, n_word;
    std::uint64_t file_hash;
    int file_n;
    hs >> hash_mark >> pool_word >> std::hex >> file_hash >> std::dec >>
        n_word >> file_n;
    if (hash_mark != "#" || pool_word != "pool" || n_word != "n" ||
        file_hash != pool_hash || file_n != n)
      return std::nullopt;
  }
  std::map<std::string, std::vector<Neighbor>> lists;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) return std::nullopt;
    std::string qid = line.substr(0, tab);
    std::vector<Neighbor> neighbors;
    std::istringstream fields(line.substr(tab + 1));
    std::string field;
    while (std::getline(fields, field, ',')) {
      std::size_t colon = field.rfind(':');
      if (colon == std::string::npos) return std::nullopt;
      neighbors.push_back(
          {field.substr(0, colon), std::stod(field.substr(colon + 1))});
    }
    lists[qid] = std::move(neighbors);
  }
  return lists;
}

}  // namespace nnsi
