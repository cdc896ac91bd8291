#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "nnsi/common.hpp"

namespace nnsi {

// One text utterance. `label` is the label visible to the algorithm;
// `gold` is a shadow label kept only for auditing pseudo-label accuracy
// (populated when split() hides the label of an "unlabeled" sample).
struct Sample {
  std::string id;
  std::string text;
  std::optional<int> label;
  std::optional<int> gold;
};

struct Corpus {
  std::vector<Sample> samples;
  std::vector<std::string> label_names;

  std::size_t size() const { return samples.size(); }
  int num_classes() const { return static_cast<int>(label_names.size()); }
  bool fully_labeled() const {
    return std::all_of(samples.begin(), samples.end(),
                       [](const Sample& s) { return s.label.has_value(); });
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// ASCII lowercase; non-ASCII bytes pass through unchanged.
inline std::string fold_case(const std::string& s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string dedupe_key(const std::string& text) {
  return fold_case(trim(text));
}

}  // namespace detail

// One record per line: {"id": "...", "text": "...", "label": "name"}.
// `label` is optional; `gold_label` round-trips shadow labels.
// Label names are collected in first-appearance order unless a manifest
// (one intent name per line) pins the index order.
inline Corpus load_jsonl(const std::string& path,
                         const std::optional<std::string>& manifest_path = {}) {
  Corpus corpus;
  std::unordered_map<std::string, int> name_to_index;
  if (manifest_path) {
    std::ifstream mf(*manifest_path);
    if (!mf) throw Error("cannot open label manifest: " + *manifest_path);
    std::string line;
    while (std::getline(mf, line)) {
      line = detail::trim(line);
      if (line.empty()) continue;
      if (name_to_index.count(line))
        throw Error("duplicate label name in manifest: " + line);
      name_to_index[line] = static_cast<int>(corpus.label_names.size());
      corpus.label_names.push_back(line);
    }
  }
  const bool fixed_labels = manifest_path.has_value();

  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);

  auto resolve_label = [&](const std::string& name, int line_no) -> int {
    auto it = name_to_index.find(name);
    if (it != name_to_index.end()) return it->second;
    if (fixed_labels)
      throw Error("line " + std::to_string(line_no) + ": label '" + name +
                  "' not in manifest");
    int idx = static_cast<int>(corpus.label_names.size());
    name_to_index[name] = idx;
    corpus.label_names.push_back(name);
    return idx;
  };

  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("line " + std::to_string(line_no) + ": malformed JSON: " +
                  e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("text"))
      throw Error("line " + std::to_string(line_no) +
                  ": record must have 'id' and 'text'");
    Sample s;
    s.id = rec.at("id").get<std::string>();
    s.text = rec.at("text").get<std::string>();
    if (detail::trim(s.text).empty())
      throw Error("line " + std::to_string(line_no) + ": empty text");
    if (!seen_ids.insert(s.id).second)
      throw Error("line " + std::to_string(line_no) + ": duplicate id '" +
                  s.id + "'");
    if (rec.contains("label") && !rec.at("label").is_null())
      s.label = resolve_label(rec.at("label").get<std::string>(), line_no);
    if (rec.contains("gold_label") && !rec.at("gold_label").is_null())
      s.gold = resolve_label(rec.at("gold_label").get<std::string>(), line_no);
    corpus.samples.push_back(std::move(s));
  }
  if (corpus.samples.empty()) throw Error("no samples in " + path);
  return corpus;
}

inline void save_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file: " + path);
  for (const Sample& s : corpus.samples) {
    nlohmann::json rec;
    rec["id"] = s.id;
    rec["text"] = s.text;
    if (s.label) rec["label"] = corpus.label_names.at(*s.label);
    if (s.gold) rec["gold_label"] = corpus.label_names.at(*s.gold);
    out << rec.dump() << "\n";
  }
}

// Keeps the first occurrence of each text, compared after trim and
// case fold. Order preserved. Idempotent.
inline Corpus dedupe_texts(const Corpus& corpus) {
  Corpus out;
  out.label_names = corpus.label_names;
  std::unordered_set<std::string> seen;
  for (const Sample& s : corpus.samples) {
    if (seen.insert(detail::dedupe_key(s.text)).second)
      out.samples.push_back(s);
  }
  return out;
}

struct SplitFractions {
  double labeled = 0.0;
  double unlabeled = 0.0;
  double test = 0.0;
};

struct SplitResult {
  Corpus labeled;
  Corpus unlabeled;  // gold labels moved to the shadow field
  Corpus test;
  std::vector<std::string> warnings;
};

// Disjoint (labeled, unlabeled, test) partition. The labeled part is
// stratified per class where feasible; any class left without a
// labeled sample is recorded as a warning. The unlabeled part keeps
// its gold label only in the shadow field. Sum of fractions may be
// < 1; the remainder is discarded.
inline SplitResult split(const Corpus& corpus, SplitFractions fractions,
                         std::uint64_t seed) {
  if (fractions.labeled <= 0 || fractions.unlabeled <= 0 ||
      fractions.test <= 0)
    throw Error("split: fractions must be positive");
  if (fractions.labeled + fractions.unlabeled + fractions.test > 1.0 + 1e-12)
    throw Error("split: fractions must sum to at most 1");
  if (!corpus.fully_labeled())
    throw Error("split: corpus must be fully labeled");

  const std::size_t n = corpus.size();
  std::size_t n_labeled =
      static_cast<std::size_t>(std::llround(fractions.labeled * n));
  std::size_t n_unlabeled =
      static_cast<std::size_t>(std::llround(fractions.unlabeled * n));
  std::size_t n_test =
      static_cast<std::size_t>(std::llround(fractions.test * n));
  n_labeled = std::min(n_labeled, n);
  n_unlabeled = std::min(n_unlabeled, n - n_labeled);
  n_test = std::min(n_test, n - n_labeled - n_unlabeled);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(hash_combine(seed, fnv1a("corpus.split")));
  rng.shuffle(order);

  const int m = corpus.num_classes();
  std::vector<std::vector<std::size_t>> by_class(m);
  for (std::size_t i : order)
    by_class[*corpus.samples[i].label].push_back(i);

  // Largest-remainder allocation of the labeled budget across classes,
  // with a floor of one per class whenever the budget allows.
  std::vector<std::size_t> take(m, 0);
  {
    std::vector<std::pair<double, int>> remainders;
    std::size_t assigned = 0;
    for (int c = 0; c < m; ++c) {
      double exact = n_labeled * static_cast<double>(by_class[c].size()) / n;
      take[c] = static_cast<std::size_t>(exact);
      remainders.push_back({exact - static_cast<double>(take[c]), c});
      assigned += take[c];
    }
    std::sort(remainders.begin(), remainders.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
              });
    for (const auto& [frac, c] : remainders) {
      if (assigned >= n_labeled) break;
      if (take[c] < by_class[c].size()) {
        ++take[c];
        ++assigned;
      }
    }
    if (static_cast<std::size_t>(m) <= n_labeled) {
      for (int c = 0; c < m; ++c) {
        if (take[c] == 0 && !by_class[c].empty()) {
          // steal from the currently largest allocation
          int donor = -1;
          for (int d = 0; d < m; ++d)
            if (take[d] > 1 && (donor < 0 || take[d] > take[donor])) donor = d;
          if (donor < 0) break;
          --take[donor];
          ++take[c];
        }
      }
    }
  }

  std::vector<char> in_labeled(n, 0);
  std::vector<std::size_t> labeled_idx;
  for (int c = 0; c < m; ++c)
    for (std::size_t j = 0; j < take[c]; ++j) {
      labeled_idx.push_back(by_class[c][j]);
      in_labeled[by_class[c][j]] = 1;
    }

  SplitResult result;
  result.labeled.label_names = corpus.label_names;
  result.unlabeled.label_names = corpus.label_names;
  result.test.label_names = corpus.label_names;

  // keep shuffled order inside each part
  for (std::size_t i : order)
    if (in_labeled[i]) result.labeled.samples.push_back(corpus.samples[i]);

  std::size_t placed = 0;
  for (std::size_t i : order) {
    if (in_labeled[i]) continue;
    if (placed < n_unlabeled) {
      Sample s = corpus.samples[i];
      s.gold = s.label;
      s.label.reset();
      result.unlabeled.samples.push_back(std::move(s));
    } else if (placed < n_unlabeled + n_test) {
      result.test.samples.push_back(corpus.samples[i]);
    }
    ++placed;
  }

  for (int c = 0; c < m; ++c) {
    if (take[c] == 0)
      result.warnings.push_back("class '" + corpus.label_names[c] +
                                "' has no labeled sample");
  }
  return result;
}

// k disjoint folds with sizes differing by at most one; returns
// (train, heldout) per fold.
inline std::vector<std::pair<Corpus, Corpus>> kfold(const Corpus& corpus,
                                                    int k,
                                                    std::uint64_t seed) {
  if (k < 2) throw Error("kfold: k must be at least 2");
  if (corpus.size() < static_cast<std::size_t>(k))
    throw Error("kfold: k exceeds corpus size");

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(hash_combine(seed, fnv1a("corpus.kfold")));
  rng.shuffle(order);

  std::vector<std::pair<Corpus, Corpus>> folds(k);
  for (int f = 0; f < k; ++f) {
    folds[f].first.label_names = corpus.label_names;
    folds[f].second.label_names = corpus.label_names;
  }
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    int fold = static_cast<int>(pos % k);
    for (int f = 0; f < k; ++f) {
      if (f == fold)
        folds[f].second.samples.push_back(corpus.samples[order[pos]]);
      else
        folds[f].first.samples.push_back(corpus.samples[order[pos]]);
    }
  }
  return folds;
}

}  // namespace nnsi
