#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "nnsi/common.hpp"

namespace nnsi {

// Unit-norm sparse vector (or all-zero, flagged by empty support).
struct SparseVector {
  std::vector<int> indices;   // strictly ascending
  std::vector<double> values;
  int dim = 0;

  bool is_zero() const { return indices.empty(); }

  double norm() const {
    double s = 0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
  }
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  if (a.dim != b.dim) throw Error("sparse dot: dimension mismatch");
  double s = 0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] < b.indices[j])
      ++i;
    else if (a.indices[i] > b.indices[j])
      ++j;
    else
      s += a.values[i++] * b.values[j++];
  }
  return s;
}

// 1 - <a,b> over unit-norm vectors; a zero-flagged operand is at
// distance 1 from everything by convention.
inline double cosine_distance(const SparseVector& a, const SparseVector& b) {
  if (a.dim != b.dim) throw Error("cosine_distance: dimension mismatch");
  if (a.is_zero() || b.is_zero()) return 1.0;
  return 1.0 - dot(a, b);
}

// lowercase, split on non-alphanumeric runs
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

struct VectorizerConfig {
  int word_ngram_min = 1;
  int word_ngram_max = 2;
  bool use_char_ngrams = true;
  int char_ngram_min = 3;
  int char_ngram_max = 5;
  int min_df = 1;
};

// TF-IDF over word and character n-grams. Stands in for a pre-trained
// text embedding; anything mapping text to a unit-norm SparseVector
// can replace it behind the same surface.
class Vectorizer {
 public:
  static Vectorizer fit(const std::vector<std::string>& texts,
                        const VectorizerConfig& config = {}) {
    if (texts.empty()) throw Error("Vectorizer::fit: empty text list");
    bool any = false;
    for (const auto& t : texts)
      if (!tokenize(t).empty()) any = true;
    if (!any) throw Error("Vectorizer::fit: no non-empty text");

    // document frequencies; std::map gives a deterministic vocabulary order
    std::map<std::string, int> df;
    std::vector<std::string> feats;
    for (const auto& text : texts) {
      feats.clear();
      extract_features(text, config, feats);
      std::sort(feats.begin(), feats.end());
      feats.erase(std::unique(feats.begin(), feats.end()), feats.end());
      for (const auto& f : feats) ++df[f];
    }

    Vectorizer v;
    v.config_ = config;
    const double n = static_cast<double>(texts.size());
    for (const auto& [feat, count] : df) {
      if (count < config.min_df) continue;
      v.vocab_[feat] = static_cast<int>(v.idf_.size());
      v.idf_.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
      v.feature_names_.push_back(feat);
    }
    if (v.idf_.empty())
      throw Error("Vectorizer::fit: min_df leaves an empty vocabulary");
    return v;
  }

  int dim() const { return static_cast<int>(idf_.size()); }

  // TF*IDF, L2-normalized. Out-of-vocabulary features are ignored;
  // an all-OOV text maps to the zero vector.
  SparseVector transform(const std::string& text) const {
    std::vector<std::string> feats;
    extract_features(text, config_, feats);
    std::map<int, double> tf;
    for (const auto& f : feats) {
      auto it = vocab_.find(f);
      if (it != vocab_.end()) tf[it->second] += 1.0;
    }
    SparseVector out;
    out.dim = dim();
    out.indices.reserve(tf.size());
    out.values.reserve(tf.size());
    double norm_sq = 0;
    for (const auto& [idx, count] : tf) {
      double w = count * idf_[idx];
      out.indices.push_back(idx);
      out.values.push_back(w);
      norm_sq += w * w;
    }
    if (norm_sq > 0) {
      double inv = 1.0 / std::sqrt(norm_sq);
      for (double& v : out.values) v *= inv;
    }
    return out;
  }

  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::vector<double>& idf() const { return idf_; }
  const VectorizerConfig& config() const { return config_; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["config"] = {{"word_ngram_min", config_.word_ngram_min},
                   {"word_ngram_max", config_.word_ngram_max},
                   {"use_char_ngrams", config_.use_char_ngrams},
                   {"char_ngram_min", config_.char_ngram_min},
                   {"char_ngram_max", config_.char_ngram_max},
                   {"min_df", config_.min_df}};
    j["features"] = feature_names_;
    j["idf"] = idf_;
    return j;
  }

  static Vectorizer from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != 1)
      throw Error("unsupported vectorizer artifact version");
    Vectorizer v;
    const auto& c = j.at("config");
    v.config_.word_ngram_min = c.at("word_ngram_min").get<int>();
    v.config_.word_ngram_max = c.at("word_ngram_max").get<int>();
    v.config_.use_char_ngrams = c.at("use_char_ngrams").get<bool>();
    v.config_.char_ngram_min = c.at("char_ngram_min").get<int>();
    v.config_.char_ngram_max = c.at("char_ngram_max").get<int>();
    v.config_.min_df = c.at("min_df").get<int>();
    v.feature_names_ = j.at("features").get<std::vector<std::string>>();
    v.idf_ = j.at("idf").get<std::vector<double>>();
    if (v.feature_names_.size() != v.idf_.size())
      throw Error("vectorizer artifact: feature/idf size mismatch");
    for (std::size_t i = 0; i < v.feature_names_.size(); ++i)
      v.vocab_[v.feature_names_[i]] = static_cast<int>(i);
    return v;
  }

 private:
  static void extract_features(const std::string& text,
                               const VectorizerConfig& config,
                               std::vector<std::string>& out) {
    std::vector<std::string> tokens = tokenize(text);
    for (int n = config.word_ngram_min; n <= config.word_ngram_max; ++n) {
      if (n <= 0) continue;
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = "w:";
        for (int k = 0; k < n; ++k) {
          if (k) gram.push_back(' ');
          gram += tokens[i + k];
        }
        out.push_back(std::move(gram));
      }
    }
    if (config.use_char_ngrams) {
      // char n-grams over the normalized token stream, space-joined
      std::string joined;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) joined.push_back(' ');
        joined += tokens[i];
      }
      for (int n = config.char_ngram_min; n <= config.char_ngram_max; ++n) {
        if (n <= 0) continue;
        for (std::size_t i = 0; i + n <= joined.size(); ++i)
          out.push_back("c:" + joined.substr(i, n));
      }
    }
  }

  VectorizerConfig config_;
  std::unordered_map<std::string, int> vocab_;
  std::vector<std::string> feature_names_;
  std::vector<double> idf_;
};

// Optional pre-computed embedding file: per line `id<TAB>v1 v2 ... vd`.
// Vectors are L2-normalized on load.
inline std::unordered_map<std::string, SparseVector> load_embeddings(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file: " + path);
  std::unordered_map<std::string, SparseVector> out;
  std::string line;
  int dim = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("embedding line " + std::to_string(line_no) +
                  ": missing tab separator");
    std::string id = line.substr(0, tab);
    std::istringstream vs(line.substr(tab + 1));
    SparseVector v;
    double x;
    int idx = 0;
    double norm_sq = 0;
    while (vs >> x) {
      if (x != 0.0) {
        v.indices.push_back(idx);
        v.values.push_back(x);
        norm_sq += x * x;
      }
      ++idx;
    }
    if (dim < 0) dim = idx;
    if (idx != dim)
      throw Error("embedding line " + std::to_string(line_no) +
                  ": inconsistent dimension");
    v.dim = dim;
    if (norm_sq > 0) {
      double inv = 1.0 / std::sqrt(norm_sq);
      for (double& w : v.values) w *= inv;
    }
    if (!out.emplace(id, std::move(v)).second)
      throw Error("embedding line " + std::to_string(line_no) +
                  ": duplicate id '" + id + "'");
  }
  return out;
}

}  // namespace nnsi
