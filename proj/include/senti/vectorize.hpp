#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "senti/error.hpp"
#include "senti/preprocess.hpp"
#include "senti/sparse.hpp"

namespace senti {

// Two weightings share one fitted model:
//
//   Collection: tf(t,d) = count(t,d) / cf(t)     idf(t) = log10(N / cf(t))
//   Standard:   tf(t,d) = count(t,d)             idf(t) = log10(N / df(t))
//
// where N is the number of fitted documents, df(t) the number of documents
// holding t and cf(t) the total count of t over all of them. The Collection
// weighting normalizes a term's TF over the corpus and goes negative for
// terms that occur more than N times in total.
enum class TfIdfVariant { Collection, Standard };

inline std::string_view to_string(TfIdfVariant v) { return v == TfIdfVariant::Collection ? "collection" : "standard"; }

inline TfIdfVariant parse_variant(std::string_view name) {
  if (name == "collection") return TfIdfVariant::Collection;
  if (name == "standard") return TfIdfVariant::Standard;
  throw Error(ErrorCode::InvalidConfig, "unknown tf-idf variant '" + std::string(name) + "'");
}

struct TermStat {
  std::uint32_t df = 0;
  std::uint64_t cf = 0;

  bool operator==(const TermStat&) const = default;
};

struct TransformResult {
  SparseVector vector;
  std::size_t oov_tokens = 0;
};

/// Raw occurrence counts of each token, keyed by token.
inline std::map<std::string, std::uint64_t> term_counts(std::span<const std::string> tokens) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& t : tokens) ++counts[t];
  return counts;
}

/// Vocabulary and term statistics of a tokenized training corpus. The model
/// is frozen once fitted: transforming documents never touches it.
class TfIdfModel {
 public:
  TfIdfModel() = default;

  static TfIdfModel fit(std::span<const std::vector<std::string>> documents,
                        TfIdfVariant variant = TfIdfVariant::Collection) {
    if (documents.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot fit tf-idf on zero documents");
    std::map<std::string, TermStat> stats;
    for (const auto& doc : documents) {
      for (const auto& [term, count] : term_counts(doc)) {
        auto& s = stats[term];
        s.df += 1;
        s.cf += count;
      }
    }
    TfIdfModel model;
    model.variant_ = variant;
    model.doc_count_ = documents.size();
    model.terms_.reserve(stats.size());
    model.stats_.reserve(stats.size());
    for (auto& [term, s] : stats) {
      model.index_.emplace(term, static_cast<std::uint32_t>(model.terms_.size()));
      model.terms_.push_back(term);
      model.stats_.push_back(s);
    }
    return model;
  }

  static TfIdfModel fit(std::span<const TokenizedDocument> documents, TfIdfVariant variant = TfIdfVariant::Collection) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(documents.size());
    for (const auto& d : documents) tokens.push_back(d.tokens);
    return fit(std::span<const std::vector<std::string>>(tokens), variant);
  }

  TfIdfVariant variant() const noexcept { return variant_; }
  std::size_t doc_count() const noexcept { return doc_count_; }
  std::size_t vocabulary_size() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::string& term(std::uint32_t column) const { return terms_.at(column); }

  std::optional<std::uint32_t> index_of(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const TermStat& stat(std::string_view term) const { return stats_[require(term)]; }
  const TermStat& stat(std::uint32_t column) const { return stats_.at(column); }
  std::uint32_t df(std::string_view term) const { return stat(term).df; }
  std::uint64_t cf(std::string_view term) const { return stat(term).cf; }

  /// Same fitted statistics under the other weighting.
  TfIdfModel with_variant(TfIdfVariant variant) const {
    TfIdfModel copy = *this;
    copy.variant_ = variant;
    return copy;
  }

  double idf(std::string_view term) const { return idf_at(require(term)); }

  double tf(std::string_view term, std::span<const std::string> document) const {
    const auto column = require(term);
    const auto raw = static_cast<std::uint64_t>(std::count(document.begin(), document.end(), term));
    return tf_at(column, raw);
  }

  double weight(std::string_view term, std::span<const std::string> document) const {
    const auto column = require(term);
    const auto raw = static_cast<std::uint64_t>(std::count(document.begin(), document.end(), term));
    return tf_at(column, raw) * idf_at(column);
  }

  TransformResult transform_with_diagnostics(std::span<const std::string> document) const {
    TransformResult result;
    for (const auto& [term, raw] : term_counts(document)) {
      auto it = index_.find(term);
      if (it == index_.end()) {
        result.oov_tokens += raw;
        continue;
      }
      const double w = tf_at(it->second, raw) * idf_at(it->second);
      if (w != 0.0) result.vector.entries.emplace_back(it->second, w);
    }
    std::sort(result.vector.entries.begin(), result.vector.entries.end());
    return result;
  }

  SparseVector transform(std::span<const std::string> document) const {
    return transform_with_diagnostics(document).vector;
  }

  /// Raw in-vocabulary counts, the input of the count-based classifiers.
  SparseVector counts(std::span<const std::string> document) const {
    SparseVector out;
    for (const auto& [term, raw] : term_counts(document)) {
      auto it = index_.find(term);
      if (it != index_.end()) out.entries.emplace_back(it->second, static_cast<double>(raw));
    }
    std::sort(out.entries.begin(), out.entries.end());
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json stats = nlohmann::json::array();
    for (const auto& s : stats_) stats.push_back({{"df", s.df}, {"cf", s.cf}});
    return {{"format", "senti.tfidf"}, {"version", 1},        {"variant", to_string(variant_)},
            {"doc_count", doc_count_}, {"vocabulary", terms_}, {"stats", stats}};
  }

  static TfIdfModel from_json(const nlohmann::json& j) {
    try {
      if (j.at("format").get<std::string>() != "senti.tfidf" || j.at("version").get<int>() != 1)
        throw Error(ErrorCode::ModelFormat, "not a version 1 tf-idf model");
      TfIdfModel model;
      model.variant_ = parse_variant(j.at("variant").get<std::string>());
      model.doc_count_ = j.at("doc_count").get<std::size_t>();
      model.terms_ = j.at("vocabulary").get<std::vector<std::string>>();
      const auto& stats = j.at("stats");
      if (stats.size() != model.terms_.size()) throw Error(ErrorCode::ModelFormat, "vocabulary/stats length mismatch");
      for (std::size_t i = 0; i < model.terms_.size(); ++i) {
        TermStat s{stats[i].at("df").get<std::uint32_t>(), stats[i].at("cf").get<std::uint64_t>()};
        if (s.df == 0 || s.df > model.doc_count_ || s.cf < s.df)
          throw Error(ErrorCode::ModelFormat, "inconsistent statistics for '" + model.terms_[i] + "'");
        model.stats_.push_back(s);
        if (!model.index_.emplace(model.terms_[i], static_cast<std::uint32_t>(i)).second)
          throw Error(ErrorCode::ModelFormat, "duplicate vocabulary term '" + model.terms_[i] + "'");
      }
      return model;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ModelFormat, e.what());
    }
  }

  bool operator==(const TfIdfModel& other) const {
    return variant_ == other.variant_ && doc_count_ == other.doc_count_ && terms_ == other.terms_ &&
           stats_ == other.stats_;
  }

 private:
  std::uint32_t require(std::string_view term) const {
    auto column = index_of(term);
    if (!column) throw Error(ErrorCode::UnknownTerm, std::string(term));
    return *column;
  }

  double idf_at(std::uint32_t column) const {
    const auto& s = stats_[column];
    const double denom = variant_ == TfIdfVariant::Collection ? static_cast<double>(s.cf) : static_cast<double>(s.df);
    return std::log10(static_cast<double>(doc_count_) / denom);
  }

  double tf_at(std::uint32_t column, std::uint64_t raw) const {
    if (variant_ == TfIdfVariant::Collection) return static_cast<double>(raw) / static_cast<double>(stats_[column].cf);
    return static_cast<double>(raw);
  }

  TfIdfVariant variant_ = TfIdfVariant::Collection;
  std::size_t doc_count_ = 0;
  std::vector<std::string> terms_;
  std::vector<TermStat> stats_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace senti
