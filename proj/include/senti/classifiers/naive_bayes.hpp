#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <json.hpp>

#include "senti/classifiers/common.hpp"

namespace senti {

/// Multinomial Naive Bayes over raw term counts with additive smoothing:
///
///   prior(c)        = n_c / n
///   likelihood(t|c) = (count(t,c) + alpha) / (count(.,c) + alpha * |V|)
///
/// Only the integer counts are stored; the log tables are rebuilt from them,
/// so a serialized model predicts bit-identically after reloading.
class NaiveBayesModel {
 public:
  NaiveBayesModel() = default;

  NaiveBayesModel(std::size_t vocabulary_size, double alpha, std::array<std::uint64_t, 2> class_docs,
                  std::array<std::vector<std::uint64_t>, 2> term_counts)
      : vocabulary_size_(vocabulary_size), alpha_(alpha), class_docs_(class_docs), term_counts_(std::move(term_counts)) {
    rebuild();
  }

  std::size_t vocabulary_size() const noexcept { return vocabulary_size_; }
  double alpha() const noexcept { return alpha_; }
  double prior(Label c) const { return prior_[as_target(c)]; }
  double likelihood(std::uint32_t column, Label c) const { return std::exp(log_likelihood_[as_target(c)].at(column)); }
  double log_likelihood(std::uint32_t column, Label c) const { return log_likelihood_[as_target(c)].at(column); }
  const std::array<std::uint64_t, 2>& class_docs() const noexcept { return class_docs_; }
  const std::array<std::vector<std::uint64_t>, 2>& term_counts() const noexcept { return term_counts_; }

  /// Unnormalized log posterior per class, indexed by as_target(label).
  std::array<double, 2> log_joint(const SparseVector& counts) const {
    std::array<double, 2> score{std::log(prior_[0]), std::log(prior_[1])};
    for (int c = 0; c < 2; ++c) {
      for (const auto& [column, count] : counts.entries) {
        if (column >= vocabulary_size_) continue;
        score[c] += count * log_likelihood_[c][column];
      }
    }
    return score;
  }

  /// Normalized posterior (negative, positive).
  std::array<double, 2> posterior(const SparseVector& counts) const {
    auto score = log_joint(counts);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    if (score[0] == kNegInf && score[1] == kNegInf) score = {std::log(prior_[0]), std::log(prior_[1])};
    const double top = std::max(score[0], score[1]);
    const double e0 = std::exp(score[0] - top);
    const double e1 = std::exp(score[1] - top);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
  }

  Prediction predict(const SparseVector& counts) const {
    const auto p = posterior(counts);
    return {p[1] >= p[0] ? Label::Positive : Label::Negative, p[1]};
  }

  nlohmann::json to_json() const {
    return {{"vocabulary_size", vocabulary_size_},
            {"alpha", alpha_},
            {"class_docs", class_docs_},
            {"term_counts", {{"negative", term_counts_[0]}, {"positive", term_counts_[1]}}}};
  }

  static NaiveBayesModel from_json(const nlohmann::json& j) {
    std::array<std::vector<std::uint64_t>, 2> counts{j.at("term_counts").at("negative").get<std::vector<std::uint64_t>>(),
                                                     j.at("term_counts").at("positive").get<std::vector<std::uint64_t>>()};
    const auto vocab = j.at("vocabulary_size").get<std::size_t>();
    if (counts[0].size() != vocab || counts[1].size() != vocab)
      throw Error(ErrorCode::ModelFormat, "naive bayes count table does not match vocabulary");
    return NaiveBayesModel(vocab, j.at("alpha").get<double>(), j.at("class_docs").get<std::array<std::uint64_t, 2>>(),
                           std::move(counts));
  }

 private:
  void rebuild() {
    const double n = static_cast<double>(class_docs_[0] + class_docs_[1]);
    for (int c = 0; c < 2; ++c) {
      prior_[c] = static_cast<double>(class_docs_[c]) / n;
      std::uint64_t total = 0;
      for (auto v : term_counts_[c]) total += v;
      const double denom = static_cast<double>(total) + alpha_ * static_cast<double>(vocabulary_size_);
      log_likelihood_[c].resize(vocabulary_size_);
      for (std::size_t t = 0; t < vocabulary_size_; ++t)
        log_likelihood_[c][t] = std::log((static_cast<double>(term_counts_[c][t]) + alpha_) / denom);
    }
  }

  std::size_t vocabulary_size_ = 0;
  double alpha_ = 1.0;
  std::array<std::uint64_t, 2> class_docs_{};
  std::array<std::vector<std::uint64_t>, 2> term_counts_;
  std::array<double, 2> prior_{};
  std::array<std::vector<double>, 2> log_likelihood_;
};

/// `counts` rows hold raw term counts (TfIdfModel::counts), not weights.
inline NaiveBayesModel train_nb(std::span<const SparseVector> counts, std::span<const Label> labels,
                                std::size_t vocabulary_size, double alpha) {
  detail::check_training_shape(counts, labels);
  if (!(alpha >= 0.0)) throw Error(ErrorCode::InvalidConfig, "nb_alpha must be non-negative");
  std::array<std::uint64_t, 2> docs{};
  std::array<std::vector<std::uint64_t>, 2> table{std::vector<std::uint64_t>(vocabulary_size, 0),
                                                  std::vector<std::uint64_t>(vocabulary_size, 0)};
  for (std::size_t d = 0; d < counts.size(); ++d) {
    const int c = as_target(labels[d]);
    ++docs[c];
    for (const auto& [column, count] : counts[d].entries) {
      if (column >= vocabulary_size) throw Error(ErrorCode::UnknownTerm, "column " + std::to_string(column));
      table[c][column] += static_cast<std::uint64_t>(std::llround(count));
    }
  }
  if (docs[0] == 0) throw Error(ErrorCode::MissingClass, "no negative training documents");
  if (docs[1] == 0) throw Error(ErrorCode::MissingClass, "no positive training documents");
  return NaiveBayesModel(vocabulary_size, alpha, docs, std::move(table));
}

}  // namespace senti
