#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include <json.hpp>

#include "senti/classifiers/common.hpp"

namespace senti {

/// Brute-force k nearest neighbours under cosine similarity.
///
/// Neighbours are ranked by similarity, ties going to the lower ordinal. The
/// label is the majority of the top k; an even split takes the label of the
/// single nearest neighbour. The score is the share of Positive votes.
class KnnModel {
 public:
  KnnModel() = default;

  KnnModel(std::vector<SparseVector> vectors, std::vector<Label> labels, std::vector<std::uint64_t> ordinals,
           std::size_t k)
      : vectors_(std::move(vectors)), labels_(std::move(labels)), ordinals_(std::move(ordinals)), k_(k) {}

  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  const std::vector<SparseVector>& vectors() const noexcept { return vectors_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  const std::vector<std::uint64_t>& ordinals() const noexcept { return ordinals_; }

  /// Positions into the stored set, best first.
  std::vector<std::size_t> neighbours(const SparseVector& query) const {
    std::vector<double> sim(vectors_.size());
    for (std::size_t i = 0; i < vectors_.size(); ++i) sim[i] = cosine(query, vectors_[i]);
    std::vector<std::size_t> order(vectors_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (sim[a] != sim[b]) return sim[a] > sim[b];
                        return ordinals_[a] < ordinals_[b];
                      });
    order.resize(k_);
    return order;
  }

  Prediction predict(const SparseVector& query) const {
    const auto top = neighbours(query);
    std::size_t positive = 0;
    for (auto i : top) positive += labels_[i] == Label::Positive;
    const std::size_t negative = top.size() - positive;
    Label label = labels_[top.front()];
    if (positive > negative) label = Label::Positive;
    else if (negative > positive) label = Label::Negative;
    return {label, static_cast<double>(positive) / static_cast<double>(top.size())};
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& v : vectors_) {
      nlohmann::json row = nlohmann::json::array();
      for (const auto& [c, w] : v.entries) row.push_back({c, w});
      rows.push_back(std::move(row));
    }
    std::vector<std::string> tags;
    for (auto l : labels_) tags.emplace_back(to_string(l));
    return {{"k", k_}, {"vectors", rows}, {"labels", tags}, {"ordinals", ordinals_}};
  }

  static KnnModel from_json(const nlohmann::json& j) {
    std::vector<SparseVector> vectors;
    for (const auto& row : j.at("vectors")) {
      SparseVector v;
      for (const auto& e : row) v.entries.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<double>());
      vectors.push_back(std::move(v));
    }
    std::vector<Label> labels;
    for (const auto& tag : j.at("labels")) labels.push_back(parse_label(tag.get<std::string>()));
    auto ordinals = j.at("ordinals").get<std::vector<std::uint64_t>>();
    const auto k = j.at("k").get<std::size_t>();
    if (labels.size() != vectors.size() || ordinals.size() != vectors.size() || k == 0 || k > vectors.size())
      throw Error(ErrorCode::ModelFormat, "inconsistent knn model");
    return KnnModel(std::move(vectors), std::move(labels), std::move(ordinals), k);
  }

 private:
  std::vector<SparseVector> vectors_;
  std::vector<Label> labels_;
  std::vector<std::uint64_t> ordinals_;
  std::size_t k_ = 5;
};

/// Ordinals default to insertion positions. Pass the original ones when the
/// rows were reordered so tie-breaks stay stable.
inline KnnModel train_knn(std::span<const SparseVector> vectors, std::span<const Label> labels, std::size_t k,
                          std::span<const std::uint64_t> ordinals = {}) {
  detail::check_training_shape(vectors, labels);
  if (k == 0) throw Error(ErrorCode::InvalidConfig, "knn_k must be positive");
  if (k > vectors.size())
    throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds " + std::to_string(vectors.size()) +
                                          " training documents");
  std::vector<std::uint64_t> ord;
  if (ordinals.empty()) {
    ord.resize(vectors.size());
    std::iota(ord.begin(), ord.end(), std::uint64_t{0});
  } else {
    if (ordinals.size() != vectors.size()) throw Error(ErrorCode::LengthMismatch, "ordinals");
    ord.assign(ordinals.begin(), ordinals.end());
  }
  return KnnModel({vectors.begin(), vectors.end()}, {labels.begin(), labels.end()}, std::move(ord), k);
}

}  // namespace senti
