#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "senti/error.hpp"
#include "senti/label.hpp"
#include "senti/sparse.hpp"

namespace senti {

struct Prediction {
  Label label = Label::Negative;
  /// Confidence for Positive: a normalized posterior, a vote share or a leaf
  /// class share depending on the classifier.
  double score = 0.0;

  bool operator==(const Prediction&) const = default;
};

/// Hyperparameters shared by all four classifiers; only the fields of the
/// selected method are read.
struct TrainConfig {
  std::uint64_t seed = 42;
  std::size_t knn_k = 5;
  std::optional<std::size_t> dt_max_depth;
  std::size_t dt_min_leaf = 1;
  std::size_t mlp_hidden = 16;
  double mlp_learning_rate = 0.05;
  std::size_t mlp_epochs = 200;
  double nb_alpha = 1.0;

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (knn_k == 0) fail("knn_k must be positive");
    if (dt_max_depth && *dt_max_depth == 0) fail("dt_max_depth must be positive");
    if (dt_min_leaf == 0) fail("dt_min_leaf must be positive");
    if (mlp_hidden == 0) fail("mlp_hidden must be positive");
    if (!(mlp_learning_rate > 0.0)) fail("mlp_learning_rate must be positive");
    if (mlp_epochs == 0) fail("mlp_epochs must be positive");
    if (!(nb_alpha >= 0.0)) fail("nb_alpha must be non-negative");
  }
};

namespace detail {

inline void check_training_shape(std::span<const SparseVector> rows, std::span<const Label> labels) {
  if (rows.size() != labels.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(rows.size()) + " rows vs " + std::to_string(labels.size()) +
                                               " labels");
  if (rows.empty()) throw Error(ErrorCode::EmptyCorpus, "no training documents");
}

}  // namespace detail

}  // namespace senti
