#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "senti/classifiers/common.hpp"

namespace senti {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t negatives = 0;  // training documents that reached this node
  std::uint32_t positives = 0;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct SplitChoice {
  std::uint32_t feature = 0;
  double threshold = 0.0;
};

/// Binary CART tree stored as a flat node list; node 0 is the root.
class DecisionTreeModel {
 public:
  DecisionTreeModel() = default;
  explicit DecisionTreeModel(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error(ErrorCode::ModelFormat, "tree without nodes");
    for (const auto& n : nodes_) {
      if (n.is_leaf()) continue;
      const auto count = static_cast<std::int32_t>(nodes_.size());
      if (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count)
        throw Error(ErrorCode::ModelFormat, "tree child index out of range");
    }
  }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  std::size_t depth() const { return depth_from(0); }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](auto& n) { return n.is_leaf(); }));
  }

  std::optional<SplitChoice> root_split() const {
    if (nodes_.front().is_leaf()) return std::nullopt;
    return SplitChoice{static_cast<std::uint32_t>(nodes_.front().feature), nodes_.front().threshold};
  }

  /// Leaf majority; an even leaf predicts Negative.
  Prediction predict(const SparseVector& x) const {
    const TreeNode* node = &nodes_.front();
    while (!node->is_leaf()) {
      const double v = x.at(static_cast<std::uint32_t>(node->feature));
      node = &nodes_[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    const double total = static_cast<double>(node->positives + node->negatives);
    const double score = total > 0 ? static_cast<double>(node->positives) / total : 0.0;
    return {node->positives > node->negatives ? Label::Positive : Label::Negative, score};
  }

  nlohmann::json to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& n : nodes_)
      list.push_back({n.feature, n.threshold, n.left, n.right, n.negatives, n.positives});
    return {{"nodes", list}};
  }

  static DecisionTreeModel from_json(const nlohmann::json& j) {
    std::vector<TreeNode> nodes;
    for (const auto& e : j.at("nodes"))
      nodes.push_back({e.at(0).get<std::int32_t>(), e.at(1).get<double>(), e.at(2).get<std::int32_t>(),
                       e.at(3).get<std::int32_t>(), e.at(4).get<std::uint32_t>(), e.at(5).get<std::uint32_t>()});
    return DecisionTreeModel(std::move(nodes));
  }

 private:
  std::size_t depth_from(std::size_t i) const {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_from(static_cast<std::size_t>(n.left)), depth_from(static_cast<std::size_t>(n.right)));
  }

  std::vector<TreeNode> nodes_;
};

namespace detail {

// Minimizing the weighted Gini impurity of a split is the same as maximizing
//   (aL^2 + bL^2) / mL + (aR^2 + bR^2) / mR
// over the child class counts (a, b) and sizes m. Keeping that as an integer
// fraction makes split comparisons exact.
struct GiniScore {
  __int128 num = 0;
  __int128 den = 1;

  static GiniScore of(std::uint64_t aL, std::uint64_t bL, std::uint64_t aR, std::uint64_t bR) {
    const __int128 mL = aL + bL, mR = aR + bR;
    const __int128 sL = static_cast<__int128>(aL) * aL + static_cast<__int128>(bL) * bL;
    const __int128 sR = static_cast<__int128>(aR) * aR + static_cast<__int128>(bR) * bR;
    return {sL * mR + sR * mL, mL * mR};
  }

  bool better_than(const GiniScore& o) const { return num * o.den > o.num * den; }
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const SparseVector> rows, std::span<const Label> labels, std::size_t num_features,
              std::optional<std::size_t> max_depth, std::size_t min_leaf)
      : rows_(rows), labels_(labels), max_depth_(max_depth), min_leaf_(min_leaf), columns_(num_features),
        member_(rows.size(), false) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (const auto& [c, v] : rows[r].entries) {
        if (c >= num_features) throw Error(ErrorCode::UnknownTerm, "column " + std::to_string(c));
        columns_[c].emplace_back(static_cast<std::uint32_t>(r), v);
      }
  }

  std::vector<TreeNode> build() {
    std::vector<std::uint32_t> all(rows_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  struct Candidate {
    SplitChoice split;
    GiniScore score;
  };

  std::int32_t grow(const std::vector<std::uint32_t>& samples, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    for (auto s : samples) (labels_[s] == Label::Positive ? nodes_[id].positives : nodes_[id].negatives) += 1;

    const bool pure = nodes_[id].positives == 0 || nodes_[id].negatives == 0;
    const bool at_depth = max_depth_ && depth >= *max_depth_;
    if (pure || at_depth || samples.size() < 2 * min_leaf_) return id;

    const auto best = best_split(samples);
    if (!best) return id;

    std::vector<std::uint32_t> left, right;
    for (auto s : samples)
      (rows_[s].at(best->feature) <= best->threshold ? left : right).push_back(s);

    nodes_[id].feature = static_cast<std::int32_t>(best->feature);
    nodes_[id].threshold = best->threshold;
    const auto l = grow(left, depth + 1);
    const auto r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  // Features ascending, thresholds ascending; a later candidate replaces the
  // incumbent only when strictly better.
  std::optional<SplitChoice> best_split(const std::vector<std::uint32_t>& samples) {
    for (auto s : samples) member_[s] = true;
    std::uint64_t total_pos = 0;
    for (auto s : samples) total_pos += labels_[s] == Label::Positive;
    const std::uint64_t total_neg = samples.size() - total_pos;

    std::optional<Candidate> best;
    for (std::uint32_t f = 0; f < columns_.size(); ++f) {
      groups_.clear();
      std::uint64_t zero_pos = total_pos, zero_neg = total_neg;
      for (const auto& [r, v] : columns_[f]) {
        if (!member_[r]) continue;
        const bool pos = labels_[r] == Label::Positive;
        groups_.push_back({v, pos ? 1u : 0u, pos ? 0u : 1u});
        (pos ? zero_pos : zero_neg) -= 1;
      }
      if (groups_.empty()) continue;  // feature is absent throughout this node
      if (zero_pos + zero_neg > 0) groups_.push_back({0.0, zero_pos, zero_neg});
      std::sort(groups_.begin(), groups_.end(), [](const auto& a, const auto& b) { return a.value < b.value; });

      // Left side = every sample whose value is <= the current distinct value.
      std::uint64_t left_pos = 0, left_neg = 0;
      for (std::size_t i = 0; i < groups_.size();) {
        const double v = groups_[i].value;
        for (; i < groups_.size() && groups_[i].value == v; ++i) {
          left_pos += groups_[i].positives;
          left_neg += groups_[i].negatives;
        }
        if (i == groups_.size()) break;
        const double next = groups_[i].value;

        const std::uint64_t right_pos = total_pos - left_pos, right_neg = total_neg - left_neg;
        if (left_pos + left_neg < min_leaf_ || right_pos + right_neg < min_leaf_) continue;
        double threshold = v + (next - v) / 2.0;
        if (!(threshold < next)) threshold = v;
        const auto score = GiniScore::of(left_pos, left_neg, right_pos, right_neg);
        if (!best || score.better_than(best->score)) best = Candidate{{f, threshold}, score};
      }
    }
    for (auto s : samples) member_[s] = false;
    if (!best) return std::nullopt;
    return best->split;
  }

  struct ValueGroup {
    double value;
    std::uint64_t positives;
    std::uint64_t negatives;
  };

  std::span<const SparseVector> rows_;
  std::span<const Label> labels_;
  std::optional<std::size_t> max_depth_;
  std::size_t min_leaf_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> columns_;
  std::vector<bool> member_;
  std::vector<ValueGroup> groups_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

/// Greedy CART on Gini impurity. Candidate thresholds are midpoints between
/// consecutive distinct values a feature takes inside the node (absent
/// entries count as 0). Growth stops at pure nodes, at max_depth, or when no
/// split leaves min_leaf documents on both sides.
inline DecisionTreeModel train_dt(std::span<const SparseVector> rows, std::span<const Label> labels,
                                  std::size_t num_features, std::optional<std::size_t> max_depth = std::nullopt,
                                  std::size_t min_leaf = 1) {
  detail::check_training_shape(rows, labels);
  if (min_leaf == 0) throw Error(ErrorCode::InvalidConfig, "dt_min_leaf must be positive");
  return DecisionTreeModel(detail::TreeBuilder(rows, labels, num_features, max_depth, min_leaf).build());
}

}  // namespace senti
