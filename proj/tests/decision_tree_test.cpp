#include <gtest/gtest.h>

#include "oracles/brute_force.hpp"
#include "senti/classifiers/decision_tree.hpp"
#include "senti/model.hpp"
#include "senti/random.hpp"
#include "test_util.hpp"

namespace senti {
namespace {

SparseVector sparse_from(const oracle::Dense& d) {
  SparseVector v;
  for (std::uint32_t i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) v.entries.emplace_back(i, d[i]);
  return v;
}

struct Synthetic {
  std::vector<oracle::Dense> dense;
  std::vector<SparseVector> rows;
  std::vector<Label> labels;
  std::vector<int> ids;
};

// Values on a quarter grid so midpoints are exact and ties are common.
Synthetic synthetic(std::uint64_t seed, std::size_t n, std::size_t dims) {
  Rng rng(seed);
  Synthetic s;
  for (std::size_t i = 0; i < n; ++i) {
    oracle::Dense d(dims, 0.0);
    for (auto& x : d)
      if (rng.next_unit() < 0.4) x = 0.25 * static_cast<double>(1 + rng.below(8));
    const bool pos = rng.next_unit() < 0.5;
    s.dense.push_back(d);
    s.rows.push_back(sparse_from(d));
    s.labels.push_back(pos ? Label::Positive : Label::Negative);
    s.ids.push_back(pos);
  }
  return s;
}

double training_accuracy(const DecisionTreeModel& m, const std::vector<SparseVector>& rows,
                         const std::vector<Label>& labels) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) hits += m.predict(rows[i]).label == labels[i];
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

TEST(DecisionTree, SingleSeparatingTerm) {
  const std::vector<SparseVector> rows = {
      SparseVector{{{0u, 1.0}, {1u, 0.5}}}, SparseVector{{{0u, 2.0}}}, SparseVector{{{1u, 0.5}}},
      SparseVector{{{2u, 1.0}}}};
  const std::vector<Label> labels = {Label::Positive, Label::Positive, Label::Negative, Label::Negative};
  const auto tree = train_dt(rows, labels, 3);
  EXPECT_EQ(tree.depth(), 1u);
  ASSERT_TRUE(tree.root_split());
  EXPECT_EQ(tree.root_split()->feature, 0u);
  EXPECT_DOUBLE_EQ(tree.root_split()->threshold, 0.5);
  EXPECT_EQ(training_accuracy(tree, rows, labels), 1.0);
}

TEST(DecisionTree, SingleLabelGivesLeaf) {
  const std::vector<SparseVector> rows = {SparseVector{{{0u, 1.0}}}, SparseVector{{{1u, 1.0}}}};
  const std::vector<Label> labels = {Label::Positive, Label::Positive};
  const auto tree = train_dt(rows, labels, 2);
  EXPECT_EQ(tree.depth(), 0u);
  EXPECT_EQ(tree.leaf_count(), 1u);
  EXPECT_EQ(tree.predict(SparseVector{}).label, Label::Positive);
}

TEST(DecisionTree, EvenLeafPredictsNegative) {
  // Identical vectors with different labels cannot be split.
  const std::vector<SparseVector> rows = {SparseVector{{{0u, 1.0}}}, SparseVector{{{0u, 1.0}}}};
  const std::vector<Label> labels = {Label::Positive, Label::Negative};
  const auto tree = train_dt(rows, labels, 1);
  EXPECT_EQ(tree.leaf_count(), 1u);
  const auto p = tree.predict(rows[0]);
  EXPECT_EQ(p.label, Label::Negative);
  EXPECT_DOUBLE_EQ(p.score, 0.5);
}

TEST(DecisionTree, StumpMatchesExhaustiveSearch) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto s = synthetic(seed, 12, 5);
    const auto tree = train_dt(s.rows, s.labels, 5, 1);
    const auto expected = oracle::best_stump(s.dense, s.ids);
    const bool pure = std::all_of(s.ids.begin(), s.ids.end(), [&](int y) { return y == s.ids[0]; });
    if (pure || !expected) {
      EXPECT_FALSE(tree.root_split()) << seed;
      continue;
    }
    ASSERT_TRUE(tree.root_split()) << seed;
    EXPECT_EQ(tree.root_split()->feature, expected->feature) << seed;
    EXPECT_EQ(tree.root_split()->threshold, expected->threshold) << seed;
  }
}

TEST(DecisionTree, UnlimitedDepthFitsConsistentData) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto s = synthetic(seed, 40, 6);
    // Drop rows whose vector repeats with a different label.
    std::vector<SparseVector> rows;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      bool clash = false;
      for (std::size_t j = 0; j < s.rows.size(); ++j)
        clash |= s.rows[j] == s.rows[i] && s.labels[j] != s.labels[i];
      if (!clash) {
        rows.push_back(s.rows[i]);
        labels.push_back(s.labels[i]);
      }
    }
    const auto tree = train_dt(rows, labels, 6);
    EXPECT_EQ(training_accuracy(tree, rows, labels), 1.0) << seed;
  }
}

TEST(DecisionTree, DepthAndLeafLimits) {
  const auto s = synthetic(7, 60, 8);
  for (std::size_t d : {1u, 2u, 3u}) EXPECT_LE(train_dt(s.rows, s.labels, 8, d).depth(), d);
  const auto shallow = train_dt(s.rows, s.labels, 8, 0);
  EXPECT_EQ(shallow.leaf_count(), 1u);

  // Every leaf holds at least min_leaf documents.
  const auto tree = train_dt(s.rows, s.labels, 8, std::nullopt, 5);
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf()) {
      EXPECT_GE(n.positives + n.negatives, 5u);
    }
  }
  EXPECT_EQ(testing::code_of([&] { train_dt(s.rows, s.labels, 8, std::nullopt, 0); }), ErrorCode::InvalidConfig);
}

TEST(DecisionTree, PredictIsPureAndRoundTrips) {
  const auto s = synthetic(3, 30, 4);
  const auto tree = train_dt(s.rows, s.labels, 4);
  const auto copy = DecisionTreeModel::from_json(nlohmann::json::parse(tree.to_json().dump()));
  for (const auto& r : s.rows) {
    EXPECT_EQ(tree.predict(r), tree.predict(r));
    EXPECT_EQ(copy.predict(r), tree.predict(r));
  }
}

}  // namespace
}  // namespace senti
