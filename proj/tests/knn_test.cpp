#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "oracles/brute_force.hpp"
#include "senti/classifiers/knn.hpp"
#include "senti/random.hpp"
#include "test_util.hpp"

namespace senti {
namespace {

using testing::code_of;

SparseVector sparse_from(const oracle::Dense& d) {
  SparseVector v;
  for (std::uint32_t i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) v.entries.emplace_back(i, d[i]);
  return v;
}

// Random non-negative sparse rows; about a third of the entries are set.
std::vector<oracle::Dense> random_rows(Rng& rng, std::size_t n, std::size_t dims) {
  std::vector<oracle::Dense> rows(n, oracle::Dense(dims, 0.0));
  for (auto& r : rows)
    for (auto& x : r)
      if (rng.next_unit() < 0.3) x = std::round(rng.uniform(0.1, 3.0) * 4) / 4;  // coarse values create ties
  return rows;
}

TEST(Knn, SelfMatchWithK1) {
  Rng rng(5);
  const auto rows = random_rows(rng, 10, 6);
  std::vector<SparseVector> xs;
  std::vector<Label> ys;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    xs.push_back(sparse_from(rows[i]));
    ys.push_back(i % 3 == 0 ? Label::Positive : Label::Negative);
  }
  const auto model = train_knn(xs, ys, 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].empty()) continue;
    // A duplicate row with a lower ordinal would win the tie; none here.
    EXPECT_EQ(model.predict(xs[i]).label, ys[model.neighbours(xs[i]).front()]);
  }
}

TEST(Knn, WholeSetMajority) {
  std::vector<SparseVector> xs;
  std::vector<Label> ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(SparseVector{{{static_cast<std::uint32_t>(i), 1.0 + i}}});
    ys.push_back(i < 6 ? Label::Positive : Label::Negative);
  }
  const auto model = train_knn(xs, ys, 10);
  const auto p = model.predict(SparseVector{{{9u, 1.0}}});  // nearest is a negative doc
  EXPECT_EQ(p.label, Label::Positive);
  EXPECT_DOUBLE_EQ(p.score, 0.6);
}

TEST(Knn, VoteTieGoesToNearest) {
  const std::vector<SparseVector> xs = {SparseVector{{{0u, 1.0}}}, SparseVector{{{1u, 1.0}}}};
  const std::vector<Label> ys = {Label::Negative, Label::Positive};
  const auto model = train_knn(xs, ys, 2);
  const auto p = model.predict(SparseVector{{{0u, 0.2}, {1u, 1.0}}});
  EXPECT_EQ(p.label, Label::Positive);
  EXPECT_DOUBLE_EQ(p.score, 0.5);
  EXPECT_EQ(model.predict(SparseVector{{{0u, 1.0}, {1u, 0.2}}}).label, Label::Negative);
}

TEST(Knn, SimilarityTieGoesToLowerOrdinal) {
  const std::vector<SparseVector> xs = {SparseVector{{{0u, 1.0}}}, SparseVector{{{0u, 2.0}}}};
  const std::vector<Label> ys = {Label::Positive, Label::Negative};
  EXPECT_EQ(train_knn(xs, ys, 1).predict(SparseVector{{{0u, 5.0}}}).label, Label::Positive);
  const std::vector<std::uint64_t> ord = {7, 3};
  EXPECT_EQ(train_knn(xs, ys, 1, ord).predict(SparseVector{{{0u, 5.0}}}).label, Label::Negative);
}

TEST(Knn, ZeroNormQueryRanksByOrdinal) {
  const std::vector<SparseVector> xs = {SparseVector{{{0u, 1.0}}}, SparseVector{{{1u, 1.0}}}, SparseVector{}};
  const std::vector<Label> ys = {Label::Negative, Label::Positive, Label::Positive};
  const auto model = train_knn(xs, ys, 1);
  EXPECT_EQ(model.predict(SparseVector{}).label, Label::Negative);
}

TEST(Knn, KTooLarge) {
  const std::vector<SparseVector> xs = {SparseVector{{{0u, 1.0}}}};
  const std::vector<Label> ys = {Label::Positive};
  EXPECT_EQ(code_of([&] { train_knn(xs, ys, 2); }), ErrorCode::KTooLarge);
  EXPECT_EQ(code_of([&] { train_knn(xs, ys, 0); }), ErrorCode::InvalidConfig);
}

TEST(Knn, MatchesExhaustiveScan) {
  Rng rng(20);
  for (int trial = 0; trial < 10; ++trial) {
    const auto train_rows = random_rows(rng, 20, 8);
    const auto queries = random_rows(rng, 15, 8);
    std::vector<SparseVector> xs;
    std::vector<Label> ys;
    std::vector<int> ids;
    for (const auto& r : train_rows) {
      xs.push_back(sparse_from(r));
      const bool pos = rng.next_unit() < 0.5;
      ys.push_back(pos ? Label::Positive : Label::Negative);
      ids.push_back(pos);
    }
    for (std::size_t k : {1u, 3u, 4u, 5u, 20u}) {
      const auto model = train_knn(xs, ys, k);
      for (const auto& q : queries)
        ASSERT_EQ(as_target(model.predict(sparse_from(q)).label), oracle::knn_predict(train_rows, ids, q, k));
    }
  }
}

TEST(Knn, InsertionOrderDoesNotMatter) {
  Rng rng(77);
  const auto rows = random_rows(rng, 30, 6);
  const auto queries = random_rows(rng, 30, 6);
  std::vector<SparseVector> xs;
  std::vector<Label> ys;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    xs.push_back(sparse_from(rows[i]));
    ys.push_back(rng.next_unit() < 0.5 ? Label::Positive : Label::Negative);
  }
  const auto base = train_knn(xs, ys, 5);

  std::vector<std::size_t> perm(xs.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (int round = 0; round < 5; ++round) {
    rng.shuffle(perm);
    std::vector<SparseVector> px;
    std::vector<Label> py;
    std::vector<std::uint64_t> ord;
    for (auto i : perm) {
      px.push_back(xs[i]);
      py.push_back(ys[i]);
      ord.push_back(i);
    }
    const auto shuffled = train_knn(px, py, 5, ord);
    for (const auto& q : queries) ASSERT_EQ(shuffled.predict(sparse_from(q)), base.predict(sparse_from(q)));
  }
}

}  // namespace
}  // namespace senti
