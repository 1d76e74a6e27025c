#include <gtest/gtest.h>

#include <cmath>

#include "oracles/brute_force.hpp"
#include "senti/classifiers/mlp.hpp"
#include "senti/model.hpp"
#include "test_util.hpp"

namespace senti {
namespace {

using testing::code_of;

// Five documents over four terms, TF-IDF-like magnitudes.
struct Toy {
  std::vector<SparseVector> xs = {
      SparseVector{{{0u, 0.9}, {2u, 0.3}}}, SparseVector{{{1u, 1.2}}}, SparseVector{{{0u, 0.4}, {3u, 0.7}}},
      SparseVector{{{1u, 0.2}, {2u, 1.1}, {3u, 0.5}}}, SparseVector{}};
  std::vector<Label> ys = {Label::Positive, Label::Negative, Label::Positive, Label::Negative, Label::Positive};
};

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  const Toy toy;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto p = MlpParams::random(4, 3, seed);
    const auto g = mlp_gradient(p, toy.xs, toy.ys);
    auto loss = [&] { return mlp_loss(p, toy.xs, toy.ys); };
    double worst = 0;
    for (std::size_t i = 0; i < p.w1.size(); ++i)
      worst = std::max(worst, relative_error(g.w1[i], oracle::central_difference(loss, p.w1[i], 1e-5)));
    for (std::size_t h = 0; h < p.hidden; ++h) {
      worst = std::max(worst, relative_error(g.b1[h], oracle::central_difference(loss, p.b1[h], 1e-5)));
      worst = std::max(worst, relative_error(g.w2[h], oracle::central_difference(loss, p.w2[h], 1e-5)));
    }
    worst = std::max(worst, relative_error(g.b2, oracle::central_difference(loss, p.b2, 1e-5)));
    EXPECT_LE(worst, 1e-4) << "seed " << seed;
  }
}

TEST(Mlp, LossIsMeanCrossEntropy) {
  const Toy toy;
  const auto p = MlpParams::zeros(4, 2);
  // Every output is sigmoid(0) = 0.5.
  EXPECT_NEAR(mlp_loss(p, toy.xs, toy.ys), std::log(2.0), 1e-15);
  EXPECT_NEAR(detail::bce_from_logit(800.0, 0.0), 800.0, 1e-9);
  EXPECT_NEAR(detail::bce_from_logit(-800.0, 0.0), 0.0, 1e-12);
}

TEST(Mlp, SeparableToySetIsLearned) {
  std::vector<SparseVector> xs;
  std::vector<Label> ys;
  for (int i = 0; i < 10; ++i) {
    const double a = 0.5 + 0.1 * i, b = 0.1 * (i % 3);
    xs.push_back(SparseVector{{{0u, a}, {1u, b}}});
    ys.push_back(Label::Positive);
    xs.push_back(SparseVector{{{0u, b}, {1u, a}}});
    ys.push_back(Label::Negative);
  }
  TrainConfig cfg;
  cfg.mlp_hidden = 4;
  cfg.mlp_learning_rate = 1.0;
  cfg.mlp_epochs = 200;
  const auto model = train_mlp(xs, ys, 2, cfg);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(model.predict(xs[i]).label, ys[i]) << i;
}

TEST(Mlp, FixedSeedGivesIdenticalWeights) {
  const Toy toy;
  TrainConfig cfg;
  cfg.mlp_hidden = 5;
  cfg.mlp_epochs = 30;
  const auto a = train_mlp(toy.xs, toy.ys, 4, cfg);
  const auto b = train_mlp(toy.xs, toy.ys, 4, cfg);
  EXPECT_EQ(a.params(), b.params());
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  cfg.seed = 43;
  EXPECT_NE(train_mlp(toy.xs, toy.ys, 4, cfg).params(), a.params());
}

TEST(Mlp, InitialWeightsInRange) {
  const auto p = MlpParams::random(30, 8, 9);
  for (double w : p.w1) ASSERT_TRUE(w >= -0.5 && w <= 0.5);
  for (double w : p.w2) ASSERT_TRUE(w >= -0.5 && w <= 0.5);
}

TEST(Mlp, DivergenceIsReported) {
  const Toy toy;
  TrainConfig cfg;
  // Saturated sigmoids keep moderate overshoots finite; this step overflows.
  cfg.mlp_learning_rate = 1e308;
  cfg.mlp_epochs = 50;
  EXPECT_EQ(code_of([&] { train_mlp(toy.xs, toy.ys, 4, cfg); }), ErrorCode::NonFiniteLoss);
}

TEST(Mlp, LossDecreasesOnDemoCorpus) {
  const auto corpus = testing::demo_corpus();
  const auto tokens = preprocess(corpus, testing::default_preprocess());
  const auto tfidf = TfIdfModel::fit(tokens, TfIdfVariant::Standard);
  std::vector<SparseVector> xs;
  for (const auto& d : tokens) xs.push_back(tfidf.transform(d.tokens));
  const auto ys = corpus.labels();
  const auto run = train_mlp_with_history(xs, ys, tfidf.vocabulary_size(), TrainConfig{});
  ASSERT_EQ(run.loss_history.size(), TrainConfig{}.mlp_epochs + 1);
  EXPECT_LT(run.loss_history.back(), run.loss_history.front());
  for (std::size_t e = 1; e < run.loss_history.size(); ++e) ASSERT_TRUE(std::isfinite(run.loss_history[e]));
}

TEST(Mlp, ScoreAgreesWithLabel) {
  const Toy toy;
  TrainConfig cfg;
  cfg.mlp_epochs = 20;
  const auto model = train_mlp(toy.xs, toy.ys, 4, cfg);
  for (const auto& x : toy.xs) {
    const auto p = model.predict(x);
    EXPECT_EQ(p.label == Label::Positive, p.score >= 0.5);
  }
}

}  // namespace
}  // namespace senti
