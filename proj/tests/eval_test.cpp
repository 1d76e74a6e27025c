#include <gtest/gtest.h>

#include <regex>
#include <set>

#include "senti/eval.hpp"
#include "test_util.hpp"

namespace senti {
namespace {

using testing::code_of;
using L = Label;

TEST(Accuracy, WorkedEvaluationRows) {
  // Predicted vs manually labeled; the last row is wrong.
  const std::vector<Label> predicted = {L::Positive, L::Negative, L::Positive, L::Negative};
  const std::vector<Label> gold = {L::Positive, L::Negative, L::Positive, L::Positive};
  const auto m = confusion(predicted, gold);
  EXPECT_EQ(m, (ConfusionMatrix{2, 0, 1, 1}));
  EXPECT_DOUBLE_EQ(m.accuracy(), 0.75);
  EXPECT_EQ(threshold_check(m.accuracy()), ThresholdVerdict::NeedMoreTrainingData);
}

TEST(Accuracy, TrivialCases) {
  const std::vector<Label> gold = {L::Positive, L::Negative, L::Negative};
  EXPECT_EQ(accuracy(gold, gold), 1.0);
  const std::vector<Label> flipped = {L::Negative, L::Positive, L::Positive};
  EXPECT_EQ(accuracy(flipped, gold), 0.0);
  EXPECT_EQ(code_of([&] { accuracy(std::vector<Label>{L::Positive}, gold); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([] { accuracy(std::vector<Label>{}, std::vector<Label>{}); }), ErrorCode::Empty);
}

TEST(Threshold, BoundaryIsInclusive) {
  EXPECT_EQ(threshold_check(0.8), ThresholdVerdict::Pass);
  EXPECT_EQ(threshold_check(1.0), ThresholdVerdict::Pass);
  EXPECT_EQ(threshold_check(0.7999), ThresholdVerdict::NeedMoreTrainingData);
  EvalReport r;
  r.accuracy = 0.9;
  EXPECT_EQ(threshold_check(r, 0.95), ThresholdVerdict::NeedMoreTrainingData);
}

TEST(Evaluate, ConfusionReconcilesWithTestSet) {
  const auto s = split(testing::demo_corpus(), 0.6, 5);
  const auto model = train(Method::NaiveBayes, s.train, testing::default_preprocess(), TfIdfVariant::Standard,
                           TrainConfig{});
  const auto r = evaluate(model, s.test, 0.6, 5);
  EXPECT_EQ(r.confusion.total(), s.test.size());
  EXPECT_EQ(r.confusion.tp + r.confusion.fn, s.test.count(Label::Positive));
  EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(r.confusion.tp + r.confusion.tn) / s.test.size());
}

TEST(Evaluate, VocabularyComesFromTrainingSideOnly) {
  const auto corpus = testing::demo_corpus();
  const auto pre = testing::default_preprocess();
  for (double f : {0.25, 0.5, 0.75}) {
    const auto s = split(corpus, f, 42);
    std::set<std::string> seen;
    for (const auto& d : s.train)
      for (auto& t : preprocess_text(d.text, pre)) seen.insert(t);
    for (auto m : kAllMethods) {
      const auto model = train(m, s.train, pre, TfIdfVariant::Standard, TrainConfig{});
      for (const auto& term : model.tfidf.terms()) ASSERT_TRUE(seen.count(term)) << term;
    }
  }
}

class Sweep : public ::testing::Test {
 protected:
  static const SweepReport& full() {
    static const SweepReport report = [] {
      SweepConfig cfg;
      cfg.jobs = 1;
      return run_sweep(testing::demo_corpus(), kAllMethods, cfg, TrainConfig{}, testing::default_preprocess(),
                       TfIdfVariant::Standard);
    }();
    return report;
  }
};

TEST_F(Sweep, FortyFourSortedRows) {
  const auto& r = full();
  ASSERT_EQ(r.rows.size(), 44u);
  EXPECT_EQ(r.corpus_fingerprint, fingerprint(testing::demo_corpus()));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    EXPECT_GE(row.accuracy, 0.0);
    EXPECT_LE(row.accuracy, 1.0);
    EXPECT_EQ(row.confusion.total(), 200 - train_size(row.train_fraction, 200));
    if (i > 0) {
      const auto& prev = r.rows[i - 1];
      EXPECT_TRUE(prev.train_fraction < row.train_fraction ||
                  (prev.train_fraction == row.train_fraction && to_string(prev.method) < to_string(row.method)));
    }
  }
}

TEST_F(Sweep, ParallelMatchesSerial) {
  SweepConfig cfg;
  cfg.jobs = 4;
  const auto parallel = run_sweep(testing::demo_corpus(), kAllMethods, cfg, TrainConfig{},
                                  testing::default_preprocess(), TfIdfVariant::Standard);
  EXPECT_EQ(report_csv(parallel), report_csv(full()));
}

TEST_F(Sweep, ReportFormats) {
  const auto csv = render_report(full(), ReportFormat::Csv);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 45);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "train_fraction,method,accuracy,tp,fp,tn,fn,seed");

  const auto svg = render_report(full(), ReportFormat::Svg);
  const std::regex polyline("<polyline data-method=\"([a-z_]+)\"");
  std::set<std::string> methods;
  std::size_t count = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), polyline); it != std::sregex_iterator(); ++it) {
    methods.insert((*it)[1]);
    ++count;
  }
  EXPECT_EQ(count, 4u);
  EXPECT_EQ(methods, (std::set<std::string>{"decision_tree", "knn", "mlp", "naive_bayes"}));

  const auto back = report_from_json(nlohmann::json::parse(render_report(full(), ReportFormat::Json)));
  EXPECT_EQ(report_csv(back), csv);
  EXPECT_EQ(back.corpus_fingerprint, full().corpus_fingerprint);
}

TEST_F(Sweep, EmitWritesFiles) {
  testing::TempDir dir;
  emit_report(full(), ReportFormat::Csv, dir.path() / "s.csv");
  EXPECT_EQ(testing::slurp(dir.path() / "s.csv"), report_csv(full()));
  EXPECT_EQ(code_of([&] { emit_report(full(), ReportFormat::Csv, dir.path() / "missing" / "s.csv"); }),
            ErrorCode::IoError);
  EXPECT_EQ(code_of([] { render_report(SweepReport{}, ReportFormat::Csv); }), ErrorCode::Empty);
}

TEST(SweepEdges, SingleMethodSingleSplit) {
  SweepConfig cfg;
  cfg.start = cfg.end = 0.5;
  const Method only[] = {Method::Knn};
  const auto r = run_sweep(testing::demo_corpus(), only, cfg, TrainConfig{}, testing::default_preprocess(),
                           TfIdfVariant::Collection);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].method, Method::Knn);
  EXPECT_EQ(r.rows[0].seed, 42u);
}

TEST(SweepEdges, EmptyMethodListFails) {
  EXPECT_EQ(code_of([] {
              run_sweep(testing::demo_corpus(), std::span<const Method>{}, SweepConfig{}, TrainConfig{},
                        testing::default_preprocess(), TfIdfVariant::Standard);
            }),
            ErrorCode::InvalidConfig);
}

TEST(SweepEdges, BestPerFraction) {
  SweepReport r;
  auto row = [](double f, Method m, double acc) {
    EvalReport e;
    e.train_fraction = f;
    e.method = m;
    e.accuracy = acc;
    return e;
  };
  r.rows = {row(0.25, Method::DecisionTree, 0.6), row(0.25, Method::Knn, 0.7), row(0.25, Method::Mlp, 0.7),
            row(0.5, Method::DecisionTree, 0.9)};
  const auto best = best_per_fraction(r);
  ASSERT_EQ(best.size(), 2u);
  EXPECT_EQ(best[0].method, Method::Knn);
  EXPECT_EQ(best[1].method, Method::DecisionTree);
}

}  // namespace
}  // namespace senti
