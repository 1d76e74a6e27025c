#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "senti/corpus.hpp"
#include "senti/model.hpp"

namespace senti {

/// Positive is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  double accuracy() const {
    if (total() == 0) throw Error(ErrorCode::Empty, "accuracy of an empty confusion matrix");
    return static_cast<double>(tp + tn) / static_cast<double>(total());
  }

  bool operator==(const ConfusionMatrix&) const = default;
};

namespace detail {

inline void check_pairing(std::span<const Label> predicted, std::span<const Label> gold) {
  if (predicted.size() != gold.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(predicted.size()) + " predictions vs " + std::to_string(gold.size()) + " labels");
  if (predicted.empty()) throw Error(ErrorCode::Empty, "no predictions to evaluate");
}

}  // namespace detail

inline ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> gold) {
  detail::check_pairing(predicted, gold);
  ConfusionMatrix m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Label::Positive;
    const bool g = gold[i] == Label::Positive;
    if (p && g) ++m.tp;
    else if (p) ++m.fp;
    else if (g) ++m.fn;
    else ++m.tn;
  }
  return m;
}

inline double accuracy(std::span<const Label> predicted, std::span<const Label> gold) {
  return confusion(predicted, gold).accuracy();
}

struct EvalReport {
  Method method = Method::NaiveBayes;
  double train_fraction = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::uint64_t seed = 0;
  double timing_ms = 0.0;
};

enum class ThresholdVerdict { Pass, NeedMoreTrainingData };

inline std::string_view to_string(ThresholdVerdict v) {
  return v == ThresholdVerdict::Pass ? "Pass" : "NeedMoreTrainingData";
}

inline constexpr double kDefaultAccuracyThreshold = 0.8;

/// Advisory only: says whether more labeled training data is needed to reach
/// the threshold. The boundary counts as a pass.
inline ThresholdVerdict threshold_check(double accuracy, double threshold = kDefaultAccuracyThreshold) {
  return accuracy >= threshold ? ThresholdVerdict::Pass : ThresholdVerdict::NeedMoreTrainingData;
}

inline ThresholdVerdict threshold_check(const EvalReport& report, double threshold = kDefaultAccuracyThreshold) {
  return threshold_check(report.accuracy, threshold);
}

inline EvalReport evaluate(const TrainedModel& model, const Corpus& test, double train_fraction = 0.0,
                           std::uint64_t seed = 0) {
  std::vector<Label> predicted;
  predicted.reserve(test.size());
  for (const auto& doc : test) predicted.push_back(predict(model, doc.text).label);
  const auto gold = test.labels();
  EvalReport report;
  report.method = model.method();
  report.train_fraction = train_fraction;
  report.confusion = confusion(predicted, gold);
  report.accuracy = report.confusion.accuracy();
  report.seed = seed;
  return report;
}

struct SweepConfig {
  double start = 0.25;
  double end = 0.75;
  double step = 0.05;
  std::uint64_t seed = 42;
  bool stratified = false;
  /// Worker threads; rows are identical for any value.
  std::size_t jobs = 1;
};

struct SweepReport {
  std::vector<EvalReport> rows;
  std::string corpus_fingerprint;
};

/// Every (split, method) pair is an independent task: TF-IDF and the
/// classifier are fitted on the training side only and scored on the test
/// side. Rows come back sorted by (train_fraction, method tag).
inline SweepReport run_sweep(const Corpus& corpus, std::span<const Method> methods, const SweepConfig& sweep,
                             const TrainConfig& train_config, const PreprocessConfig& preprocess,
                             TfIdfVariant variant) {
  if (methods.empty()) throw Error(ErrorCode::InvalidConfig, "no methods selected");
  train_config.validate();
  const auto splits = sweep_splits(corpus, sweep.start, sweep.end, sweep.step, sweep.seed, {sweep.stratified});

  const std::size_t tasks = splits.size() * methods.size();
  std::vector<EvalReport> rows(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const auto& split_t = splits[t / methods.size()];
      const Method method = methods[t % methods.size()];
      try {
        const auto begin = std::chrono::steady_clock::now();
        const auto model = train(method, split_t.train, preprocess, variant, train_config);
        auto report = evaluate(model, split_t.test, split_t.train_fraction, split_t.seed);
        report.timing_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - begin).count();
        rows[t] = report;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(sweep.jobs, 1, tasks);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(rows.begin(), rows.end(), [](const EvalReport& a, const EvalReport& b) {
    if (a.train_fraction != b.train_fraction) return a.train_fraction < b.train_fraction;
    return to_string(a.method) < to_string(b.method);
  });
  return {std::move(rows), fingerprint(corpus)};
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

enum class ReportFormat { Csv, Json, Svg };

inline ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "svg") return ReportFormat::Svg;
  throw Error(ErrorCode::InvalidConfig, "unknown report format '" + std::string(name) + "'");
}

/// Timing is left out so reruns produce identical bytes.
inline std::string report_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "train_fraction,method,accuracy,tp,fp,tn,fn,seed\n";
  for (const auto& r : report.rows)
    out << format_number(r.train_fraction) << ',' << to_string(r.method) << ',' << format_number(r.accuracy) << ','
        << r.confusion.tp << ',' << r.confusion.fp << ',' << r.confusion.tn << ',' << r.confusion.fn << ','
        << r.seed << '\n';
  return out.str();
}

inline nlohmann::json report_json(const SweepReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"train_fraction", r.train_fraction},
                    {"method", to_string(r.method)},
                    {"accuracy", r.accuracy},
                    {"tp", r.confusion.tp},
                    {"fp", r.confusion.fp},
                    {"tn", r.confusion.tn},
                    {"fn", r.confusion.fn},
                    {"seed", r.seed},
                    {"timing_ms", r.timing_ms}});
  return {{"format", "senti.sweep"}, {"version", 1}, {"corpus_fingerprint", report.corpus_fingerprint}, {"rows", rows}};
}

inline SweepReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "senti.sweep") throw Error(ErrorCode::ModelFormat, "not a sweep report");
    SweepReport report;
    report.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
    for (const auto& r : j.at("rows")) {
      EvalReport e;
      e.train_fraction = r.at("train_fraction").get<double>();
      e.method = parse_method(r.at("method").get<std::string>());
      e.accuracy = r.at("accuracy").get<double>();
      e.confusion = {r.at("tp").get<std::uint64_t>(), r.at("fp").get<std::uint64_t>(), r.at("tn").get<std::uint64_t>(),
                     r.at("fn").get<std::uint64_t>()};
      e.seed = r.at("seed").get<std::uint64_t>();
      e.timing_ms = r.value("timing_ms", 0.0);
      report.rows.push_back(e);
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ModelFormat, e.what());
  }
}

/// Accuracy against training fraction, one polyline per method.
inline std::string report_svg(const SweepReport& report) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double x_min = 1.0, x_max = 0.0;
  for (const auto& r : report.rows) {
    series[std::string(to_string(r.method))].emplace_back(r.train_fraction, r.accuracy);
    x_min = std::min(x_min, r.train_fraction);
    x_max = std::max(x_max, r.train_fraction);
  }
  if (x_max <= x_min) {
    x_min -= 0.05;
    x_max += 0.05;
  }

  constexpr double kWidth = 720, kHeight = 440, kLeft = 60, kRight = 170, kTop = 30, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - y) * plot_h; };
  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<title>Accuracy by training fraction</title>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g stroke=\"#999\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << py(0)
      << "\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft << "\" y2=\"" << py(1) << "\"/>\n";
  svg << "</g>\n";
  for (int tick = 0; tick <= 10; tick += 2) {
    const double y = tick / 10.0;
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << format_number(y)
        << "</text>\n";
  }
  std::vector<double> xs;
  for (const auto& r : report.rows)
    if (std::find(xs.begin(), xs.end(), r.train_fraction) == xs.end()) xs.push_back(r.train_fraction);
  for (double x : xs)
    svg << "<text x=\"" << px(x) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">" << format_number(x)
        << "</text>\n";
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">training fraction</text>\n";
  svg << "<text x=\"15\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << kTop + plot_h / 2 << ")\">accuracy</text>\n";

  std::size_t color = 0;
  for (const auto& [method, points] : series) {
    const char* stroke = kColors[color % std::size(kColors)];
    svg << "<polyline data-method=\"" << method << "\" fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i)
      svg << (i ? " " : "") << px(points[i].first) << ',' << py(points[i].second);
    svg << "\"/>\n";
    const double ly = kTop + 20.0 * static_cast<double>(color);
    svg << "<line x1=\"" << kWidth - kRight + 20 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 45
        << "\" y2=\"" << ly << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kWidth - kRight + 50 << "\" y=\"" << ly + 4 << "\">" << method << "</text>\n";
    ++color;
  }
  svg << "</svg>\n";
  return svg.str();
}

inline std::string render_report(const SweepReport& report, ReportFormat format) {
  if (report.rows.empty()) throw Error(ErrorCode::Empty, "sweep report has no rows");
  switch (format) {
    case ReportFormat::Csv: return report_csv(report);
    case ReportFormat::Json: return report_json(report).dump(2) + "\n";
    case ReportFormat::Svg: return report_svg(report);
  }
  return {};
}

inline void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path) {
  const auto text = render_report(report, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

/// Highest-accuracy method per training fraction; the first row wins ties.
inline std::vector<EvalReport> best_per_fraction(const SweepReport& report) {
  std::vector<EvalReport> best;
  for (const auto& r : report.rows) {
    if (best.empty() || best.back().train_fraction != r.train_fraction) best.push_back(r);
    else if (r.accuracy > best.back().accuracy) best.back() = r;
  }
  return best;
}

}  // namespace senti
