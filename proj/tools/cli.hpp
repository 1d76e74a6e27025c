#pragma once

// Command implementations for the `senti` executable. Kept in a header so the
// test suite can drive every subcommand in-process.

#include <algorithm>
#include <cstdlib>
#include <initializer_list>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "senti/corpus.hpp"
#include "senti/eval.hpp"
#include "senti/model.hpp"
#include "senti/preprocess.hpp"
#include "senti/vectorize.hpp"

#ifndef SENTI_DEFAULT_STOPWORDS
#define SENTI_DEFAULT_STOPWORDS ""
#endif

namespace senti::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kInputError = 2, kModelError = 3, kRuntimeError = 4 };

inline constexpr const char* kConfigEnvVar = "SENTI_CONFIG";

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ModelFormat: return kModelError;
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::IoError:
    case ErrorCode::KTooLarge:
    case ErrorCode::MissingClass: return kRuntimeError;
    default: return kInputError;
  }
}

/// Settings of a reproducible run, read from a JSON file:
///
///   {
///     "corpus": "demo_corpus.csv",      // relative to the config file
///     "format": "csv",                  // optional, else from extension
///     "stopwords": "stopwords_id.txt",  // optional, bundled list by default
///     "filter_stopwords": true,
///     "tfidf_variant": "standard",      // or "collection"
///     "methods": ["naive_bayes", "knn", "decision_tree", "mlp"],
///     "seed": 42,                       // required
///     "train": { "knn_k": 5, "dt_max_depth": null, "dt_min_leaf": 1, "mlp_hidden": 16,
///                "mlp_learning_rate": 0.05, "mlp_epochs": 200, "nb_alpha": 1.0 },
///     "sweep": { "start": 0.25, "end": 0.75, "step": 0.05, "stratified": false },
///     "output_dir": "senti-out",
///     "jobs": 1
///   }
struct RunConfig {
  fs::path corpus;
  std::optional<CorpusFormat> format;
  std::optional<fs::path> stopwords;
  bool filter_stopwords = true;
  TfIdfVariant variant = TfIdfVariant::Standard;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::optional<std::uint64_t> seed;
  TrainConfig train;
  SweepConfig sweep;
  fs::path output_dir = "senti-out";
};

namespace detail {

inline fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

template <typename T>
T read_key(const nlohmann::json& obj, const char* key) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "'");
  }
}

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end())
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + where);
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  detail::reject_unknown(j,
                         {"corpus", "format", "stopwords", "filter_stopwords", "tfidf_variant", "methods", "seed",
                          "train", "sweep", "output_dir", "jobs"},
                         "config");
  RunConfig cfg;
  if (j.contains("corpus")) cfg.corpus = detail::resolve(base_dir, detail::read_key<std::string>(j, "corpus"));
  if (j.contains("format")) cfg.format = parse_corpus_format(detail::read_key<std::string>(j, "format"));
  if (j.contains("stopwords")) cfg.stopwords = detail::resolve(base_dir, detail::read_key<std::string>(j, "stopwords"));
  if (j.contains("filter_stopwords")) cfg.filter_stopwords = detail::read_key<bool>(j, "filter_stopwords");
  if (j.contains("tfidf_variant")) cfg.variant = parse_variant(detail::read_key<std::string>(j, "tfidf_variant"));
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& tag : detail::read_key<std::vector<std::string>>(j, "methods")) cfg.methods.push_back(parse_method(tag));
  }
  if (j.contains("seed")) cfg.seed = detail::read_key<std::uint64_t>(j, "seed");
  if (j.contains("output_dir")) cfg.output_dir = detail::resolve(base_dir, detail::read_key<std::string>(j, "output_dir"));
  if (j.contains("jobs")) cfg.sweep.jobs = detail::read_key<std::size_t>(j, "jobs");

  if (j.contains("train")) {
    const auto& t = j["train"];
    if (!t.is_object()) throw Error(ErrorCode::InvalidConfig, "'train' must be an object");
    detail::reject_unknown(t,
                           {"knn_k", "dt_max_depth", "dt_min_leaf", "mlp_hidden", "mlp_learning_rate", "mlp_epochs",
                            "nb_alpha"},
                           "train");
    if (t.contains("knn_k")) cfg.train.knn_k = detail::read_key<std::size_t>(t, "knn_k");
    if (t.contains("dt_max_depth") && !t["dt_max_depth"].is_null())
      cfg.train.dt_max_depth = detail::read_key<std::size_t>(t, "dt_max_depth");
    if (t.contains("dt_min_leaf")) cfg.train.dt_min_leaf = detail::read_key<std::size_t>(t, "dt_min_leaf");
    if (t.contains("mlp_hidden")) cfg.train.mlp_hidden = detail::read_key<std::size_t>(t, "mlp_hidden");
    if (t.contains("mlp_learning_rate")) cfg.train.mlp_learning_rate = detail::read_key<double>(t, "mlp_learning_rate");
    if (t.contains("mlp_epochs")) cfg.train.mlp_epochs = detail::read_key<std::size_t>(t, "mlp_epochs");
    if (t.contains("nb_alpha")) cfg.train.nb_alpha = detail::read_key<double>(t, "nb_alpha");
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    if (!s.is_object()) throw Error(ErrorCode::InvalidConfig, "'sweep' must be an object");
    detail::reject_unknown(s, {"start", "end", "step", "stratified"}, "sweep");
    if (s.contains("start")) cfg.sweep.start = detail::read_key<double>(s, "start");
    if (s.contains("end")) cfg.sweep.end = detail::read_key<double>(s, "end");
    if (s.contains("step")) cfg.sweep.step = detail::read_key<double>(s, "step");
    if (s.contains("stratified")) cfg.sweep.stratified = detail::read_key<bool>(s, "stratified");
  }
  return cfg;
}

inline RunConfig load_run_config(const fs::path& path) {
  const auto text = senti::detail::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

/// Checks the config before any work starts: seed present, files present,
/// sweep bounds sane.
inline void validate(RunConfig& cfg) {
  if (!cfg.seed) throw Error(ErrorCode::InvalidConfig, "a seed is required");
  cfg.train.seed = *cfg.seed;
  cfg.sweep.seed = *cfg.seed;
  if (cfg.corpus.empty()) throw Error(ErrorCode::InvalidConfig, "no corpus given");
  if (!fs::is_regular_file(cfg.corpus)) throw Error(ErrorCode::MissingFile, cfg.corpus.string());
  if (cfg.stopwords && !fs::is_regular_file(*cfg.stopwords)) throw Error(ErrorCode::MissingFile, cfg.stopwords->string());
  if (cfg.methods.empty()) throw Error(ErrorCode::InvalidConfig, "no methods selected");
  cfg.train.validate();
  sweep_fractions(cfg.sweep.start, cfg.sweep.end, cfg.sweep.step);
}

namespace detail {

inline PreprocessConfig make_preprocess(const std::optional<fs::path>& stopwords, bool filter) {
  PreprocessConfig pre;
  pre.filter_stopwords = filter;
  if (!filter) return pre;
  fs::path path;
  if (stopwords) path = *stopwords;
  else if (std::string_view(SENTI_DEFAULT_STOPWORDS).size() > 0) path = SENTI_DEFAULT_STOPWORDS;
  else throw Error(ErrorCode::EmptyStopwordList, "no stopword file given");
  pre.stopwords = load_stopwords(path);
  if (pre.stopwords.empty()) throw Error(ErrorCode::EmptyStopwordList, path.string());
  return pre;
}

inline Corpus read_corpus(const fs::path& path, const std::optional<std::string>& format) {
  return load_corpus(path, format ? parse_corpus_format(*format) : guess_corpus_format(path));
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

struct TrainFlags {
  std::optional<std::size_t> knn_k, dt_max_depth, dt_min_leaf, mlp_hidden, mlp_epochs;
  std::optional<double> mlp_learning_rate, nb_alpha;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--knn-k", knn_k, "neighbours for knn");
    cmd->add_option("--dt-max-depth", dt_max_depth, "depth limit for the decision tree");
    cmd->add_option("--dt-min-leaf", dt_min_leaf, "minimum documents per tree leaf");
    cmd->add_option("--mlp-hidden", mlp_hidden, "hidden units of the mlp");
    cmd->add_option("--mlp-epochs", mlp_epochs, "full-batch epochs of the mlp");
    cmd->add_option("--mlp-learning-rate", mlp_learning_rate, "mlp step size");
    cmd->add_option("--nb-alpha", nb_alpha, "naive bayes smoothing");
  }

  void apply(TrainConfig& t) const {
    if (knn_k) t.knn_k = *knn_k;
    if (dt_max_depth) t.dt_max_depth = *dt_max_depth;
    if (dt_min_leaf) t.dt_min_leaf = *dt_min_leaf;
    if (mlp_hidden) t.mlp_hidden = *mlp_hidden;
    if (mlp_epochs) t.mlp_epochs = *mlp_epochs;
    if (mlp_learning_rate) t.mlp_learning_rate = *mlp_learning_rate;
    if (nb_alpha) t.nb_alpha = *nb_alpha;
  }
};

}  // namespace detail

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-resource sentiment analysis workbench"};
  app.name("senti");
  app.require_subcommand(1);

  // ingest
  std::string corpus_path, format, stopwords_path, model_path, out_path, text, input_path, config_path, method_tag;
  std::string variant_tag = "standard";
  bool no_stopwords = false;
  auto* ingest = app.add_subcommand("ingest", "Load a labeled corpus and summarize it");
  ingest->add_option("corpus", corpus_path, "CSV or JSONL corpus")->required();
  ingest->add_option("--format", format, "csv or jsonl (default: from extension)");

  // preprocess
  auto* prep = app.add_subcommand("preprocess", "Tokenize a corpus, one JSON line per document");
  prep->add_option("corpus", corpus_path, "CSV or JSONL corpus")->required();
  prep->add_option("--format", format, "csv or jsonl");
  prep->add_option("--stopwords", stopwords_path, "stopword file (default: bundled list)");
  prep->add_flag("--no-stopwords", no_stopwords, "skip stopword filtering");
  prep->add_option("-o,--out", out_path, "output file (default: stdout)");

  // train
  std::optional<double> train_fraction;
  std::uint64_t seed = 0;
  detail::TrainFlags train_flags;
  auto* trn = app.add_subcommand("train", "Train one classifier and save it as JSON");
  trn->add_option("corpus", corpus_path, "CSV or JSONL corpus")->required();
  trn->add_option("-m,--method", method_tag, "naive_bayes, knn, decision_tree or mlp")->required();
  trn->add_option("-o,--out", model_path, "model file to write")->required();
  trn->add_option("--format", format, "csv or jsonl");
  trn->add_option("--stopwords", stopwords_path, "stopword file (default: bundled list)");
  trn->add_flag("--no-stopwords", no_stopwords, "skip stopword filtering");
  trn->add_option("--variant", variant_tag, "tf-idf weighting: standard or collection");
  trn->add_option("--train-fraction", train_fraction, "train on this share of a seeded split instead of everything");
  trn->add_option("--seed", seed, "seed for the split and the mlp initialization")->required();
  train_flags.add_to(trn);

  // predict
  auto* pred = app.add_subcommand("predict", "Classify raw text with a saved model");
  pred->add_option("-m,--model", model_path, "model file")->required();
  auto* text_opt = pred->add_option("-t,--text", text, "a single text to classify");
  pred->add_option("-i,--input", input_path, "file with one document per line, optionally `id<TAB>text`")
      ->excludes(text_opt);

  // evaluate
  double threshold = kDefaultAccuracyThreshold;
  auto* evl = app.add_subcommand("evaluate", "Score a saved model against a labeled corpus");
  evl->add_option("-m,--model", model_path, "model file")->required();
  evl->add_option("corpus", corpus_path, "labeled CSV or JSONL corpus")->required();
  evl->add_option("--format", format, "csv or jsonl");
  evl->add_option("--threshold", threshold, "accuracy needed to pass");

  // sweep
  std::optional<std::string> sweep_corpus, sweep_out, sweep_variant, sweep_stopwords, sweep_methods;
  std::optional<double> sweep_start, sweep_end, sweep_step;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<std::size_t> jobs;
  bool sweep_stratified = false;
  auto* swp = app.add_subcommand("sweep", "Run every method over a range of train/test splits");
  swp->add_option("-c,--config", config_path, std::string("run config (default: $") + kConfigEnvVar + ")");
  swp->add_option("--corpus", sweep_corpus, "override the corpus path");
  swp->add_option("--stopwords", sweep_stopwords, "override the stopword file");
  swp->add_option("--variant", sweep_variant, "override the tf-idf weighting");
  swp->add_option("--methods", sweep_methods, "comma-separated method tags");
  swp->add_option("--start", sweep_start, "first training fraction");
  swp->add_option("--end", sweep_end, "last training fraction");
  swp->add_option("--step", sweep_step, "fraction increment");
  swp->add_option("--seed", sweep_seed, "override the seed");
  swp->add_option("-j,--jobs", jobs, "worker threads");
  swp->add_flag("--stratified", sweep_stratified, "stratify splits by label");
  swp->add_option("-o,--output-dir", sweep_out, "override the output directory");
  train_flags.add_to(swp);

  // report
  std::string report_format = "csv";
  auto* rep = app.add_subcommand("report", "Render a saved sweep.json as csv, json or svg");
  rep->add_option("input", input_path, "sweep JSON report")->required();
  rep->add_option("-f,--format", report_format, "csv, json or svg");
  rep->add_option("-o,--out", out_path, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  const std::optional<std::string> format_opt = format.empty() ? std::nullopt : std::optional<std::string>(format);
  const std::optional<fs::path> stop_opt =
      stopwords_path.empty() ? std::nullopt : std::optional<fs::path>(stopwords_path);

  int failure_code = kInputError;
  try {
    if (ingest->parsed()) {
      const auto corpus = detail::read_corpus(corpus_path, format_opt);
      out << corpus.size() << " documents (" << corpus.count(Label::Positive) << " positive/"
          << corpus.count(Label::Negative) << " negative)\n";
      out << "duplicate ids: none\n";
      out << "fingerprint: " << fingerprint(corpus) << '\n';
      return kOk;
    }

    if (prep->parsed()) {
      const auto corpus = detail::read_corpus(corpus_path, format_opt);
      const auto pre = detail::make_preprocess(stop_opt, !no_stopwords);
      std::ostringstream buf;
      for (const auto& doc : preprocess(corpus, pre))
        buf << nlohmann::json{{"id", doc.id}, {"tokens", doc.tokens}}.dump() << '\n';
      if (out_path.empty()) out << buf.str();
      else detail::write_text(out_path, buf.str());
      return kOk;
    }

    if (trn->parsed()) {
      const auto corpus = detail::read_corpus(corpus_path, format_opt);
      const auto pre = detail::make_preprocess(stop_opt, !no_stopwords);
      TrainConfig cfg;
      cfg.seed = seed;
      train_flags.apply(cfg);
      const auto method = parse_method(method_tag);
      const auto variant = parse_variant(variant_tag);
      const Corpus training = train_fraction ? split(corpus, *train_fraction, seed).train : corpus;
      failure_code = kRuntimeError;
      const auto model = train(method, training, pre, variant, cfg);
      failure_code = kModelError;
      save_model(model, model_path);
      out << "trained " << to_string(method) << " on " << training.size() << " documents, vocabulary "
          << model.tfidf.vocabulary_size() << " -> " << model_path << '\n';
      return kOk;
    }

    if (pred->parsed()) {
      failure_code = kModelError;
      const auto model = load_model(model_path);
      failure_code = kInputError;
      auto emit = [&](const std::string& id, const std::string& body) {
        const auto p = predict(model, body);
        out << id << '\t' << to_string(p.label) << '\t' << format_number(p.score) << '\n';
      };
      if (!text.empty() || pred->count("--text") > 0) {
        emit("1", text);
        return kOk;
      }
      std::ifstream file;
      std::istream* source = &in;
      if (!input_path.empty()) {
        file.open(input_path, std::ios::binary);
        if (!file) throw Error(ErrorCode::MissingFile, input_path);
        source = &file;
      }
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(*source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) emit(std::to_string(line_no), line);
        else emit(line.substr(0, tab), line.substr(tab + 1));
      }
      return kOk;
    }

    if (evl->parsed()) {
      failure_code = kModelError;
      const auto model = load_model(model_path);
      failure_code = kInputError;
      const auto corpus = detail::read_corpus(corpus_path, format_opt);
      const auto report = evaluate(model, corpus);
      const auto& m = report.confusion;
      out << "method: " << to_string(report.method) << '\n'
          << "documents: " << m.total() << '\n'
          << "accuracy: " << format_number(report.accuracy) << '\n'
          << "confusion: tp=" << m.tp << " fp=" << m.fp << " tn=" << m.tn << " fn=" << m.fn << '\n'
          << "threshold " << format_number(threshold) << ": " << to_string(threshold_check(report, threshold))
          << '\n';
      return kOk;
    }

    if (swp->parsed()) {
      if (config_path.empty())
        if (const char* env = std::getenv(kConfigEnvVar)) config_path = env;
      RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
      if (sweep_corpus) cfg.corpus = *sweep_corpus;
      if (sweep_stopwords) cfg.stopwords = fs::path(*sweep_stopwords);
      if (sweep_variant) cfg.variant = parse_variant(*sweep_variant);
      if (sweep_methods) {
        cfg.methods.clear();
        std::stringstream tags(*sweep_methods);
        for (std::string tag; std::getline(tags, tag, ',');)
          if (!tag.empty()) cfg.methods.push_back(parse_method(tag));
      }
      if (sweep_start) cfg.sweep.start = *sweep_start;
      if (sweep_end) cfg.sweep.end = *sweep_end;
      if (sweep_step) cfg.sweep.step = *sweep_step;
      if (sweep_seed) cfg.seed = *sweep_seed;
      if (jobs) cfg.sweep.jobs = *jobs;
      if (sweep_stratified) cfg.sweep.stratified = true;
      if (sweep_out) cfg.output_dir = *sweep_out;
      train_flags.apply(cfg.train);
      validate(cfg);

      const auto corpus = load_corpus(cfg.corpus, cfg.format ? *cfg.format : guess_corpus_format(cfg.corpus));
      const auto pre = detail::make_preprocess(cfg.stopwords, cfg.filter_stopwords);
      failure_code = kRuntimeError;
      const auto report = run_sweep(corpus, cfg.methods, cfg.sweep, cfg.train, pre, cfg.variant);

      std::error_code ec;
      fs::create_directories(cfg.output_dir, ec);
      if (ec) throw Error(ErrorCode::IoError, "cannot create " + cfg.output_dir.string());
      emit_report(report, ReportFormat::Csv, cfg.output_dir / "sweep.csv");
      emit_report(report, ReportFormat::Json, cfg.output_dir / "sweep.json");
      emit_report(report, ReportFormat::Svg, cfg.output_dir / "sweep.svg");

      out << "corpus " << cfg.corpus.string() << " (" << corpus.size() << " documents, fingerprint "
          << report.corpus_fingerprint.substr(0, 12) << ")\n";
      out << std::left << std::setw(16) << "train_fraction" << std::setw(16) << "best_method" << "accuracy\n";
      for (const auto& best : best_per_fraction(report))
        out << std::left << std::setw(16) << format_number(best.train_fraction) << std::setw(16)
            << to_string(best.method) << std::fixed << std::setprecision(4) << best.accuracy << '\n'
            << std::defaultfloat;
      out << report.rows.size() << " rows written to " << cfg.output_dir.string() << '\n';
      return kOk;
    }

    if (rep->parsed()) {
      const auto raw = senti::detail::read_file(input_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(raw);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedRow, input_path + ": " + e.what());
      }
      SweepReport report;
      try {
        report = report_from_json(j);
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedRow, e.what());
      }
      const auto rendered = render_report(report, parse_report_format(report_format));
      if (out_path.empty()) out << rendered;
      else detail::write_text(out_path, rendered);
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    // failure_code names the stage that was running when the error surfaced.
    if (e.code() == ErrorCode::ModelFormat || failure_code == kModelError) return kModelError;
    if (exit_code_for(e.code()) == kRuntimeError || failure_code == kRuntimeError) return kRuntimeError;
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kInputError;
}

}  // namespace senti::cli
