#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "senti/classifiers/decision_tree.hpp"
#include "senti/classifiers/knn.hpp"
#include "senti/classifiers/mlp.hpp"
#include "senti/classifiers/naive_bayes.hpp"
#include "senti/corpus.hpp"
#include "senti/preprocess.hpp"
#include "senti/vectorize.hpp"

namespace senti {

enum class Method { DecisionTree, Knn, Mlp, NaiveBayes };

inline constexpr Method kAllMethods[] = {Method::NaiveBayes, Method::Knn, Method::DecisionTree, Method::Mlp};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::NaiveBayes: return "naive_bayes";
    case Method::Knn: return "knn";
    case Method::DecisionTree: return "decision_tree";
    case Method::Mlp: return "mlp";
  }
  return "unknown";
}

inline Method parse_method(std::string_view tag) {
  for (auto m : kAllMethods)
    if (to_string(m) == tag) return m;
  throw Error(ErrorCode::UnknownMethod, std::string(tag));
}

/// A fitted classifier bundled with the preprocessing settings and TF-IDF
/// model it was trained under, so it can classify raw text on its own.
struct TrainedModel {
  PreprocessConfig preprocess;
  TfIdfModel tfidf;
  std::variant<NaiveBayesModel, KnnModel, DecisionTreeModel, MlpModel> classifier;

  Method method() const {
    switch (classifier.index()) {
      case 0: return Method::NaiveBayes;
      case 1: return Method::Knn;
      case 2: return Method::DecisionTree;
      default: return Method::Mlp;
    }
  }
};

/// Trains on already-tokenized documents. TF-IDF is fitted on exactly these
/// documents; Naive Bayes reads raw counts, the other methods TF-IDF weights.
inline TrainedModel train(Method method, std::span<const std::vector<std::string>> tokens,
                          std::span<const Label> labels, const PreprocessConfig& preprocess, TfIdfVariant variant,
                          const TrainConfig& config) {
  config.validate();
  if (tokens.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "tokens vs labels");
  TrainedModel model{preprocess, TfIdfModel::fit(tokens, variant), NaiveBayesModel{}};
  const auto vocab = model.tfidf.vocabulary_size();

  std::vector<SparseVector> rows;
  rows.reserve(tokens.size());
  for (const auto& doc : tokens)
    rows.push_back(method == Method::NaiveBayes ? model.tfidf.counts(doc) : model.tfidf.transform(doc));

  switch (method) {
    case Method::NaiveBayes: model.classifier = train_nb(rows, labels, vocab, config.nb_alpha); break;
    case Method::Knn: model.classifier = train_knn(rows, labels, config.knn_k); break;
    case Method::DecisionTree:
      model.classifier = train_dt(rows, labels, vocab, config.dt_max_depth, config.dt_min_leaf);
      break;
    case Method::Mlp: model.classifier = train_mlp(rows, labels, vocab, config); break;
  }
  return model;
}

inline TrainedModel train(Method method, const Corpus& training, const PreprocessConfig& preprocess,
                          TfIdfVariant variant, const TrainConfig& config) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(training.size());
  for (const auto& doc : training) tokens.push_back(preprocess_text(doc.text, preprocess));
  const auto labels = training.labels();
  return train(method, tokens, labels, preprocess, variant, config);
}

inline TrainedModel train(std::string_view method_tag, const DataSplit& split, const PreprocessConfig& preprocess,
                          TfIdfVariant variant, const TrainConfig& config) {
  return train(parse_method(method_tag), split.train, preprocess, variant, config);
}

inline Prediction predict_tokens(const TrainedModel& model, std::span<const std::string> tokens) {
  return std::visit(
      [&](const auto& clf) -> Prediction {
        using T = std::decay_t<decltype(clf)>;
        if constexpr (std::is_same_v<T, NaiveBayesModel>) return clf.predict(model.tfidf.counts(tokens));
        else return clf.predict(model.tfidf.transform(tokens));
      },
      model.classifier);
}

inline Prediction predict(const TrainedModel& model, std::string_view text) {
  const auto tokens = preprocess_text(text, model.preprocess);
  return predict_tokens(model, tokens);
}

// Serialized layout (version 1):
//   { "format": "senti.model", "version": 1, "method": <tag>,
//     "preprocess": { "filter_stopwords": bool, "stopwords": [..] },
//     "tfidf": <TfIdfModel::to_json>, "classifier": <per-method object> }

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json to_json(const TrainedModel& model) {
  nlohmann::json clf = std::visit([](const auto& c) { return c.to_json(); }, model.classifier);
  return {{"format", "senti.model"},
          {"version", kModelFormatVersion},
          {"method", to_string(model.method())},
          {"preprocess",
           {{"filter_stopwords", model.preprocess.filter_stopwords}, {"stopwords", model.preprocess.stopwords.words()}}},
          {"tfidf", model.tfidf.to_json()},
          {"classifier", std::move(clf)}};
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "senti.model")
      throw Error(ErrorCode::ModelFormat, "not a senti model file");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw Error(ErrorCode::ModelFormat, "unsupported model version " + j.at("version").dump());

    TrainedModel model;
    const auto& pre = j.at("preprocess");
    model.preprocess.filter_stopwords = pre.at("filter_stopwords").get<bool>();
    model.preprocess.stopwords = StopwordList(pre.at("stopwords").get<std::set<std::string>>());
    model.tfidf = TfIdfModel::from_json(j.at("tfidf"));

    const auto& clf = j.at("classifier");
    Method method;
    try {
      method = parse_method(j.at("method").get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::ModelFormat, e.what());
    }
    switch (method) {
      case Method::NaiveBayes: {
        auto nb = NaiveBayesModel::from_json(clf);
        if (nb.vocabulary_size() != model.tfidf.vocabulary_size())
          throw Error(ErrorCode::ModelFormat, "naive bayes vocabulary size mismatch");
        model.classifier = std::move(nb);
        break;
      }
      case Method::Knn: model.classifier = KnnModel::from_json(clf); break;
      case Method::DecisionTree: model.classifier = DecisionTreeModel::from_json(clf); break;
      case Method::Mlp: {
        auto mlp = MlpModel::from_json(clf);
        if (mlp.params().inputs != model.tfidf.vocabulary_size())
          throw Error(ErrorCode::ModelFormat, "mlp input width mismatch");
        model.classifier = std::move(mlp);
        break;
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ModelFormat, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ModelFormat) throw;
    throw Error(ErrorCode::ModelFormat, e.what());
  }
}

inline void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_json(model).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline TrainedModel load_model(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ModelFormat, e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ModelFormat, e.what());
  }
  return model_from_json(j);
}

}  // namespace senti
