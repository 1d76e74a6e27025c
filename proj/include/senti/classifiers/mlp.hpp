#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "senti/classifiers/common.hpp"
#include "senti/random.hpp"

namespace senti {

/// Weights of an inputs -> hidden (sigmoid) -> 1 (sigmoid) network.
/// The input matrix is stored input-major: w1[i * hidden + h].
struct MlpParams {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  bool operator==(const MlpParams&) const = default;

  static MlpParams zeros(std::size_t inputs, std::size_t hidden) {
    return {inputs, hidden, std::vector<double>(inputs * hidden, 0.0), std::vector<double>(hidden, 0.0),
            std::vector<double>(hidden, 0.0), 0.0};
  }

  /// Uniform in [-0.5, 0.5], drawn in the order w1, b1, w2, b2.
  static MlpParams random(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
    auto p = zeros(inputs, hidden);
    Rng rng(seed);
    for (auto& w : p.w1) w = rng.uniform(-0.5, 0.5);
    for (auto& b : p.b1) b = rng.uniform(-0.5, 0.5);
    for (auto& w : p.w2) w = rng.uniform(-0.5, 0.5);
    p.b2 = rng.uniform(-0.5, 0.5);
    return p;
  }

  bool all_finite() const {
    auto finite = [](const std::vector<double>& v) {
      for (double x : v)
        if (!std::isfinite(x)) return false;
      return true;
    };
    return finite(w1) && finite(b1) && finite(w2) && std::isfinite(b2);
  }
};

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Binary cross-entropy of sigmoid(z) against y, without forming sigmoid(z).
inline double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

struct Forward {
  std::vector<double> hidden;  // activations
  double logit = 0.0;
};

inline void forward(const MlpParams& p, const SparseVector& x, Forward& out) {
  out.hidden.assign(p.b1.begin(), p.b1.end());
  for (const auto& [i, v] : x.entries) {
    if (i >= p.inputs) continue;
    const double* row = &p.w1[static_cast<std::size_t>(i) * p.hidden];
    for (std::size_t h = 0; h < p.hidden; ++h) out.hidden[h] += row[h] * v;
  }
  out.logit = p.b2;
  for (std::size_t h = 0; h < p.hidden; ++h) {
    out.hidden[h] = sigmoid(out.hidden[h]);
    out.logit += p.w2[h] * out.hidden[h];
  }
}

}  // namespace detail

/// Mean binary cross-entropy over the batch.
inline double mlp_loss(const MlpParams& p, std::span<const SparseVector> xs, std::span<const Label> ys) {
  detail::Forward f;
  double total = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    detail::forward(p, xs[n], f);
    total += detail::bce_from_logit(f.logit, as_target(ys[n]));
  }
  return total / static_cast<double>(xs.size());
}

/// Gradient of mlp_loss with respect to every parameter, by backpropagation.
inline MlpParams mlp_gradient(const MlpParams& p, std::span<const SparseVector> xs, std::span<const Label> ys) {
  auto g = MlpParams::zeros(p.inputs, p.hidden);
  detail::Forward f;
  std::vector<double> delta_hidden(p.hidden);
  const double scale = 1.0 / static_cast<double>(xs.size());
  for (std::size_t n = 0; n < xs.size(); ++n) {
    detail::forward(p, xs[n], f);
    const double delta_out = (detail::sigmoid(f.logit) - as_target(ys[n])) * scale;
    g.b2 += delta_out;
    for (std::size_t h = 0; h < p.hidden; ++h) {
      g.w2[h] += delta_out * f.hidden[h];
      delta_hidden[h] = delta_out * p.w2[h] * f.hidden[h] * (1.0 - f.hidden[h]);
      g.b1[h] += delta_hidden[h];
    }
    for (const auto& [i, v] : xs[n].entries) {
      if (i >= p.inputs) continue;
      double* row = &g.w1[static_cast<std::size_t>(i) * p.hidden];
      for (std::size_t h = 0; h < p.hidden; ++h) row[h] += delta_hidden[h] * v;
    }
  }
  return g;
}

class MlpModel {
 public:
  MlpModel() = default;
  explicit MlpModel(MlpParams params) : params_(std::move(params)) {}

  const MlpParams& params() const noexcept { return params_; }

  double output(const SparseVector& x) const {
    detail::Forward f;
    detail::forward(params_, x, f);
    return detail::sigmoid(f.logit);
  }

  Prediction predict(const SparseVector& x) const {
    const double y = output(x);
    return {y >= 0.5 ? Label::Positive : Label::Negative, y};
  }

  nlohmann::json to_json() const {
    return {{"activation", "sigmoid"}, {"inputs", params_.inputs}, {"hidden", params_.hidden}, {"w1", params_.w1},
            {"b1", params_.b1},        {"w2", params_.w2},         {"b2", params_.b2}};
  }

  static MlpModel from_json(const nlohmann::json& j) {
    if (j.at("activation").get<std::string>() != "sigmoid") throw Error(ErrorCode::ModelFormat, "unknown activation");
    MlpParams p{j.at("inputs").get<std::size_t>(),       j.at("hidden").get<std::size_t>(),
                j.at("w1").get<std::vector<double>>(),   j.at("b1").get<std::vector<double>>(),
                j.at("w2").get<std::vector<double>>(),   j.at("b2").get<double>()};
    if (p.w1.size() != p.inputs * p.hidden || p.b1.size() != p.hidden || p.w2.size() != p.hidden)
      throw Error(ErrorCode::ModelFormat, "mlp weight shapes disagree");
    return MlpModel(std::move(p));
  }

 private:
  MlpParams params_;
};

struct MlpTraining {
  MlpModel model;
  /// loss_history[e] is the full-batch loss after e epochs.
  std::vector<double> loss_history;
};

/// Full-batch gradient descent on mean cross-entropy. Throws NonFiniteLoss
/// as soon as the loss or a gradient stops being finite.
inline MlpTraining train_mlp_with_history(std::span<const SparseVector> xs, std::span<const Label> ys,
                                          std::size_t inputs, const TrainConfig& config) {
  detail::check_training_shape(xs, ys);
  config.validate();
  auto p = MlpParams::random(inputs, config.mlp_hidden, config.seed);
  std::vector<double> history;
  history.reserve(config.mlp_epochs + 1);

  auto record = [&](std::size_t epoch) {
    const double loss = mlp_loss(p, xs, ys);
    if (!std::isfinite(loss)) throw Error(ErrorCode::NonFiniteLoss, "epoch " + std::to_string(epoch));
    history.push_back(loss);
  };

  record(0);
  const double lr = config.mlp_learning_rate;
  for (std::size_t epoch = 1; epoch <= config.mlp_epochs; ++epoch) {
    const auto g = mlp_gradient(p, xs, ys);
    if (!g.all_finite()) throw Error(ErrorCode::NonFiniteLoss, "non-finite gradient at epoch " + std::to_string(epoch));
    for (std::size_t i = 0; i < p.w1.size(); ++i) p.w1[i] -= lr * g.w1[i];
    for (std::size_t h = 0; h < p.hidden; ++h) {
      p.b1[h] -= lr * g.b1[h];
      p.w2[h] -= lr * g.w2[h];
    }
    p.b2 -= lr * g.b2;
    record(epoch);
  }
  return {MlpModel(std::move(p)), std::move(history)};
}

inline MlpModel train_mlp(std::span<const SparseVector> xs, std::span<const Label> ys, std::size_t inputs,
                          const TrainConfig& config) {
  return train_mlp_with_history(xs, ys, inputs, config).model;
}

}  // namespace senti
