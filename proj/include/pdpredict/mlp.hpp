#pragma once

// Feedforward network with one sigmoid hidden layer and two sigmoid output
// units (Healthy, PD), trained online by backpropagation of the squared
// error with momentum.
//
// Weight layout (row-major):
//   w_ih  (inputs + 1) x hidden   last row holds the hidden biases
//   w_ho  (hidden + 1) x 2        last row holds the output biases

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/random.hpp"

namespace pdpredict {

struct MlpConfig {
  std::size_t hidden_units = 8;
  double learning_rate = 0.4;
  double momentum = 0.2;
  std::size_t epochs = 500;
};

struct MlpModel {
  static constexpr std::size_t kOutputs = 2;

  std::size_t inputs = kFeatureCount;
  std::size_t hidden = 8;
  std::vector<double> w_ih;
  std::vector<double> w_ho;
  MlpConfig config;
  // Mean over records and output units of (target - output)^2, accumulated
  // during each training pass.
  std::vector<double> epoch_mse;

  double& ih(std::size_t in, std::size_t h) { return w_ih[in * hidden + h]; }
  double ih(std::size_t in, std::size_t h) const { return w_ih[in * hidden + h]; }
  double& ho(std::size_t h, std::size_t out) { return w_ho[h * kOutputs + out]; }
  double ho(std::size_t h, std::size_t out) const { return w_ho[h * kOutputs + out]; }
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline MlpModel mlp_init(std::size_t inputs, const MlpConfig& config, std::uint64_t seed) {
  MlpModel m;
  m.inputs = inputs;
  m.hidden = config.hidden_units;
  m.config = config;
  m.w_ih.resize((inputs + 1) * m.hidden);
  m.w_ho.resize((m.hidden + 1) * MlpModel::kOutputs);
  Rng rng(derive_seed(seed, "mlp/init"));
  for (auto& w : m.w_ih) w = rng.uniform(-0.5, 0.5);
  for (auto& w : m.w_ho) w = rng.uniform(-0.5, 0.5);
  return m;
}

struct MlpActivations {
  std::vector<double> hidden;
  std::array<double, MlpModel::kOutputs> output{};
};

inline MlpActivations mlp_forward(const MlpModel& m, std::span<const double> x) {
  MlpActivations a;
  a.hidden.resize(m.hidden);
  for (std::size_t h = 0; h < m.hidden; ++h) {
    double z = m.ih(m.inputs, h);
    for (std::size_t i = 0; i < m.inputs; ++i) z += m.ih(i, h) * x[i];
    a.hidden[h] = sigmoid(z);
  }
  for (std::size_t k = 0; k < MlpModel::kOutputs; ++k) {
    double z = m.ho(m.hidden, k);
    for (std::size_t h = 0; h < m.hidden; ++h) z += m.ho(h, k) * a.hidden[h];
    a.output[k] = sigmoid(z);
  }
  return a;
}

inline std::array<double, 2> one_hot(Label y) {
  return y == Label::kPD ? std::array<double, 2>{0.0, 1.0}
                         : std::array<double, 2>{1.0, 0.0};
}

// E = 1/2 * sum_k (t_k - o_k)^2 for one record.
inline double mlp_loss(const MlpModel& m, std::span<const double> x, Label y) {
  const auto a = mlp_forward(m, x);
  const auto t = one_hot(y);
  double e = 0.0;
  for (std::size_t k = 0; k < MlpModel::kOutputs; ++k) {
    e += 0.5 * (t[k] - a.output[k]) * (t[k] - a.output[k]);
  }
  return e;
}

struct MlpGradient {
  std::vector<double> w_ih;
  std::vector<double> w_ho;
};

inline MlpGradient mlp_backprop(const MlpModel& m, std::span<const double> x, Label y,
                                const MlpActivations& a) {
  const auto t = one_hot(y);
  MlpGradient g{std::vector<double>(m.w_ih.size()), std::vector<double>(m.w_ho.size())};
  std::array<double, MlpModel::kOutputs> delta_out{};
  for (std::size_t k = 0; k < MlpModel::kOutputs; ++k) {
    const double o = a.output[k];
    delta_out[k] = (o - t[k]) * o * (1.0 - o);
  }
  for (std::size_t h = 0; h <= m.hidden; ++h) {
    const double act = h < m.hidden ? a.hidden[h] : 1.0;
    for (std::size_t k = 0; k < MlpModel::kOutputs; ++k) {
      g.w_ho[h * MlpModel::kOutputs + k] = delta_out[k] * act;
    }
  }
  for (std::size_t h = 0; h < m.hidden; ++h) {
    double back = 0.0;
    for (std::size_t k = 0; k < MlpModel::kOutputs; ++k) back += delta_out[k] * m.ho(h, k);
    const double delta_h = back * a.hidden[h] * (1.0 - a.hidden[h]);
    for (std::size_t i = 0; i <= m.inputs; ++i) {
      const double in = i < m.inputs ? x[i] : 1.0;
      g.w_ih[i * m.hidden + h] = delta_h * in;
    }
  }
  return g;
}

inline MlpGradient mlp_backprop(const MlpModel& m, std::span<const double> x, Label y) {
  return mlp_backprop(m, x, y, mlp_forward(m, x));
}

inline MlpModel mlp_train(const Dataset& train, const MlpConfig& config, std::uint64_t seed) {
  require_both_classes(train);
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const double v = train[i].values[f];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::kNonNormalizedInput,
                    "feature outside [0, 1]; normalize before training", i + 1,
                    std::string(kFeatureNames[f]));
      }
    }
  }

  MlpModel m = mlp_init(kFeatureCount, config, seed);
  Rng order_rng(derive_seed(seed, "mlp/order"));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> vel_ih(m.w_ih.size(), 0.0), vel_ho(m.w_ho.size(), 0.0);

  const double lr = config.learning_rate;
  const double mom = config.momentum;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double sq = 0.0;
    for (std::size_t idx : order) {
      const auto& rec = train[idx];
      const auto a = mlp_forward(m, rec.values);
      const auto t = one_hot(rec.label);
      for (std::size_t k = 0; k < MlpModel::kOutputs; ++k) {
        sq += (t[k] - a.output[k]) * (t[k] - a.output[k]);
      }
      const auto g = mlp_backprop(m, rec.values, rec.label, a);
      for (std::size_t w = 0; w < m.w_ih.size(); ++w) {
        vel_ih[w] = -lr * g.w_ih[w] + mom * vel_ih[w];
        m.w_ih[w] += vel_ih[w];
      }
      for (std::size_t w = 0; w < m.w_ho.size(); ++w) {
        vel_ho[w] = -lr * g.w_ho[w] + mom * vel_ho[w];
        m.w_ho[w] += vel_ho[w];
      }
    }
    m.epoch_mse.push_back(sq / static_cast<double>(train.size() * MlpModel::kOutputs));
  }
  return m;
}

// PD output divided by the sum of both outputs. Inputs are clamped to [0, 1].
inline double mlp_score(const MlpModel& m, std::span<const double> x) {
  std::vector<double> clamped(x.begin(), x.end());
  for (auto& v : clamped) v = std::clamp(v, 0.0, 1.0);
  const auto a = mlp_forward(m, clamped);
  const double sum = a.output[0] + a.output[1];
  return sum > 0.0 ? a.output[1] / sum : 0.5;
}

inline double mlp_score(const MlpModel& m, const SubjectRecord& r) {
  return mlp_score(m, std::span<const double>(r.values));
}

inline Label mlp_predict(const MlpModel& m, const SubjectRecord& r) {
  const auto a = mlp_forward(m, r.values);
  return a.output[1] > a.output[0] ? Label::kPD : Label::kHealthy;
}

// Max over all weights of |g_bp - g_fd| / max(1e-12, |g_bp| + |g_fd|), with
// g_fd the central difference of the per-record squared error.
inline double mlp_gradient_check(const MlpModel& model, std::span<const double> x, Label y,
                                 double step) {
  const auto g = mlp_backprop(model, x, y);
  MlpModel probe = model;
  double worst = 0.0;
  auto check = [&](std::vector<double>& weights, const std::vector<double>& analytic) {
    for (std::size_t w = 0; w < weights.size(); ++w) {
      const double saved = weights[w];
      weights[w] = saved + step;
      const double up = mlp_loss(probe, x, y);
      weights[w] = saved - step;
      const double down = mlp_loss(probe, x, y);
      weights[w] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double denom = std::max(1e-12, std::abs(analytic[w]) + std::abs(fd));
      worst = std::max(worst, std::abs(analytic[w] - fd) / denom);
    }
  };
  check(probe.w_ih, g.w_ih);
  check(probe.w_ho, g.w_ho);
  return worst;
}

inline nlohmann::json to_json(const MlpModel& m) {
  return {{"type", "mlp"},
          {"inputs", m.inputs},
          {"hidden", m.hidden},
          {"outputs", MlpModel::kOutputs},
          {"learning_rate", m.config.learning_rate},
          {"momentum", m.config.momentum},
          {"epochs", m.config.epochs},
          {"weights_input_hidden", m.w_ih},
          {"weights_hidden_output", m.w_ho}};
}

inline MlpModel mlp_from_json(const nlohmann::json& j) {
  MlpModel m;
  m.inputs = j.at("inputs").get<std::size_t>();
  m.hidden = j.at("hidden").get<std::size_t>();
  m.config.hidden_units = m.hidden;
  m.config.learning_rate = j.at("learning_rate").get<double>();
  m.config.momentum = j.at("momentum").get<double>();
  m.config.epochs = j.at("epochs").get<std::size_t>();
  m.w_ih = j.at("weights_input_hidden").get<std::vector<double>>();
  m.w_ho = j.at("weights_hidden_output").get<std::vector<double>>();
  if (m.w_ih.size() != (m.inputs + 1) * m.hidden ||
      m.w_ho.size() != (m.hidden + 1) * MlpModel::kOutputs) {
    throw Error(ErrorCode::kMalformedModel, "MLP weight arrays do not match layer shapes");
  }
  return m;
}

}  // namespace pdpredict
