#pragma once

// Ridge logistic regression fitted by damped Newton iterations, used as the
// base learner of AdaBoost.M1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"

namespace pdpredict {

struct LogisticConfig {
  double ridge = 1e-8;
  std::size_t max_iterations = 200;
  double gradient_tolerance = 1e-8;
};

struct LogisticModel {
  std::vector<double> coefficients;
  double intercept = 0.0;
  double ridge = 1e-8;
  bool converged = false;
  // Warning flag: the optimizer stopped at max_iterations (for example on
  // separable data with no ridge, where no finite minimizer exists).
  bool iteration_limit = false;
  std::size_t iterations = 0;
  // Regularized objective after each accepted iteration; [0] is the start.
  std::vector<double> objective_trace;
};

// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// Weighted logistic problem over rows of X (n x d) with 0/1 targets.
struct LogisticProblem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd w;
  double ridge = 0.0;

  Eigen::Index dims() const { return x.cols(); }

  // sum_i w_i * nll_i + ridge/2 * |beta|^2, intercept unpenalized.
  double objective(const Eigen::VectorXd& beta, double b) const {
    const Eigen::VectorXd z = (x * beta).array() + b;
    double f = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      f += w[i] * (y[i] > 0.5 ? softplus(-z[i]) : softplus(z[i]));
    }
    return f + 0.5 * ridge * beta.squaredNorm();
  }

  // Gradient over (beta, intercept), intercept last.
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta, double b) const {
    const Eigen::VectorXd z = (x * beta).array() + b;
    Eigen::VectorXd r(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-z[i]));
      r[i] = w[i] * (p - y[i]);
    }
    Eigen::VectorXd g(dims() + 1);
    g.head(dims()) = x.transpose() * r + ridge * beta;
    g[dims()] = r.sum();
    return g;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& beta, double b) const {
    const Eigen::Index d = dims();
    const Eigen::VectorXd z = (x * beta).array() + b;
    Eigen::MatrixXd xa(x.rows(), d + 1);
    xa.leftCols(d) = x;
    xa.col(d).setOnes();
    Eigen::VectorXd s(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      // p(1-p) = sigma(z) * sigma(-z)
      const double a = 1.0 / (1.0 + std::exp(-z[i]));
      const double c = 1.0 / (1.0 + std::exp(z[i]));
      s[i] = w[i] * a * c;
    }
    Eigen::MatrixXd h = xa.transpose() * s.asDiagonal() * xa;
    h.diagonal().head(d).array() += ridge;
    return h;
  }
};

inline LogisticModel logistic_fit(const LogisticProblem& prob, const LogisticConfig& config) {
  const Eigen::Index d = prob.dims();
  double pos = 0.0, neg = 0.0;
  for (Eigen::Index i = 0; i < prob.y.size(); ++i) {
    if (!prob.x.row(i).allFinite()) {
      throw Error(ErrorCode::kNonFiniteFeature, "non-finite feature value",
                  static_cast<std::size_t>(i + 1));
    }
    (prob.y[i] > 0.5 ? pos : neg) += prob.w[i];
  }
  if (!(pos > 0.0 && neg > 0.0)) {
    throw Error(ErrorCode::kSingleClassWeight, "both classes need positive total weight");
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  double f = prob.objective(beta, b);
  LogisticModel m;
  m.ridge = prob.ridge;
  m.objective_trace.push_back(f);

  const auto inf_norm = [](const Eigen::VectorXd& v) {
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  };

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const Eigen::VectorXd g = prob.gradient(beta, b);
    Eigen::MatrixXd h = prob.hessian(beta, b);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    Eigen::VectorXd step = ldlt.solve(-g);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      step = h.completeOrthogonalDecomposition().solve(-g);
      if (!step.allFinite()) step = -g;
    }
    const double theta_norm = std::max(inf_norm(beta), std::abs(b));
    // A small gradient alone is not enough: on separable data the gradient
    // vanishes while Newton keeps taking unit-size steps outward.
    if (inf_norm(g) <= config.gradient_tolerance &&
        inf_norm(step) <= 1e-6 * (1.0 + theta_norm)) {
      m.converged = true;
      break;
    }

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const Eigen::VectorXd beta_new = beta + t * step.head(d);
      const double b_new = b + t * step[d];
      const double f_new = prob.objective(beta_new, b_new);
      if (std::isfinite(f_new) && f_new <= f) {
        beta = beta_new;
        b = b_new;
        f = f_new;
        accepted = true;
        break;
      }
    }
    m.iterations = it + 1;
    if (!accepted) {
      m.converged = inf_norm(g) <= config.gradient_tolerance;
      break;
    }
    m.objective_trace.push_back(f);
    if (it + 1 == config.max_iterations) m.iteration_limit = true;
  }
  m.coefficients.assign(beta.data(), beta.data() + d);
  m.intercept = b;
  return m;
}

inline LogisticProblem make_problem(const Dataset& ds, std::span<const double> weights,
                                    double ridge) {
  const auto n = static_cast<Eigen::Index>(ds.size());
  LogisticProblem p;
  p.x.resize(n, static_cast<Eigen::Index>(kFeatureCount));
  p.y.resize(n);
  p.w.resize(n);
  p.ridge = ridge;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = ds[static_cast<std::size_t>(i)];
    for (std::size_t f = 0; f < kFeatureCount; ++f) p.x(i, static_cast<Eigen::Index>(f)) = r.values[f];
    p.y[i] = r.label == Label::kPD ? 1.0 : 0.0;
    p.w[i] = weights[static_cast<std::size_t>(i)];
  }
  return p;
}

inline LogisticModel logistic_train(const Dataset& train, std::span<const double> weights,
                                    const LogisticConfig& config = {}) {
  if (weights.size() != train.size()) {
    throw Error(ErrorCode::kLengthMismatch, "one weight per record required");
  }
  return logistic_fit(make_problem(train, weights, config.ridge), config);
}

inline double logistic_score(const LogisticModel& m, std::span<const double> x) {
  double z = m.intercept;
  for (std::size_t i = 0; i < m.coefficients.size(); ++i) z += m.coefficients[i] * x[i];
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

inline Label logistic_predict(const LogisticModel& m, std::span<const double> x) {
  return logistic_score(m, x) > 0.5 ? Label::kPD : Label::kHealthy;
}

// ---------------------------------------------------------------------------
// AdaBoost.M1

struct BoostRound {
  LogisticModel model;
  double alpha = 0.0;
};

struct BoostRoundTrace {
  double epsilon = 0.0;
  double alpha = 0.0;
  bool kept = false;
  // Instance-weight state after reweighting (only for rounds that reweight).
  bool reweighted = false;
  double weight_sum = 0.0;
  double misclassified_mass = 0.0;
};

struct BoostConfig {
  std::size_t max_rounds = 10;
  LogisticConfig base;
};

struct BoostedModel {
  std::vector<BoostRound> rounds;
  std::size_t max_rounds = 10;
  double ridge = 1e-8;
  std::vector<BoostRoundTrace> trace;
};

inline double adaboost_alpha(double epsilon) { return std::log((1.0 - epsilon) / epsilon); }

// Scales misclassified weights by (1 - eps) / eps and renormalizes to sum 1.
inline void adaboost_reweight(std::span<double> weights, std::span<const char> misclassified,
                              double epsilon) {
  const double factor = (1.0 - epsilon) / epsilon;
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (misclassified[i]) weights[i] *= factor;
    total += weights[i];
  }
  for (auto& w : weights) w /= total;
}

inline BoostedModel adaboost_train(const Dataset& train, const BoostConfig& config = {}) {
  require_both_classes(train);
  const std::size_t n = train.size();
  BoostedModel m;
  m.max_rounds = config.max_rounds;
  m.ridge = config.base.ridge;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<char> miss(n, 0);

  for (std::size_t t = 0; t < config.max_rounds; ++t) {
    auto base = logistic_train(train, w, config.base);
    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = logistic_predict(base, train[i].values) != train[i].label;
      if (miss[i]) eps += w[i];
    }
    BoostRoundTrace tr;
    tr.epsilon = eps;
    if (eps >= 0.5) {
      m.trace.push_back(tr);
      break;
    }
    if (eps == 0.0) {
      const double eps_min = 1.0 / (2.0 * static_cast<double>(n));
      tr.alpha = adaboost_alpha(eps_min);
      tr.kept = true;
      m.rounds.push_back({std::move(base), tr.alpha});
      m.trace.push_back(tr);
      break;
    }
    tr.alpha = adaboost_alpha(eps);
    tr.kept = true;
    m.rounds.push_back({std::move(base), tr.alpha});

    adaboost_reweight(w, miss, eps);
    tr.reweighted = true;
    for (std::size_t i = 0; i < n; ++i) {
      tr.weight_sum += w[i];
      if (miss[i]) tr.misclassified_mass += w[i];
    }
    m.trace.push_back(tr);
  }
  // Only reachable when the first fit does worse than chance on its own
  // training data.
  if (m.rounds.empty()) {
    throw Error(ErrorCode::kEmptyModel, "first boosting round had weighted error >= 0.5");
  }
  return m;
}

// Alpha-weighted fraction of PD votes.
inline double boosted_score(const BoostedModel& m, std::span<const double> x) {
  if (m.rounds.empty()) throw Error(ErrorCode::kEmptyModel, "boosted model has no rounds");
  double pd = 0.0, total = 0.0;
  for (const auto& r : m.rounds) {
    total += r.alpha;
    if (logistic_predict(r.model, x) == Label::kPD) pd += r.alpha;
  }
  return pd / total;
}

inline double boosted_score(const BoostedModel& m, const SubjectRecord& r) {
  return boosted_score(m, std::span<const double>(r.values));
}

inline Label boosted_predict(const BoostedModel& m, const SubjectRecord& r) {
  return boosted_score(m, r) > 0.5 ? Label::kPD : Label::kHealthy;
}

inline nlohmann::json to_json(const BoostedModel& m) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : m.rounds) {
    rounds.push_back({{"coefficients", r.model.coefficients},
                      {"intercept", r.model.intercept},
                      {"alpha", r.alpha}});
  }
  return {{"type", "boostlr"}, {"max_rounds", m.max_rounds}, {"ridge", m.ridge}, {"rounds", rounds}};
}

inline BoostedModel boostlr_from_json(const nlohmann::json& j) {
  BoostedModel m;
  m.max_rounds = j.at("max_rounds").get<std::size_t>();
  m.ridge = j.at("ridge").get<double>();
  for (const auto& jr : j.at("rounds")) {
    BoostRound r;
    r.model.coefficients = jr.at("coefficients").get<std::vector<double>>();
    r.model.intercept = jr.at("intercept").get<double>();
    r.model.ridge = m.ridge;
    r.alpha = jr.at("alpha").get<double>();
    if (r.model.coefficients.size() != kFeatureCount || !(r.alpha > 0.0)) {
      throw Error(ErrorCode::kMalformedModel, "boosting round needs 13 coefficients and alpha > 0");
    }
    m.rounds.push_back(std::move(r));
  }
  if (m.rounds.empty()) throw Error(ErrorCode::kEmptyModel, "boosted model has no rounds");
  return m;
}

}  // namespace pdpredict
