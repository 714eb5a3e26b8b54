#pragma once

// Discrete Bayesian network classifier.
//
// Node 0 is the class; node f + 1 is schema feature f after discretization.
// Structure comes from K2 (greedy parent addition under a fixed node order,
// Cooper-Herskovits score) and the CPTs from symmetric pseudo-count
// estimation.
//
// A CPT row is addressed by the parent configuration index
//   j = sum_p value(parent_p) * stride_p,  stride_0 = 1,
//   stride_{p+1} = stride_p * arity(parent_p)
// over the node's parent list in stored (ascending node index) order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/preprocess.hpp"

namespace pdpredict {

inline constexpr std::size_t kClassNode = 0;
inline constexpr std::size_t kBayesNodeCount = kFeatureCount + 1;

// Fully discrete table: rows[i][node] in [0, arity[node]).
struct DiscreteData {
  std::vector<std::size_t> arity;
  std::vector<std::vector<std::size_t>> rows;
};

using ParentSets = std::vector<std::vector<std::size_t>>;

inline std::size_t parent_config_count(std::span<const std::size_t> parents,
                                       std::span<const std::size_t> arity) {
  std::size_t q = 1;
  for (std::size_t p : parents) q *= arity[p];
  return q;
}

inline std::size_t parent_config_index(std::span<const std::size_t> parents,
                                       std::span<const std::size_t> arity,
                                       std::span<const std::size_t> values) {
  std::size_t j = 0;
  std::size_t stride = 1;
  for (std::size_t p : parents) {
    j += values[p] * stride;
    stride *= arity[p];
  }
  return j;
}

// Counts N_jk laid out as [j * r + k].
inline std::vector<double> family_counts(std::size_t node, std::span<const std::size_t> parents,
                                         const DiscreteData& data) {
  const std::size_t r = data.arity[node];
  std::vector<double> counts(parent_config_count(parents, data.arity) * r, 0.0);
  for (const auto& row : data.rows) {
    counts[parent_config_index(parents, data.arity, row) * r + row[node]] += 1.0;
  }
  return counts;
}

// log prod_j [ (r-1)! / (N_j + r - 1)! * prod_k N_jk! ], in log-gamma form.
inline double k2_score(std::size_t node, std::span<const std::size_t> parents,
                       const DiscreteData& data) {
  const std::size_t r = data.arity[node];
  const auto counts = family_counts(node, parents, data);
  const double lg_r = std::lgamma(static_cast<double>(r));
  double score = 0.0;
  for (std::size_t j = 0; j * r < counts.size(); ++j) {
    double n_j = 0.0;
    double sum_k = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const double n = counts[j * r + k];
      n_j += n;
      sum_k += std::lgamma(n + 1.0);
    }
    if (n_j == 0.0) continue;
    score += lg_r - std::lgamma(n_j + static_cast<double>(r)) + sum_k;
  }
  return score;
}

// Greedy K2. For each node (in `ordering`), repeatedly adds the predecessor
// that most increases the node's score, stopping when nothing improves it or
// the node has `max_parents` parents. Candidates are scanned in ascending node
// index and only a strictly better score replaces the incumbent, so ties go
// to the lowest index. `initial` seeds the parent sets (empty by default).
inline ParentSets k2_search(const DiscreteData& data, std::span<const std::size_t> ordering,
                            std::size_t max_parents, ParentSets initial = {}) {
  const std::size_t n_nodes = data.arity.size();
  ParentSets parents = initial.empty() ? ParentSets(n_nodes) : std::move(initial);
  for (std::size_t pos = 0; pos < ordering.size(); ++pos) {
    const std::size_t node = ordering[pos];
    auto& current = parents[node];
    std::sort(current.begin(), current.end());
    std::vector<std::size_t> predecessors(ordering.begin(), ordering.begin() + pos);
    std::sort(predecessors.begin(), predecessors.end());

    double current_score = k2_score(node, current, data);
    while (current.size() < max_parents) {
      double best_score = current_score;
      std::size_t best = n_nodes;
      for (std::size_t cand : predecessors) {
        if (std::find(current.begin(), current.end(), cand) != current.end()) continue;
        auto trial = current;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), cand), cand);
        const double s = k2_score(node, trial, data);
        if (s > best_score) {
          best_score = s;
          best = cand;
        }
      }
      if (best == n_nodes) break;
      current.insert(std::upper_bound(current.begin(), current.end(), best), best);
      current_score = best_score;
    }
  }
  return parents;
}

struct Cpt {
  std::size_t arity = 0;
  std::vector<std::size_t> parents;
  std::vector<double> table;  // [j * arity + k]

  double prob(std::size_t j, std::size_t k) const { return table[j * arity + k]; }
  bool operator==(const Cpt&) const = default;
};

// P(node = k | parents = j) = (N_jk + alpha) / (N_j + alpha * r). A row with
// no data and alpha = 0 falls back to uniform.
inline std::vector<Cpt> cpt_estimate(const ParentSets& parents, const DiscreteData& data,
                                     double alpha) {
  std::vector<Cpt> cpts(parents.size());
  for (std::size_t node = 0; node < parents.size(); ++node) {
    auto& cpt = cpts[node];
    cpt.arity = data.arity[node];
    cpt.parents = parents[node];
    cpt.table = family_counts(node, cpt.parents, data);
    const std::size_t r = cpt.arity;
    for (std::size_t j = 0; j * r < cpt.table.size(); ++j) {
      double n_j = 0.0;
      for (std::size_t k = 0; k < r; ++k) n_j += cpt.table[j * r + k];
      const double denom = n_j + alpha * static_cast<double>(r);
      for (std::size_t k = 0; k < r; ++k) {
        auto& cell = cpt.table[j * r + k];
        cell = denom > 0.0 ? (cell + alpha) / denom : 1.0 / static_cast<double>(r);
      }
    }
  }
  return cpts;
}

struct BayesNetConfig {
  std::size_t max_parents = 2;
  double prior_alpha = 0.5;
  std::size_t bins = 10;
  BinStrategy strategy = BinStrategy::kEqualFrequency;
};

struct BayesNetModel {
  std::vector<std::size_t> ordering;
  std::vector<std::size_t> arity;
  std::vector<Cpt> cpts;
  std::size_t class_node = kClassNode;
  DiscretizationMap discretization;
  std::size_t max_parents = 2;
  double prior_alpha = 0.5;

  ParentSets parents() const {
    ParentSets out;
    for (const auto& c : cpts) out.push_back(c.parents);
    return out;
  }
};

// P(class = 1 | all other node values) for a discrete assignment; the class
// slot of `values` is ignored. Works for any node order and any position of
// the class node.
inline double bn_posterior(const BayesNetModel& m, std::vector<std::size_t> values) {
  std::array<double, 2> log_joint{};
  for (std::size_t c = 0; c < 2; ++c) {
    values[m.class_node] = c;
    double lp = 0.0;
    for (std::size_t node = 0; node < m.cpts.size(); ++node) {
      const auto& cpt = m.cpts[node];
      const std::size_t j = parent_config_index(cpt.parents, m.arity, values);
      lp += std::log(cpt.prob(j, values[node]));
    }
    log_joint[c] = lp;
  }
  const double hi = std::max(log_joint[0], log_joint[1]);
  if (hi == -std::numeric_limits<double>::infinity()) return 0.5;
  const double e0 = std::exp(log_joint[0] - hi);
  const double e1 = std::exp(log_joint[1] - hi);
  return e1 / (e0 + e1);
}

inline std::vector<std::size_t> discretize_record(const DiscretizationMap& map,
                                                  const SubjectRecord& r) {
  std::vector<std::size_t> values(kBayesNodeCount);
  values[kClassNode] = static_cast<std::size_t>(r.label);
  for (std::size_t f = 0; f < kFeatureCount; ++f) values[f + 1] = map.bin(f, r.values[f]);
  return values;
}

inline DiscreteData discretize_dataset(const DiscretizationMap& map, const Dataset& ds) {
  DiscreteData data;
  data.arity.resize(kBayesNodeCount);
  data.arity[kClassNode] = 2;
  for (std::size_t f = 0; f < kFeatureCount; ++f) data.arity[f + 1] = map.bins(f);
  data.rows.reserve(ds.size());
  for (const auto& r : ds) data.rows.push_back(discretize_record(map, r));
  return data;
}

inline double bn_score(const BayesNetModel& m, const SubjectRecord& r) {
  return bn_posterior(m, discretize_record(m.discretization, r));
}

// Class first, then features in schema order; every feature starts with the
// class as its parent and K2 may add more up to `max_parents`.
inline BayesNetModel bayesnet_train(const Dataset& train, const BayesNetConfig& config = {}) {
  require_both_classes(train);
  BayesNetModel m;
  m.max_parents = config.max_parents;
  m.prior_alpha = config.prior_alpha;
  m.discretization = discretize_fit(train, config.bins, config.strategy);
  const auto data = discretize_dataset(m.discretization, train);
  m.arity = data.arity;
  m.ordering.resize(kBayesNodeCount);
  for (std::size_t i = 0; i < kBayesNodeCount; ++i) m.ordering[i] = i;

  ParentSets initial(kBayesNodeCount);
  if (config.max_parents > 0) {
    for (std::size_t node = 1; node < kBayesNodeCount; ++node) initial[node] = {kClassNode};
  }
  const auto parents = k2_search(data, m.ordering, config.max_parents, std::move(initial));
  m.cpts = cpt_estimate(parents, data, config.prior_alpha);
  return m;
}

inline nlohmann::json to_json(const BayesNetModel& m) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t node = 0; node < m.cpts.size(); ++node) {
    nodes.push_back({{"name", node == m.class_node ? std::string("label")
                                                    : std::string(kFeatureNames[node - 1])},
                     {"arity", m.cpts[node].arity},
                     {"parents", m.cpts[node].parents},
                     {"cpt", m.cpts[node].table}});
  }
  nlohmann::json cuts = nlohmann::json::object();
  for (std::size_t f = 0; f < m.discretization.cuts.size(); ++f) {
    cuts[std::string(kFeatureNames[f])] = m.discretization.cuts[f];
  }
  return {{"type", "bayesnet"},
          {"ordering", m.ordering},
          {"class_node", m.class_node},
          {"max_parents", m.max_parents},
          {"prior_alpha", m.prior_alpha},
          {"nodes", nodes},
          {"discretization", cuts}};
}

inline BayesNetModel bayesnet_from_json(const nlohmann::json& j) {
  BayesNetModel m;
  m.ordering = j.at("ordering").get<std::vector<std::size_t>>();
  m.class_node = j.at("class_node").get<std::size_t>();
  m.max_parents = j.at("max_parents").get<std::size_t>();
  m.prior_alpha = j.at("prior_alpha").get<double>();
  for (const auto& node : j.at("nodes")) {
    Cpt c;
    c.arity = node.at("arity").get<std::size_t>();
    c.parents = node.at("parents").get<std::vector<std::size_t>>();
    c.table = node.at("cpt").get<std::vector<double>>();
    m.arity.push_back(c.arity);
    m.cpts.push_back(std::move(c));
  }
  if (m.cpts.size() != kBayesNodeCount) {
    throw Error(ErrorCode::kMalformedModel, "Bayes net must have 14 nodes");
  }
  for (const auto& c : m.cpts) {
    if (c.table.size() != parent_config_count(c.parents, m.arity) * c.arity) {
      throw Error(ErrorCode::kMalformedModel, "CPT size does not match parent arities");
    }
  }
  m.discretization = discretization_from_json(j.at("discretization"));
  return m;
}

}  // namespace pdpredict
