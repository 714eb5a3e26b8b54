#pragma once

// Random forest of unpruned information-gain trees, majority vote.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/random.hpp"

namespace pdpredict {

// (healthy, pd)
using ClassCountPair = std::array<double, 2>;

inline double entropy_bits(const ClassCountPair& c) {
  const double n = c[0] + c[1];
  if (n <= 0.0) return 0.0;
  double h = 0.0;
  for (double k : c) {
    if (k > 0.0) {
      const double p = k / n;
      h -= p * std::log2(p);
    }
  }
  return h;
}

inline double info_gain(const ClassCountPair& parent, const ClassCountPair& left,
                        const ClassCountPair& right) {
  for (std::size_t c = 0; c < 2; ++c) {
    if (left[c] < 0.0 || right[c] < 0.0 || left[c] + right[c] != parent[c]) {
      throw Error(ErrorCode::kInconsistentCounts, "child counts do not sum to parent counts");
    }
  }
  const double n = parent[0] + parent[1];
  if (n <= 0.0) return 0.0;
  const double nl = left[0] + left[1];
  const double nr = right[0] + right[1];
  const double gain =
      entropy_bits(parent) - (nl / n) * entropy_bits(left) - (nr / n) * entropy_bits(right);
  return std::max(0.0, gain);
}

struct TreeNode {
  bool leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;   // node index; value < threshold goes left
  std::size_t right = 0;
  ClassCountPair counts{};

  bool operator==(const TreeNode&) const = default;
};

// Nodes are stored in preorder; index 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].leaf) {
      i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
    }
    return nodes[i];
  }

  // Majority of the leaf counts; ties go to Healthy.
  Label predict(std::span<const double> x) const {
    const auto& c = leaf_for(x).counts;
    return c[1] > c[0] ? Label::kPD : Label::kHealthy;
  }

  bool operator==(const DecisionTree&) const = default;
};

struct TreeSample {
  std::vector<const FeatureVector*> x;
  std::vector<Label> y;
};

namespace detail {

inline constexpr double kMinGain = 1e-12;

class TreeGrower {
 public:
  TreeGrower(const TreeSample& sample, std::size_t k, Rng& rng)
      : sample_(sample), k_(std::clamp<std::size_t>(k, 1, kFeatureCount)), rng_(rng) {}

  DecisionTree grow() {
    std::vector<std::size_t> idx(sample_.x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    build(idx);
    return std::move(tree_);
  }

 private:
  struct Candidate {
    double gain = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
  };

  ClassCountPair count(const std::vector<std::size_t>& idx) const {
    ClassCountPair c{};
    for (std::size_t i : idx) c[static_cast<int>(sample_.y[i])] += 1.0;
    return c;
  }

  std::size_t build(const std::vector<std::size_t>& idx) {
    const std::size_t me = tree_.nodes.size();
    tree_.nodes.emplace_back();
    const auto counts = count(idx);
    tree_.nodes[me].counts = counts;
    if (idx.size() < 2 || counts[0] == 0.0 || counts[1] == 0.0) return me;

    const auto best = best_split(idx, counts);
    if (best.gain <= kMinGain) return me;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      ((*sample_.x[i])[best.feature] < best.threshold ? left : right).push_back(i);
    }
    tree_.nodes[me].leaf = false;
    tree_.nodes[me].feature = best.feature;
    tree_.nodes[me].threshold = best.threshold;
    const std::size_t l = build(left);
    const std::size_t r = build(right);
    tree_.nodes[me].left = l;
    tree_.nodes[me].right = r;
    return me;
  }

  // Draws k features without replacement, then scans them in ascending index
  // so that ties resolve identically whatever order the draw produced.
  Candidate best_split(const std::vector<std::size_t>& idx, const ClassCountPair& parent) {
    std::array<std::size_t, kFeatureCount> features{};
    std::iota(features.begin(), features.end(), std::size_t{0});
    for (std::size_t i = 0; i < k_; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(kFeatureCount - i));
      std::swap(features[i], features[j]);
    }
    std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(k_));

    Candidate best;
    std::vector<std::pair<double, Label>> column(idx.size());
    for (std::size_t fi = 0; fi < k_; ++fi) {
      const std::size_t f = features[fi];
      for (std::size_t i = 0; i < idx.size(); ++i) {
        column[i] = {(*sample_.x[idx[i]])[f], sample_.y[idx[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      ClassCountPair left{};
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left[static_cast<int>(column[i].second)] += 1.0;
        const double lo = column[i].first;
        const double hi = column[i + 1].first;
        if (!(hi > lo)) continue;
        const ClassCountPair right{parent[0] - left[0], parent[1] - left[1]};
        const double gain = info_gain(parent, left, right);
        if (gain > best.gain) {
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold > lo)) threshold = hi;
          best = {gain, f, threshold};
        }
      }
    }
    return best;
  }

  const TreeSample& sample_;
  std::size_t k_;
  Rng& rng_;
  DecisionTree tree_;
};

}  // namespace detail

inline DecisionTree tree_grow(const TreeSample& sample, std::size_t k, Rng& rng) {
  if (sample.x.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot grow a tree on no data");
  return detail::TreeGrower(sample, k, rng).grow();
}

inline TreeSample full_sample(const Dataset& ds) {
  TreeSample s;
  for (const auto& r : ds) {
    s.x.push_back(&r.values);
    s.y.push_back(r.label);
  }
  return s;
}

inline std::size_t default_subset_size(std::size_t features = kFeatureCount) {
  return static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(features)) + 1.0));
}

struct ForestConfig {
  std::size_t trees = 100;
  std::size_t subset_size = default_subset_size();
  bool bootstrap = true;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::size_t subset_size = default_subset_size();
  std::uint64_t seed = 0;
};

// Tree t is grown from Rng(derive_seed(seed, t)): first the bootstrap draw,
// then the feature subsets during growth.
inline ForestModel forest_train(const Dataset& train, const ForestConfig& config,
                                std::uint64_t seed) {
  require_both_classes(train);
  if (config.trees == 0) throw Error(ErrorCode::kInvalidConfig, "forest needs at least one tree");
  if (config.subset_size < 1 || config.subset_size > kFeatureCount) {
    throw Error(ErrorCode::kInvalidConfig, "feature subset size must lie in [1, 13]");
  }
  ForestModel m;
  m.subset_size = config.subset_size;
  m.seed = seed;
  const auto full = full_sample(train);
  for (std::size_t t = 0; t < config.trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    if (config.bootstrap) {
      TreeSample boot;
      boot.x.reserve(full.x.size());
      boot.y.reserve(full.y.size());
      for (std::size_t i = 0; i < full.x.size(); ++i) {
        const auto j = static_cast<std::size_t>(rng.below(full.x.size()));
        boot.x.push_back(full.x[j]);
        boot.y.push_back(full.y[j]);
      }
      m.trees.push_back(tree_grow(boot, config.subset_size, rng));
    } else {
      m.trees.push_back(tree_grow(full, config.subset_size, rng));
    }
  }
  return m;
}

// Fraction of trees voting PD.
inline double forest_score(const ForestModel& m, std::span<const double> x) {
  std::size_t votes = 0;
  for (const auto& t : m.trees) votes += t.predict(x) == Label::kPD ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(m.trees.size());
}

inline double forest_score(const ForestModel& m, const SubjectRecord& r) {
  return forest_score(m, std::span<const double>(r.values));
}

inline Label forest_predict(const ForestModel& m, const SubjectRecord& r) {
  return forest_score(m, r) > 0.5 ? Label::kPD : Label::kHealthy;
}

inline nlohmann::json to_json(const DecisionTree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes) {
    if (n.leaf) {
      nodes.push_back({{"kind", "leaf"}, {"counts", n.counts}});
    } else {
      nodes.push_back({{"kind", "split"},
                       {"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"counts", n.counts}});
    }
  }
  return nodes;
}

inline nlohmann::json to_json(const ForestModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) trees.push_back(to_json(t));
  return {{"type", "forest"}, {"subset_size", m.subset_size}, {"seed", m.seed}, {"trees", trees}};
}

inline ForestModel forest_from_json(const nlohmann::json& j) {
  ForestModel m;
  m.subset_size = j.at("subset_size").get<std::size_t>();
  m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& jt : j.at("trees")) {
    DecisionTree t;
    for (const auto& jn : jt) {
      TreeNode n;
      n.leaf = jn.at("kind").get<std::string>() == "leaf";
      n.counts = jn.at("counts").get<ClassCountPair>();
      if (!n.leaf) {
        n.feature = jn.at("feature").get<std::size_t>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<std::size_t>();
        n.right = jn.at("right").get<std::size_t>();
      }
      t.nodes.push_back(n);
    }
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      const auto& n = t.nodes[i];
      if (!n.leaf && (n.left <= i || n.right <= i || n.left >= t.nodes.size() ||
                      n.right >= t.nodes.size() || n.feature >= kFeatureCount)) {
        throw Error(ErrorCode::kMalformedModel, "tree node links are not a valid preorder tree");
      }
    }
    if (t.nodes.empty()) throw Error(ErrorCode::kMalformedModel, "empty tree");
    m.trees.push_back(std::move(t));
  }
  if (m.trees.empty()) throw Error(ErrorCode::kMalformedModel, "forest has no trees");
  return m;
}

}  // namespace pdpredict
