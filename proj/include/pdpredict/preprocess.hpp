#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/random.hpp"

namespace pdpredict {

// ---------------------------------------------------------------------------
// Min-max normalization

inline NormalizationStats fit_normalization(const Dataset& ds) {
  if (ds.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot normalize an empty dataset");
  NormalizationStats stats(kFeatureCount);
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    stats[f] = {ds[0].values[f], ds[0].values[f]};
  }
  for (const auto& r : ds) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      stats[f].min = std::min(stats[f].min, r.values[f]);
      stats[f].max = std::max(stats[f].max, r.values[f]);
    }
  }
  return stats;
}

// Constant columns (max == min) map to 0.
inline double normalize_value(double v, const MinMax& mm) {
  const double range = mm.max - mm.min;
  if (!(range > 0.0)) return 0.0;
  return std::clamp((v - mm.min) / range, 0.0, 1.0);
}

inline Dataset normalize_apply(const Dataset& ds, const NormalizationStats& stats) {
  if (stats.size() != kFeatureCount) {
    throw Error(ErrorCode::kMissingFeatureStats,
                "normalization stats cover " + std::to_string(stats.size()) +
                    " of " + std::to_string(kFeatureCount) + " features");
  }
  std::vector<SubjectRecord> out(ds.records());
  for (auto& r : out) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      r.values[f] = normalize_value(r.values[f], stats[f]);
    }
  }
  return Dataset(std::move(out), stats);
}

inline std::pair<Dataset, NormalizationStats> normalize_fit_transform(const Dataset& ds) {
  auto stats = fit_normalization(ds);
  return {normalize_apply(ds, stats), stats};
}

// ---------------------------------------------------------------------------
// Stratified split

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

struct Split {
  Dataset train;
  Dataset test;
};

// Per-class train counts. The total is round-half-up(f * N); each class gets
// floor(f * n_c) and the leftover records go to the classes with the largest
// fractional parts, lower class index first on ties. Every class count is
// therefore within one record of f * n_c.
inline std::array<std::size_t, 2> stratified_train_counts(
    std::array<std::size_t, 2> class_sizes, double train_fraction) {
  constexpr double kEps = 1e-9;
  const double total_exact =
      train_fraction * static_cast<double>(class_sizes[0] + class_sizes[1]);
  const auto total = static_cast<std::size_t>(std::floor(total_exact + 0.5 + kEps));
  std::array<std::size_t, 2> counts{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const double exact = train_fraction * static_cast<double>(class_sizes[c]);
    counts[c] = std::min(class_sizes[c],
                         static_cast<std::size_t>(std::floor(exact + kEps)));
    remainder[c] = exact - static_cast<double>(counts[c]);
    assigned += counts[c];
  }
  while (assigned < total) {
    std::size_t best = 2;
    for (std::size_t c = 0; c < 2; ++c) {
      if (counts[c] >= class_sizes[c]) continue;
      if (best == 2 || remainder[c] > remainder[best] + kEps) best = c;
    }
    if (best == 2) break;
    ++counts[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return counts;
}

// Each class is shuffled with its own stream derived from the seed; the first
// `count` shuffled records go to train. Both outputs keep the original record
// order.
inline Split stratified_split(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "train_fraction must lie in (0, 1)");
  }
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    members[static_cast<int>(ds[i].label)].push_back(i);
  }
  for (std::size_t c = 0; c < 2; ++c) {
    if (members[c].size() < 2) {
      throw Error(ErrorCode::kClassTooSmall,
                  std::string(c == 0 ? "Healthy" : "PD") + " class has " +
                      std::to_string(members[c].size()) + " records; need at least 2");
    }
  }
  const auto counts = stratified_train_counts(
      {members[0].size(), members[1].size()}, spec.train_fraction);

  std::vector<char> in_train(ds.size(), 0);
  for (std::size_t c = 0; c < 2; ++c) {
    Rng rng(derive_seed(spec.seed, c == 0 ? "split/healthy" : "split/pd"));
    rng.shuffle(std::span<std::size_t>(members[c]));
    for (std::size_t k = 0; k < counts[c]; ++k) in_train[members[c][k]] = 1;
  }
  std::vector<SubjectRecord> train, test;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (in_train[i] ? train : test).push_back(ds[i]);
  }
  return {Dataset(std::move(train), ds.normalization()),
          Dataset(std::move(test), ds.normalization())};
}

// ---------------------------------------------------------------------------
// Unsupervised discretization

enum class BinStrategy { kEqualFrequency, kEqualWidth };

// Per-feature strictly increasing cut points. A value v falls in bin
// #{cuts <= v}, so values beyond the training range clamp to the end bins.
struct DiscretizationMap {
  std::vector<std::vector<double>> cuts;

  std::size_t bins(std::size_t feature) const { return cuts[feature].size() + 1; }

  std::size_t bin(std::size_t feature, double value) const {
    const auto& c = cuts[feature];
    return static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), value) - c.begin());
  }

  bool operator==(const DiscretizationMap&) const = default;
};

inline std::vector<double> equal_frequency_cuts(std::vector<double> column,
                                                std::size_t bins) {
  std::sort(column.begin(), column.end());
  const std::size_t n = column.size();
  std::vector<double> cuts;
  if (n < 2) return cuts;
  for (std::size_t q = 1; q < bins; ++q) {
    const std::size_t pos = std::clamp<std::size_t>((q * n) / bins, 1, n - 1);
    // Never split a run of equal values: cut above the value at the
    // quantile position, halfway to the next distinct value.
    const double below = column[pos - 1];
    const auto next = std::upper_bound(column.begin(), column.end(), below);
    if (next == column.end()) continue;
    const double cut = below + (*next - below) / 2.0;
    if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
  }
  return cuts;
}

inline std::vector<double> equal_width_cuts(const std::vector<double>& column,
                                            std::size_t bins) {
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  std::vector<double> cuts;
  if (!(*hi > *lo)) return cuts;
  const double width = (*hi - *lo) / static_cast<double>(bins);
  for (std::size_t i = 1; i < bins; ++i) {
    const double cut = *lo + width * static_cast<double>(i);
    if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
  }
  return cuts;
}

inline DiscretizationMap discretize_fit(const Dataset& ds, std::size_t bins = 10,
                                        BinStrategy strategy = BinStrategy::kEqualFrequency) {
  if (ds.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot discretize an empty dataset");
  if (bins < 2) throw Error(ErrorCode::kBinsTooFew, "need at least 2 bins");
  DiscretizationMap map;
  map.cuts.resize(kFeatureCount);
  std::vector<double> column(ds.size());
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    for (std::size_t i = 0; i < ds.size(); ++i) column[i] = ds[i].values[f];
    map.cuts[f] = strategy == BinStrategy::kEqualFrequency
                      ? equal_frequency_cuts(column, bins)
                      : equal_width_cuts(column, bins);
  }
  return map;
}

// ---------------------------------------------------------------------------
// JSON sidecar: feature name -> parameters

inline nlohmann::json preprocess_to_json(const NormalizationStats& stats,
                                         const DiscretizationMap* map = nullptr) {
  nlohmann::json j;
  j["normalization"] = nlohmann::json::object();
  for (std::size_t f = 0; f < stats.size() && f < kFeatureCount; ++f) {
    j["normalization"][std::string(kFeatureNames[f])] = {{"min", stats[f].min},
                                                         {"max", stats[f].max}};
  }
  if (map != nullptr) {
    j["discretization"] = nlohmann::json::object();
    for (std::size_t f = 0; f < map->cuts.size(); ++f) {
      j["discretization"][std::string(kFeatureNames[f])] = map->cuts[f];
    }
  }
  return j;
}

inline NormalizationStats normalization_from_json(const nlohmann::json& j) {
  const auto it = j.find("normalization");
  if (it == j.end() || !it->is_object()) {
    throw Error(ErrorCode::kMissingFeatureStats, "no normalization block");
  }
  NormalizationStats stats(kFeatureCount);
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const std::string name(kFeatureNames[f]);
    if (!it->contains(name)) {
      throw Error(ErrorCode::kMissingFeatureStats, "no normalization stats for " + name);
    }
    stats[f] = {(*it)[name].at("min").get<double>(), (*it)[name].at("max").get<double>()};
  }
  return stats;
}

inline DiscretizationMap discretization_from_json(const nlohmann::json& j) {
  DiscretizationMap map;
  map.cuts.resize(kFeatureCount);
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const std::string name(kFeatureNames[f]);
    if (!j.contains(name)) {
      throw Error(ErrorCode::kMissingFeatureStats, "no cut points for " + name);
    }
    map.cuts[f] = j[name].get<std::vector<double>>();
    if (!std::is_sorted(map.cuts[f].begin(), map.cuts[f].end()) ||
        std::adjacent_find(map.cuts[f].begin(), map.cuts[f].end()) != map.cuts[f].end()) {
      throw Error(ErrorCode::kMalformedModel, "cut points for " + name + " not strictly increasing");
    }
  }
  return map;
}

}  // namespace pdpredict
