#pragma once

// Synthetic baseline cohort. Each raw measurement is drawn independently from
// a class-conditional truncated normal; the CSF ratio columns are derived
// from the drawn CSF values. The shipped parameters are illustrative values
// chosen so the classes overlap realistically. They are not fitted to any
// real cohort.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/random.hpp"

namespace pdpredict {

inline constexpr std::string_view kGeneratorParamsVersion = "synthgen-defaults-v1";

struct FeatureParams {
  Feature feature = kUpsitTotal;
  double mean_healthy = 0.0;
  double sd_healthy = 1.0;
  double mean_pd = 0.0;
  double sd_pd = 1.0;
  double min = 0.0;
  double max = 1.0;
  bool integer = false;
  int decimals = 3;  // rounding applied to non-integer features

  bool operator==(const FeatureParams&) const = default;
};

// The ten directly measured features; the three ratios are derived.
inline constexpr std::array<Feature, 10> kRawFeatures = {
    kUpsitTotal, kRbdsqTotal,     kCsfAbeta42,      kCsfAlphaSyn,    kCsfPtau181,
    kCsfTtau,    kSbrCaudateLeft, kSbrCaudateRight, kSbrPutamenLeft, kSbrPutamenRight};

using GeneratorParams = std::array<FeatureParams, kRawFeatures.size()>;

inline GeneratorParams default_generator_params() {
  return {{
      {kUpsitTotal, 33.5, 4.0, 23.0, 6.5, 0, 40, true, 0},
      {kRbdsqTotal, 2.5, 2.2, 4.0, 2.6, 0, 12, true, 0},
      {kCsfAbeta42, 380.0, 95.0, 365.0, 95.0, 80, 1200, false, 1},
      {kCsfAlphaSyn, 1950.0, 750.0, 1800.0, 750.0, 200, 6500, false, 1},
      {kCsfPtau181, 17.0, 8.0, 15.5, 8.0, 2, 80, false, 1},
      {kCsfTtau, 48.0, 17.0, 44.5, 17.0, 8, 200, false, 1},
      {kSbrCaudateLeft, 2.95, 0.55, 2.40, 0.55, 0.2, 5.5, false, 3},
      {kSbrCaudateRight, 2.95, 0.55, 2.40, 0.55, 0.2, 5.5, false, 3},
      {kSbrPutamenLeft, 2.20, 0.45, 1.25, 0.50, 0.05, 4.5, false, 3},
      {kSbrPutamenRight, 2.20, 0.45, 1.25, 0.50, 0.05, 4.5, false, 3},
  }};
}

struct CohortSpec {
  std::size_t n_healthy = 184;
  std::size_t n_pd = 402;
  // Scales each feature's class gap (means and standard deviations) about
  // the midpoint of the two classes; 0 makes both classes identical.
  double separation = 1.0;
  std::uint64_t seed = 42;
  // Optional correlation between the left and right SBR of the same region.
  // Off by default.
  double sbr_pair_correlation = 0.0;
  GeneratorParams params = default_generator_params();
};

inline nlohmann::json generator_params_to_json(const GeneratorParams& params) {
  nlohmann::json features = nlohmann::json::object();
  for (const auto& p : params) {
    features[std::string(kFeatureNames[p.feature])] = {
        {"mean_healthy", p.mean_healthy}, {"sd_healthy", p.sd_healthy},
        {"mean_pd", p.mean_pd},           {"sd_pd", p.sd_pd},
        {"min", p.min},                   {"max", p.max},
        {"integer_flag", p.integer},      {"decimals", p.decimals}};
  }
  return {{"version", kGeneratorParamsVersion}, {"features", features}};
}

inline GeneratorParams generator_params_from_json(const nlohmann::json& j) {
  GeneratorParams params = default_generator_params();
  const auto& features = j.contains("features") ? j.at("features") : j;
  for (auto& p : params) {
    const std::string name(kFeatureNames[p.feature]);
    if (!features.contains(name)) continue;
    const auto& f = features.at(name);
    p.mean_healthy = f.value("mean_healthy", p.mean_healthy);
    p.sd_healthy = f.value("sd_healthy", p.sd_healthy);
    p.mean_pd = f.value("mean_pd", p.mean_pd);
    p.sd_pd = f.value("sd_pd", p.sd_pd);
    p.min = f.value("min", p.min);
    p.max = f.value("max", p.max);
    p.integer = f.value("integer_flag", p.integer);
    p.decimals = f.value("decimals", p.decimals);
    if (!(p.sd_healthy >= 0.0 && p.sd_pd >= 0.0 && p.min <= p.max)) {
      throw Error(ErrorCode::kInvalidConfig, "bad generator parameters for " + name);
    }
  }
  return params;
}

inline GeneratorParams load_generator_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  try {
    return generator_params_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + e.what());
  }
}

namespace detail {

inline double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

// Rejection sampling in [lo, hi]; after 100 rejections the last draw is
// clamped. `draw_z` supplies standard-normal variates.
template <typename DrawZ>
double truncated_normal(double mean, double sd, double lo, double hi, DrawZ&& draw_z) {
  double v = mean;
  for (int attempt = 0; attempt < 100; ++attempt) {
    v = mean + sd * draw_z();
    if (v >= lo && v <= hi) return v;
  }
  return std::clamp(v, lo, hi);
}

}  // namespace detail

inline Dataset generate(const CohortSpec& spec) {
  const std::size_t n = spec.n_healthy + spec.n_pd;
  if (n == 0) throw Error(ErrorCode::kEmptyCohort, "cohort must have at least one subject");
  if (!(spec.separation >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "separation must be >= 0");
  const double rho = spec.sbr_pair_correlation;
  if (!(rho > -1.0 && rho < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "sbr_pair_correlation must lie in (-1, 1)");
  }

  Rng rng(derive_seed(spec.seed, "generator"));
  std::vector<Label> labels(spec.n_healthy, Label::kHealthy);
  labels.insert(labels.end(), spec.n_pd, Label::kPD);
  rng.shuffle(std::span<Label>(labels));

  const std::size_t id_width = std::max<std::size_t>(4, std::to_string(n).size());
  std::vector<SubjectRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SubjectRecord r;
    const std::string number = std::to_string(i + 1);
    r.subject_id = "SYN" + std::string(id_width - number.size(), '0') + number;
    r.label = labels[i];
    const bool pd = r.label == Label::kPD;

    double left_z = 0.0;
    for (const auto& p : spec.params) {
      const double mid = 0.5 * (p.mean_healthy + p.mean_pd);
      const double mean = mid + spec.separation * ((pd ? p.mean_pd : p.mean_healthy) - mid);
      const double sd_mid = 0.5 * (p.sd_healthy + p.sd_pd);
      const double sd = std::max(0.0, sd_mid + spec.separation * ((pd ? p.sd_pd : p.sd_healthy) - sd_mid));
      const bool left = p.feature == kSbrCaudateLeft || p.feature == kSbrPutamenLeft;
      const bool right = p.feature == kSbrCaudateRight || p.feature == kSbrPutamenRight;
      double v;
      if (right && rho != 0.0) {
        const double lz = left_z;
        v = detail::truncated_normal(mean, sd, p.min, p.max, [&] {
          return rho * lz + std::sqrt(1.0 - rho * rho) * rng.normal();
        });
      } else {
        v = detail::truncated_normal(mean, sd, p.min, p.max, [&] {
          const double z = rng.normal();
          if (left) left_z = z;
          return z;
        });
      }
      v = p.integer ? std::round(v) : detail::round_to(v, p.decimals);
      r.values[p.feature] = std::clamp(v, p.min, p.max);
    }
    const auto ratios = compute_ratios(r[kCsfAbeta42], r[kCsfTtau], r[kCsfPtau181]);
    r[kRatioTtauAbeta] = ratios.ttau_abeta;
    r[kRatioPtauAbeta] = ratios.ptau_abeta;
    r[kRatioPtauTtau] = ratios.ptau_ttau;
    records.push_back(std::move(r));
  }
  return Dataset(std::move(records));
}

}  // namespace pdpredict
