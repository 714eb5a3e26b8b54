#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdpredict/error.hpp"

namespace pdpredict {

enum class Label : int { kHealthy = 0, kPD = 1 };

inline constexpr std::size_t kFeatureCount = 13;

// Column order of the external CSV format, minus subject_id and label. This
// order is also the node order used by the Bayes net structure search.
enum Feature : std::size_t {
  kUpsitTotal = 0,
  kRbdsqTotal,
  kCsfAbeta42,
  kCsfAlphaSyn,
  kCsfPtau181,
  kCsfTtau,
  kRatioTtauAbeta,
  kRatioPtauAbeta,
  kRatioPtauTtau,
  kSbrCaudateLeft,
  kSbrCaudateRight,
  kSbrPutamenLeft,
  kSbrPutamenRight,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "upsit_total",      "rbdsq_total",       "csf_abeta42",
    "csf_alpha_syn",    "csf_ptau181",       "csf_ttau",
    "ratio_ttau_abeta", "ratio_ptau_abeta",  "ratio_ptau_ttau",
    "sbr_caudate_left", "sbr_caudate_right", "sbr_putamen_left",
    "sbr_putamen_right"};

inline constexpr int kUpsitMax = 40;
inline constexpr int kRbdsqMax = 12;
inline constexpr double kRatioRelativeTolerance = 1e-9;

using FeatureVector = std::array<double, kFeatureCount>;

struct SubjectRecord {
  std::string subject_id;
  FeatureVector values{};
  Label label = Label::kHealthy;

  double operator[](Feature f) const { return values[f]; }
  double& operator[](Feature f) { return values[f]; }

  bool operator==(const SubjectRecord&) const = default;
};

struct CsfRatios {
  double ttau_abeta;
  double ptau_abeta;
  double ptau_ttau;
};

inline CsfRatios compute_ratios(double abeta42, double ttau, double ptau181) {
  if (abeta42 == 0.0 || ttau == 0.0) {
    throw Error(ErrorCode::kDivisionByZeroDenominator,
                abeta42 == 0.0 ? "csf_abeta42 is zero" : "csf_ttau is zero");
  }
  return {ttau / abeta42, ptau181 / abeta42, ptau181 / ttau};
}

inline bool ratio_matches(double stored, double recomputed) {
  const double scale = std::max(std::abs(stored), std::abs(recomputed));
  return std::abs(stored - recomputed) <= kRatioRelativeTolerance * scale;
}

struct Violation {
  ErrorCode code;
  std::size_t row;  // 1-based data row; 0 for header problems
  std::string column;
  std::string message;
};

// Checks every raw-record invariant. Returns an empty list for a clean
// record. `row` is only used to tag the violations.
inline std::vector<Violation> check_record(const SubjectRecord& r,
                                           std::size_t row = 0) {
  std::vector<Violation> out;
  auto add = [&](ErrorCode code, Feature f, std::string msg) {
    out.push_back({code, row, std::string(kFeatureNames[f]), std::move(msg)});
  };
  auto is_integer = [](double v) { return std::floor(v) == v; };

  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (!std::isfinite(r.values[f])) {
      add(ErrorCode::kNonNumericCell, static_cast<Feature>(f), "not finite");
    }
  }
  if (!out.empty()) return out;

  const double upsit = r[kUpsitTotal];
  if (!is_integer(upsit) || upsit < 0 || upsit > kUpsitMax) {
    add(ErrorCode::kRangeViolation, kUpsitTotal, "expected integer in [0, 40]");
  }
  const double rbdsq = r[kRbdsqTotal];
  if (!is_integer(rbdsq) || rbdsq < 0 || rbdsq > kRbdsqMax) {
    add(ErrorCode::kRangeViolation, kRbdsqTotal, "expected integer in [0, 12]");
  }
  for (Feature f : {kCsfAbeta42, kCsfAlphaSyn, kCsfPtau181, kCsfTtau}) {
    if (!(r[f] > 0.0)) add(ErrorCode::kRangeViolation, f, "must be > 0");
  }
  for (Feature f : {kRatioTtauAbeta, kRatioPtauAbeta, kRatioPtauTtau,
                    kSbrCaudateLeft, kSbrCaudateRight, kSbrPutamenLeft,
                    kSbrPutamenRight}) {
    if (r[f] < 0.0) add(ErrorCode::kRangeViolation, f, "must be >= 0");
  }
  if (r[kCsfAbeta42] > 0.0 && r[kCsfTtau] > 0.0) {
    const auto ratios =
        compute_ratios(r[kCsfAbeta42], r[kCsfTtau], r[kCsfPtau181]);
    const std::pair<Feature, double> expected[] = {
        {kRatioTtauAbeta, ratios.ttau_abeta},
        {kRatioPtauAbeta, ratios.ptau_abeta},
        {kRatioPtauTtau, ratios.ptau_ttau}};
    for (const auto& [f, value] : expected) {
      if (!ratio_matches(r[f], value)) {
        add(ErrorCode::kRatioMismatch, f,
            "stored ratio disagrees with recomputation from CSF columns");
      }
    }
  }
  return out;
}

struct MinMax {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const MinMax&) const = default;
};

// Per-feature normalization statistics, indexed by schema position.
using NormalizationStats = std::vector<MinMax>;

// Ordered, immutable collection of subject records with a fixed schema.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<SubjectRecord> records,
                   std::optional<NormalizationStats> normalization = std::nullopt)
      : records_(std::move(records)), normalization_(std::move(normalization)) {}

  static constexpr const auto& schema() { return kFeatureNames; }

  const std::vector<SubjectRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const SubjectRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  const std::optional<NormalizationStats>& normalization() const {
    return normalization_;
  }
  bool is_normalized() const { return normalization_.has_value(); }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.label);
    return out;
  }

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<SubjectRecord> records_;
  std::optional<NormalizationStats> normalization_;
};

struct ClassCounts {
  std::size_t healthy = 0;
  std::size_t pd = 0;

  std::size_t total() const { return healthy + pd; }
  ClassCounts operator+(const ClassCounts& o) const {
    return {healthy + o.healthy, pd + o.pd};
  }
  bool operator==(const ClassCounts&) const = default;
};

inline ClassCounts class_counts(const Dataset& ds) {
  ClassCounts c;
  for (const auto& r : ds) {
    (r.label == Label::kPD ? c.pd : c.healthy) += 1;
  }
  return c;
}

inline Dataset concatenate(const Dataset& a, const Dataset& b) {
  std::vector<SubjectRecord> all(a.records());
  all.insert(all.end(), b.begin(), b.end());
  return Dataset(std::move(all));
}

inline void require_both_classes(const Dataset& ds) {
  const auto c = class_counts(ds);
  if (c.healthy == 0 || c.pd == 0) {
    throw Error(ErrorCode::kSingleClassTraining,
                "training data must contain both Healthy and PD records");
  }
}

}  // namespace pdpredict
