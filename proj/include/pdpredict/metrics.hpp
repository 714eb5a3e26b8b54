#pragma once

// Confusion matrix, support-weighted summary measures, ROC curve and AUC.
// PD is the positive class throughout.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"

namespace pdpredict {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(std::span<const Label> labels, std::span<const Label> predictions) {
  if (labels.size() != predictions.size()) {
    throw Error(ErrorCode::kLengthMismatch, "labels and predictions differ in length");
  }
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "no records to evaluate");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool actual = labels[i] == Label::kPD;
    const bool predicted = predictions[i] == Label::kPD;
    if (actual && predicted) ++cm.tp;
    else if (!actual && predicted) ++cm.fp;
    else if (!actual) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

struct SummaryMetrics {
  double accuracy = 0.0;
  double precision = 0.0;  // support-weighted over both classes
  double recall = 0.0;
  double f_measure = 0.0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::size_t support = 0;
};

// Per-class measures; the negative class is scored with the roles swapped.
// A never-predicted class gets precision 0, an absent class recall 0, and F
// is 0 whenever precision + recall is 0.
inline std::array<ClassMetrics, 2> per_class_metrics(const ConfusionMatrix& cm) {
  auto make = [](std::size_t hit, std::size_t false_alarm, std::size_t miss) {
    ClassMetrics m;
    m.support = hit + miss;
    m.precision = hit + false_alarm ? static_cast<double>(hit) / static_cast<double>(hit + false_alarm) : 0.0;
    m.recall = m.support ? static_cast<double>(hit) / static_cast<double>(m.support) : 0.0;
    m.f_measure = m.precision + m.recall > 0.0
                      ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                      : 0.0;
    return m;
  };
  return {make(cm.tn, cm.fn, cm.fp), make(cm.tp, cm.fp, cm.fn)};
}

inline SummaryMetrics summary_metrics(const ConfusionMatrix& cm) {
  const std::size_t n = cm.total();
  if (n == 0) throw Error(ErrorCode::kEmptyMatrix, "confusion matrix is empty");
  const double total = static_cast<double>(n);
  const auto per = per_class_metrics(cm);
  SummaryMetrics s;
  s.accuracy = static_cast<double>(cm.tp + cm.tn) / total;
  for (const auto& c : per) {
    const double share = static_cast<double>(c.support) / total;
    s.precision += share * c.precision;
    s.f_measure += share * c.f_measure;
  }
  // Support-weighted recall: sum_c (n_c / N) * (hit_c / n_c) = sum_c hit_c / N,
  // which is accuracy. Computed in the cancelled form so the identity is exact.
  s.recall = static_cast<double>(cm.tp + cm.tn) / total;
  return s;
}

struct RocPoint {
  double threshold = 0.0;  // records with score >= threshold are called PD
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Sweeps the distinct scores in descending order. Tied scores enter as one
// block, giving a diagonal segment. AUC is the trapezoid sum, accumulated in
// integer counts and divided once at the end.
inline RocCurve roc(std::span<const Label> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    throw Error(ErrorCode::kLengthMismatch, "labels and scores differ in length");
  }
  std::size_t pos = 0;
  for (Label l : labels) pos += l == Label::kPD ? 1 : 0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::kSingleClassLabels, "ROC needs both classes present");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(ErrorCode::kNonFiniteFeature, "score is not finite");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  double twice_area = 0.0;  // in units of one (pos, neg) pair
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    const std::size_t tp_before = tp, fp_before = fp;
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      (labels[order[i]] == Label::kPD ? tp : fp) += 1;
    }
    twice_area += static_cast<double>(fp - fp_before) * static_cast<double>(tp + tp_before);
    curve.points.push_back({s, static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos)});
  }
  curve.points.back().fpr = 1.0;
  curve.points.back().tpr = 1.0;
  curve.auc = twice_area / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return curve;
}

}  // namespace pdpredict
