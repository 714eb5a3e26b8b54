#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pdpredict/metrics.hpp"
#include "pdpredict/report.hpp"

namespace pdpredict {
namespace {

constexpr Label H = Label::kHealthy;
constexpr Label P = Label::kPD;

TEST(Confusion, CountsAndErrors) {
  const std::vector<Label> y = {P, P, H, H, P};
  const std::vector<Label> p = {P, H, H, P, P};
  const auto cm = confusion(y, p);
  EXPECT_EQ(cm.tp, 2u);
  EXPECT_EQ(cm.fn, 1u);
  EXPECT_EQ(cm.tn, 1u);
  EXPECT_EQ(cm.fp, 1u);
  EXPECT_THROW(confusion(y, std::vector<Label>{P}), Error);
  EXPECT_THROW(confusion(std::vector<Label>{}, std::vector<Label>{}), Error);
  EXPECT_THROW(summary_metrics(ConfusionMatrix{}), Error);
}

TEST(Summary, BalancedHalfCorrect) {
  const auto s = summary_metrics(ConfusionMatrix{1, 1, 1, 1});
  EXPECT_EQ(s.accuracy, 0.5);
  EXPECT_EQ(s.recall, 0.5);
  EXPECT_DOUBLE_EQ(s.precision, 0.5);
  EXPECT_DOUBLE_EQ(s.f_measure, 0.5);
}

TEST(Summary, NeverPredictedClassHasZeroPrecision) {
  // Everything predicted PD: tp=3, fp=1.
  const auto per = per_class_metrics(ConfusionMatrix{3, 1, 0, 0});
  EXPECT_EQ(per[0].precision, 0.0);
  EXPECT_EQ(per[0].f_measure, 0.0);
  EXPECT_DOUBLE_EQ(per[1].precision, 0.75);
  const auto s = summary_metrics(ConfusionMatrix{3, 1, 0, 0});
  EXPECT_DOUBLE_EQ(s.precision, 0.75 * 0.75);
}

TEST(Summary, WeightedRecallIsAccuracyProperty) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    ConfusionMatrix cm{rng.below(50), rng.below(50), rng.below(50), rng.below(50)};
    if (cm.total() == 0) continue;
    const auto s = summary_metrics(cm);
    EXPECT_EQ(s.recall, s.accuracy);
    // Direct definition agrees numerically.
    const auto per = per_class_metrics(cm);
    const double n = double(cm.total());
    const double direct = double(per[0].support) / n * per[0].recall +
                          double(per[1].support) / n * per[1].recall;
    EXPECT_NEAR(direct, s.accuracy, 1e-12);
    for (double v : {s.accuracy, s.precision, s.recall, s.f_measure}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Roc, HandExample) {
  const std::vector<Label> y = {P, H, P, H};
  const std::vector<double> s = {0.9, 0.8, 0.4, 0.2};
  const auto c = roc(y, s);
  EXPECT_EQ(c.auc, 0.75);
  ASSERT_EQ(c.points.size(), 5u);
  EXPECT_EQ(c.points.front().fpr, 0.0);
  EXPECT_EQ(c.points.front().tpr, 0.0);
  EXPECT_EQ(c.points.back().fpr, 1.0);
  EXPECT_EQ(c.points.back().tpr, 1.0);
}

TEST(Roc, AllTiedIsHalf) {
  const std::vector<Label> y = {P, H, P, H, H};
  const std::vector<double> s(5, 0.3);
  EXPECT_EQ(roc(y, s).auc, 0.5);
}

TEST(Roc, Errors) {
  const std::vector<Label> one = {P, P};
  const std::vector<double> s = {0.1, 0.2};
  try {
    roc(one, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClassLabels);
  }
  const std::vector<Label> y = {P, H};
  EXPECT_THROW(roc(y, std::vector<double>{0.1}), Error);
  EXPECT_THROW(roc(y, std::vector<double>{0.1, std::nan("")}), Error);
}

TEST(Roc, MatchesPairCountingWithTiesProperty) {
  Rng rng(8);
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 10 + rng.below(60);
    std::vector<Label> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.below(2) ? P : H;
      s[i] = static_cast<double>(rng.below(8)) / 8.0;
    }
    y[0] = P;
    y[1] = H;
    const auto curve = roc(y, s);
    EXPECT_NEAR(curve.auc, oracle::pair_counting_auc(y, s), 1e-12);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      EXPECT_GE(curve.points[i].fpr, curve.points[i - 1].fpr);
      EXPECT_GE(curve.points[i].tpr, curve.points[i - 1].tpr);
    }
  }
}

std::vector<EvaluationReport> sample_reports() {
  std::vector<EvaluationReport> out;
  const std::vector<Label> y = {P, H, P, H, P};
  const std::vector<double> s = {0.9, 0.2, 0.6, 0.7, 0.4};
  for (auto m : kAllModels)
    for (auto sp : {SplitKind::kTraining, SplitKind::kTesting}) out.push_back(evaluate(m, sp, y, s));
  return out;
}

TEST(Report, EvaluateThresholdsAtHalf) {
  const auto r = sample_reports()[0];
  EXPECT_EQ(r.cm.tp, 2u);
  EXPECT_EQ(r.cm.fn, 1u);
  EXPECT_EQ(r.cm.fp, 1u);
  EXPECT_EQ(r.cm.tn, 1u);
}

TEST(Report, CellsShapeAndCsvRoundTrip) {
  const auto reports = sample_reports();
  const auto cells = report_cells(reports);
  ASSERT_EQ(cells.size(), 5u * 4u * 2u);
  EXPECT_EQ(cells[0].measure, "Accuracy");
  EXPECT_EQ(cells.back().measure, "AUC");
  const auto csv = render_report_csv(reports);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "measure,model,split,value");
  const auto back = parse_report_csv(csv);
  ASSERT_EQ(back.size(), cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EXPECT_EQ(back[i].measure, cells[i].measure);
    EXPECT_EQ(back[i].value, cells[i].value);
  }
}

TEST(Report, TextContainsEveryMeasure) {
  const auto text = render_report_text(sample_reports());
  for (auto m : kMeasureNames) EXPECT_NE(text.find(m), std::string::npos);
  for (auto k : kAllModels) EXPECT_NE(text.find(model_display_name(k)), std::string::npos);
}

TEST(Report, RocArtifacts) {
  const std::vector<Label> y = {P, H, P, H};
  const std::vector<double> s = {0.9, 0.8, 0.4, 0.2};
  const auto c = roc(y, s);
  const auto csv = roc_to_csv(c);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "threshold,fpr,tpr");
  const auto svg = roc_to_svg(c, "Test");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_NE(svg.find("0.750"), std::string::npos);
}

TEST(Report, ModelIds) {
  for (auto k : kAllModels) EXPECT_EQ(parse_model_id(model_id(k)), k);
  EXPECT_FALSE(parse_model_id("svm").has_value());
}

}  // namespace
}  // namespace pdpredict
