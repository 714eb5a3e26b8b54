#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdpredict/csv.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/format.hpp"
#include "pdpredict/metrics.hpp"

namespace pdpredict {

enum class ModelKind { kMlp, kBayesNet, kForest, kBoostLr };

inline constexpr std::array<ModelKind, 4> kAllModels = {ModelKind::kMlp, ModelKind::kBayesNet,
                                                        ModelKind::kForest, ModelKind::kBoostLr};

inline std::string_view model_id(ModelKind k) {
  switch (k) {
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kBayesNet: return "bayesnet";
    case ModelKind::kForest: return "forest";
    case ModelKind::kBoostLr: return "boostlr";
  }
  return "";
}

inline std::string_view model_display_name(ModelKind k) {
  switch (k) {
    case ModelKind::kMlp: return "Multilayer Perceptron";
    case ModelKind::kBayesNet: return "BayesNet";
    case ModelKind::kForest: return "Random Forest";
    case ModelKind::kBoostLr: return "Boosted Logistic Regression";
  }
  return "";
}

inline std::optional<ModelKind> parse_model_id(std::string_view id) {
  for (ModelKind k : kAllModels) {
    if (model_id(k) == id) return k;
  }
  return std::nullopt;
}

enum class SplitKind { kTraining, kTesting };

inline std::string_view split_name(SplitKind s) {
  return s == SplitKind::kTraining ? "Training" : "Testing";
}

struct EvaluationReport {
  ModelKind model = ModelKind::kMlp;
  SplitKind split = SplitKind::kTesting;
  ConfusionMatrix cm;
  SummaryMetrics metrics;
  RocCurve roc;
};

inline EvaluationReport evaluate(ModelKind model, SplitKind split, std::span<const Label> labels,
                                 std::span<const double> scores) {
  std::vector<Label> predicted;
  predicted.reserve(scores.size());
  // Scores are PD probabilities or vote fractions; 0.5 exactly is Healthy.
  for (double s : scores) predicted.push_back(s > 0.5 ? Label::kPD : Label::kHealthy);
  EvaluationReport r;
  r.model = model;
  r.split = split;
  r.cm = confusion(labels, predicted);
  r.metrics = summary_metrics(r.cm);
  r.roc = roc(labels, scores);
  return r;
}

inline constexpr std::array<std::string_view, 5> kMeasureNames = {"Accuracy", "Recall", "Precision",
                                                                  "F-Measure", "AUC"};

inline double measure_value(const EvaluationReport& r, std::size_t measure) {
  switch (measure) {
    case 0: return r.metrics.accuracy;
    case 1: return r.metrics.recall;
    case 2: return r.metrics.precision;
    case 3: return r.metrics.f_measure;
    default: return r.roc.auc;
  }
}

struct ReportCell {
  std::string measure;
  std::string model;
  std::string split;
  double value = 0.0;
  bool operator==(const ReportCell&) const = default;
};

// Measure-major grid: for each measure, models in fixed order (MLP, BayesNet,
// Random Forest, Boosted LR), Training then Testing. Reports absent from the
// input are skipped.
inline std::vector<ReportCell> report_cells(const std::vector<EvaluationReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyInput, "no evaluation reports");
  std::vector<ReportCell> cells;
  for (std::size_t m = 0; m < kMeasureNames.size(); ++m) {
    for (ModelKind kind : kAllModels) {
      for (SplitKind split : {SplitKind::kTraining, SplitKind::kTesting}) {
        for (const auto& r : reports) {
          if (r.model == kind && r.split == split) {
            cells.push_back({std::string(kMeasureNames[m]), std::string(model_id(kind)),
                             std::string(split_name(split)), measure_value(r, m)});
          }
        }
      }
    }
  }
  return cells;
}

inline std::string render_report_csv(const std::vector<EvaluationReport>& reports) {
  std::string out = "measure,model,split,value\n";
  for (const auto& c : report_cells(reports)) {
    out += c.measure + ',' + c.model + ',' + c.split + ',' + format_shortest(c.value) + '\n';
  }
  return out;
}

inline std::vector<ReportCell> parse_report_csv(std::string_view text) {
  std::vector<ReportCell> cells;
  bool header = true;
  std::size_t row = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.empty()) continue;
    if (header) {
      if (line != "measure,model,split,value") {
        throw Error(ErrorCode::kHeaderMismatch, "not a report.csv header");
      }
      header = false;
      continue;
    }
    ++row;
    const auto parts = detail::split_csv_line(line);
    const auto v = parts.size() == 4 ? parse_double(parts[3]) : std::nullopt;
    if (!v) throw Error(ErrorCode::kNonNumericCell, "malformed report row", row, "value");
    cells.push_back({parts[0], parts[1], parts[2], *v});
  }
  return cells;
}

// Aligned text in the layout of a measures x (model, split) table: accuracy
// as a percentage, the other measures as fractions.
inline std::string render_report_text(const std::vector<ReportCell>& cells) {
  std::vector<std::pair<std::string, std::string>> columns;  // (model, split)
  for (const auto& c : cells) {
    const std::pair<std::string, std::string> key{c.model, c.split};
    if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
  }
  auto lookup = [&](std::string_view measure, const std::pair<std::string, std::string>& col)
      -> std::optional<double> {
    for (const auto& c : cells) {
      if (c.measure == measure && c.model == col.first && c.split == col.second) return c.value;
    }
    return std::nullopt;
  };
  auto display = [](const std::string& id) {
    const auto kind = parse_model_id(id);
    return kind ? std::string(model_display_name(*kind)) : id;
  };

  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Performance Measures"});
  grid.push_back({""});
  for (const auto& col : columns) {
    grid[0].push_back(display(col.first));
    grid[1].push_back(col.second);
  }
  for (std::string_view measure : kMeasureNames) {
    std::vector<std::string> line{measure == "Accuracy" ? "Accuracy(%)" : std::string(measure)};
    for (const auto& col : columns) {
      const auto v = lookup(measure, col);
      char buf[32] = "-";
      if (v) std::snprintf(buf, sizeof buf, measure == "Accuracy" ? "%.4f" : "%.3f",
                           measure == "Accuracy" ? *v * 100.0 : *v);
      line.push_back(buf);
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(grid[0].size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (const auto& line : grid) {
    std::string text_line;
    for (std::size_t i = 0; i < line.size(); ++i) {
      std::string cell = line[i];
      cell.resize(width[i], ' ');
      text_line += (i ? "  " : "") + cell;
    }
    while (!text_line.empty() && text_line.back() == ' ') text_line.pop_back();
    out += text_line + '\n';
  }
  return out;
}

inline std::string render_report_text(const std::vector<EvaluationReport>& reports) {
  return render_report_text(report_cells(reports));
}

inline std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : curve.points) {
    out += format_shortest(p.threshold) + ',' + format_shortest(p.fpr) + ',' +
           format_shortest(p.tpr) + '\n';
  }
  return out;
}

// 600x600 viewBox; the unit square is drawn inside a 60 px margin.
inline std::string roc_to_svg(const RocCurve& curve, std::string_view title) {
  constexpr double kSize = 600.0, kMargin = 60.0, kPlot = kSize - 2 * kMargin;
  auto px = [&](double fpr) { return kMargin + fpr * kPlot; };
  auto py = [&](double tpr) { return kSize - kMargin - tpr * kPlot; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 600 600\" width=\"600\" "
      "height=\"600\">\n"
      "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(kPlot) +
         "\" height=\"" + num(kPlot) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    svg += "<text x=\"" + num(px(t)) + "\" y=\"" + num(kSize - kMargin + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + num(t).substr(0, 3) + "</text>\n";
    svg += "<text x=\"" + num(kMargin - 8) + "\" y=\"" + num(py(t) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + num(t).substr(0, 3) + "</text>\n";
  }
  svg += "<line x1=\"" + num(px(0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" + num(px(1)) +
         "\" y2=\"" + num(py(1)) + "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
  svg += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    svg += (i ? " " : "") + num(px(curve.points[i].fpr)) + "," + num(py(curve.points[i].tpr));
  }
  svg += "\"/>\n";
  std::string escaped;
  for (char c : title) {
    if (c == '<') escaped += "&lt;";
    else if (c == '>') escaped += "&gt;";
    else if (c == '&') escaped += "&amp;";
    else escaped += c;
  }
  char auc[32];
  std::snprintf(auc, sizeof auc, "%.4f", curve.auc);
  svg += "<text x=\"300\" y=\"35\" font-size=\"16\" text-anchor=\"middle\">" + escaped +
         " (AUC = " + auc + ")</text>\n";
  svg += "<text x=\"300\" y=\"590\" font-size=\"13\" text-anchor=\"middle\">False Positive "
         "Rate</text>\n";
  svg += "<text x=\"18\" y=\"300\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 300)\">True Positive Rate</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace pdpredict
