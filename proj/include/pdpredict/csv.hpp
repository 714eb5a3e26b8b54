#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/format.hpp"

namespace pdpredict {

inline constexpr std::size_t kCsvColumnCount = kFeatureCount + 2;

inline const std::array<std::string, kCsvColumnCount>& csv_header() {
  static const std::array<std::string, kCsvColumnCount> header = [] {
    std::array<std::string, kCsvColumnCount> h;
    h[0] = "subject_id";
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      h[f + 1] = std::string(kFeatureNames[f]);
    }
    h[kCsvColumnCount - 1] = "label";
    return h;
  }();
  return header;
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

inline std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ParsedRow {
  SubjectRecord record;
  std::vector<Violation> violations;
};

// Header problems are reported in `header_violations`; rows are only parsed
// when the header is usable.
struct ParsedCsv {
  std::vector<Violation> header_violations;
  std::vector<ParsedRow> rows;
};

inline ParsedCsv parse_csv_text(std::string_view text) {
  ParsedCsv out;
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  const auto& expected = csv_header();
  if (lines.empty()) {
    out.header_violations.push_back(
        {ErrorCode::kMissingColumn, 0, expected[0], "file has no header row"});
    return out;
  }
  auto header = split_csv_line(lines.front());
  for (auto& h : header) h = std::string(trim(h));
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) {
    header[0].erase(0, 3);
  }
  for (const auto& name : expected) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      out.header_violations.push_back(
          {ErrorCode::kMissingColumn, 0, name, "column missing from header"});
    }
  }
  if (out.header_violations.empty() &&
      !std::equal(header.begin(), header.end(), expected.begin(), expected.end())) {
    out.header_violations.push_back(
        {ErrorCode::kHeaderMismatch, 0, "",
         "header columns are not in the required order"});
  }
  if (!out.header_violations.empty()) return out;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li;
    ParsedRow parsed;
    const auto cells = split_csv_line(lines[li]);
    if (cells.size() != kCsvColumnCount) {
      parsed.violations.push_back(
          {ErrorCode::kMissingColumn, row,
           cells.size() < kCsvColumnCount ? expected[cells.size()] : "",
           "expected " + std::to_string(kCsvColumnCount) + " cells, found " +
               std::to_string(cells.size())});
      out.rows.push_back(std::move(parsed));
      continue;
    }
    parsed.record.subject_id = cells[0];
    bool numeric_ok = true;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const auto v = parse_double(cells[f + 1]);
      if (!v || !std::isfinite(*v)) {
        parsed.violations.push_back({ErrorCode::kNonNumericCell, row,
                                     expected[f + 1],
                                     "not a decimal number: '" + cells[f + 1] + "'"});
        numeric_ok = false;
      } else {
        parsed.record.values[f] = *v;
      }
    }
    const auto label_text = trim(cells.back());
    if (label_text == "0") {
      parsed.record.label = Label::kHealthy;
    } else if (label_text == "1") {
      parsed.record.label = Label::kPD;
    } else if (parse_double(label_text)) {
      parsed.violations.push_back(
          {ErrorCode::kRangeViolation, row, "label", "label must be 0 or 1"});
    } else {
      parsed.violations.push_back({ErrorCode::kNonNumericCell, row, "label",
                                   "not a label: '" + cells.back() + "'"});
    }
    if (numeric_ok) {
      auto more = check_record(parsed.record, row);
      parsed.violations.insert(parsed.violations.end(), more.begin(), more.end());
    }
    out.rows.push_back(std::move(parsed));
  }
  return out;
}

[[noreturn]] inline void throw_violation(const Violation& v) {
  throw Error(v.code,
              (v.row ? "row " + std::to_string(v.row) + ", " : std::string()) +
                  (v.column.empty() ? std::string() : "column " + v.column + ": ") +
                  v.message,
              v.row ? std::optional<std::size_t>(v.row) : std::nullopt,
              v.column.empty() ? std::nullopt : std::optional<std::string>(v.column));
}

}  // namespace detail

struct IngestResult {
  Dataset dataset;
  std::size_t skipped_rows = 0;
};

inline IngestResult parse_csv(std::string_view text, bool strict) {
  auto parsed = detail::parse_csv_text(text);
  if (!parsed.header_violations.empty()) {
    detail::throw_violation(parsed.header_violations.front());
  }
  IngestResult result;
  std::vector<SubjectRecord> records;
  records.reserve(parsed.rows.size());
  for (auto& row : parsed.rows) {
    if (row.violations.empty()) {
      records.push_back(std::move(row.record));
    } else if (strict) {
      detail::throw_violation(row.violations.front());
    } else {
      ++result.skipped_rows;
    }
  }
  result.dataset = Dataset(std::move(records));
  return result;
}

inline IngestResult ingest_csv(const std::filesystem::path& path, bool strict) {
  return parse_csv(detail::read_file(path), strict);
}

// Every schema/invariant violation in the file, in row order.
inline std::vector<Violation> validate_csv(const std::filesystem::path& path) {
  auto parsed = detail::parse_csv_text(detail::read_file(path));
  std::vector<Violation> out = std::move(parsed.header_violations);
  for (auto& row : parsed.rows) {
    out.insert(out.end(), row.violations.begin(), row.violations.end());
  }
  return out;
}

// Measurement columns are written with 9 significant digits. Ratio columns
// use the shortest exact representation so that the 1e-9 ratio check still
// holds after a round trip.
inline std::string to_csv(const Dataset& ds) {
  std::string out;
  const auto& header = csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += i + 1 < header.size() ? ',' : '\n';
  }
  for (const auto& r : ds) {
    out += detail::quote_if_needed(r.subject_id);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      out += ',';
      const bool ratio = f == kRatioTtauAbeta || f == kRatioPtauAbeta ||
                         f == kRatioPtauTtau;
      out += ratio ? format_shortest(r.values[f]) : format_sig9(r.values[f]);
    }
    out += r.label == Label::kPD ? ",1\n" : ",0\n";
  }
  return out;
}

inline void export_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << to_csv(ds);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace pdpredict
