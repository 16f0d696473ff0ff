// Copyright 2026 The concatmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Markdown/CSV tables and SVG charts for evaluation results. All output is
// a pure function of the input: no timestamps, no locale, no external
// resources. Displayed scores use one decimal, rounded half to even.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "concatmt/bleu.hpp"
#include "concatmt/error.hpp"
#include "concatmt/judgments.hpp"
#include "concatmt/kv.hpp"
#include "concatmt/text.hpp"

namespace concatmt {

/// A rendered table cell: display text plus emphasis.
struct Cell {
  std::string text;
  bool bold = false;
};

struct Table {
  std::vector<std::string> header;
  /// Display rows; Markdown right-aligns every column but the first.
  std::vector<std::vector<Cell>> rows;
  /// Full-precision twin of `rows` for CSV output; same shape.
  std::vector<std::vector<std::string>> csv_rows;

  std::string to_markdown() const {
    std::string out = "|";
    for (const auto& h : header) out += " " + h + " |";
    out += "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? " --- |" : " ---: |";
    out += "\n";
    for (const auto& row : rows) {
      out += "|";
      for (const auto& c : row) out += " " + (c.bold ? "**" + c.text + "**" : c.text) + " |";
      out += "\n";
    }
    return out;
  }

  std::string to_csv() const {
    auto field = [](const std::string& s) {
      if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) {
        if (c == '"') q += '"';
        q += c;
      }
      return q + "\"";
    };
    auto line = [&](const std::vector<std::string>& cells) {
      std::string l;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) l += ',';
        l += field(cells[i]);
      }
      return l + "\r\n";
    };
    std::string out = line(header);
    for (const auto& r : csv_rows) out += line(r);
    return out;
  }
};

namespace detail {

inline constexpr std::string_view kAbsent = "-";

/// Marks the maximal cells of `column` (by displayed value, ties included).
inline void bold_maxima(std::vector<std::vector<Cell>>& rows, std::size_t first_row,
                        std::size_t column) {
  std::optional<double> best;
  for (std::size_t r = first_row; r < rows.size(); ++r) {
    const auto& t = rows[r][column].text;
    if (t == kAbsent) continue;
    const double v = text::parse_number<double>(t, "cell");
    if (!best || v > *best) best = v;
  }
  if (!best) return;
  for (std::size_t r = first_row; r < rows.size(); ++r) {
    auto& c = rows[r][column];
    if (c.text != kAbsent && text::parse_number<double>(c.text, "cell") == *best) c.bold = true;
  }
}

}  // namespace detail

struct NamedReport {
  std::string name;
  BleuReport report;
};

/// Systems as rows, "all" then each bucket as columns, preceded by a
/// sentence-count row. The best displayed score of every column is bold.
inline Table render_bucket_table(std::span<const NamedReport> reports) {
  if (reports.empty()) throw InputError("no reports to tabulate");
  const BleuReport& first = reports.front().report;
  for (const auto& nr : reports) {
    if (nr.report.labels() != first.labels()) {
      throw InputError("report '" + nr.name + "' uses different length buckets");
    }
  }
  Table t;
  t.header.push_back("length");
  t.header.push_back("all");
  for (const auto& b : first.per_bucket) t.header.push_back(b.label);

  std::vector<Cell> counts{{"sentences"}, {std::to_string(first.count)}};
  std::vector<std::string> csv_counts{"sentences", std::to_string(first.count)};
  for (const auto& b : first.per_bucket) {
    counts.push_back({std::to_string(b.count)});
    csv_counts.push_back(std::to_string(b.count));
  }
  t.rows.push_back(std::move(counts));
  t.csv_rows.push_back(std::move(csv_counts));

  for (const auto& nr : reports) {
    std::vector<Cell> row{{nr.name}, {text::format_rounded(nr.report.overall)}};
    std::vector<std::string> csv{nr.name, text::format_full(nr.report.overall)};
    for (const auto& b : nr.report.per_bucket) {
      row.push_back({b.score ? text::format_rounded(*b.score) : std::string(detail::kAbsent)});
      csv.push_back(b.score ? text::format_full(*b.score) : std::string());
    }
    t.rows.push_back(std::move(row));
    t.csv_rows.push_back(std::move(csv));
  }
  for (std::size_t c = 1; c < t.header.size(); ++c) detail::bold_maxima(t.rows, 1, c);
  return t;
}

inline Table render_bucket_table(const std::vector<NamedReport>& reports) {
  return render_bucket_table(std::span<const NamedReport>(reports));
}

/// Rows per bucket plus "overall"; win/tie/lose per dimension. Within each
/// row and dimension the larger of win and lose is bold (both when equal).
inline Table render_judgment_table(const JudgmentTally& tally) {
  Table t;
  t.header = {"length", "adequacy win", "adequacy tie", "adequacy lose",
              "fluency win", "fluency tie", "fluency lose"};
  auto add_row = [&t](const std::string& label, const std::array<VerdictCounts, 2>& dims) {
    std::vector<Cell> row{{label}};
    std::vector<std::string> csv{label};
    for (const auto& vc : dims) {
      const bool win_bold = vc.win() >= vc.lose() && vc.total() > 0;
      const bool lose_bold = vc.lose() >= vc.win() && vc.total() > 0;
      row.push_back({std::to_string(vc.win()), win_bold});
      row.push_back({std::to_string(vc.tie()), false});
      row.push_back({std::to_string(vc.lose()), lose_bold});
      for (auto n : vc.counts) csv.push_back(std::to_string(n));
    }
    t.rows.push_back(std::move(row));
    t.csv_rows.push_back(std::move(csv));
  };
  for (std::size_t b = 0; b < tally.labels.size(); ++b) add_row(tally.labels[b], tally.per_bucket[b]);
  add_row("overall", tally.overall);
  return t;
}

struct DiffSeries {
  std::string name;
  BucketDiff diff;
};

namespace detail {

inline void require_consistent(std::span<const DiffSeries> series) {
  if (series.empty()) throw InputError("no diff series");
  for (const auto& s : series) {
    if (s.diff.labels != series.front().diff.labels ||
        s.diff.per_bucket.size() != s.diff.labels.size()) {
      throw InputError("diff series '" + s.name + "' uses different length buckets");
    }
  }
}

}  // namespace detail

/// Table form of one or more diff series: one row per series, columns
/// "all" and each bucket. This is the data behind render_diff_chart.
inline Table render_diff_table(std::span<const DiffSeries> series) {
  detail::require_consistent(series);
  Table t;
  t.header = {"series", "all"};
  for (const auto& l : series.front().diff.labels) t.header.push_back(l);
  for (const auto& s : series) {
    std::vector<Cell> row{{s.name}, {text::format_rounded(s.diff.overall)}};
    std::vector<std::string> csv{s.name, text::format_full(s.diff.overall)};
    for (const auto& v : s.diff.per_bucket) {
      row.push_back({v ? text::format_rounded(*v) : std::string(detail::kAbsent)});
      csv.push_back(v ? text::format_full(*v) : std::string());
    }
    t.rows.push_back(std::move(row));
    t.csv_rows.push_back(std::move(csv));
  }
  return t;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

inline std::string coord(double v) { return text::format_rounded(v, 2); }

/// Smallest 1/2/5 x 10^k not below v (v > 0).
inline double nice_ceiling(double v) {
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * p >= v * (1 - 1e-12)) return m * p;
  }
  return 10.0 * p;
}

inline constexpr std::string_view kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                                "#59a14f", "#edc948", "#b07aa1", "#9c755f"};

}  // namespace detail

/// Grouped bar chart of score differences: one group per column ("all",
/// then each bucket), one bar per series. Absent values are skipped. Each
/// bar carries its exact value in a data-value attribute.
inline std::string render_diff_chart(std::span<const DiffSeries> series,
                                     std::string_view title = "BLEU difference by source length") {
  detail::require_consistent(series);
  std::vector<std::string> columns{"all"};
  for (const auto& l : series.front().diff.labels) columns.push_back(l);
  auto value = [&](const DiffSeries& s, std::size_t col) -> std::optional<double> {
    return col == 0 ? std::optional<double>(s.diff.overall) : s.diff.per_bucket[col - 1];
  };

  double extent = 0.0;
  for (const auto& s : series) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (const auto v = value(s, c)) extent = std::max(extent, std::abs(*v));
    }
  }
  const double ymax = extent > 0 ? detail::nice_ceiling(extent) : 1.0;

  const double left = 64, right = 16, top = 40, plot_h = 240, bottom = 56;
  const double bar_w = 14, gap = 18;
  const double group_w = static_cast<double>(series.size()) * bar_w + gap;
  const double plot_w = static_cast<double>(columns.size()) * group_w;
  const double legend_h = 18.0 * static_cast<double>(series.size());
  const double width = left + plot_w + right;
  const double height = top + plot_h + bottom + legend_h;
  auto y_of = [&](double v) { return top + plot_h / 2 - v / ymax * (plot_h / 2); };
  using detail::coord;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + coord(width) +
         "\" height=\"" + coord(height) + "\" viewBox=\"0 0 " + coord(width) + " " +
         coord(height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + coord(width) + "\" height=\"" + coord(height) +
         "\" style=\"fill:#ffffff;stroke:none\"/>\n";
  svg += "<text x=\"" + coord(width / 2) +
         "\" y=\"22\" style=\"font-family:sans-serif;font-size:14px;text-anchor:middle\">" +
         detail::xml_escape(title) + "</text>\n";

  for (int i = -2; i <= 2; ++i) {
    const double v = ymax * i / 2.0;
    const double y = y_of(v);
    svg += "<line x1=\"" + coord(left) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(left + plot_w) +
           "\" y2=\"" + coord(y) + "\" style=\"stroke:" + (i == 0 ? "#000000" : "#dddddd") +
           ";stroke-width:1\"/>\n";
    svg += "<text x=\"" + coord(left - 6) + "\" y=\"" + coord(y + 4) +
           "\" style=\"font-family:sans-serif;font-size:11px;text-anchor:end\">" +
           text::format_rounded(v, 2) + "</text>\n";
  }

  for (std::size_t c = 0; c < columns.size(); ++c) {
    const double gx = left + static_cast<double>(c) * group_w + gap / 2;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const auto v = value(series[s], c);
      if (!v) continue;
      const double y0 = y_of(0.0);
      const double y1 = y_of(*v);
      const double x = gx + static_cast<double>(s) * bar_w;
      svg += "<rect x=\"" + coord(x) + "\" y=\"" + coord(std::min(y0, y1)) + "\" width=\"" +
             coord(bar_w - 2) + "\" height=\"" + coord(std::abs(y1 - y0)) + "\" style=\"fill:" +
             std::string(detail::kPalette[s % std::size(detail::kPalette)]) +
             "\" data-series=\"" + detail::xml_escape(series[s].name) + "\" data-bucket=\"" +
             detail::xml_escape(columns[c]) + "\" data-value=\"" + text::format_full(*v) +
             "\"><title>" + detail::xml_escape(series[s].name) + " " +
             detail::xml_escape(columns[c]) + ": " + text::format_rounded(*v) + "</title></rect>\n";
    }
    svg += "<text x=\"" + coord(gx + (group_w - gap) / 2) + "\" y=\"" +
           coord(top + plot_h + 16) +
           "\" style=\"font-family:sans-serif;font-size:11px;text-anchor:middle\">" +
           detail::xml_escape(columns[c]) + "</text>\n";
  }
  svg += "<text x=\"14\" y=\"" + coord(top + plot_h / 2) +
         "\" transform=\"rotate(-90 14 " + coord(top + plot_h / 2) +
         ")\" style=\"font-family:sans-serif;font-size:11px;text-anchor:middle\">BLEU difference</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = top + plot_h + 32 + 18.0 * static_cast<double>(s);
    svg += "<rect x=\"" + coord(left) + "\" y=\"" + coord(y) + "\" width=\"12\" height=\"12\" style=\"fill:" +
           std::string(detail::kPalette[s % std::size(detail::kPalette)]) + "\"/>\n";
    svg += "<text x=\"" + coord(left + 18) + "\" y=\"" + coord(y + 10) +
           "\" style=\"font-family:sans-serif;font-size:11px\">" +
           detail::xml_escape(series[s].name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string render_diff_chart(const std::vector<DiffSeries>& series,
                                     std::string_view title = "BLEU difference by source length") {
  return render_diff_chart(std::span<const DiffSeries>(series), title);
}

/// Named output files of one evaluation. Every chart names the table that
/// holds its data; that table must already be in the bundle.
class ReportBundle {
 public:
  void add_table(const std::string& name, const Table& table) {
    tables_[name] = table;
  }

  void add_chart(const std::string& name, std::string svg, const std::string& data_table) {
    if (!tables_.contains(data_table)) {
      throw InputError("chart '" + name + "' references missing table '" + data_table + "'");
    }
    charts_[name] = {std::move(svg), data_table};
  }

  KeyValues& metadata() noexcept { return metadata_; }
  const KeyValues& metadata() const noexcept { return metadata_; }
  const std::map<std::string, Table>& tables() const noexcept { return tables_; }

  /// Writes <name>.md and <name>.csv per table, <name>.svg per chart and
  /// report.meta. Returns the written paths in write order.
  std::vector<std::filesystem::path> write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::filesystem::path& p, const std::string& content) {
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + p.string());
      out << content;
      written.push_back(p);
    };
    for (const auto& [name, table] : tables_) {
      put(dir / (name + ".md"), table.to_markdown());
      put(dir / (name + ".csv"), table.to_csv());
    }
    for (const auto& [name, chart] : charts_) put(dir / (name + ".svg"), chart.first);
    KeyValues meta = metadata_;
    for (const auto& [name, chart] : charts_) meta.set("chart." + name + ".table", chart.second);
    put(dir / "report.meta", meta.to_string());
    return written;
  }

 private:
  std::map<std::string, Table> tables_;
  std::map<std::string, std::pair<std::string, std::string>> charts_;
  KeyValues metadata_;
};

}  // namespace concatmt
