/*
 * Copyright 2026 The mistriage Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mistriage/figures.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "mistriage/error.hpp"
#include "mistriage/report.hpp"

namespace mistriage::svg {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;
constexpr std::array<const char*, 6> kPalette = {"#4c72b0", "#dd8452", "#55a868",
                                                 "#c44e52", "#8172b3", "#937860"};

std::string num(double v) {
  std::string s = fmt::format("{:.2f}", v);
  return s == "-0.00" ? "0.00" : s;
}

std::string header(double w, double h, const std::string& title) {
  std::string out = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      num(w), num(h));
  out += fmt::format(
      "<text x=\"{}\" y=\"28.00\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
      num(w / 2.0), escape_xml(title));
  return out;
}

std::string text(double x, double y, const std::string& body, const char* anchor = "middle",
                 int size = 11) {
  return fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"{}\">{}</text>\n",
                     num(x), num(y), size, anchor, escape_xml(body));
}

std::string rect(double x, double y, double w, double h, const std::string& fill) {
  return fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#333333\" "
      "stroke-width=\"0.5\"/>\n",
      num(x), num(y), num(w), num(h), fill);
}

// A round upper bound for the y axis.
double nice_max(double v) {
  if (!(v > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double step : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (step * mag >= v) return step * mag;
  }
  return 10.0 * mag;
}

std::string value_label(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e12) return fmt::format("{:.0f}", v);
  return fmt::format("{:.3f}", v);
}

std::string axes(double y_max, const std::string& y_label) {
  const double plot_h = kHeight - kTop - kBottom;
  std::string out;
  out += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333333\"/>\n", num(kLeft),
      num(kTop), num(kHeight - kBottom));
  out += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#333333\"/>\n", num(kLeft),
      num(kHeight - kBottom), num(kWidth - kRight));
  for (int t = 0; t <= 4; ++t) {
    const double v = y_max * t / 4.0;
    const double y = kHeight - kBottom - plot_h * t / 4.0;
    out += text(kLeft - 6.0, y + 4.0, value_label(v), "end", 10);
  }
  out += fmt::format(
      "<text x=\"16.00\" y=\"{0}\" font-size=\"11\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16.00 {0})\">{1}</text>\n",
      num(kTop + plot_h / 2.0), escape_xml(y_label));
  return out;
}

std::string shade(double frac) {
  frac = std::clamp(frac, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(247 - frac * (247 - 8)));
  const int g = static_cast<int>(std::lround(251 - frac * (251 - 48)));
  const int b = static_cast<int>(std::lround(255 - frac * (255 - 107)));
  return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
}

std::vector<std::string> info_names() {
  std::vector<std::string> out;
  for (InfoLabel l : kInfoLabels) out.emplace_back(to_string(l));
  return out;
}

std::vector<std::string> harm_names() {
  std::vector<std::string> out;
  for (HarmLabel l : kHarmLabels) out.emplace_back(to_string(l));
  return out;
}

}  // namespace

std::string escape_xml(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::string& y_label) {
  if (labels.size() != values.size()) throw InvalidArgument("bar chart labels/values mismatch");
  return grouped_bar_chart(title, labels, {Series{"", values}}, y_label);
}

std::string grouped_bar_chart(const std::string& title, const std::vector<std::string>& groups,
                              const std::vector<Series>& series, const std::string& y_label) {
  if (groups.empty() || series.empty()) throw InvalidArgument("bar chart needs data");
  double max_v = 0.0;
  for (const auto& s : series) {
    if (s.values.size() != groups.size()) throw InvalidArgument("series length mismatch");
    for (double v : s.values) {
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("bar values must be finite and >= 0");
      max_v = std::max(max_v, v);
    }
  }
  const double y_max = nice_max(max_v);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double group_w = plot_w / static_cast<double>(groups.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(series.size());

  std::string out = header(kWidth, kHeight, title);
  out += axes(y_max, y_label);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = kLeft + group_w * static_cast<double>(g) + group_w * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = series[s].values[g];
      const double h = plot_h * v / y_max;
      const double x = gx + bar_w * static_cast<double>(s);
      out += rect(x, kHeight - kBottom - h, bar_w, h, kPalette[s % kPalette.size()]);
      out += text(x + bar_w / 2.0, kHeight - kBottom - h - 4.0, value_label(v), "middle", 9);
    }
    out += text(kLeft + group_w * (static_cast<double>(g) + 0.5), kHeight - kBottom + 18.0,
                groups[g]);
  }
  if (series.size() > 1 || !series[0].name.empty()) {
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double lx = kLeft + 130.0 * static_cast<double>(s);
      const double ly = kHeight - 24.0;
      out += rect(lx, ly - 10.0, 12.0, 12.0, kPalette[s % kPalette.size()]);
      out += text(lx + 18.0, ly, series[s].name, "start");
    }
  }
  out += "</svg>\n";
  return out;
}

std::string heatmap(const std::string& title, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels,
                    const std::vector<std::vector<double>>& values,
                    const std::vector<std::vector<std::string>>& cell_text, double max_value) {
  if (values.size() != row_labels.size() || cell_text.size() != row_labels.size()) {
    throw InvalidArgument("heatmap row count mismatch");
  }
  const double cell_w = 120.0;
  const double cell_h = 60.0;
  const double left = 130.0;
  const double top = 80.0;
  const double w = left + cell_w * static_cast<double>(col_labels.size()) + 20.0;
  const double h = top + cell_h * static_cast<double>(row_labels.size()) + 20.0;
  std::string out = header(w, h, title);
  for (std::size_t c = 0; c < col_labels.size(); ++c) {
    out += text(left + cell_w * (static_cast<double>(c) + 0.5), top - 10.0, col_labels[c]);
  }
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    if (values[r].size() != col_labels.size() || cell_text[r].size() != col_labels.size()) {
      throw InvalidArgument("heatmap column count mismatch");
    }
    const double y = top + cell_h * static_cast<double>(r);
    out += text(left - 8.0, y + cell_h / 2.0 + 4.0, row_labels[r], "end");
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      const double frac = max_value > 0.0 ? values[r][c] / max_value : 0.0;
      const double x = left + cell_w * static_cast<double>(c);
      out += rect(x, y, cell_w, cell_h, shade(frac));
      out += fmt::format(
          "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" fill=\"{}\">{}</text>\n",
          num(x + cell_w / 2.0), num(y + cell_h / 2.0 + 4.0), frac > 0.55 ? "#ffffff" : "#000000",
          escape_xml(cell_text[r][c]));
    }
  }
  out += "</svg>\n";
  return out;
}

std::string class_distribution(const CleanCorpus& corpus) {
  std::vector<double> counts(kNumClasses, 0.0);
  for (std::size_t i = 0; i < corpus.size(); ++i) counts[index(corpus.info(i))] += 1.0;
  return bar_chart("Information type distribution", info_names(), counts, "records");
}

std::string crosstab_counts(const CrossTab& tab) {
  std::vector<Series> series;
  for (HarmLabel h : kHarmLabels) {
    Series s{std::string(to_string(h)), {}};
    for (InfoLabel l : kInfoLabels) {
      s.values.push_back(static_cast<double>(tab.counts[index(l)][index(h)]));
    }
    series.push_back(std::move(s));
  }
  return grouped_bar_chart("Harm level by information type (counts)", info_names(), series,
                           "records");
}

std::string crosstab_proportions(const CrossTab& tab) {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::string>> labels;
  for (InfoLabel l : kInfoLabels) {
    std::vector<double> row;
    std::vector<std::string> row_text;
    for (HarmLabel h : kHarmLabels) {
      const double p = tab.row_pct(index(l), index(h));
      row.push_back(p);
      row_text.push_back(format_pct(p) + "%");
    }
    values.push_back(std::move(row));
    labels.push_back(std::move(row_text));
  }
  return heatmap("Harm level by information type (row %)", info_names(), harm_names(), values,
                 labels, 100.0);
}

std::string per_class_f1(const std::vector<std::pair<std::string, ClassMetrics>>& runs) {
  std::vector<Series> series;
  for (const auto& [name, m] : runs) {
    Series s{name, {}};
    for (InfoLabel l : kInfoLabels) s.values.push_back(m.per_class[index(l)].f1);
    series.push_back(std::move(s));
  }
  return grouped_bar_chart("Per-class F1", info_names(), series, "F1");
}

std::string confusion_grid(const ConfusionMatrix& cm) {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::string>> labels;
  double max_v = 0.0;
  for (InfoLabel t : kInfoLabels) {
    std::vector<double> row;
    std::vector<std::string> row_text;
    for (InfoLabel p : kInfoLabels) {
      const auto v = cm.counts[index(t)][index(p)];
      row.push_back(static_cast<double>(v));
      row_text.push_back(fmt::format("{}", v));
      max_v = std::max(max_v, static_cast<double>(v));
    }
    values.push_back(std::move(row));
    labels.push_back(std::move(row_text));
  }
  return heatmap("Confusion matrix (rows true, columns predicted)", info_names(), info_names(),
                 values, labels, max_v);
}

}  // namespace mistriage::svg
