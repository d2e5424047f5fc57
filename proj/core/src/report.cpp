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

#include "mistriage/report.hpp"

#include <fmt/format.h>

#include "mistriage/error.hpp"

namespace mistriage {
namespace {

using Json = nlohmann::json;

InfoLabel info_from_name(const std::string& name) {
  for (InfoLabel l : kInfoLabels) {
    if (to_string(l) == name) return l;
  }
  throw ParseError("unknown class name in report: " + name);
}

template <typename Grid>
Json grid_to_json(const Grid& g) {
  Json rows = Json::array();
  for (const auto& row : g) rows.push_back(Json(row));
  return rows;
}

template <typename Grid>
void grid_from_json(const Json& j, Grid& g) {
  if (j.size() != kNumClasses) throw ParseError("report grid must have 3 rows");
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    if (j[r].size() != kNumClasses) throw ParseError("report grid must have 3 columns");
    for (std::size_t c = 0; c < kNumClasses; ++c) g[r][c] = j[r][c].get<std::int64_t>();
  }
}

Json prf_json(double p, double r, double f1) {
  return {{"precision", p}, {"recall", r}, {"f1", f1}};
}

}  // namespace

// ---------------------------------------------------------------- EvalReport

nlohmann::json EvalReport::to_json() const {
  Json classes = Json::array();
  for (InfoLabel l : kInfoLabels) classes.push_back(std::string(to_string(l)));

  Json per_class = Json::array();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& m = metrics.per_class[c];
    per_class.push_back({{"class", classes[c]},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support},
                         {"precision_undefined", m.precision_undefined},
                         {"recall_undefined", m.recall_undefined}});
  }

  Json cells = Json::array();
  for (const auto& cell : breakdown.cells) {
    cells.push_back({{"true", std::string(to_string(cell.truth))},
                     {"predicted", std::string(to_string(cell.predicted))},
                     {"count", cell.count},
                     {"pct_of_errors", cell.pct_of_errors}});
  }

  Json j;
  j["schema_version"] = kSchemaVersion;
  j["classes"] = classes;
  j["confusion"] = {{"axes", "true x predicted"}, {"counts", grid_to_json(confusion.counts)}};
  j["metrics"] = {
      {"total", metrics.total},
      {"accuracy", metrics.accuracy},
      {"macro", prf_json(metrics.macro_precision, metrics.macro_recall, metrics.macro_f1)},
      {"weighted",
       prf_json(metrics.weighted_precision, metrics.weighted_recall, metrics.weighted_f1)},
      {"per_class", per_class},
      {"any_undefined", metrics.any_undefined()}};
  j["ci"] = {{"metric", std::string(to_string(macro_f1_ci.metric))},
             {"point", macro_f1_ci.point},
             {"lower", macro_f1_ci.lower},
             {"upper", macro_f1_ci.upper},
             {"iterations", macro_f1_ci.iterations},
             {"alpha", macro_f1_ci.alpha},
             {"seed", macro_f1_ci.seed}};
  j["breakdown"] = {{"total_errors", breakdown.total_errors}, {"cells", cells}};
  if (triage) {
    j["crosstab"] = {{"axes", "predicted x harm"}, {"counts", grid_to_json(triage->counts)}};
  } else {
    j["crosstab"] = nullptr;
  }
  j["provenance"] = provenance;
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw ParseError("unsupported report schema_version");
    }
    EvalReport r;
    grid_from_json(j.at("confusion").at("counts"), r.confusion.counts);

    const Json& m = j.at("metrics");
    r.metrics.total = m.at("total").get<std::int64_t>();
    r.metrics.accuracy = m.at("accuracy").get<double>();
    r.metrics.macro_precision = m.at("macro").at("precision").get<double>();
    r.metrics.macro_recall = m.at("macro").at("recall").get<double>();
    r.metrics.macro_f1 = m.at("macro").at("f1").get<double>();
    r.metrics.weighted_precision = m.at("weighted").at("precision").get<double>();
    r.metrics.weighted_recall = m.at("weighted").at("recall").get<double>();
    r.metrics.weighted_f1 = m.at("weighted").at("f1").get<double>();
    const Json& pc = m.at("per_class");
    if (pc.size() != kNumClasses) throw ParseError("report must list 3 classes");
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      auto& out = r.metrics.per_class[c];
      out.precision = pc[c].at("precision").get<double>();
      out.recall = pc[c].at("recall").get<double>();
      out.f1 = pc[c].at("f1").get<double>();
      out.support = pc[c].at("support").get<std::int64_t>();
      out.precision_undefined = pc[c].at("precision_undefined").get<bool>();
      out.recall_undefined = pc[c].at("recall_undefined").get<bool>();
    }

    const Json& ci = j.at("ci");
    r.macro_f1_ci.metric = parse_metric(ci.at("metric").get<std::string>());
    r.macro_f1_ci.point = ci.at("point").get<double>();
    r.macro_f1_ci.lower = ci.at("lower").get<double>();
    r.macro_f1_ci.upper = ci.at("upper").get<double>();
    r.macro_f1_ci.iterations = ci.at("iterations").get<std::size_t>();
    r.macro_f1_ci.alpha = ci.at("alpha").get<double>();
    r.macro_f1_ci.seed = ci.at("seed").get<std::uint64_t>();

    const Json& b = j.at("breakdown");
    r.breakdown.total_errors = b.at("total_errors").get<std::int64_t>();
    for (const auto& cell : b.at("cells")) {
      r.breakdown.cells.push_back({info_from_name(cell.at("true").get<std::string>()),
                                   info_from_name(cell.at("predicted").get<std::string>()),
                                   cell.at("count").get<std::int64_t>(),
                                   cell.at("pct_of_errors").get<double>()});
    }

    if (!j.at("crosstab").is_null()) {
      CrossTab tab;
      grid_from_json(j.at("crosstab").at("counts"), tab.counts);
      r.triage = tab;
    }
    r.provenance = j.at("provenance");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed evaluation report: ") + e.what());
  }
}

// ---------------------------------------------------------------- tables

std::string format_pct(double pct) { return fmt::format("{:.1f}", pct); }
std::string format_ratio(double ratio) { return fmt::format("{:.4f}", ratio); }

std::string distribution_table(const CleanCorpus& corpus) {
  std::array<std::int64_t, kNumClasses> info{}, harm{};
  std::int64_t with_harm = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    ++info[index(corpus.info(i))];
    ++harm[index(corpus.harm(i))];
    ++with_harm;
  }
  const auto n = static_cast<std::int64_t>(corpus.size());
  auto pct = [](std::int64_t a, std::int64_t b) {
    return b == 0 ? 0.0 : 100.0 * static_cast<double>(a) / static_cast<double>(b);
  };
  std::string out = "axis\tclass\tcount\tpct\n";
  for (InfoLabel l : kInfoLabels) {
    out += fmt::format("information_type\t{}\t{}\t{}\n", to_string(l), info[index(l)],
                       format_pct(pct(info[index(l)], n)));
  }
  for (HarmLabel l : kHarmLabels) {
    out += fmt::format("harm_level\t{}\t{}\t{}\n", to_string(l), harm[index(l)],
                       format_pct(pct(harm[index(l)], with_harm)));
  }
  out += fmt::format("total\t-\t{}\t100.0\n", n);
  return out;
}

std::string per_class_table(const ClassMetrics& m) {
  std::string out = "class\tprecision\trecall\tf1\tsupport\n";
  for (InfoLabel l : kInfoLabels) {
    const auto& c = m.per_class[index(l)];
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", to_string(l), format_ratio(c.precision),
                       format_ratio(c.recall), format_ratio(c.f1), c.support);
  }
  out += fmt::format("macro\t{}\t{}\t{}\t{}\n", format_ratio(m.macro_precision),
                     format_ratio(m.macro_recall), format_ratio(m.macro_f1), m.total);
  out += fmt::format("weighted\t{}\t{}\t{}\t{}\n", format_ratio(m.weighted_precision),
                     format_ratio(m.weighted_recall), format_ratio(m.weighted_f1), m.total);
  return out;
}

std::string overall_table(std::string_view name, const EvalReport& r) {
  std::string out = "model\taccuracy\tmacro_precision\tmacro_recall\tmacro_f1\tci_lower\tci_upper\n";
  out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", name, format_pct(100.0 * r.metrics.accuracy),
                     format_pct(100.0 * r.metrics.macro_precision),
                     format_pct(100.0 * r.metrics.macro_recall),
                     format_pct(100.0 * r.metrics.macro_f1),
                     format_pct(100.0 * r.macro_f1_ci.lower),
                     format_pct(100.0 * r.macro_f1_ci.upper));
  return out;
}

std::string confusion_table(const ConfusionMatrix& cm) {
  std::string out = "true\\predicted";
  for (InfoLabel l : kInfoLabels) out += fmt::format("\t{}", to_string(l));
  out += "\n";
  for (InfoLabel t : kInfoLabels) {
    out += to_string(t);
    for (InfoLabel p : kInfoLabels) out += fmt::format("\t{}", cm.counts[index(t)][index(p)]);
    out += "\n";
  }
  return out;
}

std::string error_breakdown_table(const ErrorBreakdown& b) {
  std::string out = "rank\ttrue\tpredicted\tcount\tpct_of_errors\n";
  std::size_t rank = 1;
  for (const auto& cell : b.cells) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", rank++, to_string(cell.truth),
                       to_string(cell.predicted), cell.count, format_pct(cell.pct_of_errors));
  }
  out += fmt::format("total\t-\t-\t{}\t{}\n", b.total_errors,
                     b.total_errors == 0 ? "0.0" : "100.0");
  return out;
}

std::string crosstab_table(const CrossTab& tab) {
  std::string out = "information_type";
  for (HarmLabel h : kHarmLabels) out += fmt::format("\t{}", to_string(h));
  out += "\ttotal\thigh_pct\tgeq_med_pct\n";
  for (InfoLabel l : kInfoLabels) {
    const std::size_t r = index(l);
    out += to_string(l);
    for (HarmLabel h : kHarmLabels) out += fmt::format("\t{}", tab.counts[r][index(h)]);
    out += fmt::format("\t{}\t{}\t{}\n", tab.row_total(r), format_pct(tab.high_pct(r)),
                       format_pct(tab.geq_med_pct(r)));
  }
  out += "total";
  for (HarmLabel h : kHarmLabels) out += fmt::format("\t{}", tab.col_total(index(h)));
  out += fmt::format("\t{}\t{}\t{}\n", tab.total(), format_pct(tab.total_high_pct()),
                     format_pct(tab.total_geq_med_pct()));
  return out;
}

std::string crosstab_proportions_table(const CrossTab& tab) {
  std::string out = "information_type";
  for (HarmLabel h : kHarmLabels) out += fmt::format("\t{}", to_string(h));
  out += "\n";
  for (InfoLabel l : kInfoLabels) {
    out += to_string(l);
    for (HarmLabel h : kHarmLabels) {
      out += "\t" + format_pct(tab.row_pct(index(l), index(h)));
    }
    out += "\n";
  }
  return out;
}

AblationDelta AblationDelta::between(const ClassMetrics& pair, const ClassMetrics& single) {
  const std::size_t mis = index(InfoLabel::kMisinformation);
  return {pair.macro_f1 - single.macro_f1,
          pair.per_class[mis].recall - single.per_class[mis].recall,
          pair.per_class[mis].f1 - single.per_class[mis].f1};
}

std::string ablation_table(const ClassMetrics& pair, const ClassMetrics& single) {
  const std::size_t mis = index(InfoLabel::kMisinformation);
  std::string out = "encoding\tmacro_f1\tmis_recall\tmis_f1\n";
  for (auto [name, m] : {std::pair<std::string_view, const ClassMetrics*>{"single", &single},
                         {"pair", &pair}}) {
    out += fmt::format("{}\t{}\t{}\t{}\n", name, format_pct(100.0 * m->macro_f1),
                       format_pct(100.0 * m->per_class[mis].recall),
                       format_pct(100.0 * m->per_class[mis].f1));
  }
  const AblationDelta d = AblationDelta::between(pair, single);
  out += fmt::format("delta_pair_vs_single\t{:+.1f}\t{:+.1f}\t{:+.1f}\n", 100.0 * d.macro_f1,
                     100.0 * d.mis_recall, 100.0 * d.mis_f1);
  return out;
}

}  // namespace mistriage
