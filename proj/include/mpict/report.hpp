#pragma once

// Plot-ready views of an EvalReport and CorpusStats: accuracy-vs-n curve
// series per variance, per-function breakdowns, and deterministic JSON/CSV
// emission.

#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mpict/corpus.hpp"
#include "mpict/evaluate.hpp"
#include "mpict/jsonl.hpp"

namespace mpict {

enum class CurveMetric { Locations, Functions, Arguments };

inline std::string_view curve_metric_name(CurveMetric m) {
  switch (m) {
    case CurveMetric::Locations: return "locations";
    case CurveMetric::Functions: return "functions";
    case CurveMetric::Arguments: return "arguments";
  }
  return "locations";
}

struct CurvePoint {
  int n = 1;
  double value = 0.0;
};

struct CurveSeries {
  std::string label;  // e.g. "variance 0"
  int variance = 0;
  std::vector<CurvePoint> points;  // n strictly increasing
};

inline std::vector<CurveSeries> accuracy_curves(const EvalReport& report,
                                                CurveMetric metric) {
  std::vector<CurveSeries> series;
  for (int v : report.variances) {
    CurveSeries s;
    s.label = "variance " + std::to_string(v);
    s.variance = v;
    const auto& cells = report.buckets.at(v);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      double value = metric == CurveMetric::Locations ? cells[i].location()
                     : metric == CurveMetric::Functions
                         ? cells[i].function()
                         : cells[i].argument();
      s.points.push_back({static_cast<int>(i + 1), round4(value)});
    }
    series.push_back(std::move(s));
  }
  return series;
}

// Cumulative ground-truth counts per function per n, and the fraction of
// each function's calls predicted at the right location with the right
// name, taken at the report's breakdown variance.
struct StackedDistribution {
  std::vector<std::string> functions;
  int max_n = 20;
  std::map<std::string, std::vector<std::size_t>> gt_counts;  // per n
  std::map<std::string, std::vector<double>> accuracy;        // per n
};

inline StackedDistribution function_breakdown(
    const EvalReport& report, std::vector<std::string> functions = {}) {
  if (functions.empty())
    for (auto name : kCommonCoreFunctions) functions.emplace_back(name);

  StackedDistribution out;
  out.functions = functions;
  out.max_n = report.max_n;

  int variance = report.breakdown_variance;
  if (!report.per_function.count(variance) && !report.per_function.empty())
    variance = report.per_function.rbegin()->first;
  static const std::vector<std::map<std::string, PerFunctionTally>> kEmpty;
  const auto& by_n = report.per_function.count(variance)
                         ? report.per_function.at(variance)
                         : kEmpty;

  for (const auto& name : functions) {
    auto& counts = out.gt_counts[name];
    auto& accuracy = out.accuracy[name];
    counts.assign(static_cast<std::size_t>(report.max_n), 0);
    accuracy.assign(static_cast<std::size_t>(report.max_n), 0.0);
    for (std::size_t i = 0; i < by_n.size(); ++i) {
      auto it = by_n[i].find(name);
      if (it == by_n[i].end()) continue;
      counts[i] = it->second.gt_count;
      if (it->second.gt_count > 0)
        accuracy[i] = round4(static_cast<double>(it->second.correct) /
                             static_cast<double>(it->second.gt_count));
    }
  }
  return out;
}

namespace detail {

inline std::string format_accuracy(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

}  // namespace detail

// curves.csv: metric,variance,n,accuracy,programs
inline std::string curves_csv(const EvalReport& report) {
  std::string out = "metric,variance,n,accuracy,programs\n";
  for (CurveMetric metric : {CurveMetric::Locations, CurveMetric::Functions,
                             CurveMetric::Arguments}) {
    for (const auto& series : accuracy_curves(report, metric)) {
      const auto& cells = report.buckets.at(series.variance);
      for (const auto& point : series.points) {
        out += curve_metric_name(metric);
        out += ',';
        out += std::to_string(series.variance);
        out += ',';
        out += std::to_string(point.n);
        out += ',';
        out += detail::format_accuracy(point.value);
        out += ',';
        out += std::to_string(
            cells[static_cast<std::size_t>(point.n - 1)].programs);
        out += '\n';
      }
    }
  }
  return out;
}

// breakdown.csv: function,n,gt_count,accuracy
inline std::string breakdown_csv(const StackedDistribution& breakdown) {
  std::string out = "function,n,gt_count,accuracy\n";
  for (const auto& name : breakdown.functions) {
    const auto& counts = breakdown.gt_counts.at(name);
    const auto& accuracy = breakdown.accuracy.at(name);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      out += name;
      out += ',';
      out += std::to_string(i + 1);
      out += ',';
      out += std::to_string(counts[i]);
      out += ',';
      out += detail::format_accuracy(accuracy[i]);
      out += '\n';
    }
  }
  return out;
}

// distribution.csv: function,count (Common Core only, descending count)
inline std::string distribution_csv(const CorpusStats& stats) {
  std::string out = "function,count\n";
  for (const auto& [name, count] : common_core_distribution(stats)) {
    out += name;
    out += ',';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

enum class ReportFormat { Json, Csv };

// Writes the deterministic file set for the chosen format and returns the
// paths written. `stats` may be null; distribution.csv then carries only
// its header row.
inline std::vector<std::filesystem::path> emit_report(
    const EvalReport& report, const CorpusStats* stats, ReportFormat format,
    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  if (format == ReportFormat::Json) {
    auto path = out_dir / "report.json";
    write_file(path, to_json(report).dump(2) + "\n");
    written.push_back(path);
    return written;
  }
  auto curves = out_dir / "curves.csv";
  write_file(curves, curves_csv(report));
  written.push_back(curves);

  auto breakdown = out_dir / "breakdown.csv";
  write_file(breakdown, breakdown_csv(function_breakdown(report)));
  written.push_back(breakdown);

  auto distribution = out_dir / "distribution.csv";
  write_file(distribution,
             stats ? distribution_csv(*stats) : std::string("function,count\n"));
  written.push_back(distribution);
  return written;
}

}  // namespace mpict
