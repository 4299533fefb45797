#pragma once

// Cross-seed aggregation: quartiles, Tukey whiskers and outliers per
// (config, dialogues-trained, metric), emitted as CSV suitable for boxplots.
// Quartiles use linear interpolation between order statistics.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dm/harness/train.hpp"

namespace dm {

// linear-interpolation quantile: h = (n-1)p
inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * p;
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

struct BoxStats {
  size_t n = 0;
  double q1 = 0, median = 0, q3 = 0;
  double whisker_lo = 0, whisker_hi = 0;
  std::vector<double> outliers;
};

inline BoxStats box_stats(const std::vector<double>& values) {
  BoxStats b;
  b.n = values.size();
  b.q1 = quantile(values, 0.25);
  b.median = quantile(values, 0.5);
  b.q3 = quantile(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_lo = b.q3;
  b.whisker_hi = b.q1;
  bool any = false;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
    } else {
      b.whisker_lo = any ? std::min(b.whisker_lo, v) : v;
      b.whisker_hi = any ? std::max(b.whisker_hi, v) : v;
      any = true;
    }
  }
  if (!any) {
    b.whisker_lo = b.q1;
    b.whisker_hi = b.q3;
  }
  std::sort(b.outliers.begin(), b.outliers.end());
  return b;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

} // namespace detail

inline const std::vector<std::string>& aggregate_metrics() {
  static const std::vector<std::string> cols = {
      "inform-P",  "inform-R", "inform-F1",        "book-rate",     "success",
      "complete",  "avg-turns-success", "avg-turns-all", "avg-reward"};
  return cols;
}

// Reads every seed-*/metrics.csv under each run dir. Rows are grouped by
// (config label, dialogues-trained); every run of a config must share the
// same evaluation schedule.
inline std::string aggregate(const std::vector<std::string>& run_dirs) {
  namespace fs = std::filesystem;
  if (run_dirs.empty()) throw std::invalid_argument("aggregate: no run directories");

  // (config, dialogues) -> metric -> values across seeds
  std::map<std::pair<std::string, int>, std::map<std::string, std::vector<double>>> groups;
  std::map<std::string, std::set<int>> schedules; // config -> eval points seen
  std::map<std::string, size_t> rows_per_config;

  for (const auto& run : run_dirs) {
    if (!fs::exists(run)) throw std::invalid_argument("no such run directory: " + run);
    bool found = false;
    for (const auto& entry : fs::directory_iterator(run)) {
      if (!entry.is_directory()) continue;
      fs::path csv = entry.path() / "metrics.csv";
      if (!fs::exists(csv)) continue;
      std::ifstream in(csv);
      std::string line;
      std::getline(in, line); // header
      auto header = detail::split_csv(line);
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = detail::split_csv(line);
        const std::string& config = fields.at(0);
        const int dialogues = std::stoi(fields.at(2));
        schedules[config].insert(dialogues);
        ++rows_per_config[config];
        for (size_t c = 3; c < header.size(); ++c)
          groups[{config, dialogues}][header[c]].push_back(std::stod(fields.at(c)));
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("no metrics found under " + run);
  }
  // every seed of a config must cover the same schedule
  for (const auto& [config, points] : schedules) {
    size_t expect_rows = rows_per_config[config];
    size_t seeds = groups[{config, *points.begin()}].begin()->second.size();
    if (expect_rows != seeds * points.size())
      throw std::invalid_argument("mismatched evaluation schedules for config " + config);
  }

  std::ostringstream out;
  out << "config,dialogues-trained,metric,n,q1,median,q3,whisker-lo,whisker-hi,outliers\n";
  for (const auto& [key, metrics_map] : groups) {
    for (const std::string& metric : aggregate_metrics()) {
      auto it = metrics_map.find(metric);
      if (it == metrics_map.end()) continue;
      BoxStats b = box_stats(it->second);
      out << key.first << "," << key.second << "," << metric << "," << b.n << ","
          << detail::fmt(b.q1) << "," << detail::fmt(b.median) << "," << detail::fmt(b.q3) << ","
          << detail::fmt(b.whisker_lo) << "," << detail::fmt(b.whisker_hi) << ",";
      for (size_t i = 0; i < b.outliers.size(); ++i)
        out << (i ? ";" : "") << detail::fmt(b.outliers[i]);
      out << "\n";
    }
  }
  return out.str();
}

} // namespace dm
