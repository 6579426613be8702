#pragma once

// SVG line charts of sweep.csv: metric against sweep axis, one series per
// policy, with 95% interval error bars.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arsched/metrics.hpp"
#include "arsched/policies.hpp"

namespace arsched {

struct SweepRow {
  std::string axis;  ///< full label, e.g. "af=0.75"
  Policy policy = Policy::FF;
  std::string metric;
  std::optional<double> mean;
  std::optional<double> ci95;
};

inline std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader)
    throw ConfigError("sweep.csv row 1: expected header '" + std::string(kSweepHeader) + "'");
  std::vector<SweepRow> rows;
  std::size_t row_no = 1;
  auto number = [&](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("sweep.csv row " + std::to_string(row_no) + ": bad number '" + s + "'");
  };
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 5)
      throw ConfigError("sweep.csv row " + std::to_string(row_no) + ": expected 5 fields");
    if (f[0].find('=') == std::string::npos)
      throw ConfigError("sweep.csv row " + std::to_string(row_no) + ": bad axis '" + f[0] + "'");
    if (f[2] != "acceptance_rate" && f[2] != "avg_slowdown")
      throw ConfigError("sweep.csv row " + std::to_string(row_no) + ": unknown metric '" + f[2] + "'");
    SweepRow r;
    r.axis = f[0];
    try {
      r.policy = parse_policy(f[1]);
    } catch (const ConfigError& e) {
      throw ConfigError("sweep.csv row " + std::to_string(row_no) + ": " + e.what());
    }
    r.metric = f[2];
    r.mean = number(f[3]);
    r.ci95 = number(f[4]);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError("sweep.csv: no data rows");
  return rows;
}

/// One SVG document for a single (axis, metric) slice of the rows.
inline std::string render_svg(const std::string& axis_name, const std::string& metric,
                              const std::vector<SweepRow>& rows) {
  std::vector<std::string> xs;
  std::vector<Policy> series;
  double lo = 1e300, hi = -1e300;
  for (const auto& r : rows) {
    if (std::find(xs.begin(), xs.end(), r.axis) == xs.end()) xs.push_back(r.axis);
    if (std::find(series.begin(), series.end(), r.policy) == series.end()) series.push_back(r.policy);
    if (r.mean) {
      const double ci = r.ci95.value_or(0);
      lo = std::min(lo, *r.mean - ci);
      hi = std::max(hi, *r.mean + ci);
    }
  }
  std::sort(series.begin(), series.end(),
            [](Policy a, Policy b) { return policy_rank(a) < policy_rank(b); });
  if (lo > hi) lo = 0, hi = 1;
  if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;

  constexpr double W = 640, H = 400, L = 70, R = 130, T = 40, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](std::size_t i) {
    return xs.size() == 1 ? L + pw / 2 : L + pw * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
  };
  auto py = [&](double v) { return T + ph * (1 - (v - lo) / (hi - lo)); };
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};

  std::string out;
  char buf[256];
  auto put = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  put("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n", W, H);
  put("<text x=\"%.1f\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">%s vs %s</text>\n", L + pw / 2,
      metric.c_str(), axis_name.c_str());
  put("<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n", L, T,
      pw, ph);
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    put("<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.3f</text>\n", L - 5, py(v) + 3, v);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto label = xs[i].substr(xs[i].find('=') + 1);
    put("<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"middle\">%s</text>\n", px(i),
        T + ph + 15, label.c_str());
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[policy_rank(series[s]) % 7];
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (const auto& r : rows) {
        if (r.policy != series[s] || r.axis != xs[i] || !r.mean) continue;
        const double ci = r.ci95.value_or(0);
        put("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\"/>\n", px(i), py(*r.mean - ci),
            px(i), py(*r.mean + ci), color);
        std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(i), py(*r.mean));
        points += buf;
      }
    }
    if (!points.empty()) points.pop_back();
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"" + points + "\"/>\n";
    const double ly = T + 15 + 18 * static_cast<double>(s);
    put("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"3\"/>\n", W - R + 10,
        ly, W - R + 30, ly, color);
    put("<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\">%s</text>\n", W - R + 35, ly + 4,
        std::string(policy_name(series[s])).c_str());
  }
  out += "</svg>\n";
  return out;
}

/// Writes "<axis>_<metric>.svg" for every axis and metric found in the CSV.
/// Nothing is written when the CSV is malformed.
inline std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& sweep_csv,
                                                     const std::filesystem::path& output_dir) {
  std::ifstream in(sweep_csv);
  if (!in) throw ConfigError("cannot read " + sweep_csv.string());
  const auto rows = parse_sweep_csv(in);

  std::map<std::pair<std::string, std::string>, std::vector<SweepRow>> slices;
  for (const auto& r : rows) slices[{r.axis.substr(0, r.axis.find('=')), r.metric}].push_back(r);

  std::vector<std::pair<std::filesystem::path, std::string>> docs;
  for (const auto& [key, slice] : slices)
    docs.emplace_back(output_dir / (key.first + "_" + key.second + ".svg"),
                      render_svg(key.first, key.second, slice));

  std::filesystem::create_directories(output_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, doc] : docs) {
    std::ofstream out(path, std::ios::binary);
    out << doc;
    written.push_back(path);
  }
  return written;
}

}  // namespace arsched
