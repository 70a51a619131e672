#include "shapaudit/harness/boxplot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "shapaudit/rankstats/rankstats.hpp"

namespace shapaudit {

GroupKey parse_group_key(const std::string& name) {
  if (name == "condition") return GroupKey::kCondition;
  if (name == "feature") return GroupKey::kFeature;
  throw std::invalid_argument("unknown group key '" + name + "' (expected condition or feature)");
}

namespace {

constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 110.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
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

}  // namespace

Boxplot build_boxplot(const ExperimentReport& report, const BoxplotOptions& options) {
  if (report.rows.empty()) throw std::invalid_argument("boxplot: empty report");
  const bool known = std::any_of(report.rows.begin(), report.rows.end(),
                                 [&](const ReportRow& r) { return r.metric == options.metric; });
  if (!known) throw std::invalid_argument("boxplot: unknown metric '" + options.metric + "'");

  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : report.rows) {
    if (r.metric != options.metric || r.run < 0) continue;
    if (options.condition && r.condition != *options.condition) continue;
    const std::string& key = options.group == GroupKey::kCondition ? r.condition : r.feature;
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(r.value);
  }
  if (!options.groups.empty()) order = options.groups;
  if (order.empty()) throw std::invalid_argument("boxplot: no rows for metric '" + options.metric + "'");

  Boxplot plot;
  for (const auto& key : order) {
    auto it = groups.find(key);
    if (it == groups.end() || it->second.empty()) throw std::invalid_argument("boxplot: empty group '" + key + "'");
    std::vector<double> v = it->second;
    std::sort(v.begin(), v.end());
    plot.boxes.push_back({key, v.front(), nearest_rank_percentile(v, 25.0), nearest_rank_percentile(v, 50.0),
                          nearest_rank_percentile(v, 75.0), v.back(), v.size()});
  }

  double lo = plot.boxes.front().min, hi = plot.boxes.front().max;
  for (const auto& b : plot.boxes) {
    lo = std::min(lo, b.min);
    hi = std::max(hi, b.max);
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  const double w = options.width, h = options.height;
  plot.layout = {kTop, h - kBottom, lo, hi};
  const BoxplotLayout& L = plot.layout;

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(options.width) +
       "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
       std::to_string(options.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    s += "<text x=\"" + num(w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(options.title) +
         "</text>\n";
  }
  // Axes and y ticks.
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(L.top) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(L.bottom) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(L.bottom) + "\" x2=\"" + num(w - kRight) + "\" y2=\"" +
       num(L.bottom) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = lo + (hi - lo) * t / 5.0;
    const double y = L.y(v);
    s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(y) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + tick(v) + "</text>\n";
  }
  if (!options.y_label.empty()) {
    s += "<text x=\"18\" y=\"" + num((L.top + L.bottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num((L.top + L.bottom) / 2) + ")\">" + escape(options.y_label) + "</text>\n";
  }
  if (!options.x_label.empty()) {
    s += "<text x=\"" + num((kLeft + w - kRight) / 2) + "\" y=\"" + num(h - 10) + "\" text-anchor=\"middle\">" +
         escape(options.x_label) + "</text>\n";
  }

  const double slot = (w - kLeft - kRight) / static_cast<double>(plot.boxes.size());
  const double half = std::min(30.0, slot * 0.3);
  for (std::size_t i = 0; i < plot.boxes.size(); ++i) {
    const BoxStats& b = plot.boxes[i];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    s += "<g class=\"box\" data-group=\"" + escape(b.label) + "\">\n";
    s += "<line class=\"whisker\" x1=\"" + num(cx) + "\" y1=\"" + num(L.y(b.max)) + "\" x2=\"" + num(cx) + "\" y2=\"" +
         num(L.y(b.q75)) + "\" stroke=\"black\"/>\n";
    s += "<line class=\"whisker\" x1=\"" + num(cx) + "\" y1=\"" + num(L.y(b.q25)) + "\" x2=\"" + num(cx) + "\" y2=\"" +
         num(L.y(b.min)) + "\" stroke=\"black\"/>\n";
    for (double v : {b.min, b.max}) {
      s += "<line class=\"cap\" x1=\"" + num(cx - half / 2) + "\" y1=\"" + num(L.y(v)) + "\" x2=\"" + num(cx + half / 2) +
           "\" y2=\"" + num(L.y(v)) + "\" stroke=\"black\"/>\n";
    }
    s += "<rect x=\"" + num(cx - half) + "\" y=\"" + num(L.y(b.q75)) + "\" width=\"" + num(2 * half) + "\" height=\"" +
         num(L.y(b.q25) - L.y(b.q75)) + "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    s += "<line class=\"median\" x1=\"" + num(cx - half) + "\" y1=\"" + num(L.y(b.median)) + "\" x2=\"" +
         num(cx + half) + "\" y2=\"" + num(L.y(b.median)) + "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(cx) + "\" y=\"" + num(L.bottom + 14) + "\" text-anchor=\"end\" transform=\"rotate(-30 " +
         num(cx) + " " + num(L.bottom + 14) + ")\" font-size=\"10\">" + escape(b.label) + "</text>\n";
    s += "</g>\n";
  }
  s += "</svg>\n";
  plot.svg = std::move(s);
  return plot;
}

Boxplot emit_boxplot_svg(const ExperimentReport& report, const BoxplotOptions& options,
                         const std::filesystem::path& path) {
  Boxplot plot = build_boxplot(report, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << plot.svg;
  return plot;
}

}  // namespace shapaudit
