#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shapaudit/harness/report.hpp"

namespace shapaudit {

enum class GroupKey { kCondition, kFeature };

GroupKey parse_group_key(const std::string& name);

struct BoxplotOptions {
  GroupKey group = GroupKey::kCondition;
  std::string metric;
  std::optional<std::string> condition;        // only rows of this condition
  std::vector<std::string> groups;             // explicit group order; empty = first appearance
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 800;
  int height = 500;
};

struct BoxStats {
  std::string label;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Plot geometry: maps data values to SVG y coordinates.
struct BoxplotLayout {
  double top = 0.0;
  double bottom = 0.0;
  double lo = 0.0;
  double hi = 1.0;

  double y(double value) const { return bottom - (value - lo) / (hi - lo) * (bottom - top); }
};

struct Boxplot {
  std::vector<BoxStats> boxes;
  BoxplotLayout layout;
  std::string svg;
};

/// Per-run rows only (aggregates are skipped). Quartiles use the nearest-rank
/// rule; whiskers span min..max. Throws on an unknown metric or empty group.
Boxplot build_boxplot(const ExperimentReport& report, const BoxplotOptions& options);

/// Builds the plot and writes it; nothing is written on error.
Boxplot emit_boxplot_svg(const ExperimentReport& report, const BoxplotOptions& options,
                         const std::filesystem::path& path);

}  // namespace shapaudit
