#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "shapaudit/attribution/deepshap.hpp"

namespace shapaudit {

void write_attribution_csv(const AttributionResult& result, const std::vector<std::string>& class_names,
                           const std::filesystem::path& path) {
  if (!class_names.empty() && class_names.size() != result.num_classes) {
    throw std::invalid_argument("write_attribution_csv: class name count mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sample_id,class,view,feature,phi\n";
  for (std::size_t i = 0; i < result.num_samples; ++i) {
    for (std::size_t c = 0; c < result.num_classes; ++c) {
      const std::string cls = class_names.empty() ? std::to_string(c) : class_names[c];
      for (std::size_t v = 0; v < result.num_views(); ++v) {
        for (std::size_t f = 0; f < result.feature_names[v].size(); ++f) {
          out << result.sample_ids[i] << ',' << cls << ',' << result.view_ids[v] << ','
              << result.feature_names[v][f] << ',' << format_double(result.at(i, c, v, f)) << '\n';
        }
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

nlohmann::json universe_json(const AttributionResult& result, const Universe& universe) {
  const RankVector rv = rank_features(aggregate_scores(result, universe));
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t idx : rv.order()) {
    features.push_back({{"feature", rv.names[idx]}, {"score", rv.scores[idx]}, {"rank", rv.ranks[idx]}});
  }
  return {{"universe", universe.name()}, {"features", features}};
}

}  // namespace

nlohmann::json attribution_summary_json(const AttributionResult& result) {
  nlohmann::json universes = nlohmann::json::array();
  universes.push_back(universe_json(result, Universe::pooled()));
  for (std::size_t v = 0; v < result.num_views(); ++v) {
    auto u = universe_json(result, Universe::single(v));
    u["view_id"] = result.view_ids[v];
    universes.push_back(std::move(u));
  }
  double max_gap = 0.0;
  for (std::size_t i = 0; i < result.num_samples; ++i) {
    for (std::size_t c = 0; c < result.num_classes; ++c) {
      double sum = 0.0;
      for (std::size_t v = 0; v < result.num_views(); ++v) {
        for (double x : result.phi[v].row(i * result.num_classes + c)) sum += x;
      }
      max_gap = std::max(max_gap, std::abs(sum - result.deltas(i, c)));
    }
  }
  return {{"samples", result.num_samples},
          {"classes", result.num_classes},
          {"aggregation", "mean_abs_over_samples_and_classes"},
          {"max_completeness_gap", max_gap},
          {"universes", universes}};
}

}  // namespace shapaudit
