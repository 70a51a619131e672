#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "shapaudit/attribution/deepshap.hpp"

namespace shapaudit {

std::string Universe::name() const {
  return view ? "view" + std::to_string(*view) : std::string("pooled");
}

FeatureScores aggregate_scores(const AttributionResult& result, const Universe& universe) {
  if (result.num_samples == 0 || result.num_classes == 0) {
    throw std::invalid_argument("aggregate_scores: empty attribution result");
  }
  if (universe.view && *universe.view >= result.num_views()) {
    throw std::invalid_argument("aggregate_scores: view index out of range");
  }
  std::vector<std::size_t> views;
  if (universe.view) {
    views.push_back(*universe.view);
  } else {
    views.resize(result.num_views());
    std::iota(views.begin(), views.end(), std::size_t{0});
  }

  FeatureScores out;
  const double denom = static_cast<double>(result.num_samples * result.num_classes);
  for (std::size_t v : views) {
    const Matrix& phi = result.phi[v];
    std::vector<double> sums(phi.cols(), 0.0);
    for (std::size_t r = 0; r < phi.rows(); ++r) {
      auto row = phi.row(r);
      for (std::size_t f = 0; f < phi.cols(); ++f) sums[f] += std::abs(row[f]);
    }
    for (std::size_t f = 0; f < phi.cols(); ++f) {
      const std::string& name = result.feature_names[v][f];
      out.names.push_back(universe.view ? name : result.view_ids[v] + ":" + name);
      out.values.push_back(sums[f] / denom);
    }
  }
  return out;
}

std::vector<std::size_t> RankVector::order() const {
  std::vector<std::size_t> idx(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) idx[ranks[i] - 1] = i;
  return idx;
}

RankVector rank_features(const FeatureScores& scores) {
  if (scores.names.size() != scores.values.size()) {
    throw std::invalid_argument("rank_features: names and values differ in length");
  }
  for (std::size_t i = 0; i < scores.values.size(); ++i) {
    if (std::isnan(scores.values[i])) {
      throw std::invalid_argument("rank_features: NaN score for feature " + std::to_string(i));
    }
  }
  std::vector<std::size_t> idx(scores.values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores.values[a] > scores.values[b]; });
  RankVector rv{scores.names, scores.values, std::vector<std::size_t>(idx.size())};
  for (std::size_t r = 0; r < idx.size(); ++r) rv.ranks[idx[r]] = r + 1;
  return rv;
}

}  // namespace shapaudit
