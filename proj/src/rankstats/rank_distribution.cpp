#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "shapaudit/rankstats/rankstats.hpp"

namespace shapaudit {

double nearest_rank_percentile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must be in [0, 100]");
  const auto n = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

std::vector<std::size_t> RankDistribution::by_mean_rank() const {
  std::vector<std::size_t> idx(features.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return features[x].mean < features[y].mean; });
  return idx;
}

std::vector<std::size_t> RankDistribution::top_k(std::size_t k) const {
  auto idx = by_mean_rank();
  idx.resize(std::min(k, idx.size()));
  return idx;
}

std::vector<std::size_t> RankDistribution::bottom_k(std::size_t k) const {
  auto idx = by_mean_rank();
  const std::size_t take = std::min(k, idx.size());
  return {idx.end() - static_cast<std::ptrdiff_t>(take), idx.end()};
}

RankDistribution rank_distribution(std::span<const RankVector> runs) {
  if (runs.empty()) throw std::invalid_argument("rank_distribution: no runs");
  const RankVector& first = runs.front();
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].names != first.names) {
      throw std::invalid_argument("rank_distribution: run " + std::to_string(r) + " has a different universe");
    }
  }
  RankDistribution dist;
  dist.names = first.names;
  dist.runs = runs.size();
  const std::size_t n = first.size();
  std::vector<double> ranks(runs.size());
  for (std::size_t f = 0; f < n; ++f) {
    double sum = 0.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      ranks[r] = static_cast<double>(runs[r].ranks.at(f));
      sum += ranks[r];
    }
    std::sort(ranks.begin(), ranks.end());
    auto pick = [&](double p) { return static_cast<std::size_t>(nearest_rank_percentile(ranks, p)); };
    dist.features.push_back({static_cast<std::size_t>(ranks.front()), pick(25.0), pick(50.0), pick(75.0),
                             static_cast<std::size_t>(ranks.back()), sum / static_cast<double>(runs.size())});
  }
  return dist;
}

}  // namespace shapaudit
