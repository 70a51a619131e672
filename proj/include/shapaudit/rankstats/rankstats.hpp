#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shapaudit/attribution/deepshap.hpp"

namespace shapaudit {

struct TauResult {
  double tau = 0.0;      // symmetric mean of the two directions
  double forward = 0.0;  // weights from a's ranking
  double reverse = 0.0;  // weights from b's ranking
  std::size_t n = 0;
};

/// Weighted tau with additive hyperbolic weights 1/(1+r_i) + 1/(1+r_j),
/// where r are 0-based ranks of `reference` (higher score = better rank,
/// ties ordered by `other`). Tie-corrected like tau-b. O(n log n).
/// Returns 0 when either side has no untied pair.
double directional_weighted_tau(std::span<const double> reference, std::span<const double> other);

/// Mean of both directions, so the result is symmetric in (a, b).
TauResult weighted_kendall_tau(std::span<const double> a, std::span<const double> b);

/// Nearest-rank percentile of an ascending sample: element ceil(p/100 * n)
/// (1-based), clamped to [1, n].
double nearest_rank_percentile(std::span<const double> sorted, double p);

struct RankSummary {
  std::size_t min = 0;
  std::size_t q25 = 0;
  std::size_t median = 0;
  std::size_t q75 = 0;
  std::size_t max = 0;
  double mean = 0.0;
};

struct RankDistribution {
  std::vector<std::string> names;
  std::size_t runs = 0;
  std::vector<RankSummary> features;

  /// Feature indices ordered by mean rank (ties: lower index first).
  std::vector<std::size_t> by_mean_rank() const;
  std::vector<std::size_t> top_k(std::size_t k) const;
  /// The k worst features, worst last.
  std::vector<std::size_t> bottom_k(std::size_t k) const;
};

/// Per-feature order statistics of ranks across runs.
RankDistribution rank_distribution(std::span<const RankVector> runs);

}  // namespace shapaudit
