#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shapaudit/attribution/deepshap.hpp"
#include "shapaudit/nncore/matrix.hpp"

namespace shapaudit {

// ------------------------------------------------------------ random forest

struct ForestConfig {
  std::size_t trees = 500;
  std::size_t max_features = 0;  // 0 = floor(sqrt(P))
  std::size_t min_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// CART trees (Gini) on bootstrap resamples; class probabilities for the
/// test rows are the mean of per-tree leaf class distributions. Each tree
/// draws from its own substream, so the result never depends on scheduling.
Matrix rf_fit_predict(const Matrix& train_x, std::span<const int> train_y, const Matrix& test_x,
                      std::size_t num_classes, const ForestConfig& cfg);

// ---------------------------------------------------------------- metrics

/// Mann-Whitney AUC of `scores` for labels 1 (positive) vs 0; ties count 0.5.
double auc_binary(std::span<const int> labels, std::span<const double> scores);

/// Binary: AUC of column 1. Multiclass: macro one-vs-rest over the classes
/// present in `labels`.
double auc_score(std::span<const int> labels, const Matrix& probabilities);

struct ClusterQuality {
  double v_measure = 0.0;
  double homogeneity = 0.0;
  double completeness = 0.0;
};

ClusterQuality v_measure(std::span<const int> truth, std::span<const int> predicted);

// ------------------------------------------------------------------- ward

struct Merge {
  std::size_t first = 0;   // cluster ids are their smallest member row
  std::size_t second = 0;  // first < second
  double cost = 0.0;       // increase in within-cluster sum of squares
  std::size_t size = 0;    // rows in the merged cluster

  bool operator==(const Merge&) const = default;
};

/// Full Ward agglomeration (Lance-Williams on squared Euclidean distances).
/// Equal costs merge the lexicographically smallest (first, second) pair.
std::vector<Merge> ward_linkage(const Matrix& x);

/// Labels 0..k-1 after cutting the Ward tree at k clusters; clusters are
/// numbered by their smallest member row.
std::vector<int> ward_cluster(const Matrix& x, std::size_t k);

// ---------------------------------------------------------------- subsets

/// ceil(p/100 * n), at least 1.
std::size_t subset_size(std::size_t n, double percent);

/// Indices of the best-ranked features in rank order.
std::vector<std::size_t> subset_top_p(const RankVector& ranks, double percent);

}  // namespace shapaudit
