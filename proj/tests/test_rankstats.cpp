#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapaudit/rankstats/rankstats.hpp"
#include "test_util.hpp"

namespace shapaudit {
namespace {

int sign(double x) { return (x > 0) - (x < 0); }

// O(n^2) pair enumeration of the directional weighted tau.
double brute_directional(const std::vector<double>& ref, const std::vector<double>& other) {
  const std::size_t n = ref.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (ref[i] != ref[j]) return ref[i] > ref[j];
    return other[i] > other[j];
  });
  std::vector<double> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<double>(r);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = 1.0 / (1.0 + rank[i]) + 1.0 / (1.0 + rank[j]);
      const int sa = sign(ref[i] - ref[j]), sb = sign(other[i] - other[j]);
      num += w * sa * sb;
      if (sa != 0) da += w;
      if (sb != 0) db += w;
    }
  }
  if (da == 0.0 || db == 0.0) return 0.0;
  return num / std::sqrt(da * db);
}

double brute_tau(const std::vector<double>& a, const std::vector<double>& b) {
  return 0.5 * (brute_directional(a, b) + brute_directional(b, a));
}

std::vector<double> from_ranks(std::initializer_list<int> ranks) {
  std::vector<double> s;
  for (int r : ranks) s.push_back(-r);
  return s;
}

TEST(WeightedTau, IdenticalAndReversed) {
  Rng rng(1);
  for (std::size_t n : {2u, 3u, 10u, 137u}) {
    std::vector<double> a(n);
    for (double& v : a) v = rng.normal();
    EXPECT_NEAR(weighted_kendall_tau(a, a).tau, 1.0, 1e-12);
    std::vector<double> rev(n);
    for (std::size_t i = 0; i < n; ++i) rev[i] = -a[i];
    EXPECT_NEAR(weighted_kendall_tau(a, rev).tau, -1.0, 1e-12);
  }
}

TEST(WeightedTau, SwappedTopPairMatchesPairOracle) {
  const auto a = from_ranks({1, 2, 3, 4});
  const auto b = from_ranks({2, 1, 3, 4});
  const TauResult r = weighted_kendall_tau(a, b);
  EXPECT_NEAR(r.tau, brute_tau(a, b), 1e-12);
  EXPECT_NEAR(r.forward, brute_directional(a, b), 1e-12);
  EXPECT_NEAR(r.reverse, brute_directional(b, a), 1e-12);
  EXPECT_EQ(r.n, 4u);
  EXPECT_LT(r.tau, 1.0);
}

TEST(WeightedTau, AgreesWithScipyReferenceValues) {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases{
      {{1, 2, 3, 4}, {2, 1, 3, 4}},
      {{0.1, 0.4, 0.4, 0.9, 0.2, 0.7}, {3, 1, 1, 5, 5, 2}},
      {{5, 4, 3, 2, 1, 0, 7, 8}, {1, 2, 3, 4, 5, 6, 7, 0}},
      {{1, 1, 2, 2, 3, 3, 3}, {2, 1, 2, 1, 3, 3, 1}}};
  const std::vector<double> expected{0.8133333333333331, 0.3092588647588935, -0.3792003003566735,
                                     0.5659270256509112};
  for (std::size_t k = 0; k < cases.size(); ++k) {
    EXPECT_NEAR(weighted_kendall_tau(cases[k].first, cases[k].second).tau, expected[k], 1e-12) << "case " << k;
  }
}

TEST(WeightedTau, MatchesPairOracleOnRandomInstances) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    const bool ties = trial % 2 == 0;
    const std::size_t levels = 1 + rng.below(std::max<std::size_t>(2, n / 3));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = ties ? static_cast<double>(rng.below(levels)) : rng.normal();
      b[i] = ties ? static_cast<double>(rng.below(levels)) : 0.6 * a[i] + rng.normal();
    }
    const TauResult r = weighted_kendall_tau(a, b);
    EXPECT_NEAR(r.tau, brute_tau(a, b), 1e-12) << "trial " << trial << " n " << n;
    EXPECT_LE(std::abs(r.tau), 1.0);
  }
}

TEST(WeightedTau, SymmetricAndRankOnly) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng.below(50);
    std::vector<double> a(n), b(n), a_mono(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng.below(8));
      b[i] = rng.normal();
      a_mono[i] = std::exp(2.0 * a[i]) + 3.0;
    }
    EXPECT_DOUBLE_EQ(weighted_kendall_tau(a, b).tau, weighted_kendall_tau(b, a).tau);
    EXPECT_DOUBLE_EQ(weighted_kendall_tau(a, b).tau, weighted_kendall_tau(a_mono, b).tau);
  }
}

TEST(WeightedTau, ConstantSideAndErrors) {
  const std::vector<double> flat{1, 1, 1}, b{1, 2, 3};
  EXPECT_EQ(weighted_kendall_tau(flat, b).tau, 0.0);
  const std::vector<double> one{1};
  EXPECT_THROW(weighted_kendall_tau(one, one), std::invalid_argument);
  EXPECT_THROW(weighted_kendall_tau(b, std::vector<double>{1, 2}), std::invalid_argument);
  EXPECT_THROW(weighted_kendall_tau(b, std::vector<double>{1, std::nan(""), 2}), std::invalid_argument);
}

// ------------------------------------------------------------- percentiles

TEST(Percentile, NearestRank) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(nearest_rank_percentile(v, 25), 3.0);
  EXPECT_EQ(nearest_rank_percentile(v, 50), 5.0);
  EXPECT_EQ(nearest_rank_percentile(v, 75), 8.0);
  EXPECT_EQ(nearest_rank_percentile(v, 0), 1.0);
  EXPECT_EQ(nearest_rank_percentile(v, 100), 10.0);
  const std::vector<double> single{4.0};
  EXPECT_EQ(nearest_rank_percentile(single, 50), 4.0);
  EXPECT_THROW(nearest_rank_percentile(std::vector<double>{}, 50), std::invalid_argument);
}

RankVector rank_vector(const std::vector<std::string>& names, const std::vector<std::size_t>& ranks) {
  RankVector r;
  r.names = names;
  r.ranks = ranks;
  r.scores.assign(ranks.size(), 0.0);
  return r;
}

TEST(RankDistribution, SingleRunAndSwap) {
  const std::vector<std::string> names{"A", "B", "C"};
  const std::vector<RankVector> one{rank_vector(names, {2, 1, 3})};
  const RankDistribution d1 = rank_distribution(one);
  EXPECT_EQ(d1.runs, 1u);
  for (std::size_t f = 0; f < 3; ++f) {
    EXPECT_EQ(d1.features[f].min, one[0].ranks[f]);
    EXPECT_EQ(d1.features[f].median, one[0].ranks[f]);
    EXPECT_EQ(d1.features[f].max, one[0].ranks[f]);
  }
  const std::vector<RankVector> two{rank_vector(names, {1, 2, 3}), rank_vector(names, {2, 1, 3})};
  const RankDistribution d2 = rank_distribution(two);
  for (std::size_t f : {0u, 1u}) {
    EXPECT_EQ(d2.features[f].min, 1u);
    EXPECT_EQ(d2.features[f].max, 2u);
    EXPECT_DOUBLE_EQ(d2.features[f].mean, 1.5);
  }
  EXPECT_EQ(d2.by_mean_rank(), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(d2.top_k(1), (std::vector<std::size_t>{0}));
  EXPECT_EQ(d2.bottom_k(2), (std::vector<std::size_t>{1, 2}));
}

TEST(RankDistribution, QuartilesMatchSortOracle) {
  Rng rng(4);
  const std::size_t n = 12, runs = 10;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("f" + std::to_string(i));
  std::vector<RankVector> rvs;
  for (std::size_t r = 0; r < runs; ++r) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    rng.shuffle(std::span<std::size_t>(perm));
    rvs.push_back(rank_vector(names, perm));
  }
  const RankDistribution d = rank_distribution(rvs);
  for (std::size_t f = 0; f < n; ++f) {
    std::vector<std::size_t> col;
    for (const auto& rv : rvs) col.push_back(rv.ranks[f]);
    std::sort(col.begin(), col.end());
    // nearest rank with 10 values: 25% -> 3rd, 50% -> 5th, 75% -> 8th
    EXPECT_EQ(d.features[f].min, col[0]);
    EXPECT_EQ(d.features[f].q25, col[2]);
    EXPECT_EQ(d.features[f].median, col[4]);
    EXPECT_EQ(d.features[f].q75, col[7]);
    EXPECT_EQ(d.features[f].max, col[9]);
    EXPECT_LE(d.features[f].min, d.features[f].q25);
    EXPECT_LE(d.features[f].q25, d.features[f].median);
    EXPECT_LE(d.features[f].median, d.features[f].q75);
    EXPECT_LE(d.features[f].q75, d.features[f].max);
  }
}

TEST(RankDistribution, Errors) {
  EXPECT_THROW(rank_distribution(std::vector<RankVector>{}), std::invalid_argument);
  const std::vector<RankVector> mismatch{rank_vector({"A", "B"}, {1, 2}), rank_vector({"A", "C"}, {1, 2})};
  EXPECT_THROW(rank_distribution(mismatch), std::invalid_argument);
}

}  // namespace
}  // namespace shapaudit
