#include <limits>
#include <stdexcept>

#include "shapaudit/downstream/downstream.hpp"

namespace shapaudit {

std::vector<Merge> ward_linkage(const Matrix& x) {
  if (!x.all_finite()) throw std::invalid_argument("ward: non-finite rows");
  const std::size_t n = x.rows();
  // d(i, j) = 2 * Ward merge cost; for singletons the squared distance.
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t f = 0; f < x.cols(); ++f) {
        const double diff = x(i, f) - x(j, f);
        s += diff * diff;
      }
      d(i, j) = d(j, i) = s;
    }
  }
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<Merge> merges;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && d(i, j) < best) {
          best = d(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    const double ni = static_cast<double>(size[bi]);
    const double nj = static_cast<double>(size[bj]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double nk = static_cast<double>(size[k]);
      const double v = ((ni + nk) * d(k, bi) + (nj + nk) * d(k, bj) - nk * best) / (ni + nj + nk);
      d(k, bi) = d(bi, k) = v;
    }
    active[bj] = false;
    size[bi] += size[bj];
    merges.push_back({bi, bj, 0.5 * best, size[bi]});
  }
  return merges;
}

std::vector<int> ward_cluster(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  if (k == 0 || k > n) throw std::invalid_argument("ward: k must be in [1, rows]");
  const std::vector<Merge> merges = ward_linkage(x);
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  for (std::size_t m = 0; m < n - k; ++m) parent[merges[m].second] = merges[m].first;
  auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i];
    return i;
  };
  std::vector<int> id(n, -1), labels(n);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = root(i);
    if (id[r] < 0) id[r] = next++;
    labels[i] = id[r];
  }
  return labels;
}

}  // namespace shapaudit
