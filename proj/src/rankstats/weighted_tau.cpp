#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "shapaudit/rankstats/rankstats.hpp"

namespace shapaudit {

namespace {

struct Item {
  double a;
  double b;
  double w;
};

// Sorts items[lo, hi) by descending b; returns the weighted count of pairs
// that were in increasing b order (strictly), each pair weighing w_i + w_j.
double merge_inversions(std::vector<Item>& items, std::vector<Item>& scratch, std::size_t lo,
                        std::size_t hi) {
  if (hi - lo < 2) return 0.0;
  const std::size_t mid = lo + (hi - lo) / 2;
  double total = merge_inversions(items, scratch, lo, mid) + merge_inversions(items, scratch, mid, hi);

  double left_weight = 0.0;
  for (std::size_t i = lo; i < mid; ++i) left_weight += items[i].w;
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (items[j].b > items[i].b) {
      total += left_weight + static_cast<double>(mid - i) * items[j].w;
      scratch[k++] = items[j++];
    } else {
      left_weight -= items[i].w;
      scratch[k++] = items[i++];
    }
  }
  while (i < mid) scratch[k++] = items[i++];
  while (j < hi) scratch[k++] = items[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            items.begin() + static_cast<std::ptrdiff_t>(lo));
  return total;
}

// Sum over pairs inside each run of equal keys of (w_i + w_j).
template <typename Key>
double tied_weight(const std::vector<Item>& items, Key key) {
  double total = 0.0;
  std::size_t start = 0;
  while (start < items.size()) {
    std::size_t end = start + 1;
    double group = items[start].w;
    while (end < items.size() && key(items[end]) == key(items[start])) group += items[end++].w;
    total += static_cast<double>(end - start - 1) * group;
    start = end;
  }
  return total;
}

void check_inputs(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("weighted tau: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("weighted tau: need at least two features");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw std::invalid_argument("weighted tau: non-finite score at " + std::to_string(i));
    }
  }
}

}  // namespace

double directional_weighted_tau(std::span<const double> reference, std::span<const double> other) {
  check_inputs(reference, other);
  const std::size_t n = reference.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (reference[x] != reference[y]) return reference[x] > reference[y];
    if (other[x] != other[y]) return other[x] > other[y];
    return x < y;
  });

  std::vector<Item> items(n);
  double weight_sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double w = 1.0 / (1.0 + static_cast<double>(r));
    items[r] = {reference[order[r]], other[order[r]], w};
    weight_sum += w;
  }
  const double all_pairs = static_cast<double>(n - 1) * weight_sum;
  const double tied_a = tied_weight(items, [](const Item& it) { return it.a; });
  const double tied_both = tied_weight(items, [](const Item& it) { return std::pair(it.a, it.b); });

  std::vector<Item> scratch(n);
  const double discordant = merge_inversions(items, scratch, 0, n);  // items now sorted by b
  const double tied_b = tied_weight(items, [](const Item& it) { return it.b; });

  const double denom_sq = (all_pairs - tied_a) * (all_pairs - tied_b);
  if (!(denom_sq > 0.0)) return 0.0;
  const double numer = all_pairs - tied_a - tied_b + tied_both - 2.0 * discordant;
  return std::clamp(numer / std::sqrt(denom_sq), -1.0, 1.0);
}

TauResult weighted_kendall_tau(std::span<const double> a, std::span<const double> b) {
  TauResult r;
  r.n = a.size();
  r.forward = directional_weighted_tau(a, b);
  r.reverse = directional_weighted_tau(b, a);
  r.tau = 0.5 * (r.forward + r.reverse);
  return r;
}

}  // namespace shapaudit
