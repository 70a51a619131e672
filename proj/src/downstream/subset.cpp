#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shapaudit/downstream/downstream.hpp"

namespace shapaudit {

std::size_t subset_size(std::size_t n, double percent) {
  if (!(percent > 0.0 && percent <= 100.0)) throw std::invalid_argument("subset: percent must be in (0, 100]");
  if (n == 0) throw std::invalid_argument("subset: empty feature universe");
  const auto k = static_cast<std::size_t>(std::ceil(percent * static_cast<double>(n) / 100.0));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<std::size_t> subset_top_p(const RankVector& ranks, double percent) {
  auto order = ranks.order();
  order.resize(subset_size(ranks.size(), percent));
  return order;
}

}  // namespace shapaudit
