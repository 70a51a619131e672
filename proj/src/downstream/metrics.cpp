#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "shapaudit/downstream/downstream.hpp"

namespace shapaudit {

double auc_binary(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw std::invalid_argument("auc: length mismatch");
  std::size_t positives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw std::invalid_argument("auc: binary labels must be 0 or 1");
    if (std::isnan(scores[i])) throw std::invalid_argument("auc: NaN score");
    positives += labels[i] == 1 ? 1 : 0;
  }
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw std::invalid_argument("auc: both classes must be present");

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Rank sums in half units keep every quantity an exact integer.
  std::size_t twice_rank_sum = 0;
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) ++end;
    const std::size_t twice_mid = start + end + 1;  // 2 * mean of 1-based ranks start+1..end
    for (std::size_t i = start; i < end; ++i) {
      if (labels[order[i]] == 1) twice_rank_sum += twice_mid;
    }
    start = end;
  }
  const std::size_t twice_u = twice_rank_sum - positives * (positives + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double auc_score(std::span<const int> labels, const Matrix& probabilities) {
  if (labels.size() != probabilities.rows()) throw std::invalid_argument("auc: row count mismatch");
  const std::size_t classes = probabilities.cols();
  if (classes < 2) throw std::invalid_argument("auc: need at least two probability columns");
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) throw std::invalid_argument("auc: label out of range");
  }
  std::vector<double> column(labels.size());
  auto fill = [&](std::size_t c) {
    for (std::size_t i = 0; i < labels.size(); ++i) column[i] = probabilities(i, c);
  };
  if (classes == 2) {
    fill(1);
    return auc_binary(labels, column);
  }
  const std::set<int> present(labels.begin(), labels.end());
  if (present.size() < 2) throw std::invalid_argument("auc: need at least two classes present");
  double sum = 0.0;
  std::vector<int> binary(labels.size());
  for (int c : present) {
    for (std::size_t i = 0; i < labels.size(); ++i) binary[i] = labels[i] == c ? 1 : 0;
    fill(static_cast<std::size_t>(c));
    sum += auc_binary(binary, column);
  }
  return sum / static_cast<double>(present.size());
}

namespace {

double entropy(const std::map<int, double>& counts, double total) {
  double h = 0.0;
  for (const auto& [key, n] : counts) {
    if (n > 0.0) h -= n / total * std::log(n / total);
  }
  return h;
}

}  // namespace

ClusterQuality v_measure(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("v_measure: length mismatch");
  if (truth.empty()) throw std::invalid_argument("v_measure: empty labelling");
  const double total = static_cast<double>(truth.size());
  std::map<int, double> classes, clusters;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    classes[truth[i]] += 1.0;
    clusters[predicted[i]] += 1.0;
    joint[{truth[i], predicted[i]}] += 1.0;
  }
  const double h_c = entropy(classes, total);
  const double h_k = entropy(clusters, total);
  double h_c_given_k = 0.0, h_k_given_c = 0.0;
  for (const auto& [key, n] : joint) {
    h_c_given_k -= n / total * std::log(n / clusters[key.second]);
    h_k_given_c -= n / total * std::log(n / classes[key.first]);
  }
  ClusterQuality q;
  q.homogeneity = h_c == 0.0 ? 1.0 : std::clamp(1.0 - h_c_given_k / h_c, 0.0, 1.0);
  q.completeness = h_k == 0.0 ? 1.0 : std::clamp(1.0 - h_k_given_c / h_k, 0.0, 1.0);
  const double s = q.homogeneity + q.completeness;
  q.v_measure = s > 0.0 ? 2.0 * q.homogeneity * q.completeness / s : 0.0;
  return q;
}

}  // namespace shapaudit
