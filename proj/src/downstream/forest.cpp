#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "shapaudit/downstream/downstream.hpp"
#include "shapaudit/nncore/rng.hpp"

namespace shapaudit {

void ForestConfig::validate() const {
  if (trees == 0) throw std::invalid_argument("forest: tree count must be >= 1");
  if (min_leaf == 0) throw std::invalid_argument("forest: min leaf must be >= 1");
}

namespace {

struct Node {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  bool leaf = true;
  std::vector<double> distribution;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, std::size_t classes, const ForestConfig& cfg,
              std::size_t mtry, Rng& rng)
      : x_(x), y_(y), classes_(classes), cfg_(cfg), mtry_(mtry), rng_(rng) {}

  std::vector<Node> build(std::vector<std::size_t> rows) {
    grow(std::move(rows));
    return std::move(nodes_);
  }

 private:
  struct Best {
    bool found = false;
    double purity = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
  };

  std::size_t grow(std::vector<std::size_t> rows) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    std::vector<double> counts(classes_, 0.0);
    for (std::size_t r : rows) counts[static_cast<std::size_t>(y_[r])] += 1.0;

    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
    Best best;
    if (!pure && rows.size() >= 2 * cfg_.min_leaf) best = find_split(rows, counts);
    if (!best.found) {
      for (double& c : counts) c /= static_cast<double>(rows.size());
      nodes_[id].distribution = std::move(counts);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (x_(r, best.feature) <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const std::size_t l = grow(std::move(left));
    const std::size_t rgt = grow(std::move(right));
    Node& node = nodes_[id];
    node.leaf = false;
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = rgt;
    return id;
  }

  // Candidate features come from a fresh shuffle of all features; the search
  // stops after mtry features once a valid split has been seen.
  Best find_split(const std::vector<std::size_t>& rows, const std::vector<double>& counts) {
    const std::size_t p = x_.cols();
    std::vector<std::size_t> features(p);
    std::iota(features.begin(), features.end(), std::size_t{0});
    Best best;
    std::vector<std::pair<double, int>> column(rows.size());
    std::vector<double> left(classes_);
    for (std::size_t tried = 0; tried < p; ++tried) {
      if (tried >= mtry_ && best.found) break;
      const std::size_t j = tried + static_cast<std::size_t>(rng_.below(p - tried));
      std::swap(features[tried], features[j]);
      const std::size_t f = features[tried];

      for (std::size_t i = 0; i < rows.size(); ++i) column[i] = {x_(rows[i], f), y_[rows[i]]};
      std::sort(column.begin(), column.end());
      std::fill(left.begin(), left.end(), 0.0);
      const std::size_t n = rows.size();
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left[static_cast<std::size_t>(column[i].second)] += 1.0;
        const std::size_t nl = i + 1;
        if (column[i].first == column[i + 1].first) continue;
        if (nl < cfg_.min_leaf || n - nl < cfg_.min_leaf) continue;
        double sl = 0.0, sr = 0.0;
        for (std::size_t c = 0; c < classes_; ++c) {
          const double rc = counts[c] - left[c];
          sl += left[c] * left[c];
          sr += rc * rc;
        }
        const double purity = sl / static_cast<double>(nl) + sr / static_cast<double>(n - nl);
        if (!best.found || purity > best.purity) {
          best = {true, purity, f, 0.5 * (column[i].first + column[i + 1].first)};
          // Guard the midpoint against rounding onto the upper value.
          if (!(best.threshold < column[i + 1].first)) best.threshold = column[i].first;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::size_t classes_;
  const ForestConfig& cfg_;
  std::size_t mtry_;
  Rng& rng_;
  std::vector<Node> nodes_;
};

const std::vector<double>& predict_tree(const std::vector<Node>& tree, std::span<const double> row) {
  std::size_t id = 0;
  while (!tree[id].leaf) id = row[tree[id].feature] <= tree[id].threshold ? tree[id].left : tree[id].right;
  return tree[id].distribution;
}

}  // namespace

Matrix rf_fit_predict(const Matrix& train_x, std::span<const int> train_y, const Matrix& test_x,
                      std::size_t num_classes, const ForestConfig& cfg) {
  cfg.validate();
  if (train_x.rows() != train_y.size()) throw std::invalid_argument("forest: label count mismatch");
  if (train_x.rows() == 0) throw std::invalid_argument("forest: empty training set");
  if (test_x.rows() == 0) throw std::invalid_argument("forest: empty test set");
  if (test_x.cols() != train_x.cols()) throw std::invalid_argument("forest: feature count mismatch");
  if (train_x.cols() == 0) throw std::invalid_argument("forest: no features");
  if (num_classes == 0) throw std::invalid_argument("forest: need at least one class");
  for (int label : train_y) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw std::invalid_argument("forest: label out of range");
    }
  }
  if (!train_x.all_finite() || !test_x.all_finite()) throw std::invalid_argument("forest: non-finite input");

  const std::size_t n = train_x.rows();
  const std::size_t mtry =
      cfg.max_features > 0
          ? std::min(cfg.max_features, train_x.cols())
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(train_x.cols()))));

  Matrix probs(test_x.rows(), num_classes);
  const Rng root(cfg.seed, streams::kBootstrap);
  for (std::size_t t = 0; t < cfg.trees; ++t) {
    Rng rng = root.fork(t);
    std::vector<std::size_t> rows(n);
    if (cfg.bootstrap) {
      for (std::size_t& r : rows) r = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    TreeBuilder builder(train_x, train_y, num_classes, cfg, mtry, rng);
    const std::vector<Node> tree = builder.build(std::move(rows));
    for (std::size_t i = 0; i < test_x.rows(); ++i) {
      const auto& dist = predict_tree(tree, test_x.row(i));
      for (std::size_t c = 0; c < num_classes; ++c) probs(i, c) += dist[c];
    }
  }
  for (double& v : probs.data()) v /= static_cast<double>(cfg.trees);
  return probs;
}

}  // namespace shapaudit
