#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "shapaudit/dataio/dataset.hpp"

namespace shapaudit {

namespace {

void require_unique(const std::vector<std::string>& names, const std::string& what) {
  std::unordered_set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) throw std::invalid_argument("duplicate " + what + " '" + name + "'");
  }
}

}  // namespace

void ViewMatrix::validate() const {
  if (sample_ids.size() != values.rows()) {
    throw std::invalid_argument("view '" + view_id + "': " + std::to_string(sample_ids.size()) +
                                " sample ids for " + std::to_string(values.rows()) + " rows");
  }
  if (feature_names.size() != values.cols()) {
    throw std::invalid_argument("view '" + view_id + "': " + std::to_string(feature_names.size()) +
                                " feature names for " + std::to_string(values.cols()) + " columns");
  }
  require_unique(sample_ids, "sample id in view '" + view_id + "'");
  require_unique(feature_names, "feature name in view '" + view_id + "'");
  if (!values.all_finite()) throw std::invalid_argument("view '" + view_id + "': non-finite value");
}

const char* split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

void SplitFractions::validate() const {
  if (!(train > 0.0 && validation > 0.0 && test > 0.0)) {
    throw std::invalid_argument("split fractions must all be positive");
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
}

std::vector<std::size_t> MultiViewDataset::view_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(views.size());
  for (const auto& v : views) dims.push_back(v.features());
  return dims;
}

std::vector<std::size_t> MultiViewDataset::rows_in(std::initializer_list<Split> wanted) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (std::find(wanted.begin(), wanted.end(), splits[i]) != wanted.end()) rows.push_back(i);
  }
  return rows;
}

void MultiViewDataset::validate() const {
  if (views.empty()) throw std::invalid_argument("dataset has no views");
  const std::size_t n = labels.size();
  for (const auto& v : views) {
    v.validate();
    if (v.samples() != n) {
      throw std::invalid_argument("view '" + v.view_id + "' has " + std::to_string(v.samples()) +
                                  " rows for " + std::to_string(n) + " labels");
    }
    if (v.sample_ids != views.front().sample_ids) {
      throw std::invalid_argument("view '" + v.view_id + "' is not row-aligned with view '" +
                                  views.front().view_id + "'");
    }
  }
  if (splits.size() != n) throw std::invalid_argument("dataset: split tag count mismatch");
  if (mask.samples() != n || mask.views() != views.size()) {
    throw std::invalid_argument("dataset: presence mask shape mismatch");
  }
  std::vector<bool> in_train(class_names.size(), false);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= class_names.size()) {
      throw std::invalid_argument("dataset: label out of range at row " + std::to_string(i));
    }
    if (splits[i] == Split::kTrain) in_train[static_cast<std::size_t>(labels[i])] = true;
  }
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    if (!in_train[c]) {
      throw std::invalid_argument("dataset: class '" + class_names[c] + "' missing from the train split");
    }
  }
}

}  // namespace shapaudit
