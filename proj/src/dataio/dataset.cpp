#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "shapaudit/dataio/dataset.hpp"

namespace shapaudit {

MultiViewDataset assemble_dataset(std::vector<ViewMatrix> views, const LabelTable& labels,
                                  const AssemblyOptions& options) {
  if (views.empty()) throw std::invalid_argument("assemble_dataset: no views");
  const std::size_t n = labels.sample_ids.size();
  if (labels.labels.size() != n) throw std::invalid_argument("assemble_dataset: ragged label table");

  MultiViewDataset ds;
  std::set<std::string> distinct(labels.labels.begin(), labels.labels.end());
  ds.class_names.assign(distinct.begin(), distinct.end());
  std::map<std::string, int> class_index;
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    class_index[ds.class_names[c]] = static_cast<int>(c);
  }
  for (const auto& l : labels.labels) ds.labels.push_back(class_index.at(l));

  std::vector<std::uint8_t> flags(n * views.size(), 0);
  for (std::size_t v = 0; v < views.size(); ++v) {
    ViewMatrix& view = views[v];
    view.validate();
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t r = 0; r < view.sample_ids.size(); ++r) row_of[view.sample_ids[r]] = r;

    Matrix aligned(n, view.features());
    std::size_t matched = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto it = row_of.find(labels.sample_ids[i]);
      if (it == row_of.end()) {
        if (!options.allow_missing_views) {
          throw std::invalid_argument("assemble_dataset: sample '" + labels.sample_ids[i] +
                                      "' missing from view '" + view.view_id + "'");
        }
        continue;
      }
      ++matched;
      flags[i * views.size() + v] = 1;
      auto src = view.values.row(it->second);
      std::copy(src.begin(), src.end(), aligned.row(i).begin());
    }
    if (matched == 0) {
      throw std::invalid_argument("assemble_dataset: view '" + view.view_id +
                                  "' shares no sample ids with the labels");
    }
    view.values = std::move(aligned);
    view.sample_ids = labels.sample_ids;
  }
  ds.views = std::move(views);
  ds.mask = PresenceMask(n, ds.views.size(), std::move(flags));
  ds.splits.assign(n, Split::kTrain);
  ds.validate();
  return ds;
}

std::vector<Split> stratified_split(std::span<const int> labels, const SplitFractions& fractions,
                                    Rng& rng) {
  fractions.validate();
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  const std::array<double, 3> target{fractions.train, fractions.validation, fractions.test};
  std::vector<Split> tags(labels.size(), Split::kTrain);
  for (auto& [cls, members] : by_class) {
    const std::size_t m = members.size();
    if (m < 3) {
      throw std::invalid_argument("stratified_split: class " + std::to_string(cls) + " has " +
                                  std::to_string(m) + " samples, need at least 3");
    }
    // Largest remainder; ties go to the earlier split.
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      const double exact = target[s] * static_cast<double>(m);
      counts[s] = static_cast<std::size_t>(std::floor(exact));
      remainder[s] = exact - static_cast<double>(counts[s]);
      assigned += counts[s];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < m; ++k, ++assigned) counts[order[k % 3]] += 1;

    rng.shuffle(std::span<std::size_t>(members));
    std::size_t pos = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t k = 0; k < counts[s]; ++k) tags[members[pos++]] = static_cast<Split>(s);
    }
  }
  return tags;
}

StandardizationRecord fit_standardization(const MultiViewDataset& dataset) {
  const auto train_rows = dataset.rows_in({Split::kTrain});
  if (train_rows.empty()) throw std::invalid_argument("standardize: empty train split");
  StandardizationRecord record;
  for (std::size_t v = 0; v < dataset.num_views(); ++v) {
    const Matrix& x = dataset.views[v].values;
    FeatureTransform t{std::vector<double>(x.cols(), 0.0), std::vector<double>(x.cols(), 0.0)};
    std::size_t count = 0;
    for (std::size_t r : train_rows) {
      if (!dataset.mask.present(r, v)) continue;
      ++count;
      auto row = x.row(r);
      for (std::size_t c = 0; c < x.cols(); ++c) t.mean[c] += row[c];
    }
    if (count == 0) {
      record.views.push_back(std::move(t));
      continue;
    }
    for (double& m : t.mean) m /= static_cast<double>(count);
    for (std::size_t r : train_rows) {
      if (!dataset.mask.present(r, v)) continue;
      auto row = x.row(r);
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double d = row[c] - t.mean[c];
        t.sd[c] += d * d;
      }
    }
    for (double& s : t.sd) {
      s = std::sqrt(s / static_cast<double>(count));
      if (s < kConstantFeatureSd) s = 0.0;
    }
    record.views.push_back(std::move(t));
  }
  return record;
}

MultiViewDataset apply_standardization(const MultiViewDataset& dataset,
                                       const StandardizationRecord& record) {
  if (record.views.size() != dataset.num_views()) {
    throw std::invalid_argument("standardize: record has wrong view count");
  }
  MultiViewDataset out = dataset;
  for (std::size_t v = 0; v < out.num_views(); ++v) {
    Matrix& x = out.views[v].values;
    const FeatureTransform& t = record.views[v];
    if (t.mean.size() != x.cols()) throw std::invalid_argument("standardize: feature count mismatch");
    for (std::size_t r = 0; r < x.rows(); ++r) {
      auto row = x.row(r);
      if (!out.mask.present(r, v)) {
        std::fill(row.begin(), row.end(), 0.0);
        continue;
      }
      for (std::size_t c = 0; c < x.cols(); ++c) {
        row[c] = t.sd[c] == 0.0 ? 0.0 : (row[c] - t.mean[c]) / t.sd[c];
      }
    }
  }
  return out;
}

StandardizedDataset zscore_standardize(const MultiViewDataset& dataset) {
  StandardizationRecord record = fit_standardization(dataset);
  MultiViewDataset transformed = apply_standardization(dataset, record);
  return {std::move(transformed), std::move(record)};
}

}  // namespace shapaudit
