#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "shapaudit/dataio/dataset.hpp"

namespace shapaudit {

void SynthConfig::validate() const {
  if (view_dims.empty()) throw std::invalid_argument("synth: at least one view required");
  if (informative.size() != view_dims.size()) {
    throw std::invalid_argument("synth: informative counts must match view count");
  }
  for (std::size_t v = 0; v < view_dims.size(); ++v) {
    if (view_dims[v] == 0) throw std::invalid_argument("synth: view dims must be positive");
    if (informative[v] > view_dims[v]) {
      throw std::invalid_argument("synth: more informative features than features in view " +
                                  std::to_string(v));
    }
  }
  if (classes < 2) throw std::invalid_argument("synth: need at least 2 classes");
  if (samples < 3 * classes) throw std::invalid_argument("synth: need at least 3 samples per class");
  if (!(effect_size > 0.0)) throw std::invalid_argument("synth: effect size must be positive");
  fractions.validate();
}

SyntheticData synth_multiview(const SynthConfig& config) {
  config.validate();
  const Rng root(config.seed, streams::kSynth);
  const std::size_t n = config.samples;

  SyntheticData out;
  MultiViewDataset& ds = out.dataset;
  for (std::size_t c = 0; c < config.classes; ++c) ds.class_names.push_back("class" + std::to_string(c));
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = static_cast<int>(i % config.classes);

  std::vector<std::string> sample_ids;
  for (std::size_t i = 0; i < n; ++i) sample_ids.push_back("s" + std::to_string(i));

  for (std::size_t v = 0; v < config.view_dims.size(); ++v) {
    Rng rng = root.fork(v);
    const std::size_t d = config.view_dims[v];

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(config.informative[v]));
    std::sort(chosen.begin(), chosen.end());

    // Per (informative feature, class) shift sign. Two classes always get
    // opposite signs so every planted feature separates them.
    std::vector<std::vector<double>> shift(chosen.size(), std::vector<double>(config.classes));
    for (auto& per_class : shift) {
      for (std::size_t c = 0; c < config.classes; ++c) {
        if (config.classes == 2 && c == 1) {
          per_class[1] = -per_class[0];
        } else {
          per_class[c] = rng.bernoulli(0.5) ? config.effect_size : -config.effect_size;
        }
      }
    }

    ViewMatrix view;
    view.view_id = "view" + std::to_string(v);
    view.sample_ids = sample_ids;
    for (std::size_t j = 0; j < d; ++j) {
      view.feature_names.push_back("v" + std::to_string(v) + "_f" + std::to_string(j));
    }
    view.values = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) view.values(i, j) = rng.normal();
    }
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        view.values(i, chosen[k]) += shift[k][static_cast<std::size_t>(ds.labels[i])];
      }
      out.informative.push_back({v, chosen[k]});
    }
    ds.views.push_back(std::move(view));
  }

  Rng split_rng = root.fork(1000 + streams::kSplit);
  ds.splits = stratified_split(ds.labels, config.fractions, split_rng);
  ds.mask = PresenceMask(n, ds.views.size());
  ds.validate();
  return out;
}

}  // namespace shapaudit
