#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shapaudit/dataio/dataset.hpp"
#include "shapaudit/multiview/network.hpp"

namespace shapaudit {

/// Reserved prefix of generated noise feature names.
inline constexpr const char* kNoisePrefix = "NOISE__";

bool is_noise_feature(const std::string& name);

struct NoiseSpec {
  std::string view_id;  // empty = any view
  std::size_t n_noise = 0;
  std::uint64_t seed = 0;
};

/// Appends n_noise Gaussian columns. Each column copies the (mean, sample
/// variance) pair of one original feature drawn with replacement.
ViewMatrix gen_noise_features(const ViewMatrix& view, const NoiseSpec& spec);

/// Same augmentation applied to one view of a dataset; other views, labels,
/// splits and mask are untouched.
MultiViewDataset add_noise(const MultiViewDataset& dataset, std::size_t view, const NoiseSpec& spec);

enum class SizingKind { kStatic, kDynamic, kProportionalConcat };

const char* sizing_name(SizingKind kind);
SizingKind parse_sizing(const std::string& name);

inline constexpr std::size_t kDefaultWidthFloor = 8;

struct SizingScheme {
  SizingKind kind = SizingKind::kStatic;
  LayerPlan base;
  std::size_t floor = kDefaultWidthFloor;
  std::size_t hidden_cap = 128;  // proportional-concat hidden widths
};

/// Two-view plan whose total width per depth (hidden1, hidden2, embedding)
/// is conserved and split in proportion to the new input dims:
/// w1 = clamp(floor(T d1 / (d1 + d2)), floor, T - floor), w2 = T - w1.
LayerPlan dynamic_layer_plan(const LayerPlan& base, std::span<const std::size_t> new_dims,
                             std::size_t floor = kDefaultWidthFloor);

/// width_v = round-half-up(base_width * d_v / d_min).
std::vector<std::size_t> proportional_concat_plan(std::size_t base_width, std::span<const std::size_t> dims);

/// Hidden widths between input dim d and embedding e on a geometric scale:
/// (d^(2/3) e^(1/3), d^(1/3) e^(2/3)), rounded and capped.
std::pair<std::size_t, std::size_t> interpolated_hidden(std::size_t input_dim, std::size_t embedding,
                                                        std::size_t cap);

/// Plan for the given input dims under a sizing scheme. Static keeps every
/// width of the base plan and only swaps the input dims.
LayerPlan apply_sizing(const SizingScheme& scheme, std::span<const std::size_t> dims);

}  // namespace shapaudit
