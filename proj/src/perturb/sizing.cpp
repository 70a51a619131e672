#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "shapaudit/perturb/perturb.hpp"

namespace shapaudit {

const char* sizing_name(SizingKind kind) {
  switch (kind) {
    case SizingKind::kStatic: return "static";
    case SizingKind::kDynamic: return "dynamic";
    case SizingKind::kProportionalConcat: return "proportional_concat";
  }
  return "?";
}

SizingKind parse_sizing(const std::string& name) {
  if (name == "static") return SizingKind::kStatic;
  if (name == "dynamic") return SizingKind::kDynamic;
  if (name == "proportional_concat") return SizingKind::kProportionalConcat;
  throw std::invalid_argument("unknown sizing scheme '" + name + "'");
}

namespace {

std::pair<std::size_t, std::size_t> split_total(std::size_t total, std::size_t d1, std::size_t d2,
                                                std::size_t floor) {
  if (total < 2 * floor) {
    throw std::invalid_argument("dynamic plan: total width " + std::to_string(total) +
                                " cannot give both views the floor of " + std::to_string(floor));
  }
  // total * d1 fits easily in 64 bits for any realistic width and dimension.
  const std::size_t share = total * d1 / (d1 + d2);
  const std::size_t w1 = std::clamp(share, floor, total - floor);
  return {w1, total - w1};
}

}  // namespace

LayerPlan dynamic_layer_plan(const LayerPlan& base, std::span<const std::size_t> new_dims, std::size_t floor) {
  base.validate();
  if (base.views.size() != 2 || new_dims.size() != 2) {
    throw std::invalid_argument("dynamic plan: needs exactly two views");
  }
  if (floor == 0) throw std::invalid_argument("dynamic plan: floor must be >= 1");
  for (std::size_t v = 0; v < 2; ++v) {
    if (new_dims[v] < base.views[v].input_dim) {
      throw std::invalid_argument("dynamic plan: new input dims must not shrink");
    }
  }
  LayerPlan plan = base;
  const std::size_t d1 = new_dims[0], d2 = new_dims[1];
  auto assign = [&](std::size_t ViewLayers::*width) {
    const auto [w1, w2] = split_total(base.views[0].*width + base.views[1].*width, d1, d2, floor);
    plan.views[0].*width = w1;
    plan.views[1].*width = w2;
  };
  assign(&ViewLayers::hidden1);
  assign(&ViewLayers::hidden2);
  assign(&ViewLayers::embedding);
  plan.views[0].input_dim = d1;
  plan.views[1].input_dim = d2;
  return plan;
}

std::vector<std::size_t> proportional_concat_plan(std::size_t base_width, std::span<const std::size_t> dims) {
  if (base_width == 0) throw std::invalid_argument("proportional plan: base width must be >= 1");
  if (dims.empty()) throw std::invalid_argument("proportional plan: no views");
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("proportional plan: input dims must be >= 1");
  }
  const std::size_t d_min = *std::min_element(dims.begin(), dims.end());
  std::vector<std::size_t> widths;
  for (std::size_t d : dims) widths.push_back((2 * base_width * d + d_min) / (2 * d_min));
  return widths;
}

std::pair<std::size_t, std::size_t> interpolated_hidden(std::size_t input_dim, std::size_t embedding,
                                                        std::size_t cap) {
  const double d = static_cast<double>(input_dim);
  const double e = static_cast<double>(embedding);
  auto width = [&](double x) {
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(x)), 1, std::max<std::size_t>(cap, 1));
  };
  return {width(std::cbrt(d * d * e)), width(std::cbrt(d * e * e))};
}

LayerPlan apply_sizing(const SizingScheme& scheme, std::span<const std::size_t> dims) {
  if (dims.size() != scheme.base.views.size()) {
    throw std::invalid_argument("sizing: dims count differs from the base plan's views");
  }
  switch (scheme.kind) {
    case SizingKind::kStatic: {
      LayerPlan plan = scheme.base;
      for (std::size_t v = 0; v < dims.size(); ++v) plan.views[v].input_dim = dims[v];
      plan.validate();
      return plan;
    }
    case SizingKind::kDynamic:
      return dynamic_layer_plan(scheme.base, dims, scheme.floor);
    case SizingKind::kProportionalConcat: {
      if (scheme.base.fusion != Fusion::kConcat) {
        throw std::invalid_argument("sizing: proportional_concat needs concat fusion");
      }
      const std::size_t smallest =
          static_cast<std::size_t>(std::min_element(dims.begin(), dims.end()) - dims.begin());
      const auto widths = proportional_concat_plan(scheme.base.views[smallest].embedding, dims);
      LayerPlan plan = scheme.base;
      for (std::size_t v = 0; v < dims.size(); ++v) {
        plan.views[v].input_dim = dims[v];
        plan.views[v].embedding = widths[v];
        std::tie(plan.views[v].hidden1, plan.views[v].hidden2) =
            interpolated_hidden(dims[v], widths[v], scheme.hidden_cap);
      }
      plan.validate();
      return plan;
    }
  }
  throw std::logic_error("sizing: unhandled scheme");
}

}  // namespace shapaudit
