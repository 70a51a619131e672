#include <cmath>
#include <stdexcept>

#include "shapaudit/multiview/network.hpp"

namespace shapaudit {

const char* fusion_name(Fusion fusion) { return fusion == Fusion::kMean ? "mean" : "concat"; }

Fusion parse_fusion(const std::string& name) {
  if (name == "mean") return Fusion::kMean;
  if (name == "concat") return Fusion::kConcat;
  throw std::invalid_argument("unknown fusion scheme '" + name + "' (expected mean or concat)");
}

void LayerPlan::validate() const {
  if (views.empty()) throw std::invalid_argument("layer plan: no views");
  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto& l = views[v];
    if (l.input_dim == 0 || l.hidden1 == 0 || l.hidden2 == 0 || l.embedding == 0) {
      throw std::invalid_argument("layer plan: view " + std::to_string(v) + " has a zero width");
    }
    if (fusion == Fusion::kMean && l.embedding != views.front().embedding) {
      throw std::invalid_argument("layer plan: mean fusion needs equal embedding widths");
    }
  }
  if (fusion_hidden == 0) throw std::invalid_argument("layer plan: fusion hidden width is zero");
  if (num_classes < 2) throw std::invalid_argument("layer plan: need at least 2 classes");
}

std::size_t LayerPlan::fused_width() const {
  if (fusion == Fusion::kMean) return views.front().embedding;
  std::size_t total = 0;
  for (const auto& l : views) total += l.embedding;
  return total;
}

std::size_t LayerPlan::concat_offset(std::size_t view) const {
  std::size_t offset = 0;
  for (std::size_t v = 0; v < view; ++v) offset += views[v].embedding;
  return offset;
}

void ModelParams::for_each_tensor(const std::function<void(Matrix&)>& fn) {
  auto visit = [&](Dense& d) {
    fn(d.weight);
    fn(d.bias);
  };
  for (auto& v : views) {
    visit(v.hidden1);
    visit(v.hidden2);
    visit(v.embedding);
    visit(v.head);
  }
  visit(fusion_hidden);
  visit(output);
}

void ModelParams::for_each_tensor(const std::function<void(const Matrix&)>& fn) const {
  const_cast<ModelParams*>(this)->for_each_tensor([&](Matrix& m) { fn(m); });
}

std::size_t ModelParams::parameter_count() const {
  std::size_t count = 0;
  for_each_tensor([&](const Matrix& m) { count += m.size(); });
  return count;
}

std::vector<double> ModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for_each_tensor([&](const Matrix& m) { flat.insert(flat.end(), m.data().begin(), m.data().end()); });
  return flat;
}

void ModelParams::assign_flat(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("assign_flat: length mismatch");
  std::size_t pos = 0;
  for_each_tensor([&](Matrix& m) {
    auto dst = m.data();
    for (double& x : dst) x = flat[pos++];
  });
}

ModelParams ModelParams::zeros_like() const {
  ModelParams out = *this;
  out.for_each_tensor([](Matrix& m) { m.fill(0.0); });
  return out;
}

namespace {

Dense zero_dense(std::size_t in, std::size_t out) { return {Matrix(in, out), Matrix(1, out)}; }

void init_dense(Dense& d, Rng rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(d.weight.rows()));
  for (double& w : d.weight.data()) w = rng.uniform(-bound, bound);
}

}  // namespace

ModelParams zero_params(const LayerPlan& plan) {
  plan.validate();
  ModelParams p;
  for (const auto& l : plan.views) {
    p.views.push_back({zero_dense(l.input_dim, l.hidden1), zero_dense(l.hidden1, l.hidden2),
                       zero_dense(l.hidden2, l.embedding), zero_dense(l.embedding, plan.num_classes)});
  }
  p.fusion_hidden = zero_dense(plan.fused_width(), plan.fusion_hidden);
  p.output = zero_dense(plan.fusion_hidden, plan.num_classes);
  return p;
}

ModelParams init_params(const LayerPlan& plan, std::uint64_t seed) {
  ModelParams p = zero_params(plan);
  const Rng root(seed, streams::kInit);
  std::uint64_t layer = 0;
  for (auto& v : p.views) {
    init_dense(v.hidden1, root.fork(layer++));
    init_dense(v.hidden2, root.fork(layer++));
    init_dense(v.embedding, root.fork(layer++));
    init_dense(v.head, root.fork(layer++));
  }
  init_dense(p.fusion_hidden, root.fork(layer++));
  init_dense(p.output, root.fork(layer++));
  return p;
}

}  // namespace shapaudit
