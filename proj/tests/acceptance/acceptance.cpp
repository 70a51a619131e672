// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "../test_util.hpp"
#include "shapaudit/attribution/deepshap.hpp"
#include "shapaudit/dataio/dataset.hpp"
#include "shapaudit/downstream/downstream.hpp"
#include "shapaudit/harness/experiments.hpp"
#include "shapaudit/nncore/gradient_check.hpp"
#include "shapaudit/rankstats/rankstats.hpp"

namespace {

using namespace shapaudit;
using namespace shapaudit::testing;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kGradTol = 1e-4;
constexpr double kGradStep = 1e-5;
constexpr double kCompletenessTol = 1e-6;
constexpr double kAffineTol = 1e-10;
constexpr double kTauTol = 1e-12;
constexpr double kHandCaseTol = 1e-12;
constexpr double kWardCostTol = 1e-9;
constexpr double kRfMinAuc = 0.95;
constexpr double kTopQuarter = 0.25;
constexpr double kSubsetSlack = 0.1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ------------------------------------------------------------------ 1

Outcome gradients() {
  Rng rng(101);
  double worst = 0.0;
  std::size_t models = 0, checked = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const Fusion fusion = trial % 2 ? Fusion::kConcat : Fusion::kMean;
    const LayerPlan plan = random_plan(rng, fusion, 32);
    const ModelParams params = random_params(plan, 500 + trial);
    const std::size_t n = 6;
    const auto views = random_views(plan, n, rng);
    const auto y = random_labels(n, plan.num_classes, rng);
    const PresenceMask mask(n, plan.views.size());
    LossWeights w{1.0};
    for (std::size_t v = 0; v < plan.views.size(); ++v) w.push_back(0.5);
    const FocalLossParams focal{2.0, {}};
    const ForwardPass pass = forward(plan, params, views, mask);
    const auto grad = backward(plan, params, pass, views, mask, y, w, focal).grads.flatten();
    auto objective = [&](std::span<const double> flat) {
      ModelParams p = params;
      p.assign_flat(flat);
      const ForwardPass f = forward(plan, p, views, mask);
      std::vector<Matrix> view_logits;
      for (const auto& v : f.views) view_logits.push_back(v.logits);
      ObjectiveEvaluation e;
      e.value = total_loss(f.logits, view_logits, y, w, focal, &mask);
      for (const auto& v : f.views) {
        e.relu_preactivations.insert(e.relu_preactivations.end(), v.pre1.data().begin(), v.pre1.data().end());
        e.relu_preactivations.insert(e.relu_preactivations.end(), v.pre2.data().begin(), v.pre2.data().end());
      }
      e.relu_preactivations.insert(e.relu_preactivations.end(), f.fusion_pre.data().begin(), f.fusion_pre.data().end());
      return e;
    };
    const auto report = gradient_check(objective, params.flatten(), grad, kGradStep);
    worst = std::max(worst, report.max_relative_error);
    checked += report.checked;
    ++models;
  }
  return {worst < kGradTol, fmt("%.0f models, %.0f coordinates, max rel err %.3g", models, checked, worst)};
}

// ------------------------------------------------------------------ 2

Outcome completeness() {
  Rng rng(202);
  double worst = 0.0;
  std::size_t models = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const LayerPlan plan = random_plan(rng, trial % 2 ? Fusion::kConcat : Fusion::kMean, 32);
    TrainedModel model;
    model.plan = plan;
    model.params = random_params(plan, 700 + trial);
    const std::size_t n = 12, k = 9;
    const auto x = random_views(plan, n, rng);
    const BackgroundSet bg{random_views(plan, k, rng)};
    const AttributionResult r = deepshap_attribute(model, x, bg);
    const Matrix fx = forward(plan, model.params, x, PresenceMask(n, plan.views.size())).logits;
    const Matrix fb = forward(plan, model.params, bg.views, PresenceMask(k, plan.views.size())).logits;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < plan.num_classes; ++c) {
        double mean_b = 0.0;
        for (std::size_t b = 0; b < k; ++b) mean_b += fb(b, c);
        const double delta = fx(i, c) - mean_b / static_cast<double>(k);
        double sum = 0.0;
        for (std::size_t v = 0; v < plan.views.size(); ++v) {
          for (std::size_t f = 0; f < plan.views[v].input_dim; ++f) sum += r.at(i, c, v, f);
        }
        worst = std::max(worst, std::abs(sum - delta) / std::max(1.0, std::abs(delta)));
      }
    }
    ++models;
  }
  return {worst <= kCompletenessTol, fmt("%.0f models x 12 samples, max scaled gap %.3g", models, worst)};
}

// ------------------------------------------------------------------ 3

Outcome affine() {
  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    LayerPlan plan = random_plan(rng, trial % 2 ? Fusion::kConcat : Fusion::kMean, 12);
    plan.activation = Activation::kIdentity;
    TrainedModel model;
    model.plan = plan;
    model.params = random_params(plan, 900 + trial);
    const std::size_t n = 3, k = 5;
    const auto x = random_views(plan, n, rng);
    const BackgroundSet bg{random_views(plan, k, rng)};
    const AttributionResult r = deepshap_attribute(model, x, bg);

    std::vector<Matrix> zero;
    for (const auto& v : plan.views) zero.emplace_back(1, v.input_dim);
    const PresenceMask one(1, plan.views.size());
    const Matrix f0 = forward(plan, model.params, zero, one).logits;
    for (std::size_t v = 0; v < plan.views.size(); ++v) {
      for (std::size_t f = 0; f < plan.views[v].input_dim; ++f) {
        auto probe = zero;
        probe[v](0, f) = 1.0;
        const Matrix fe = forward(plan, model.params, probe, one).logits;
        double mean_b = 0.0;
        for (std::size_t b = 0; b < k; ++b) mean_b += bg.views[v](b, f);
        mean_b /= static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t c = 0; c < plan.num_classes; ++c) {
            const double expected = (fe(0, c) - f0(0, c)) * (x[v](i, f) - mean_b);
            worst = std::max(worst, std::abs(r.at(i, c, v, f) - expected));
          }
        }
      }
    }
  }
  return {worst <= kAffineTol, fmt("100 instances, max abs err %.3g", worst)};
}

// ------------------------------------------------------------------ 4

int sign(double x) { return (x > 0) - (x < 0); }

double brute_directional(const std::vector<double>& ref, const std::vector<double>& other) {
  const std::size_t n = ref.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (ref[i] != ref[j]) return ref[i] > ref[j];
    return other[i] > other[j];
  });
  std::vector<double> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<double>(r);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = 1.0 / (1.0 + rank[i]) + 1.0 / (1.0 + rank[j]);
      const int sa = sign(ref[i] - ref[j]), sb = sign(other[i] - other[j]);
      num += w * sa * sb;
      if (sa != 0) da += w;
      if (sb != 0) db += w;
    }
  }
  if (da == 0.0 || db == 0.0) return 0.0;
  return num / std::sqrt(da * db);
}

Outcome tau_oracle() {
  Rng rng(404);
  double worst = 0.0, worst_extreme = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    const bool ties = trial % 2 == 0;
    const std::size_t levels = 1 + rng.below(std::max<std::size_t>(2, n / 3));
    std::vector<double> a(n), b(n), rev(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = ties ? static_cast<double>(rng.below(levels)) : rng.normal();
      b[i] = ties ? static_cast<double>(rng.below(levels)) : 0.6 * a[i] + rng.normal();
    }
    const double brute = 0.5 * (brute_directional(a, b) + brute_directional(b, a));
    worst = std::max(worst, std::abs(weighted_kendall_tau(a, b).tau - brute));
    std::vector<double> distinct(n);
    for (std::size_t i = 0; i < n; ++i) distinct[i] = rng.normal();
    for (std::size_t i = 0; i < n; ++i) rev[i] = -distinct[i];
    worst_extreme = std::max(worst_extreme, std::abs(weighted_kendall_tau(distinct, distinct).tau - 1.0));
    worst_extreme = std::max(worst_extreme, std::abs(weighted_kendall_tau(distinct, rev).tau + 1.0));
  }
  return {worst <= kTauTol && worst_extreme <= kTauTol,
          fmt("100 pairs, max oracle gap %.3g, max |tau -/+ 1| %.3g", worst, worst_extreme)};
}

// ------------------------------------------------------------------ 5

Outcome hand_cases() {
  const std::vector<int> truth{0, 0, 1, 1}, pred{0, 0, 1, 2};
  const double v = v_measure(truth, pred).v_measure;
  const std::vector<int> labels{1, 0, 1, 0};
  const std::vector<double> probs{0.9, 0.9, 0.8, 0.1};
  const double auc = auc_binary(labels, probs);
  const double v_perfect = v_measure(truth, std::vector<int>{1, 1, 0, 0}).v_measure;
  const double auc_perfect = auc_binary(labels, std::vector<double>{0.9, 0.1, 0.8, 0.2});
  const bool pass = std::abs(v - 0.8) <= kHandCaseTol && std::abs(auc - 0.625) <= kHandCaseTol &&
                    v_perfect == 1.0 && auc_perfect == 1.0;
  return {pass, fmt("V %.15g, AUC %.15g", v, auc) + fmt(", perfect V %.17g AUC %.17g", v_perfect, auc_perfect)};
}

// ------------------------------------------------------------------ 6

std::vector<Merge> brute_ward(const Matrix& x) {
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  auto centroid = [&](const std::vector<std::size_t>& c) {
    std::vector<double> m(p, 0.0);
    for (std::size_t r : c) {
      for (std::size_t f = 0; f < p; ++f) m[f] += x(r, f);
    }
    for (double& v : m) v /= static_cast<double>(c.size());
    return m;
  };
  std::vector<Merge> merges;
  while (true) {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < n; ++i) {
      if (!clusters[i].empty()) live.push_back(i);
    }
    if (live.size() < 2) break;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t a = 0; a < live.size(); ++a) {
      for (std::size_t b = a + 1; b < live.size(); ++b) {
        const auto ca = centroid(clusters[live[a]]), cb = centroid(clusters[live[b]]);
        double d2 = 0.0;
        for (std::size_t f = 0; f < p; ++f) d2 += (ca[f] - cb[f]) * (ca[f] - cb[f]);
        const double na = static_cast<double>(clusters[live[a]].size());
        const double nb = static_cast<double>(clusters[live[b]].size());
        const double cost = na * nb / (na + nb) * d2;
        if (cost < best) {
          best = cost;
          bi = live[a];
          bj = live[b];
        }
      }
    }
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters[bj].clear();
    merges.push_back({bi, bj, best, clusters[bi].size()});
  }
  return merges;
}

Outcome ward_oracle() {
  Rng rng(606);
  std::size_t mismatches = 0, largest = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(39);
    largest = std::max(largest, n);
    const Matrix x = random_matrix(n, 1 + rng.below(6), rng);
    const auto fast = ward_linkage(x);
    const auto slow = brute_ward(x);
    if (fast.size() != slow.size()) {
      ++mismatches;
      continue;
    }
    for (std::size_t m = 0; m < fast.size(); ++m) {
      const bool same = fast[m].first == slow[m].first && fast[m].second == slow[m].second &&
                        fast[m].size == slow[m].size &&
                        std::abs(fast[m].cost - slow[m].cost) <= kWardCostTol * std::max(1.0, slow[m].cost);
      if (!same) {
        ++mismatches;
        break;
      }
    }
  }
  return {mismatches == 0, fmt("50 instances (n <= %.0f), %.0f mismatching sequences", largest, mismatches)};
}

// ------------------------------------------------------------------ 7

Outcome rf_sanity() {
  SynthConfig sc;
  sc.view_dims = {500};
  sc.informative = {10};
  sc.samples = 200;
  sc.effect_size = 2.0;
  sc.seed = 2024;
  const SyntheticData s = synth_multiview(sc);
  const MultiViewDataset& ds = s.dataset;
  const auto fit = ds.rows_in({Split::kTrain, Split::kValidation});
  const auto test = ds.rows_in({Split::kTest});
  std::vector<int> ytr, yte;
  for (std::size_t r : fit) ytr.push_back(ds.labels[r]);
  for (std::size_t r : test) yte.push_back(ds.labels[r]);
  const Matrix a = select_rows(ds.views[0].values, fit), b = select_rows(ds.views[0].values, test);
  ForestConfig fc;
  fc.seed = 77;
  const Matrix p1 = rf_fit_predict(a, ytr, b, 2, fc);
  const Matrix p2 = rf_fit_predict(a, ytr, b, 2, fc);
  const double auc = auc_score(yte, p1);
  const bool identical = p1 == p2;
  return {auc >= kRfMinAuc && identical,
          fmt("holdout AUC %.4f on %.0f test rows", auc, static_cast<double>(test.size())) +
              (identical ? ", repeat bit-identical" : ", repeat differs")};
}

// --------------------------------------------------------------- 8..11

json planted_config(const std::string& experiment, std::size_t runs) {
  return {{"experiment", experiment},
          {"seed", 20240601},
          {"runs", runs},
          {"data",
           {{"synthetic",
             {{"view_dims", {138, 1000}},
              {"informative", {20, 20}},
              {"samples", 120},
              {"classes", 2},
              {"effect_size", 1.0},
              {"seed", 31}}}}},
          {"model",
           {{"views", {{{"hidden", {64, 64}}, {"embedding", 16}}, {{"hidden", {128, 128}}, {"embedding", 16}}}},
            {"fusion_hidden", 32}}},
          {"train", {{"max_iterations", 300}, {"patience", 30}}},
          {"sizing", {"static"}},
          {"fusion", {"concat"}},
          {"forest", {{"trees", 300}}}};
}

Outcome compression_trend() {
  json j = planted_config("compression", 5);
  j["noise"] = {{"levels", {0, 500, 2000}}, {"view", 0}};
  const ExperimentReport r = run_compression(parse_config(j), {});
  const double noisy = median(r.values("fusion=concat;sizing=static;noise=2000", "tau_w"));
  const double run_to_run = median(r.values("fusion=concat;sizing=static;noise=0", "tau_run_to_run"));
  const double mid = median(r.values("fusion=concat;sizing=static;noise=500", "tau_w"));
  return {r.failures.empty() && noisy < run_to_run,
          fmt("median tau_w: noise 500 %.4f, noise 2000 %.4f; run-to-run at 0 %.4f", mid, noisy, run_to_run)};
}

Outcome stability_planted() {
  const ExperimentConfig cfg = parse_config(planted_config("stability", 10));
  const PreparedData data = prepare_data(cfg);
  const ExperimentReport r = run_stability(cfg, {});
  const std::string key = "fusion=concat;sizing=static;noise=0;universe=pooled";
  std::size_t features = 0;
  for (const auto& row : r.rows) features += row.condition == key && row.metric == "rank_median";
  const double cutoff = kTopQuarter * static_cast<double>(features);
  double worst = 0.0, spread_sum = 0.0;
  std::size_t inside = 0, found = 0, spreads = 0;
  for (const auto& row : r.rows) {
    if (row.condition != key || row.run >= 0) continue;
    if (row.metric == "rank_spread") {
      spread_sum += row.value;
      ++spreads;
    }
    if (row.metric != "rank_median") continue;
    if (std::find(data.planted.begin(), data.planted.end(), row.feature) == data.planted.end()) continue;
    ++found;
    worst = std::max(worst, row.value);
    inside += row.value <= cutoff;
  }
  const bool pass = r.failures.empty() && found == data.planted.size() && inside == found;
  return {pass, fmt("%.0f/%.0f planted within top 25%% (worst median rank %.0f", inside, found, worst) +
                    fmt(" of %.0f); mean rank spread %.1f", features, spreads ? spread_sum / spreads : 0.0)};
}

Outcome subset_retention() {
  json j = planted_config("subset", 3);
  j["subset"] = {{"percents", {10}}};
  const ExperimentReport r = run_subset(parse_config(j), {});
  const std::string base = "fusion=concat;sizing=static;noise=0;p=";
  const double top = median(r.values(base + "10", "rf_auc"));
  const double all = median(r.values(base + "all", "rf_auc"));
  return {r.failures.empty() && top >= all - kSubsetSlack, fmt("median RF AUC top 10%% %.4f, all features %.4f", top, all)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "shapaudit_acceptance_repro";
  fs::remove_all(root);
  std::size_t compared = 0, differing = 0;
  for (const char* kind : {"compression", "stability", "subset"}) {
    json j = planted_config(kind, 2);
    j["data"]["synthetic"]["view_dims"] = {20, 40};
    j["data"]["synthetic"]["informative"] = {4, 4};
    j["model"]["views"] = {{{"hidden", {16, 16}}, {"embedding", 8}}, {{"hidden", {16, 16}}, {"embedding", 8}}};
    j["train"] = {{"max_iterations", 60}, {"patience", 10}};
    j["forest"] = {{"trees", 50}};
    if (std::string(kind) == "compression") j["noise"] = {{"levels", {0, 20}}};
    const ExperimentConfig cfg = parse_config(j);
    run_and_write(cfg, root / kind / "a");
    run_and_write(cfg, root / kind / "b");
    for (const auto& entry : fs::directory_iterator(root / kind / "a")) {
      const auto ext = entry.path().extension();
      if (entry.path().filename() == "run_info.json") continue;
      if (ext != ".csv" && ext != ".json" && ext != ".svg") continue;
      ++compared;
      differing += slurp(entry.path()) != slurp(root / kind / "b" / entry.path().filename());
    }
  }
  fs::remove_all(root);
  return {compared >= 9 && differing == 0, fmt("%.0f files compared, %.0f differ", compared, differing)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradients},
      {"deepshap completeness", completeness},
      {"linear exactness", affine},
      {"weighted tau oracle", tau_oracle},
      {"v-measure and auc hand cases", hand_cases},
      {"ward oracle", ward_oracle},
      {"random forest sanity", rf_sanity},
      {"noise compression trend", compression_trend},
      {"planted feature stability", stability_planted},
      {"subset retention", subset_retention},
      {"end-to-end reproducibility", reproducibility}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
