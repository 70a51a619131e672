#include "shapaudit/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace shapaudit {

using nlohmann::json;

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kCompression: return "compression";
    case ExperimentKind::kStability: return "stability";
    case ExperimentKind::kSubset: return "subset";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  if (name == "compression") return ExperimentKind::kCompression;
  if (name == "stability") return ExperimentKind::kStability;
  if (name == "subset") return ExperimentKind::kSubset;
  throw ConfigError("unknown experiment '" + name + "' (expected compression, stability or subset)");
}

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require_object(j, where);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

json views_json(const std::vector<ViewLayers>& views) {
  json out = json::array();
  for (const auto& v : views) out.push_back({{"hidden", {v.hidden1, v.hidden2}}, {"embedding", v.embedding}});
  return out;
}

json train_json(const TrainConfig& t) {
  return {{"max_iterations", t.max_iterations},
          {"patience", t.patience},
          {"min_delta", t.min_delta},
          {"dropout", t.dropout_rate},
          {"gamma", t.focal.gamma},
          {"alpha", t.focal.alpha},
          {"lr", t.adam.lr},
          {"beta1", t.adam.beta1},
          {"beta2", t.adam.beta2},
          {"epsilon", t.adam.epsilon},
          {"loss_weights", t.loss_weights}};
}

json config_to_json(const ExperimentConfig& c) {
  json data;
  if (c.data.synthetic) {
    const SynthConfig& s = *c.data.synthetic;
    data["synthetic"] = {{"view_dims", s.view_dims},
                         {"informative", s.informative},
                         {"samples", s.samples},
                         {"classes", s.classes},
                         {"effect_size", s.effect_size},
                         {"seed", s.seed}};
  } else {
    json views = json::array();
    for (const auto& v : c.data.views) views.push_back({{"id", v.id}, {"path", v.path.string()}});
    data["views"] = views;
    data["labels"] = c.data.labels.string();
    data["impute_median"] = c.data.impute_median;
    data["allow_missing_views"] = c.data.allow_missing_views;
  }
  data["fractions"] = {c.data.fractions.train, c.data.fractions.validation, c.data.fractions.test};
  data["split_seed"] = c.data.split_seed ? json(*c.data.split_seed) : json(nullptr);

  std::vector<std::string> sizing, fusion;
  for (auto s : c.sizing) sizing.emplace_back(sizing_name(s));
  for (auto f : c.fusions) fusion.emplace_back(fusion_name(f));
  return {{"experiment", experiment_name(c.kind)},
          {"seed", c.seed},
          {"runs", c.runs},
          {"seeds", c.seeds},
          {"data", data},
          {"model", {{"views", views_json(c.base_views)}, {"fusion_hidden", c.fusion_hidden}}},
          {"train", train_json(c.train)},
          {"noise", {{"levels", c.noise_levels}, {"view", c.noise_view}}},
          {"sizing", sizing},
          {"fusion", fusion},
          {"width_floor", c.width_floor},
          {"hidden_cap", c.hidden_cap},
          {"subset", {{"percents", c.percents}}},
          {"forest",
           {{"trees", c.forest.trees},
            {"max_features", c.forest.max_features},
            {"min_leaf", c.forest.min_leaf},
            {"bootstrap", c.forest.bootstrap}}},
          {"attribution", {{"background", c.background}}},
          {"stability", {{"top_k", c.top_k}}},
          {"plot", {{"x_label", c.x_label}, {"y_label", c.y_label}}}};
}

DatasetSource parse_data(const json& j) {
  const std::string where = "data";
  check_keys(j, where,
             {"synthetic", "views", "labels", "impute_median", "allow_missing_views", "fractions", "split_seed"});
  DatasetSource d;
  if (j.contains("synthetic") == j.contains("views")) {
    throw ConfigError("data: give exactly one of 'synthetic' or 'views'");
  }
  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    check_keys(s, "data.synthetic", {"view_dims", "informative", "samples", "classes", "effect_size", "seed"});
    SynthConfig sc;
    sc.view_dims = get(s, "view_dims", "data.synthetic", sc.view_dims);
    sc.informative = get(s, "informative", "data.synthetic", sc.informative);
    sc.samples = get(s, "samples", "data.synthetic", sc.samples);
    sc.classes = get(s, "classes", "data.synthetic", sc.classes);
    sc.effect_size = get(s, "effect_size", "data.synthetic", sc.effect_size);
    sc.seed = get(s, "seed", "data.synthetic", sc.seed);
    d.synthetic = sc;
  } else {
    const json& views = j.at("views");
    if (!views.is_array() || views.empty()) throw ConfigError("data.views: expected a non-empty array");
    for (const auto& v : views) {
      check_keys(v, "data.views[]", {"id", "path"});
      if (!v.contains("id") || !v.contains("path")) throw ConfigError("data.views[]: needs 'id' and 'path'");
      d.views.push_back({get<std::string>(v, "id", "data.views[]", ""), get<std::string>(v, "path", "data.views[]", "")});
    }
    if (!j.contains("labels")) throw ConfigError("data: CSV input needs a 'labels' file");
    d.labels = get<std::string>(j, "labels", where, "");
    d.impute_median = get(j, "impute_median", where, false);
    d.allow_missing_views = get(j, "allow_missing_views", where, false);
  }
  if (j.contains("fractions")) {
    const auto f = get<std::vector<double>>(j, "fractions", where, {});
    if (f.size() != 3) throw ConfigError("data.fractions: expected [train, validation, test]");
    d.fractions = {f[0], f[1], f[2]};
  }
  if (j.contains("split_seed") && !j.at("split_seed").is_null()) {
    d.split_seed = get<std::uint64_t>(j, "split_seed", where, 0);
  }
  if (d.synthetic) d.synthetic->fractions = d.fractions;
  return d;
}

}  // namespace

TrainConfig parse_train_config(const json& j) {
  const std::string where = "train";
  check_keys(j, where,
             {"max_iterations", "patience", "min_delta", "dropout", "gamma", "alpha", "lr", "beta1", "beta2", "epsilon",
              "loss_weights"});
  TrainConfig t;
  t.max_iterations = get(j, "max_iterations", where, t.max_iterations);
  t.patience = get(j, "patience", where, t.patience);
  t.min_delta = get(j, "min_delta", where, t.min_delta);
  t.dropout_rate = get(j, "dropout", where, t.dropout_rate);
  t.focal.gamma = get(j, "gamma", where, t.focal.gamma);
  t.focal.alpha = get(j, "alpha", where, t.focal.alpha);
  t.adam.lr = get(j, "lr", where, t.adam.lr);
  t.adam.beta1 = get(j, "beta1", where, t.adam.beta1);
  t.adam.beta2 = get(j, "beta2", where, t.adam.beta2);
  t.adam.epsilon = get(j, "epsilon", where, t.adam.epsilon);
  t.loss_weights = get(j, "loss_weights", where, t.loss_weights);
  return t;
}

void ExperimentConfig::validate() const {
  if (runs == 0) throw ConfigError("runs must be >= 1");
  if (!seeds.empty() && seeds.size() != runs) throw ConfigError("seeds: list length must equal runs");
  if (noise_levels.empty()) throw ConfigError("noise.levels: at least one level required");
  if (!std::is_sorted(noise_levels.begin(), noise_levels.end())) throw ConfigError("noise.levels must be sorted");
  if (kind == ExperimentKind::kCompression && noise_levels.front() != 0) {
    throw ConfigError("noise.levels: compression needs the zero-noise level as reference");
  }
  if (sizing.empty() || fusions.empty()) throw ConfigError("sizing and fusion lists must be non-empty");
  for (double p : percents) {
    if (!(p > 0.0 && p <= 100.0)) throw ConfigError("subset.percents must be in (0, 100]");
  }
  if (kind == ExperimentKind::kSubset && percents.empty()) throw ConfigError("subset.percents: none given");
  for (Fusion f : fusions) {
    for (SizingKind s : sizing) {
      if (f == Fusion::kMean && s != SizingKind::kStatic) {
        throw ConfigError(std::string("sizing '") + sizing_name(s) + "' changes embedding widths and needs concat fusion");
      }
    }
  }
  if (width_floor == 0) throw ConfigError("width_floor must be >= 1");
  for (const auto& v : base_views) {
    if (v.hidden1 == 0 || v.hidden2 == 0 || v.embedding == 0) throw ConfigError("model.views: widths must be >= 1");
  }
  if (fusion_hidden == 0) throw ConfigError("model.fusion_hidden must be >= 1");
  if (data.synthetic) {
    try {
      data.synthetic->validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("data.synthetic: ") + e.what());
    }
  }
  try {
    data.fractions.validate();
    forest.validate();
    train.adam.validate();
    if (train.max_iterations == 0 || train.patience >= train.max_iterations) {
      throw std::invalid_argument("train: need 0 < patience < max_iterations");
    }
    if (!(train.dropout_rate >= 0.0 && train.dropout_rate < 1.0)) {
      throw std::invalid_argument("train: dropout must be in [0, 1)");
    }
    if (!(train.min_delta >= 0.0)) throw std::invalid_argument("train: min_delta must be >= 0");
    if (!(train.focal.gamma >= 0.0)) throw std::invalid_argument("train: gamma must be >= 0");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, "config",
             {"experiment", "seed", "runs", "seeds", "data", "model", "train", "noise", "sizing", "fusion", "width_floor",
              "hidden_cap", "subset", "forest", "attribution", "stability", "plot"});
  ExperimentConfig c;
  if (j.contains("experiment")) c.kind = parse_experiment(get<std::string>(j, "experiment", "config", ""));
  c.seed = get(j, "seed", "config", c.seed);
  c.runs = get(j, "runs", "config", c.runs);
  c.seeds = get(j, "seeds", "config", c.seeds);
  if (!j.contains("data")) throw ConfigError("config: missing 'data'");
  c.data = parse_data(j.at("data"));

  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m, "model", {"views", "fusion_hidden"});
    c.fusion_hidden = get(m, "fusion_hidden", "model", c.fusion_hidden);
    if (m.contains("views")) {
      for (const auto& v : m.at("views")) {
        check_keys(v, "model.views[]", {"hidden", "embedding"});
        const auto hidden = get<std::vector<std::size_t>>(v, "hidden", "model.views[]", {64, 64});
        if (hidden.size() != 2) throw ConfigError("model.views[].hidden: expected two widths");
        c.base_views.push_back({0, hidden[0], hidden[1], get<std::size_t>(v, "embedding", "model.views[]", 16)});
      }
    }
  }
  if (j.contains("train")) c.train = parse_train_config(j.at("train"));
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    check_keys(n, "noise", {"levels", "view"});
    c.noise_levels = get(n, "levels", "noise", c.noise_levels);
    c.noise_view = get(n, "view", "noise", c.noise_view);
  }
  try {
    if (j.contains("sizing")) {
      c.sizing.clear();
      for (const auto& s : get<std::vector<std::string>>(j, "sizing", "config", {})) c.sizing.push_back(parse_sizing(s));
    }
    if (j.contains("fusion")) {
      c.fusions.clear();
      for (const auto& f : get<std::vector<std::string>>(j, "fusion", "config", {})) c.fusions.push_back(parse_fusion(f));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.width_floor = get(j, "width_floor", "config", c.width_floor);
  c.hidden_cap = get(j, "hidden_cap", "config", c.hidden_cap);
  if (j.contains("subset")) {
    check_keys(j.at("subset"), "subset", {"percents"});
    c.percents = get(j.at("subset"), "percents", "subset", c.percents);
  }
  if (j.contains("forest")) {
    const json& f = j.at("forest");
    check_keys(f, "forest", {"trees", "max_features", "min_leaf", "bootstrap"});
    c.forest.trees = get(f, "trees", "forest", c.forest.trees);
    c.forest.max_features = get(f, "max_features", "forest", c.forest.max_features);
    c.forest.min_leaf = get(f, "min_leaf", "forest", c.forest.min_leaf);
    c.forest.bootstrap = get(f, "bootstrap", "forest", c.forest.bootstrap);
  }
  if (j.contains("attribution")) {
    check_keys(j.at("attribution"), "attribution", {"background"});
    c.background = get(j.at("attribution"), "background", "attribution", c.background);
  }
  if (j.contains("stability")) {
    check_keys(j.at("stability"), "stability", {"top_k"});
    c.top_k = get(j.at("stability"), "top_k", "stability", c.top_k);
  }
  if (j.contains("plot")) {
    check_keys(j.at("plot"), "plot", {"x_label", "y_label"});
    c.x_label = get<std::string>(j.at("plot"), "x_label", "plot", "");
    c.y_label = get<std::string>(j.at("plot"), "y_label", "plot", "");
  }
  c.validate();
  c.canonical = config_to_json(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  ExperimentConfig cfg = parse_config(j);
  // Relative CSV paths resolve against the config file's directory.
  const auto base = path.parent_path();
  for (auto& v : cfg.data.views) {
    if (v.path.is_relative()) v.path = base / v.path;
  }
  if (!cfg.data.synthetic && cfg.data.labels.is_relative()) cfg.data.labels = base / cfg.data.labels;
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed, std::optional<std::size_t> runs) {
  if (seed) cfg.seed = *seed;
  if (runs) {
    cfg.runs = *runs;
    if (!cfg.seeds.empty() && cfg.seeds.size() != *runs) cfg.seeds.clear();
  }
  cfg.validate();
  cfg.canonical["seed"] = cfg.seed;
  cfg.canonical["runs"] = cfg.runs;
  cfg.canonical["seeds"] = cfg.seeds;
}

}  // namespace shapaudit
