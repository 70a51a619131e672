#include "shapaudit/multiview/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace shapaudit {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
}

Matrix matrix_from_json(const json& j) {
  return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                j.at("data").get<std::vector<double>>());
}

json dense_to_json(const Dense& d) {
  return json{{"weight", matrix_to_json(d.weight)}, {"bias", matrix_to_json(d.bias)}};
}

Dense dense_from_json(const json& j) {
  return {matrix_from_json(j.at("weight")), matrix_from_json(j.at("bias"))};
}

void check_shape(const Matrix& got, const Matrix& want, const char* what) {
  if (got.rows() != want.rows() || got.cols() != want.cols()) {
    throw std::invalid_argument(std::string("model artifact: ") + what + " has shape " +
                                got.shape_string() + ", plan needs " + want.shape_string());
  }
}

}  // namespace

json plan_to_json(const LayerPlan& plan) {
  json views = json::array();
  for (const auto& v : plan.views) {
    views.push_back({{"input_dim", v.input_dim},
                     {"hidden", {v.hidden1, v.hidden2}},
                     {"embedding", v.embedding}});
  }
  return json{{"views", views},
              {"fusion", fusion_name(plan.fusion)},
              {"fusion_hidden", plan.fusion_hidden},
              {"num_classes", plan.num_classes},
              {"activation", plan.activation == Activation::kRelu ? "relu" : "identity"}};
}

LayerPlan plan_from_json(const json& j) {
  LayerPlan plan;
  for (const auto& v : j.at("views")) {
    const auto hidden = v.at("hidden").get<std::vector<std::size_t>>();
    if (hidden.size() != 2) throw std::invalid_argument("layer plan: 'hidden' needs two widths");
    plan.views.push_back({v.at("input_dim").get<std::size_t>(), hidden[0], hidden[1],
                          v.at("embedding").get<std::size_t>()});
  }
  plan.fusion = parse_fusion(j.at("fusion").get<std::string>());
  plan.fusion_hidden = j.at("fusion_hidden").get<std::size_t>();
  plan.num_classes = j.at("num_classes").get<std::size_t>();
  const std::string act = j.value("activation", "relu");
  if (act == "relu") {
    plan.activation = Activation::kRelu;
  } else if (act == "identity") {
    plan.activation = Activation::kIdentity;
  } else {
    throw std::invalid_argument("layer plan: unknown activation '" + act + "'");
  }
  plan.validate();
  return plan;
}

json model_to_json(const TrainedModel& model) {
  json views = json::array();
  for (const auto& v : model.params.views) {
    views.push_back({{"hidden1", dense_to_json(v.hidden1)},
                     {"hidden2", dense_to_json(v.hidden2)},
                     {"embedding", dense_to_json(v.embedding)},
                     {"head", dense_to_json(v.head)}});
  }
  json history = json::array();
  for (const auto& h : model.history) {
    history.push_back({{"phase", h.phase == Phase::kPlateauSearch ? "plateau" : "final"},
                       {"iteration", h.iteration},
                       {"train_loss", h.train_loss},
                       {"validation_loss", h.validation_loss ? json(*h.validation_loss) : json(nullptr)}});
  }
  return json{{"format", kModelFormat},
              {"version", kModelFormatVersion},
              {"plan", plan_to_json(model.plan)},
              {"dropout_rate", model.dropout_rate},
              {"seeds", {{"init_seed", model.seeds.init_seed}, {"dropout_stream", model.seeds.dropout_stream}}},
              {"plateau_iteration", model.plateau_iteration},
              {"final_iterations", model.final_iterations},
              {"params",
               {{"views", views},
                {"fusion_hidden", dense_to_json(model.params.fusion_hidden)},
                {"output", dense_to_json(model.params.output)}}},
              {"history", history}};
}

TrainedModel model_from_json(const json& j) {
  if (j.value("format", "") != kModelFormat) throw std::invalid_argument("not a shapaudit model artifact");
  if (j.at("version").get<int>() != kModelFormatVersion) {
    throw std::invalid_argument("unsupported model artifact version");
  }
  TrainedModel m;
  m.plan = plan_from_json(j.at("plan"));
  m.dropout_rate = j.at("dropout_rate").get<double>();
  m.seeds.init_seed = j.at("seeds").at("init_seed").get<std::uint64_t>();
  m.seeds.dropout_stream = j.at("seeds").at("dropout_stream").get<std::uint64_t>();
  m.plateau_iteration = j.at("plateau_iteration").get<std::size_t>();
  m.final_iterations = j.at("final_iterations").get<std::size_t>();

  const json& p = j.at("params");
  for (const auto& v : p.at("views")) {
    m.params.views.push_back({dense_from_json(v.at("hidden1")), dense_from_json(v.at("hidden2")),
                              dense_from_json(v.at("embedding")), dense_from_json(v.at("head"))});
  }
  m.params.fusion_hidden = dense_from_json(p.at("fusion_hidden"));
  m.params.output = dense_from_json(p.at("output"));

  const ModelParams expected = zero_params(m.plan);
  if (expected.views.size() != m.params.views.size()) {
    throw std::invalid_argument("model artifact: view count differs from plan");
  }
  std::vector<const Matrix*> want;
  expected.for_each_tensor([&](const Matrix& t) { want.push_back(&t); });
  std::size_t k = 0;
  m.params.for_each_tensor([&](const Matrix& t) { check_shape(t, *want[k++], "tensor"); });

  for (const auto& h : j.at("history")) {
    HistoryEntry e;
    e.phase = h.at("phase").get<std::string>() == "plateau" ? Phase::kPlateauSearch : Phase::kFinal;
    e.iteration = h.at("iteration").get<std::size_t>();
    e.train_loss = h.at("train_loss").get<double>();
    if (!h.at("validation_loss").is_null()) e.validation_loss = h.at("validation_loss").get<double>();
    m.history.push_back(e);
  }
  return m;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << model_to_json(model).dump() << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return model_from_json(json::parse(in));
}

}  // namespace shapaudit
