#pragma once

#include <filesystem>

#include <json.hpp>

#include "shapaudit/multiview/train.hpp"

namespace shapaudit {

// Self-describing JSON model artifact. Weights are stored as JSON numbers in
// shortest round-trip form, so save/load is bit-exact.
inline constexpr const char* kModelFormat = "shapaudit-model";
inline constexpr int kModelFormatVersion = 1;

nlohmann::json plan_to_json(const LayerPlan& plan);
LayerPlan plan_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace shapaudit
