#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace shapaudit {

inline constexpr const char* kCodeVersion = "0.1.0";

/// One long-form metric row. run = -1 marks an aggregate over runs.
struct ReportRow {
  std::string condition;
  long run = -1;
  std::uint64_t seed = 0;
  std::string feature;
  std::string metric;
  double value = 0.0;

  bool operator==(const ReportRow&) const = default;
};

struct RunFailure {
  std::string condition;
  long run = -1;
  std::uint64_t seed = 0;
  std::string message;
};

struct ExperimentReport {
  std::string experiment;
  std::string config_hash;
  std::string code_version = kCodeVersion;
  nlohmann::json notes = nlohmann::json::object();
  std::vector<ReportRow> rows;
  std::vector<RunFailure> failures;

  void add(const std::string& condition, long run, std::uint64_t seed, const std::string& feature,
           const std::string& metric, double value);
  std::vector<double> values(const std::string& condition, const std::string& metric) const;
};

/// Columns: condition,run,seed,feature,metric,value.
void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path);
nlohmann::json report_to_json(const ExperimentReport& report);
void write_report_json(const ExperimentReport& report, const std::filesystem::path& path);
ExperimentReport report_from_json(const nlohmann::json& j);
ExperimentReport load_report(const std::filesystem::path& path);

/// Wall-clock provenance lives apart from the report so that report files
/// stay byte-identical across reruns.
void write_run_info(const std::filesystem::path& path, const std::string& started, const std::string& finished,
                    const std::string& config_hash);
std::string utc_timestamp();

}  // namespace shapaudit
