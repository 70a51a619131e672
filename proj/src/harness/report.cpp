#include "shapaudit/harness/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "shapaudit/dataio/dataset.hpp"

namespace shapaudit {

using nlohmann::json;

void ExperimentReport::add(const std::string& condition, long run, std::uint64_t seed, const std::string& feature,
                           const std::string& metric, double value) {
  rows.push_back({condition, run, seed, feature, metric, value});
}

std::vector<double> ExperimentReport::values(const std::string& condition, const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.condition == condition && r.metric == metric) out.push_back(r.value);
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "condition,run,seed,feature,metric,value\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.condition) << ',' << r.run << ',' << r.seed << ',' << csv_field(r.feature) << ','
        << csv_field(r.metric) << ',' << format_double(r.value) << '\n';
  }
}

json report_to_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"condition", r.condition},
                    {"run", r.run},
                    {"seed", r.seed},
                    {"feature", r.feature},
                    {"metric", r.metric},
                    {"value", r.value}});
  }
  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"condition", f.condition}, {"run", f.run}, {"seed", f.seed}, {"message", f.message}});
  }
  return {{"experiment", report.experiment},
          {"provenance", {{"config_hash", report.config_hash}, {"code_version", report.code_version}}},
          {"notes", report.notes},
          {"rows", rows},
          {"failures", failures}};
}

void write_report_json(const ExperimentReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << report_to_json(report).dump(1) << '\n';
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.config_hash = j.at("provenance").at("config_hash").get<std::string>();
  r.code_version = j.at("provenance").at("code_version").get<std::string>();
  r.notes = j.value("notes", json::object());
  for (const auto& row : j.at("rows")) {
    r.rows.push_back({row.at("condition").get<std::string>(), row.at("run").get<long>(),
                      row.at("seed").get<std::uint64_t>(), row.at("feature").get<std::string>(),
                      row.at("metric").get<std::string>(), row.at("value").get<double>()});
  }
  for (const auto& f : j.value("failures", json::array())) {
    r.failures.push_back({f.at("condition").get<std::string>(), f.at("run").get<long>(),
                          f.at("seed").get<std::uint64_t>(), f.at("message").get<std::string>()});
  }
  return r;
}

ExperimentReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report " + path.string());
  return report_from_json(json::parse(in));
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_run_info(const std::filesystem::path& path, const std::string& started, const std::string& finished,
                    const std::string& config_hash) {
  auto out = open_out(path);
  out << json{{"started", started}, {"finished", finished}, {"config_hash", config_hash}, {"code_version", kCodeVersion}}
             .dump(1)
      << '\n';
}

}  // namespace shapaudit
