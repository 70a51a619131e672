#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include "shapaudit/dataio/dataset.hpp"

namespace shapaudit {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Comma-separated fields with optional double quotes ("" escapes a quote).
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "N/A";
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": empty file");
  return rows;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

ViewMatrix load_view_csv(const std::filesystem::path& path, const std::string& view_id,
                         const CsvOptions& options) {
  const auto rows = read_rows(path);
  const auto& header = rows.front();
  if (header.size() < 2) throw std::runtime_error(path.string() + ": header has no feature columns");

  ViewMatrix view;
  view.view_id = view_id;
  view.feature_names.assign(header.begin() + 1, header.end());
  const std::size_t n = rows.size() - 1;
  const std::size_t d = view.feature_names.size();
  if (n == 0) throw std::runtime_error(path.string() + ": no data rows");

  Matrix values(n, d);
  std::vector<std::pair<std::size_t, std::size_t>> missing;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = rows[r + 1];
    const std::size_t line_no = r + 2;
    if (row.size() != d + 1) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(d + 1) + " cells, found " + std::to_string(row.size()));
    }
    view.sample_ids.push_back(row[0]);
    for (std::size_t c = 0; c < d; ++c) {
      const std::string& cell = row[c + 1];
      if (is_missing(cell)) {
        if (!options.impute_median) {
          throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                   ": missing cell in column '" + view.feature_names[c] +
                                   "' (median imputation not enabled)");
        }
        missing.emplace_back(r, c);
        continue;
      }
      double value = 0.0;
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      if (!cell.empty() && *begin == '+') ++begin;
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": non-numeric cell '" + cell + "' in column '" +
                                 view.feature_names[c] + "'");
      }
      values(r, c) = value;
    }
  }

  if (!missing.empty()) {
    std::vector<bool> is_gap(n * d, false);
    for (auto [r, c] : missing) is_gap[r * d + c] = true;
    std::vector<double> medians(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
      std::vector<double> observed;
      for (std::size_t r = 0; r < n; ++r) {
        if (!is_gap[r * d + c]) observed.push_back(values(r, c));
      }
      if (observed.empty()) {
        throw std::runtime_error(path.string() + ": column '" + view.feature_names[c] +
                                 "' has no observed values to impute from");
      }
      std::sort(observed.begin(), observed.end());
      const std::size_t m = observed.size();
      medians[c] = m % 2 == 1 ? observed[m / 2] : 0.5 * (observed[m / 2 - 1] + observed[m / 2]);
    }
    for (auto [r, c] : missing) values(r, c) = medians[c];
  }

  view.values = std::move(values);
  try {
    view.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return view;
}

void write_view_csv(const ViewMatrix& view, const std::filesystem::path& path) {
  view.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sample_id";
  for (const auto& name : view.feature_names) out << ',' << quote_if_needed(name);
  out << '\n';
  for (std::size_t r = 0; r < view.samples(); ++r) {
    out << quote_if_needed(view.sample_ids[r]);
    for (double v : view.values.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

LabelTable load_labels_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  LabelTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) {
      throw std::runtime_error(path.string() + ":" + std::to_string(r + 1) +
                               ": expected sample_id,label");
    }
    if (rows[r][1].empty()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(r + 1) + ": empty label");
    }
    table.sample_ids.push_back(rows[r][0]);
    table.labels.push_back(rows[r][1]);
  }
  if (table.sample_ids.empty()) throw std::runtime_error(path.string() + ": no labelled samples");
  return table;
}

void write_labels_csv(const LabelTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sample_id,label\n";
  for (std::size_t i = 0; i < table.sample_ids.size(); ++i) {
    out << quote_if_needed(table.sample_ids[i]) << ',' << quote_if_needed(table.labels[i]) << '\n';
  }
}

namespace {

std::string hex_digest(const unsigned char* digest, unsigned int len) {
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string sha256_bytes(const char* data, std::size_t size) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data, size, digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  return hex_digest(digest.data(), len);
}

}  // namespace

std::string sha256_string(std::string_view text) { return sha256_bytes(text.data(), text.size()); }

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_string(buffer.str());
}

}  // namespace shapaudit
