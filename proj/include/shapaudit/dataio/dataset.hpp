#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shapaudit/multiview/presence_mask.hpp"
#include "shapaudit/nncore/matrix.hpp"
#include "shapaudit/nncore/rng.hpp"

namespace shapaudit {

/// One omics view: samples x features with names.
struct ViewMatrix {
  std::string view_id;
  std::vector<std::string> sample_ids;
  std::vector<std::string> feature_names;
  Matrix values;

  std::size_t samples() const { return values.rows(); }
  std::size_t features() const { return values.cols(); }
  /// Throws std::invalid_argument on duplicate ids/names, size mismatch or
  /// non-finite values.
  void validate() const;

  bool operator==(const ViewMatrix&) const = default;
};

enum class Split : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

const char* split_name(Split split);

struct SplitFractions {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;

  void validate() const;
};

/// Row-aligned views plus labels, split tags and the presence mask.
struct MultiViewDataset {
  std::vector<ViewMatrix> views;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<Split> splits;
  PresenceMask mask;

  std::size_t samples() const { return labels.size(); }
  std::size_t num_views() const { return views.size(); }
  std::size_t num_classes() const { return class_names.size(); }
  const std::vector<std::string>& sample_ids() const { return views.front().sample_ids; }
  std::vector<std::size_t> view_dims() const;

  /// Indices of rows whose split tag is one of `wanted`, in dataset order.
  std::vector<std::size_t> rows_in(std::initializer_list<Split> wanted) const;

  void validate() const;
};

// ---------------------------------------------------------------- CSV input

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

struct CsvOptions {
  /// Replace missing cells ("", NA, NaN) with the feature's median over the
  /// observed cells. Off by default: missing cells are an error.
  bool impute_median = false;
};

/// Reads a view CSV: header row `sample_id,<feature names...>`, one row per
/// sample. Errors name the offending row/column.
ViewMatrix load_view_csv(const std::filesystem::path& path, const std::string& view_id,
                         const CsvOptions& options = {});

/// Writes values in shortest round-trip decimal form; load_view_csv reads the
/// file back bit-exactly.
void write_view_csv(const ViewMatrix& view, const std::filesystem::path& path);

struct LabelTable {
  std::vector<std::string> sample_ids;
  std::vector<std::string> labels;
};

/// Two-column CSV: sample_id,label.
LabelTable load_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const LabelTable& table, const std::filesystem::path& path);

struct AssemblyOptions {
  /// When false, every view must contain every labelled sample. When true,
  /// absent samples are zero-filled and flagged in the presence mask.
  bool allow_missing_views = false;
};

/// Aligns views to the label table's sample order. Class names are the sorted
/// distinct labels; every sample starts in the training split.
MultiViewDataset assemble_dataset(std::vector<ViewMatrix> views, const LabelTable& labels,
                                  const AssemblyOptions& options = {});

// ------------------------------------------------------------ preparation

/// Stratified split. Per class, counts follow the fractions by largest
/// remainder, so each is within one sample of the exact proportion.
std::vector<Split> stratified_split(std::span<const int> labels, const SplitFractions& fractions,
                                    Rng& rng);

struct FeatureTransform {
  std::vector<double> mean;
  std::vector<double> sd;  // 0 marks a constant feature
};

struct StandardizationRecord {
  std::vector<FeatureTransform> views;
};

inline constexpr double kConstantFeatureSd = 1e-12;

/// Fits per-feature (mean, population sd) on the training rows (present views
/// only) and applies the transform to every row.
StandardizationRecord fit_standardization(const MultiViewDataset& dataset);
MultiViewDataset apply_standardization(const MultiViewDataset& dataset,
                                       const StandardizationRecord& record);

struct StandardizedDataset {
  MultiViewDataset dataset;
  StandardizationRecord record;
};

StandardizedDataset zscore_standardize(const MultiViewDataset& dataset);

// -------------------------------------------------------------- synthetic

struct SynthConfig {
  std::vector<std::size_t> view_dims{138, 1000};
  std::vector<std::size_t> informative{20, 20};
  std::size_t samples = 120;
  std::size_t classes = 2;
  double effect_size = 1.0;
  std::uint64_t seed = 0;
  SplitFractions fractions;

  void validate() const;
};

struct FeatureRef {
  std::size_t view = 0;
  std::size_t feature = 0;
  bool operator==(const FeatureRef&) const = default;
  auto operator<=>(const FeatureRef&) const = default;
};

struct SyntheticData {
  MultiViewDataset dataset;
  std::vector<FeatureRef> informative;
};

/// Background features ~ N(0, 1); informative features get a class-dependent
/// shift of +effect_size or -effect_size. Views are named "view<k>",
/// features "v<k>_f<j>", samples "s<i>".
SyntheticData synth_multiview(const SynthConfig& config);

// ---------------------------------------------------------------- manifest

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_string(std::string_view text);

}  // namespace shapaudit
