#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace shapaudit {

/// Per-sample, per-view "view was measured" flags.
class PresenceMask {
 public:
  PresenceMask() = default;
  /// All views present for all samples.
  PresenceMask(std::size_t samples, std::size_t views);
  /// Row-major flags (sample-major); every sample needs one present view.
  PresenceMask(std::size_t samples, std::size_t views, std::vector<std::uint8_t> flags);

  std::size_t samples() const { return samples_; }
  std::size_t views() const { return views_; }
  bool present(std::size_t sample, std::size_t view) const {
    return flags_[sample * views_ + view] != 0;
  }
  std::size_t present_count(std::size_t sample) const;
  bool all_present() const;
  bool view_complete(std::size_t view) const;

  PresenceMask select(std::span<const std::size_t> rows) const;

  bool operator==(const PresenceMask&) const = default;

 private:
  std::size_t samples_ = 0;
  std::size_t views_ = 0;
  std::vector<std::uint8_t> flags_;
};

}  // namespace shapaudit
