#include "shapaudit/multiview/presence_mask.hpp"

#include <stdexcept>
#include <string>

namespace shapaudit {

PresenceMask::PresenceMask(std::size_t samples, std::size_t views)
    : samples_(samples), views_(views), flags_(samples * views, 1) {}

PresenceMask::PresenceMask(std::size_t samples, std::size_t views, std::vector<std::uint8_t> flags)
    : samples_(samples), views_(views), flags_(std::move(flags)) {
  if (flags_.size() != samples * views) {
    throw std::invalid_argument("PresenceMask: flag count does not match samples x views");
  }
  for (std::size_t s = 0; s < samples_; ++s) {
    if (present_count(s) == 0) {
      throw std::invalid_argument("PresenceMask: sample " + std::to_string(s) +
                                  " has no present view");
    }
  }
}

std::size_t PresenceMask::present_count(std::size_t sample) const {
  std::size_t count = 0;
  for (std::size_t v = 0; v < views_; ++v) count += present(sample, v) ? 1 : 0;
  return count;
}

bool PresenceMask::all_present() const {
  for (auto f : flags_) {
    if (f == 0) return false;
  }
  return true;
}

bool PresenceMask::view_complete(std::size_t view) const {
  for (std::size_t s = 0; s < samples_; ++s) {
    if (!present(s, view)) return false;
  }
  return true;
}

PresenceMask PresenceMask::select(std::span<const std::size_t> rows) const {
  std::vector<std::uint8_t> flags;
  flags.reserve(rows.size() * views_);
  for (std::size_t r : rows) {
    if (r >= samples_) throw std::out_of_range("PresenceMask::select: row out of range");
    for (std::size_t v = 0; v < views_; ++v) flags.push_back(present(r, v) ? 1 : 0);
  }
  return PresenceMask(rows.size(), views_, std::move(flags));
}

}  // namespace shapaudit
