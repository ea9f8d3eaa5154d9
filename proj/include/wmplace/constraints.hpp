#pragma once

#include <optional>
#include <vector>

#include "wmplace/design.hpp"

namespace wmp {

// Exclusive watermark region: exactly the member cells have centers in rect.
struct WatermarkRegion {
  Rect rect;
  std::vector<int> members;  // sorted ascending

  bool is_member(int cell) const {
    return std::binary_search(members.begin(), members.end(), cell);
  }
};

// Fence regions come from the design; the watermark region is optional.
struct RegionConstraintSet {
  std::optional<WatermarkRegion> watermark;

  bool has_watermark() const { return watermark.has_value(); }
  static RegionConstraintSet with_watermark(Rect rect, std::vector<int> members);

  // Throws InvalidParams when members are fixed/unknown, the rect leaves the
  // die or the rect intersects a macro footprint.
  void validate(const Design &design) const;
};

}  // namespace wmp
