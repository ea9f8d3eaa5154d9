#pragma once

#include <map>
#include <vector>

#include "wmplace/constraints.hpp"
#include "wmplace/design.hpp"

namespace wmp {

// Region classes: 0 = default area, 1..K = fence k-1, K+1 = watermark region.
// Class -1 marks row pieces nobody may use (a region only partly covering the
// row band).
int cell_class(const Design &design, const RegionConstraintSet &constraints, int cell);

struct Segment {
  int level = 0;
  Coord x_lo = 0;
  Coord x_hi = 0;
  int cls = 0;
  Coord length() const { return x_hi - x_lo; }
};

// Per row level (distinct row y), the row spans minus fixed obstacles, cut at
// fence / watermark rect boundaries and tagged with the region class.
class SegmentMap {
 public:
  SegmentMap(const Design &design, const RegionConstraintSet &constraints,
             bool split_watermark = true);

  int num_levels() const { return static_cast<int>(level_y_.size()); }
  Coord level_y(int level) const { return level_y_[level]; }
  // -1 when y is not a row origin.
  int level_of_y(Coord y) const;
  // Level whose origin is nearest to y (ties to the lower level).
  int nearest_level(Coord y) const;
  const std::vector<Segment> &segments(int level) const { return segs_[level]; }
  // Index of the segment of `level` containing [x_lo, x_hi), or -1.
  int find_segment(int level, Coord x_lo, Coord x_hi) const;
  int num_classes() const { return num_classes_; }

 private:
  std::vector<Coord> level_y_;
  std::vector<std::vector<Segment>> segs_;
  int num_classes_ = 1;
};

// Movable-cell occupancy per level: x_lo -> (x_hi, cell).
class Occupancy {
 public:
  Occupancy(const Design &design, const SegmentMap &segs, const Placement &placement);

  // Free gap around [x_lo, x_hi) on `level` within segment `seg`, ignoring
  // cell `ignore`: returns (lo, hi) of the maximal free interval containing
  // the span, or an empty interval (lo >= hi) when the span is occupied.
  std::pair<Coord, Coord> free_interval(int level, int seg, Coord x_lo, Coord x_hi,
                                        int ignore = -1) const;
  bool is_free(int level, int seg, Coord x_lo, Coord x_hi, int ignore = -1) const;
  void remove(int cell);
  void insert(int cell, Coord x, Coord y);
  const std::map<Coord, std::pair<Coord, int>> &level_map(int level) const { return occ_[level]; }

 private:
  const Design &design_;
  const SegmentMap &segs_;
  std::vector<std::map<Coord, std::pair<Coord, int>>> occ_;
  std::vector<Coord> cx_, cy_;
  std::vector<char> placed_;
};

}  // namespace wmp
