#include "wmplace/segments.hpp"

namespace wmp {

int cell_class(const Design &design, const RegionConstraintSet &constraints, int cell) {
  const Cell &c = design.cells[cell];
  if (c.region >= 0) return c.region + 1;
  if (constraints.watermark && constraints.watermark->is_member(cell)) {
    return static_cast<int>(design.fences.size()) + 1;
  }
  return 0;
}

namespace {

struct Label {
  Coord x_lo, x_hi;
  int cls;
};

}  // namespace

SegmentMap::SegmentMap(const Design &design, const RegionConstraintSet &constraints,
                       bool split_watermark) {
  const Coord rh = design.row_height;
  const int K = static_cast<int>(design.fences.size());
  num_classes_ = K + 2;
  std::map<Coord, std::vector<std::pair<Coord, Coord>>> spans;
  for (const Row &r : design.rows) spans[r.y].emplace_back(r.x_lo, r.x_hi);

  for (auto &[y, list] : spans) {
    std::sort(list.begin(), list.end());
    const int level = static_cast<int>(level_y_.size());
    level_y_.push_back(y);
    const Coord band_lo = y, band_hi = y + rh;

    std::vector<std::pair<Coord, Coord>> blocks;
    for (const Cell &c : design.cells) {
      if (!c.fixed()) continue;
      if (c.y < band_hi && c.y + c.height > band_lo) blocks.emplace_back(c.x, c.x + c.width);
    }
    std::sort(blocks.begin(), blocks.end());

    std::vector<Label> labels;
    auto add_label = [&](const Rect &r, int cls) {
      if (!(r.y_lo < band_hi && r.y_hi > band_lo)) return;
      bool full = r.y_lo <= band_lo && r.y_hi >= band_hi;
      labels.push_back({r.x_lo, r.x_hi, full ? cls : -1});
    };
    for (int k = 0; k < K; ++k) {
      for (const Rect &r : design.fences[k].rects) add_label(r, k + 1);
    }
    if (split_watermark && constraints.watermark) add_label(constraints.watermark->rect, K + 1);

    std::vector<Segment> out;
    for (auto [lo, hi] : list) {
      // Free pieces of the span after removing blocks.
      std::vector<std::pair<Coord, Coord>> pieces;
      Coord cur = lo;
      for (auto [b_lo, b_hi] : blocks) {
        if (b_hi <= cur) continue;
        if (b_lo >= hi) break;
        if (b_lo > cur) pieces.emplace_back(cur, b_lo);
        cur = std::max(cur, b_hi);
      }
      if (cur < hi) pieces.emplace_back(cur, hi);

      for (auto [p_lo, p_hi] : pieces) {
        std::vector<Coord> cuts{p_lo, p_hi};
        for (const Label &l : labels) {
          if (l.x_lo > p_lo && l.x_lo < p_hi) cuts.push_back(l.x_lo);
          if (l.x_hi > p_lo && l.x_hi < p_hi) cuts.push_back(l.x_hi);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
          Coord a = cuts[i], b = cuts[i + 1];
          int cls = 0;
          for (const Label &l : labels) {
            if (l.x_lo <= a && l.x_hi >= b) {
              cls = l.cls;
              if (cls < 0) break;
            }
          }
          if (cls < 0) continue;
          if (!out.empty() && out.back().x_hi == a && out.back().cls == cls) {
            out.back().x_hi = b;
          } else {
            out.push_back(Segment{level, a, b, cls});
          }
        }
      }
    }
    segs_.push_back(std::move(out));
  }
}

int SegmentMap::level_of_y(Coord y) const {
  auto it = std::lower_bound(level_y_.begin(), level_y_.end(), y);
  if (it == level_y_.end() || *it != y) return -1;
  return static_cast<int>(it - level_y_.begin());
}

int SegmentMap::nearest_level(Coord y) const {
  auto it = std::lower_bound(level_y_.begin(), level_y_.end(), y);
  if (it == level_y_.begin()) return 0;
  if (it == level_y_.end()) return num_levels() - 1;
  int hi = static_cast<int>(it - level_y_.begin());
  return (y - level_y_[hi - 1] <= level_y_[hi] - y) ? hi - 1 : hi;
}

int SegmentMap::find_segment(int level, Coord x_lo, Coord x_hi) const {
  const auto &list = segs_[level];
  auto it = std::upper_bound(list.begin(), list.end(), x_lo,
                             [](Coord x, const Segment &s) { return x < s.x_lo; });
  if (it == list.begin()) return -1;
  --it;
  if (x_lo >= it->x_lo && x_hi <= it->x_hi) return static_cast<int>(it - list.begin());
  return -1;
}

Occupancy::Occupancy(const Design &design, const SegmentMap &segs, const Placement &placement)
    : design_(design),
      segs_(segs),
      occ_(segs.num_levels()),
      cx_(design.cells.size(), 0),
      cy_(design.cells.size(), 0),
      placed_(design.cells.size(), 0) {
  for (const Cell &c : design.cells) {
    if (c.fixed()) continue;
    insert(c.id, placement.x[c.id], placement.y[c.id]);
  }
}

void Occupancy::insert(int cell, Coord x, Coord y) {
  const Cell &c = design_.cells[cell];
  int level = segs_.level_of_y(y);
  if (level < 0) return;
  int levels = static_cast<int>(c.height / design_.row_height);
  for (int k = 0; k < levels && level + k < segs_.num_levels(); ++k) {
    occ_[level + k][x] = {x + c.width, cell};
  }
  cx_[cell] = x;
  cy_[cell] = y;
  placed_[cell] = 1;
}

void Occupancy::remove(int cell) {
  if (!placed_[cell]) return;
  const Cell &c = design_.cells[cell];
  int level = segs_.level_of_y(cy_[cell]);
  int levels = static_cast<int>(c.height / design_.row_height);
  for (int k = 0; k < levels && level + k < segs_.num_levels(); ++k) {
    auto it = occ_[level + k].find(cx_[cell]);
    if (it != occ_[level + k].end() && it->second.second == cell) occ_[level + k].erase(it);
  }
  placed_[cell] = 0;
}

std::pair<Coord, Coord> Occupancy::free_interval(int level, int seg, Coord x_lo, Coord x_hi,
                                                 int ignore) const {
  const Segment &s = segs_.segments(level)[seg];
  if (x_lo < s.x_lo || x_hi > s.x_hi) return {0, 0};
  const auto &m = occ_[level];
  Coord lo = s.x_lo, hi = s.x_hi;
  auto it = m.lower_bound(x_hi);
  for (auto r = it; r != m.end(); ++r) {
    if (r->second.second == ignore) continue;
    hi = std::min(hi, r->first);
    break;
  }
  for (auto l = std::make_reverse_iterator(it); l != m.rend(); ++l) {
    if (l->second.second == ignore) continue;
    if (l->second.first > x_lo) return {0, 0};
    lo = std::max(lo, l->second.first);
    break;
  }
  return {lo, hi};
}

bool Occupancy::is_free(int level, int seg, Coord x_lo, Coord x_hi, int ignore) const {
  auto [lo, hi] = free_interval(level, seg, x_lo, x_hi, ignore);
  return lo <= x_lo && x_hi <= hi && lo < hi;
}

}  // namespace wmp
