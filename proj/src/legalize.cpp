#include <cmath>
#include <limits>

#include "wmplace/errors.hpp"
#include "wmplace/placer.hpp"
#include "wmplace/segments.hpp"

namespace wmp {

namespace {

struct Interval {
  Coord lo, hi;
  int cls;
};

struct Cluster {
  Coord x = 0;
  Coord e = 0;    // cell count (unit weights)
  double q = 0.0;
  Coord w = 0;
};

struct SubRow {
  int level = 0;
  Coord lo = 0, hi = 0;
  int cls = 0;
  Coord used = 0;
  std::vector<Cluster> clusters;
  std::vector<int> cells;

  Coord place_x(const Cluster &c) const {
    Coord x = std::llround(c.q / static_cast<double>(c.e));
    return std::clamp(x, lo, std::max(lo, hi - c.w));
  }
  static Cluster merge(const Cluster &left, const Cluster &right) {
    Cluster m;
    m.e = left.e + right.e;
    m.q = left.q + right.q - static_cast<double>(right.e * left.w);
    m.w = left.w + right.w;
    return m;
  }
  // Final x of a new cell appended at target tx; commits when `commit`.
  Coord append(Coord tx, Coord w, bool commit) {
    Cluster cur;
    std::size_t j = clusters.size();
    Coord start = std::clamp(tx, lo, std::max(lo, hi - w));
    if (j > 0 && clusters[j - 1].x + clusters[j - 1].w > start) {
      Cluster cell{0, 1, static_cast<double>(tx), w};
      cur = merge(clusters[j - 1], cell);
      --j;
    } else {
      cur = Cluster{0, 1, static_cast<double>(tx), w};
    }
    cur.x = place_x(cur);
    while (j > 0 && clusters[j - 1].x + clusters[j - 1].w > cur.x) {
      cur = merge(clusters[j - 1], cur);
      cur.x = place_x(cur);
      --j;
    }
    if (commit) {
      clusters.resize(j);
      clusters.push_back(cur);
      used += w;
    }
    return cur.x + cur.w - w;
  }
};

void carve(std::vector<Interval> &list, Coord x_lo, Coord x_hi) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    Interval iv = list[i];
    if (x_lo >= iv.lo && x_hi <= iv.hi) {
      list.erase(list.begin() + static_cast<long>(i));
      if (x_hi < iv.hi) list.insert(list.begin() + static_cast<long>(i), Interval{x_hi, iv.hi, iv.cls});
      if (iv.lo < x_lo) list.insert(list.begin() + static_cast<long>(i), Interval{iv.lo, x_lo, iv.cls});
      return;
    }
  }
}

// Levels in order of increasing |y - ty| (ties to the lower level).
std::vector<int> levels_by_distance(const SegmentMap &segs, Coord ty) {
  std::vector<int> out;
  int n = segs.num_levels();
  if (n == 0) return out;
  int down = segs.nearest_level(ty), up = down + 1;
  while (down >= 0 || up < n) {
    if (down >= 0 && (up >= n || std::abs(segs.level_y(down) - ty) <= std::abs(segs.level_y(up) - ty))) {
      out.push_back(down--);
    } else {
      out.push_back(up++);
    }
  }
  return out;
}

}  // namespace

Placement legalize(const Design &design, const Placement &global, const RegionConstraintSet &constraints) {
  const Coord rh = design.row_height;
  SegmentMap segs(design, constraints, true);
  const int L = segs.num_levels();
  std::vector<std::vector<Interval>> free(L);
  for (int l = 0; l < L; ++l) {
    for (const Segment &s : segs.segments(l)) free[l].push_back({s.x_lo, s.x_hi, s.cls});
  }
  Placement out = global;
  out.stage = Stage::Legalized;
  for (const Cell &c : design.cells) {
    if (c.fixed()) {
      out.x[c.id] = c.x;
      out.y[c.id] = c.y;
    }
  }

  std::vector<int> multi, single;
  for (const Cell &c : design.cells) {
    if (c.fixed()) continue;
    (c.height > rh ? multi : single).push_back(c.id);
  }
  auto by_target = [&](int a, int b) {
    if (global.x[a] != global.x[b]) return global.x[a] < global.x[b];
    return a < b;
  };
  std::sort(multi.begin(), multi.end(), [&](int a, int b) {
    if (design.cells[a].height != design.cells[b].height) return design.cells[a].height > design.cells[b].height;
    return by_target(a, b);
  });
  std::sort(single.begin(), single.end(), by_target);

  for (int id : multi) {
    const Cell &c = design.cells[id];
    const int k = static_cast<int>(c.height / rh);
    const int cls = cell_class(design, constraints, id);
    const Coord tx = global.x[id], ty = global.y[id];
    Coord best = std::numeric_limits<Coord>::max(), bx = 0;
    int bl = -1;
    for (int l : levels_by_distance(segs, ty)) {
      Coord dy = segs.level_y(l) - ty;
      if (dy * dy >= best) break;
      if (l + k > L) continue;
      bool stacked = true;
      for (int j = 1; j < k; ++j) stacked = stacked && segs.level_y(l + j) == segs.level_y(l) + j * rh;
      if (!stacked) continue;
      std::vector<std::pair<Coord, Coord>> common;
      for (const Interval &iv : free[l]) {
        if (iv.cls == cls) common.emplace_back(iv.lo, iv.hi);
      }
      for (int j = 1; j < k && !common.empty(); ++j) {
        std::vector<std::pair<Coord, Coord>> next;
        for (auto [a, b] : common) {
          for (const Interval &iv : free[l + j]) {
            if (iv.cls != cls) continue;
            Coord lo = std::max(a, iv.lo), hi = std::min(b, iv.hi);
            if (lo < hi) next.emplace_back(lo, hi);
          }
        }
        common.swap(next);
      }
      for (auto [a, b] : common) {
        if (b - a < c.width) continue;
        Coord x = std::clamp(tx, a, b - c.width);
        Coord cost = (x - tx) * (x - tx) + dy * dy;
        if (cost < best) {
          best = cost;
          bx = x;
          bl = l;
        }
      }
    }
    if (bl < 0) throw LegalizationOverflow("no aligned row span can host multi-row cell " + c.name);
    for (int j = 0; j < k; ++j) carve(free[bl + j], bx, bx + c.width);
    out.x[id] = bx;
    out.y[id] = segs.level_y(bl);
  }

  std::vector<std::vector<SubRow>> rows(L);
  for (int l = 0; l < L; ++l) {
    for (const Interval &iv : free[l]) {
      SubRow s;
      s.level = l;
      s.lo = iv.lo;
      s.hi = iv.hi;
      s.cls = iv.cls;
      rows[l].push_back(std::move(s));
    }
  }

  for (int id : single) {
    const Cell &c = design.cells[id];
    const int cls = cell_class(design, constraints, id);
    const Coord tx = global.x[id], ty = global.y[id];
    Coord best = std::numeric_limits<Coord>::max();
    SubRow *pick = nullptr;
    for (int l : levels_by_distance(segs, ty)) {
      Coord dy = segs.level_y(l) - ty;
      Coord dy2 = dy * dy;
      if (dy2 >= best) break;
      for (SubRow &s : rows[l]) {
        if (s.cls != cls || s.used + c.width > s.hi - s.lo) continue;
        Coord gap = tx < s.lo ? s.lo - tx : (tx > s.hi - c.width ? tx - (s.hi - c.width) : 0);
        if (gap * gap + dy2 >= best) continue;
        Coord x = s.append(tx, c.width, false);
        Coord cost = (x - tx) * (x - tx) + dy2;
        if (cost < best) {
          best = cost;
          pick = &s;
        }
      }
    }
    if (!pick) {
      throw LegalizationOverflow("no row segment of class " + std::to_string(cls) + " can host cell " + c.name);
    }
    pick->append(tx, c.width, true);
    pick->cells.push_back(id);
    out.y[id] = segs.level_y(pick->level);
  }

  for (auto &level : rows) {
    for (SubRow &s : level) {
      std::size_t next = 0;
      for (const Cluster &cl : s.clusters) {
        Coord x = cl.x;
        for (Coord i = 0; i < cl.e; ++i) {
          int id = s.cells[next++];
          out.x[id] = x;
          x += design.cells[id].width;
        }
      }
    }
  }
  return out;
}

}  // namespace wmp
