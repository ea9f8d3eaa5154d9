#include <array>

#include "wmplace/metrics.hpp"
#include "wmplace/placer.hpp"
#include "wmplace/segments.hpp"

namespace wmp {

namespace {

struct Span {
  Coord lo, hi;
  int cls;
  std::vector<int> cells;  // sorted by x
};

void subtract(std::vector<Span> &list, Coord a, Coord b) {
  std::vector<Span> out;
  out.reserve(list.size() + 1);
  for (Span &s : list) {
    if (b <= s.lo || a >= s.hi) {
      out.push_back(std::move(s));
      continue;
    }
    if (s.lo < a) out.push_back(Span{s.lo, a, s.cls, {}});
    if (b < s.hi) out.push_back(Span{b, s.hi, s.cls, {}});
  }
  list.swap(out);
}

class DetailedPlacer {
 public:
  DetailedPlacer(const Design &d, const RegionConstraintSet &cons, Placement &p)
      : d_(d), p_(p), net_mark_(d.nets.size(), 0) {
    SegmentMap segs(d, cons, true);
    const Coord rh = d.row_height;
    const int L = segs.num_levels();
    spans_.resize(L);
    for (int l = 0; l < L; ++l) {
      for (const Segment &s : segs.segments(l)) spans_[l].push_back(Span{s.x_lo, s.x_hi, s.cls, {}});
    }
    std::vector<std::pair<int, int>> members;  // (level, cell)
    std::vector<int> obstacles;
    for (const Cell &c : d.cells) {
      if (c.fixed()) continue;
      int level = segs.level_of_y(p.y[c.id]);
      if (c.height > rh || level < 0) {
        obstacles.push_back(c.id);
        continue;
      }
      int cls = cell_class(d, cons, c.id);
      int seg = segs.find_segment(level, p.x[c.id], p.x[c.id] + c.width);
      if (seg < 0 || segs.segments(level)[seg].cls != cls) {
        obstacles.push_back(c.id);
        continue;
      }
      members.emplace_back(level, c.id);
    }
    for (int id : obstacles) {
      const Cell &c = d.cells[id];
      for (int l = 0; l < L; ++l) {
        Coord y = segs.level_y(l);
        if (y < p.y[id] + c.height && y + rh > p.y[id]) subtract(spans_[l], p.x[id], p.x[id] + c.width);
      }
    }
    for (auto [level, id] : members) {
      const Cell &c = d.cells[id];
      int cls = cell_class(d, cons, id);
      for (Span &s : spans_[level]) {
        if (s.cls == cls && p.x[id] >= s.lo && p.x[id] + c.width <= s.hi) {
          s.cells.push_back(id);
          break;
        }
      }
    }
    for (auto &level : spans_) {
      for (Span &s : level) {
        std::sort(s.cells.begin(), s.cells.end(), [&](int a, int b) { return p.x[a] < p.x[b]; });
      }
    }
  }

  int run_pass() {
    int commits = 0;
    for (auto &level : spans_) {
      for (Span &s : level) commits += swap_pass(s);
    }
    for (auto &level : spans_) {
      for (Span &s : level) commits += slide_pass(s);
    }
    for (auto &level : spans_) {
      for (Span &s : level) commits += reorder_pass(s);
    }
    return commits;
  }

 private:
  Coord w(int id) const { return d_.cells[id].width; }

  Coord nets_hpwl(const int *cells, int n) {
    touched_.clear();
    for (int i = 0; i < n; ++i) {
      for (int net : d_.cell_nets[cells[i]]) {
        if (!net_mark_[net]) {
          net_mark_[net] = 1;
          touched_.push_back(net);
        }
      }
    }
    Coord total = 0;
    for (int net : touched_) {
      total += net_hpwl(d_, p_, net);
      net_mark_[net] = 0;
    }
    return total;
  }

  // Applies new x positions; keeps them when HPWL strictly drops.
  bool try_move(const int *cells, const Coord *xs, int n) {
    Coord before = nets_hpwl(cells, n);
    std::array<Coord, 3> old{};
    for (int i = 0; i < n; ++i) {
      old[i] = p_.x[cells[i]];
      p_.x[cells[i]] = xs[i];
    }
    Coord after = nets_hpwl(cells, n);
    if (after < before) return true;
    for (int i = 0; i < n; ++i) p_.x[cells[i]] = old[i];
    return false;
  }

  int swap_pass(Span &s) {
    int commits = 0;
    for (std::size_t i = 0; i + 1 < s.cells.size(); ++i) {
      int a = s.cells[i], b = s.cells[i + 1];
      int ids[2] = {a, b};
      Coord xs[2] = {p_.x[b] + w(b) - w(a), p_.x[a]};
      if (try_move(ids, xs, 2)) {
        std::swap(s.cells[i], s.cells[i + 1]);
        ++commits;
      }
    }
    return commits;
  }

  int slide_pass(Span &s) {
    int commits = 0;
    const std::size_t n = s.cells.size();
    std::vector<Coord> bps;
    for (std::size_t i = 0; i < n; ++i) {
      int id = s.cells[i];
      Coord lo = i > 0 ? p_.x[s.cells[i - 1]] + w(s.cells[i - 1]) : s.lo;
      Coord hi = (i + 1 < n ? p_.x[s.cells[i + 1]] : s.hi) - w(id);
      if (hi <= lo) continue;
      bps.clear();
      for (int net : d_.cell_nets[id]) {
        Coord a = std::numeric_limits<Coord>::max(), b = std::numeric_limits<Coord>::min();
        Coord dmin = std::numeric_limits<Coord>::max(), dmax = std::numeric_limits<Coord>::min();
        for (const Pin &pin : d_.nets[net].pins) {
          if (pin.cell == id) {
            dmin = std::min(dmin, pin.dx);
            dmax = std::max(dmax, pin.dx);
          } else {
            Coord px = p_.x[pin.cell] + pin.dx;
            a = std::min(a, px);
            b = std::max(b, px);
          }
        }
        if (a > b) continue;
        bps.push_back(a - dmin);
        bps.push_back(b - dmax);
      }
      if (bps.empty()) continue;
      std::sort(bps.begin(), bps.end());
      std::size_t m = bps.size() / 2;
      Coord x = p_.x[id];
      Coord target = bps.size() % 2 ? bps[m] : std::clamp(x, bps[m - 1], bps[m]);
      target = std::clamp(target, lo, hi);
      if (target == x) continue;
      if (try_move(&id, &target, 1)) ++commits;
    }
    return commits;
  }

  int reorder_pass(Span &s) {
    int commits = 0;
    static const int perms[5][3] = {{0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (std::size_t i = 0; i + 2 < s.cells.size(); ++i) {
      int c[3] = {s.cells[i], s.cells[i + 1], s.cells[i + 2]};
      Coord start = p_.x[c[0]];
      Coord g1 = p_.x[c[1]] - (p_.x[c[0]] + w(c[0]));
      Coord g2 = p_.x[c[2]] - (p_.x[c[1]] + w(c[1]));
      Coord before = nets_hpwl(c, 3);
      Coord orig[3] = {p_.x[c[0]], p_.x[c[1]], p_.x[c[2]]};
      Coord best = before;
      int best_perm = -1;
      for (int k = 0; k < 5; ++k) {
        const int *pm = perms[k];
        Coord x = start;
        p_.x[c[pm[0]]] = x;
        x += w(c[pm[0]]) + g1;
        p_.x[c[pm[1]]] = x;
        x += w(c[pm[1]]) + g2;
        p_.x[c[pm[2]]] = x;
        Coord h = nets_hpwl(c, 3);
        if (h < best) {
          best = h;
          best_perm = k;
        }
        for (int j = 0; j < 3; ++j) p_.x[c[j]] = orig[j];
      }
      if (best_perm < 0) continue;
      const int *pm = perms[best_perm];
      Coord x = start;
      p_.x[c[pm[0]]] = x;
      x += w(c[pm[0]]) + g1;
      p_.x[c[pm[1]]] = x;
      x += w(c[pm[1]]) + g2;
      p_.x[c[pm[2]]] = x;
      for (int j = 0; j < 3; ++j) s.cells[i + j] = c[pm[j]];
      ++commits;
    }
    return commits;
  }

  const Design &d_;
  Placement &p_;
  std::vector<std::vector<Span>> spans_;
  std::vector<char> net_mark_;
  std::vector<int> touched_;
};

}  // namespace

Placement detailed_place(const Design &design, const Placement &legal, const RegionConstraintSet &constraints,
                         const PlaceParams &params) {
  Placement p = legal;
  p.stage = Stage::Detailed;
  DetailedPlacer dp(design, constraints, p);
  for (int pass = 0; pass < params.dp_passes; ++pass) {
    if (dp.run_pass() == 0) break;
  }
  return p;
}

PipelineResult run_pipeline(const Design &design, const RegionConstraintSet &constraints, const PlaceParams &params,
                            const Placement *warm) {
  PipelineResult r;
  GlobalResult g = global_place_ex(design, constraints, params, warm);
  r.global = std::move(g.placement);
  r.gp_converged = g.converged;
  r.legalized = legalize(design, r.global, constraints);
  r.detailed = detailed_place(design, r.legalized, constraints, params);
  return r;
}

}  // namespace wmp
