#include "wmplace/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "wmplace/errors.hpp"

namespace wmp {

RegionConstraintSet RegionConstraintSet::with_watermark(Rect rect, std::vector<int> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  RegionConstraintSet set;
  set.watermark = WatermarkRegion{rect, std::move(members)};
  return set;
}

void RegionConstraintSet::validate(const Design &design) const {
  if (!watermark) return;
  const WatermarkRegion &wm = *watermark;
  if (!wm.rect.valid() || !design.die.contains(wm.rect)) {
    throw InvalidParams("watermark region must be a non-empty rect inside the die");
  }
  for (int id : wm.members) {
    if (id < 0 || id >= design.num_cells()) throw InvalidParams("watermark member id out of range");
    if (design.cells[id].fixed()) {
      throw InvalidParams("watermark member " + design.cells[id].name + " is fixed");
    }
  }
  for (const Cell &c : design.cells) {
    if (c.kind == CellKind::Macro &&
        wm.rect.intersects(Rect{c.x, c.y, c.x + c.width, c.y + c.height})) {
      throw InvalidParams("watermark region intersects macro " + c.name);
    }
  }
}

Coord net_hpwl(const Design &design, const Placement &p, int net) {
  const Net &n = design.nets[net];
  if (n.pins.empty()) return 0;
  Coord x_lo = std::numeric_limits<Coord>::max(), x_hi = std::numeric_limits<Coord>::min();
  Coord y_lo = x_lo, y_hi = x_hi;
  for (const Pin &pin : n.pins) {
    Coord px = p.x[pin.cell] + pin.dx;
    Coord py = p.y[pin.cell] + pin.dy;
    x_lo = std::min(x_lo, px);
    x_hi = std::max(x_hi, px);
    y_lo = std::min(y_lo, py);
    y_hi = std::max(y_hi, py);
  }
  return (x_hi - x_lo) + (y_hi - y_lo);
}

Coord hpwl(const Design &design, const Placement &p) {
  Coord total = 0;
  for (const Net &n : design.nets) total += net_hpwl(design, p, n.id);
  return total;
}

double pwlr(double wm_hpwl, double orig_hpwl) {
  if (!(orig_hpwl > 0.0)) throw InvalidBaseline("original HPWL must be positive");
  return wm_hpwl / orig_hpwl;
}

double DensityGrid::max_occupancy() const {
  double m = 0.0;
  for (double v : occupancy) m = std::max(m, v);
  return m;
}

DensityGrid density_map(const Design &design, const Placement &p, int bins_x, int bins_y) {
  if (bins_x < 1 || bins_y < 1) throw InvalidParams("density grid needs at least one bin per axis");
  DensityGrid g;
  g.bins_x = bins_x;
  g.bins_y = bins_y;
  g.area = design.die;
  g.occupancy.assign(static_cast<std::size_t>(bins_x) * bins_y, 0.0);
  const double bw = static_cast<double>(g.area.width()) / bins_x;
  const double bh = static_cast<double>(g.area.height()) / bins_y;
  const double ba = bw * bh;
  for (const Cell &c : design.cells) {
    Rect b = p.box(design, c.id);
    double x0 = static_cast<double>(std::max(b.x_lo, g.area.x_lo) - g.area.x_lo);
    double x1 = static_cast<double>(std::min(b.x_hi, g.area.x_hi) - g.area.x_lo);
    double y0 = static_cast<double>(std::max(b.y_lo, g.area.y_lo) - g.area.y_lo);
    double y1 = static_cast<double>(std::min(b.y_hi, g.area.y_hi) - g.area.y_lo);
    if (x1 <= x0 || y1 <= y0) continue;
    int ix0 = std::clamp(static_cast<int>(std::floor(x0 / bw)), 0, bins_x - 1);
    int ix1 = std::clamp(static_cast<int>(std::ceil(x1 / bw)) - 1, 0, bins_x - 1);
    int iy0 = std::clamp(static_cast<int>(std::floor(y0 / bh)), 0, bins_y - 1);
    int iy1 = std::clamp(static_cast<int>(std::ceil(y1 / bh)) - 1, 0, bins_y - 1);
    for (int iy = iy0; iy <= iy1; ++iy) {
      double oy = std::min(y1, (iy + 1) * bh) - std::max(y0, iy * bh);
      if (oy <= 0) continue;
      for (int ix = ix0; ix <= ix1; ++ix) {
        double ox = std::min(x1, (ix + 1) * bw) - std::max(x0, ix * bw);
        if (ox <= 0) continue;
        g.occupancy[static_cast<std::size_t>(iy) * bins_x + ix] += ox * oy / ba;
      }
    }
  }
  return g;
}

std::string LegalityReport::summary() const {
  std::ostringstream s;
  s << overlap_pairs.size() << " overlaps, " << off_row_cells.size() << " off-row, "
    << out_of_die_cells.size() << " out-of-die, " << fence_violations.size()
    << " region violations";
  return s.str();
}

LegalityReport check_legal(const Design &design, const Placement &p,
                           const RegionConstraintSet &constraints) {
  LegalityReport rep;
  const Coord rh = design.row_height;
  std::map<Coord, std::vector<const Row *>> rows;
  for (const Row &r : design.rows) rows[r.y].push_back(&r);
  for (auto &[y, list] : rows) {
    std::sort(list.begin(), list.end(), [](const Row *a, const Row *b) { return a->x_lo < b->x_lo; });
  }

  struct Item {
    Rect box;
    int id;
    bool fixed;
  };
  std::vector<Item> items;
  std::vector<char> fence_bad(design.cells.size(), 0);

  for (const Cell &c : design.cells) {
    Rect b = p.box(design, c.id);
    if (c.fixed()) {
      if (b.intersects(design.die)) items.push_back({b, c.id, true});
      continue;
    }
    items.push_back({b, c.id, false});
    if (!design.die.contains(b)) rep.out_of_die_cells.push_back(c.id);
    bool on_row = true;
    for (Coord k = 0; k * rh < c.height && on_row; ++k) {
      auto it = rows.find(b.y_lo + k * rh);
      if (it == rows.end()) {
        on_row = false;
        break;
      }
      bool inside = false;
      for (const Row *r : it->second) {
        if (b.x_lo >= r->x_lo && b.x_hi <= r->x_hi) {
          inside = true;
          break;
        }
      }
      on_row = inside;
    }
    if (!on_row) rep.off_row_cells.push_back(c.id);
    if (c.region >= 0) {
      Coord covered = 0;
      for (const Rect &r : design.fences[c.region].rects) covered += b.overlap_area(r);
      if (covered < b.area()) fence_bad[c.id] = 1;
    }
    if (constraints.watermark) {
      const WatermarkRegion &wm = *constraints.watermark;
      bool inside = center_in(wm.rect, b.x_lo, b.y_lo, c.width, c.height);
      if (inside != wm.is_member(c.id)) fence_bad[c.id] = 1;
    }
  }
  for (std::size_t i = 0; i < fence_bad.size(); ++i) {
    if (fence_bad[i]) rep.fence_violations.push_back(static_cast<int>(i));
  }

  std::sort(items.begin(), items.end(), [](const Item &a, const Item &b) {
    return a.box.x_lo != b.box.x_lo ? a.box.x_lo < b.box.x_lo : a.id < b.id;
  });
  std::vector<const Item *> active;
  std::set<std::pair<int, int>> pairs;
  for (const Item &it : items) {
    std::size_t keep = 0;
    for (const Item *a : active) {
      if (a->box.x_hi > it.box.x_lo) active[keep++] = a;
    }
    active.resize(keep);
    for (const Item *a : active) {
      if (a->fixed && it.fixed) continue;
      if (a->box.intersects(it.box)) {
        pairs.emplace(std::min(a->id, it.id), std::max(a->id, it.id));
      }
    }
    active.push_back(&it);
  }
  rep.overlap_pairs.assign(pairs.begin(), pairs.end());
  return rep;
}

TimingResult timing_analyze(const Design &design, const Placement &p, const DelayModel &model) {
  const int n_cells = design.num_cells();
  const int n_nets = static_cast<int>(design.nets.size());
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> delay(n_nets, 0.0);
  for (int n = 0; n < n_nets; ++n) {
    delay[n] = model.unit_delay_per_length * static_cast<double>(net_hpwl(design, p, n));
  }
  std::vector<std::vector<int>> driven(n_cells);
  std::vector<std::vector<int>> sinks(n_nets);
  for (const Net &n : design.nets) {
    int drv = n.pins[0].cell;
    driven[drv].push_back(n.id);
    for (std::size_t k = 1; k < n.pins.size(); ++k) {
      int s = n.pins[k].cell;
      if (s == drv) continue;
      auto &v = sinks[n.id];
      if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
    }
  }

  std::vector<char> is_end(n_nets, 0);
  bool any_flag = false;
  for (const Net &n : design.nets) {
    if (n.endpoint) {
      is_end[n.id] = 1;
      any_flag = true;
    }
  }
  if (!any_flag) {
    for (const Net &n : design.nets) {
      if (sinks[n.id].empty()) continue;
      bool terminal = true;
      for (int s : sinks[n.id]) terminal = terminal && driven[s].empty();
      if (terminal) is_end[n.id] = 1;
    }
  }

  std::vector<int> indeg(n_cells, 0);
  for (int n = 0; n < n_nets; ++n) {
    if (is_end[n]) continue;
    for (int s : sinks[n]) ++indeg[s];
  }
  std::vector<int> order;
  order.reserve(n_cells);
  for (int c = 0; c < n_cells; ++c) {
    if (indeg[c] == 0) order.push_back(c);
  }
  std::vector<double> at(n_cells, 0.0);
  for (std::size_t head = 0; head < order.size(); ++head) {
    int u = order[head];
    for (int n : driven[u]) {
      if (is_end[n]) continue;
      double arrive = at[u] + delay[n];
      for (int s : sinks[n]) {
        at[s] = std::max(at[s], arrive);
        if (--indeg[s] == 0) order.push_back(s);
      }
    }
  }
  if (static_cast<int>(order.size()) < n_cells) {
    // Every leftover cell has a leftover predecessor; walk back to a repeat.
    std::vector<int> pred(n_cells, -1);
    for (int n = 0; n < n_nets; ++n) {
      if (is_end[n]) continue;
      int drv = design.nets[n].pins[0].cell;
      if (indeg[drv] == 0) continue;
      for (int s : sinks[n]) {
        if (indeg[s] > 0 && pred[s] < 0) pred[s] = drv;
      }
    }
    int start = -1;
    for (int c = 0; c < n_cells && start < 0; ++c) {
      if (indeg[c] > 0) start = c;
    }
    std::vector<int> pos(n_cells, -1);
    std::vector<int> walk;
    int u = start;
    while (pos[u] < 0) {
      pos[u] = static_cast<int>(walk.size());
      walk.push_back(u);
      u = pred[u];
    }
    std::vector<int> cycle(walk.begin() + pos[u], walk.end());
    std::reverse(cycle.begin(), cycle.end());
    throw CombinationalCycle(cycle);
  }

  TimingResult res;
  res.net_slack.assign(n_nets, inf);
  auto rat_of = [&](int n) {
    auto it = model.endpoint_rats.find(n);
    return it == model.endpoint_rats.end() ? model.default_rat : it->second;
  };
  std::vector<double> req(n_cells, inf);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int u = *it;
    for (int n : driven[u]) {
      double r = inf;
      if (is_end[n]) {
        r = rat_of(n) - delay[n];
      } else {
        for (int s : sinks[n]) r = std::min(r, req[s] - delay[n]);
      }
      req[u] = std::min(req[u], r);
      if (r < inf) res.net_slack[n] = r - at[u];
    }
  }
  for (int n = 0; n < n_nets; ++n) {
    if (!is_end[n]) continue;
    int drv = design.nets[n].pins[0].cell;
    double arrival = at[drv] + delay[n];
    double rat = rat_of(n);
    res.endpoints.push_back(n);
    res.arrival.push_back(arrival);
    res.slack.push_back(rat - arrival);
    res.max_rat = std::max(res.max_rat, rat);
  }
  if (!res.slack.empty()) {
    res.wns = *std::min_element(res.slack.begin(), res.slack.end());
    for (double s : res.slack) res.tns += std::min(0.0, s);
  }
  return res;
}

std::string format_real(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string EvalReport::csv_header() { return "design,scheme,stage,hpwl,pwlr,tns,wns,wer,legal,bits"; }

std::string EvalReport::csv_row() const {
  std::ostringstream s;
  s << design << ',' << scheme << ',' << stage << ',' << hpwl << ',' << format_real(pwlr) << ','
    << format_real(tns, 3) << ',' << format_real(wns, 3) << ',' << format_real(wer, 4) << ','
    << (legal ? 1 : 0) << ',' << bits;
  return s.str();
}

}  // namespace wmp
