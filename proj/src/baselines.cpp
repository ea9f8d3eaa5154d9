#include "wmplace/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "wmplace/errors.hpp"
#include "wmplace/rng.hpp"
#include "wmplace/segments.hpp"

namespace wmp {

namespace {

struct Slot {
  int level = -1;
  Coord x = 0;
};

// Nearest x in [seg] where a width-w span is free on `level`, or nullopt.
std::optional<Coord> nearest_in_level(const SegmentMap &segs, const Occupancy &occ, int level, int cls, Coord w,
                                      Coord tx) {
  std::optional<Coord> best;
  Coord best_d = std::numeric_limits<Coord>::max();
  const auto &m = occ.level_map(level);
  for (const Segment &s : segs.segments(level)) {
    if (s.cls != cls || s.length() < w) continue;
    Coord cur = s.x_lo;
    auto it = m.lower_bound(s.x_lo);
    if (it != m.begin()) cur = std::max(cur, std::prev(it)->second.first);
    auto consider = [&](Coord lo, Coord hi) {
      if (hi - lo < w) return;
      Coord x = std::clamp(tx, lo, hi - w);
      Coord d = std::abs(x - tx);
      if (d < best_d) {
        best_d = d;
        best = x;
      }
    };
    for (; it != m.end() && it->first < s.x_hi; ++it) {
      consider(cur, std::min(it->first, s.x_hi));
      cur = std::max(cur, it->second.first);
    }
    consider(cur, s.x_hi);
  }
  return best;
}

// Nearest free slot over levels accepted by `level_ok`, by squared distance.
template <class Pred>
Slot nearest_slot(const SegmentMap &segs, const Occupancy &occ, int cls, Coord w, Coord tx, Coord ty,
                  Pred level_ok) {
  Slot best;
  Coord best_cost = std::numeric_limits<Coord>::max();
  std::vector<int> order(segs.num_levels());
  for (int l = 0; l < segs.num_levels(); ++l) order[l] = l;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(segs.level_y(a) - ty) < std::abs(segs.level_y(b) - ty);
  });
  for (int l : order) {
    Coord dy = segs.level_y(l) - ty;
    if (dy * dy >= best_cost) break;
    if (!level_ok(l)) continue;
    auto x = nearest_in_level(segs, occ, l, cls, w, tx);
    if (!x) continue;
    Coord cost = (*x - tx) * (*x - tx) + dy * dy;
    if (cost < best_cost) {
      best_cost = cost;
      best = Slot{l, *x};
    }
  }
  return best;
}

}  // namespace

int row_index(const Design &design, Coord y) {
  return static_cast<int>((y - design.die.y_lo) / design.row_height);
}

BaselineResult row_parity_insert(const Design &design, const Placement &legalized, const Signature &signature,
                                 std::uint64_t seed, const PlaceParams &place_params) {
  if (signature.size() == 0) throw InvalidParams("signature must hold at least one bit");
  SegmentMap segs(design, {}, false);
  Occupancy occ(design, segs, legalized);
  Placement p = legalized;
  std::vector<int> pool;
  for (const Cell &c : design.cells) {
    if (!c.fixed() && c.height == design.row_height && segs.level_of_y(p.y[c.id]) >= 0) pool.push_back(c.id);
  }
  Rng rng(seed);
  rng.shuffle(pool);

  BaselineResult r;
  r.watermark.scheme = "row_parity";
  std::size_t next = 0;
  for (std::uint8_t bit : signature.bits) {
    bool done = false;
    while (!done && next < pool.size()) {
      int id = pool[next++];
      const Cell &c = design.cells[id];
      if (row_index(design, p.y[id]) % 2 != bit) {
        int cls = cell_class(design, {}, id);
        occ.remove(id);
        Slot s = nearest_slot(segs, occ, cls, c.width, p.x[id], p.y[id], [&](int l) {
          return row_index(design, segs.level_y(l)) % 2 == bit;
        });
        if (s.level < 0) {
          occ.insert(id, p.x[id], p.y[id]);
          continue;
        }
        p.x[id] = s.x;
        p.y[id] = segs.level_y(s.level);
        occ.insert(id, p.x[id], p.y[id]);
      }
      r.watermark.cells.push_back(id);
      r.watermark.parity.push_back(bit);
      done = true;
    }
    if (!done) throw InsufficientCandidates("row", signature.bits.size(), r.watermark.cells.size());
  }
  Placement lg = legalize(design, p, {});
  r.placement = detailed_place(design, lg, {}, place_params);
  r.design = design;
  return r;
}

double row_parity_extract(const Design &design, const Placement &placement, const BaselineWatermark &wm) {
  if (wm.cells.empty()) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < wm.cells.size(); ++i) {
    ok += row_index(design, placement.y[wm.cells[i]]) % 2 == wm.parity[i];
  }
  return 100.0 * static_cast<double>(ok) / static_cast<double>(wm.cells.size());
}

BaselineResult cell_scattering_insert(const Design &design, const Placement &detailed, const Signature &signature,
                                      std::uint64_t seed, const DwParams &params) {
  params.validate(design);
  const DwParams dp = params.resolved(design);
  if (signature.size() == 0) throw InvalidParams("signature must hold at least one bit");
  DwCandidates cand = select_candidates(design, detailed, dp.d_x, dp.d_y, {});
  Rng rng(seed);
  rng.shuffle(cand.x);
  rng.shuffle(cand.y);
  MoveEngine engine(design, detailed, {});
  BaselineResult r;
  r.watermark.scheme = "cell_scattering";
  for (const Candidate &c : consume_signature(engine, cand, signature, 0)) {
    r.watermark.cells.push_back(c.cell);
    r.watermark.ref_x.push_back(detailed.x[c.cell]);
    r.watermark.ref_y.push_back(detailed.y[c.cell]);
    r.watermark.move_x.push_back(c.dx);
    r.watermark.move_y.push_back(c.dy);
  }
  r.placement = engine.placement();
  r.placement.stage = Stage::Detailed;
  r.design = design;
  return r;
}

double cell_scattering_extract(const Placement &placement, const BaselineWatermark &wm) {
  if (wm.cells.empty()) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < wm.cells.size(); ++i) {
    int id = wm.cells[i];
    ok += placement.x[id] - wm.ref_x[i] == wm.move_x[i] && placement.y[id] - wm.ref_y[i] == wm.move_y[i];
  }
  return 100.0 * static_cast<double>(ok) / static_cast<double>(wm.cells.size());
}

DelayModel buffer_delay_model(const Design &design, const Placement &placement) {
  TimingResult t = timing_analyze(design, placement, DelayModel{});
  double worst = 0.0;
  for (double a : t.arrival) worst = std::max(worst, a);
  DelayModel m;
  m.default_rat = worst > 0.0 ? worst : 1.0;
  return m;
}

BaselineResult buffer_insertion_insert(const Design &design, const Placement &placement, const Signature &signature,
                                       std::uint64_t seed, const PlaceParams &place_params,
                                       const BufferParams &params) {
  if (signature.size() == 0) throw InvalidParams("signature must hold at least one bit");
  TimingResult t = timing_analyze(design, placement, buffer_delay_model(design, placement));
  const double margin = params.margin_fraction * t.max_rat;
  std::vector<int> nets;
  for (const Net &n : design.nets) {
    if (n.pins.size() >= 2 && t.net_slack[n.id] >= margin) nets.push_back(n.id);
  }
  if (nets.empty()) throw NoTimingMargin("no net has slack above " + format_real(margin, 3));
  if (nets.size() < signature.bits.size()) {
    throw InsufficientCandidates("net", signature.bits.size(), nets.size());
  }
  Rng rng(seed);
  rng.shuffle(nets);
  nets.resize(signature.bits.size());

  BaselineResult r;
  r.watermark.scheme = "buffer_insertion";
  Design d = design;
  Placement p = placement;
  const Coord park = design.die.y_lo - 2 * design.row_height - 1;  // off every row until placed
  std::vector<std::pair<int, std::pair<Coord, Coord>>> targets;  // buffer id -> net bbox center
  for (std::size_t j = 0; j < nets.size(); ++j) {
    const int len = signature.bits[j] ? 1 : 2;
    Net &net = d.nets[nets[j]];
    Coord x_lo = std::numeric_limits<Coord>::max(), x_hi = std::numeric_limits<Coord>::min();
    Coord y_lo = x_lo, y_hi = x_hi;
    for (const Pin &pin : net.pins) {
      Coord px = placement.x[pin.cell] + pin.dx, py = placement.y[pin.cell] + pin.dy;
      x_lo = std::min(x_lo, px);
      x_hi = std::max(x_hi, px);
      y_lo = std::min(y_lo, py);
      y_hi = std::max(y_hi, py);
    }
    std::vector<int> chain;
    std::vector<std::string> names;
    for (int k = 0; k < len; ++k) {
      Cell b;
      b.id = static_cast<int>(d.cells.size());
      b.name = "wmbuf_" + std::to_string(j) + "_" + std::to_string(k);
      b.width = 1;
      b.height = design.row_height;
      b.kind = CellKind::Buffer;
      b.x = (x_lo + x_hi) / 2;
      b.y = park;
      chain.push_back(b.id);
      names.push_back(b.name);
      targets.push_back({b.id, {(x_lo + x_hi) / 2, (y_lo + y_hi) / 2}});
      d.cells.push_back(b);
      p.x.push_back(b.x);
      p.y.push_back(b.y);
    }
    std::vector<Pin> sinks(net.pins.begin() + 1, net.pins.end());
    const bool endpoint = net.endpoint;
    net.pins = {net.pins[0], Pin{chain[0], 0, 0}};
    net.endpoint = false;
    const std::string base = net.name;
    for (int k = 0; k < len; ++k) {
      Net n;
      n.id = static_cast<int>(d.nets.size());
      n.name = base + "_wm" + std::to_string(k);
      n.pins.push_back(Pin{chain[k], 0, 0});
      if (k + 1 < len) {
        n.pins.push_back(Pin{chain[k + 1], 0, 0});
      } else {
        n.pins.insert(n.pins.end(), sinks.begin(), sinks.end());
        n.endpoint = endpoint;
      }
      d.nets.push_back(std::move(n));
    }
    r.watermark.cells.push_back(chain[0]);
    r.watermark.chains.push_back(std::move(names));
  }
  d.finalize();

  SegmentMap segs(d, {}, false);
  Occupancy occ(d, segs, p);
  for (auto [id, target] : targets) {
    Slot s = nearest_slot(segs, occ, 0, 1, target.first, target.second, [](int) { return true; });
    if (s.level < 0) throw InsufficientCandidates("site", targets.size(), 0);
    p.x[id] = s.x;
    p.y[id] = segs.level_y(s.level);
    occ.insert(id, p.x[id], p.y[id]);
  }
  Placement lg = legalize(d, p, {});
  r.placement = detailed_place(d, lg, {}, place_params);
  r.design = std::move(d);
  return r;
}

double buffer_insertion_extract(const Design &design, const BaselineWatermark &wm) {
  if (wm.chains.empty()) return 0.0;
  std::map<std::string, int> per_chain;
  for (const Cell &c : design.cells) {
    if (c.kind != CellKind::Buffer || c.name.rfind("wmbuf_", 0) != 0) continue;
    per_chain[c.name.substr(0, c.name.rfind('_'))]++;
  }
  std::size_t ok = 0;
  for (std::size_t j = 0; j < wm.chains.size(); ++j) {
    const auto &names = wm.chains[j];
    bool match = !names.empty() && per_chain["wmbuf_" + std::to_string(j)] == static_cast<int>(names.size());
    std::vector<int> ids;
    for (const std::string &n : names) {
      int id = design.find_cell(n);
      match = match && id >= 0 && design.cells[id].kind == CellKind::Buffer;
      ids.push_back(id);
    }
    for (std::size_t k = 0; match && k + 1 < ids.size(); ++k) {
      bool linked = false;
      for (int net : design.cell_nets[ids[k]]) {
        const auto &pins = design.nets[net].pins;
        if (pins[0].cell != ids[k]) continue;
        for (const Pin &pin : pins) linked = linked || pin.cell == ids[k + 1];
      }
      match = linked;
    }
    ok += match;
  }
  return 100.0 * static_cast<double>(ok) / static_cast<double>(wm.chains.size());
}

}  // namespace wmp
