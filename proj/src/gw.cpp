#include "wmplace/gw.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"

namespace wmp {

GwParams GwParams::resolved(const Design &design) const {
  GwParams p = *this;
  if (p.window_w == 0) p.window_w = 10 * design.row_height;
  if (p.window_h == 0) p.window_h = 10 * design.row_height;
  return p;
}

bool GwParams::weights_in_range() const {
  auto ok = [](double v) { return v >= 0.0 && v <= 1.0; };
  return ok(alpha) && ok(beta) && ok(gamma);
}

void GwParams::validate(const Design &design, bool unbounded) const {
  GwParams p = resolved(design);
  const Coord rh = design.row_height;
  if (p.n_bits <= 0) throw InvalidParams("signature length N_w must be positive");
  if (p.window_w <= 0 || p.window_h <= 0) throw InvalidParams("window size must be positive");
  if (p.window_w > design.die.width() || p.window_h > design.die.height()) {
    throw InvalidParams("window " + std::to_string(p.window_w) + "x" + std::to_string(p.window_h) +
                        " does not fit inside the die");
  }
  if (p.window_h % rh != 0) throw InvalidParams("window height must be a multiple of the row height");
  if (p.stride < 0) throw InvalidParams("stride must be at least 1");
  Coord sy = p.stride ? p.stride : p.window_h;
  if (sy % rh != 0) throw InvalidParams("stride must be a multiple of the row height");
  for (double v : {alpha, beta, gamma}) {
    if (!std::isfinite(v)) throw InvalidParams("scoring weights must be finite");
  }
  if (!unbounded && !weights_in_range()) throw InvalidParams("scoring weights must lie in [0, 1]");
  if (!(pwlr_max > 0.0)) throw InvalidParams("pwlr threshold must be positive");
}

std::vector<int> cells_inside(const Design &design, const Placement &placement, const Rect &window) {
  std::vector<int> out;
  for (const Cell &c : design.cells) {
    if (c.fixed()) continue;
    Coord x = placement.x[c.id], y = placement.y[c.id];
    if (x >= window.x_lo && y >= window.y_lo && x + c.width <= window.x_hi && y + c.height <= window.y_hi) {
      out.push_back(c.id);
    }
  }
  return out;
}

namespace {

bool blocked(const Design &design, const Rect &window) {
  for (const Cell &c : design.cells) {
    if (c.kind != CellKind::Macro) continue;
    if (window.intersects(Rect{c.x, c.y, c.x + c.width, c.y + c.height})) return true;
  }
  for (const FenceRegion &f : design.fences) {
    for (const Rect &r : f.rects) {
      if (window.intersects(r)) return true;
    }
  }
  return false;
}

struct RawScore {
  double f = 1.0;
  bool valid = false;
  int n_c = 0;
};

RawScore raw_score(const Design &design, const Placement &placement, const Rect &window,
                   const GwParams &p) {
  RawScore r;
  if (blocked(design, window)) return r;
  double s_cell = 0.0, s_overlap = 0.0;
  for (const Cell &c : design.cells) {
    if (c.fixed()) continue;
    Rect box{placement.x[c.id], placement.y[c.id], placement.x[c.id] + c.width, placement.y[c.id] + c.height};
    if (!window.intersects(box)) continue;
    if (box.x_lo >= window.x_lo && box.y_lo >= window.y_lo && box.x_hi <= window.x_hi &&
        box.y_hi <= window.y_hi) {
      ++r.n_c;
      s_cell += static_cast<double>(box.area());
    } else {
      s_overlap += static_cast<double>(window.overlap_area(box));
    }
  }
  if (r.n_c < p.n_bits) return r;
  const double s = static_cast<double>(window.area());
  r.f = p.alpha * p.n_bits / r.n_c + p.beta * s_cell / s + p.gamma * s_overlap / s;
  r.valid = true;
  return r;
}

}  // namespace

double score_window(const Design &design, const Placement &placement, const Rect &window,
                    const GwParams &params) {
  return raw_score(design, placement, window, params.resolved(design)).f;
}

std::vector<WindowScore> rank_windows(const Design &design, const Placement &placement,
                                      const GwParams &params, bool unbounded) {
  params.validate(design, unbounded);
  const GwParams p = params.resolved(design);
  const Coord sx = p.stride ? p.stride : p.window_w;
  const Coord sy = p.stride ? p.stride : p.window_h;
  const Rect &die = design.die;
  std::vector<WindowScore> out;
  for (Coord y = die.y_lo; y + p.window_h <= die.y_hi; y += sy) {
    for (Coord x = die.x_lo; x + p.window_w <= die.x_hi; x += sx) {
      WindowScore w;
      w.window = Rect{x, y, x + p.window_w, y + p.window_h};
      RawScore r = raw_score(design, placement, w.window, p);
      w.raw = r.f;
      w.valid = r.valid;
      w.n_inside = r.n_c;
      out.push_back(w);
    }
  }
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const WindowScore &w : out) {
    if (!w.valid) continue;
    lo = any ? std::min(lo, w.raw) : w.raw;
    hi = any ? std::max(hi, w.raw) : w.raw;
    any = true;
  }
  for (WindowScore &w : out) {
    if (!w.valid) continue;
    w.score = hi > lo ? (w.raw - lo) / (hi - lo) : 0.0;
  }
  std::stable_sort(out.begin(), out.end(), [](const WindowScore &a, const WindowScore &b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.valid != b.valid) return a.valid;
    if (a.window.y_lo != b.window.y_lo) return a.window.y_lo < b.window.y_lo;
    return a.window.x_lo < b.window.x_lo;
  });
  return out;
}

GwWatermark select_region(const Design &design, const Placement &placement, const GwParams &params) {
  std::vector<WindowScore> ranked = rank_windows(design, placement, params);
  if (ranked.empty() || !ranked.front().valid) {
    throw NoValidWindow("no window holds " + std::to_string(params.n_bits) +
                        " cells clear of macros and fences");
  }
  GwWatermark wm;
  wm.region = ranked.front().window;
  wm.members = cells_inside(design, placement, wm.region);
  wm.score = ranked.front().score;
  wm.raw_score = ranked.front().raw;
  wm.params = params.resolved(design);
  return wm;
}

GwResult insert_gw(const Design &design, const GwParams &params, const PlaceParams &place_params,
                   const PipelineResult *baseline) {
  params.validate(design);
  place_params.validate();
  GwResult r;
  r.baseline = baseline ? *baseline : run_pipeline(design, {}, place_params);
  const double base = static_cast<double>(hpwl(design, r.baseline.detailed));
  auto attempt = [&](const GwParams &p, GwWatermark &wm, PipelineResult &placed) {
    wm = select_region(design, r.baseline.detailed, p);
    RegionConstraintSet cons = wm.constraints();
    cons.validate(design);
    placed = run_pipeline(design, cons, place_params, &r.baseline.detailed);
    return pwlr(static_cast<double>(hpwl(design, placed.detailed)), base);
  };
  double best = attempt(params, r.watermark, r.watermarked);
  if (best <= params.pwlr_max || !params.grid_fallback) return r;
  for (double a : {0.0, 0.1, 0.5}) {
    for (double b : {0.0, 0.1, 0.5}) {
      if (a == params.alpha && b == params.beta) continue;
      GwParams p = params;
      p.alpha = a;
      p.beta = b;
      GwWatermark wm;
      PipelineResult placed;
      double v;
      try {
        v = attempt(p, wm, placed);
      } catch (const NoValidWindow &) {
        continue;
      }
      if (v < best) {
        best = v;
        r.watermark = std::move(wm);
        r.watermarked = std::move(placed);
      }
      if (best <= params.pwlr_max) return r;
    }
  }
  return r;
}

double extract_gw(const Design &design, const Placement &placement, const GwWatermark &wm) {
  if (wm.members.empty()) return 0.0;
  long inside = 0, foreign = 0;
  for (const Cell &c : design.cells) {
    if (!center_in(wm.region, placement.x[c.id], placement.y[c.id], c.width, c.height)) continue;
    if (std::binary_search(wm.members.begin(), wm.members.end(), c.id)) {
      ++inside;
    } else {
      ++foreign;
    }
  }
  double v = 100.0 * static_cast<double>(std::max(0L, inside - foreign)) / static_cast<double>(wm.members.size());
  return std::clamp(v, 0.0, 100.0);
}

}  // namespace wmp
