#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <cmath>
#include <limits>

#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"
#include "wmplace/placer.hpp"
#include "wmplace/rng.hpp"
#include "wmplace/segments.hpp"

namespace wmp {

void PlaceParams::validate() const {
  if (!(density_target > 0.0 && density_target <= 1.0)) {
    throw InvalidParams("density target must lie in (0, 1]");
  }
  if (max_iterations < 1) throw InvalidParams("max_iterations must be at least 1");
  if (lambda_init <= 0.0 || lambda_mult < 1.0) throw InvalidParams("invalid density weight schedule");
  if (bin_rows < 1 || dp_passes < 0 || warm_iterations < 0) throw InvalidParams("invalid placer budget");
}

namespace {

class GlobalPlacer {
 public:
  GlobalPlacer(const Design &d, const RegionConstraintSet &cons, const PlaceParams &params)
      : d_(d), cons_(cons), params_(params), tile_(d.row_height) {
    nx_ = static_cast<int>(std::max<Coord>(1, d.die.width() / tile_));
    ny_ = static_cast<int>(std::max<Coord>(1, d.die.height() / tile_));
    for (int i = 0; i <= nx_; ++i) xb_.push_back(d.die.x_lo + d.die.width() * i / nx_);
    for (int i = 0; i <= ny_; ++i) yb_.push_back(d.die.y_lo + d.die.height() * i / ny_);
    var_.assign(d.cells.size(), -1);
    for (const Cell &c : d.cells) {
      if (c.fixed()) continue;
      var_[c.id] = static_cast<int>(movable_.size());
      movable_.push_back(c.id);
      cls_.push_back(cell_class(d, cons, c.id));
    }
    n_cls_ = static_cast<int>(d.fences.size()) + 2;
    spread_target_ = std::max(0.5 * params.density_target, params.density_target - 0.15);
    build_capacity();
  }

  GlobalResult run(const Placement *warm);

 private:
  struct Region {
    int x0, y0, x1, y1;  // tile index range, half-open
  };

  Rect tile_rect(int ix, int iy) const { return Rect{xb_[ix], yb_[iy], xb_[ix + 1], yb_[iy + 1]}; }
  // Tile index containing coordinate v along a boundary list.
  static int tile_index(const std::vector<Coord> &b, Coord v) {
    auto it = std::upper_bound(b.begin(), b.end(), v);
    int i = static_cast<int>(it - b.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(b.size()) - 2);
  }
  double cap_sum(int k, const Region &r) const {
    const auto &p = pre_[k];
    auto at = [&](int x, int y) { return p[static_cast<std::size_t>(y) * (nx_ + 1) + x]; };
    return at(r.x1, r.y1) - at(r.x0, r.y1) - at(r.x1, r.y0) + at(r.x0, r.y0);
  }

  void build_capacity();
  void check_feasible() const;
  void initial_spread(std::vector<double> &cx, std::vector<double> &cy);
  double solve_axis(bool x_axis, std::vector<double> &pos, const std::vector<double> *anchor,
                    double anchor_weight);
  void spread(const std::vector<double> &cx, const std::vector<double> &cy, std::vector<double> &sx,
              std::vector<double> &sy);
  void bisect(int k, std::vector<int> &idx, std::size_t b, std::size_t e, Region r,
              std::vector<double> &sx, std::vector<double> &sy);
  Placement integerize(const std::vector<double> &cx, const std::vector<double> &cy) const;
  void project(Placement &p) const;

  double center_of(int cell, bool x_axis, const std::vector<double> &pos) const {
    int v = var_[cell];
    if (v >= 0) return pos[v];
    const Cell &c = d_.cells[cell];
    return x_axis ? static_cast<double>(c.x) + 0.5 * static_cast<double>(c.width)
                  : static_cast<double>(c.y) + 0.5 * static_cast<double>(c.height);
  }

  const Design &d_;
  const RegionConstraintSet &cons_;
  const PlaceParams &params_;
  Coord tile_;
  int nx_ = 1, ny_ = 1, n_cls_ = 2;
  std::vector<Coord> xb_, yb_;  // tile boundaries
  // Spreading aims below 𝒟: one-tile leaves hold under two cells, so
  // discrete overshoot would otherwise reach the audit bins.
  double spread_target_ = 0.7;
  std::vector<int> movable_, var_, cls_;
  std::vector<std::vector<double>> pre_;  // per class capacity prefix sums
  std::vector<std::vector<double>> cap_;  // per class per tile
};

void GlobalPlacer::build_capacity() {
  const std::size_t n_tiles = static_cast<std::size_t>(nx_) * ny_;
  std::vector<double> free(n_tiles);
  for (int iy = 0; iy < ny_; ++iy) {
    for (int ix = 0; ix < nx_; ++ix) {
      free[static_cast<std::size_t>(iy) * nx_ + ix] = static_cast<double>(tile_rect(ix, iy).area());
    }
  }
  std::vector<Rect> fixed;
  for (const Cell &c : d_.cells) {
    if (c.fixed()) {
      Rect b{c.x, c.y, c.x + c.width, c.y + c.height};
      if (b.intersects(d_.die)) fixed.push_back(b);
    }
  }
  auto tiles_of = [&](const Rect &r, auto &&fn) {
    Rect q{std::max(r.x_lo, d_.die.x_lo), std::max(r.y_lo, d_.die.y_lo), std::min(r.x_hi, d_.die.x_hi),
           std::min(r.y_hi, d_.die.y_hi)};
    if (!q.valid()) return;
    int ix0 = tile_index(xb_, q.x_lo), ix1 = tile_index(xb_, q.x_hi - 1);
    int iy0 = tile_index(yb_, q.y_lo), iy1 = tile_index(yb_, q.y_hi - 1);
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) fn(ix, iy, tile_rect(ix, iy).overlap_area(q));
    }
  };
  for (const Rect &f : fixed) {
    tiles_of(f, [&](int ix, int iy, Coord a) {
      auto &v = free[static_cast<std::size_t>(iy) * nx_ + ix];
      v = std::max(0.0, v - static_cast<double>(a));
    });
  }
  // Area of r inside a tile, minus fixed footprints inside r.
  auto region_area = [&](const Rect &r, std::vector<double> &out) {
    tiles_of(r, [&](int ix, int iy, Coord a) {
      Rect t = tile_rect(ix, iy);
      Rect tr{std::max(t.x_lo, r.x_lo), std::max(t.y_lo, r.y_lo), std::min(t.x_hi, r.x_hi),
              std::min(t.y_hi, r.y_hi)};
      double v = static_cast<double>(a);
      for (const Rect &f : fixed) v -= static_cast<double>(tr.overlap_area(f));
      out[static_cast<std::size_t>(iy) * nx_ + ix] += std::max(0.0, v);
    });
  };

  cap_.assign(n_cls_, std::vector<double>(n_tiles, 0.0));
  const int K = static_cast<int>(d_.fences.size());
  for (int k = 0; k < K; ++k) {
    for (const Rect &r : d_.fences[k].rects) region_area(r, cap_[k + 1]);
  }
  if (cons_.watermark) region_area(cons_.watermark->rect, cap_[K + 1]);
  for (std::size_t t = 0; t < n_tiles; ++t) {
    double used = 0.0;
    for (int k = 1; k < n_cls_; ++k) {
      cap_[k][t] = std::min(cap_[k][t], free[t]);
      used += cap_[k][t];
    }
    cap_[0][t] = std::max(0.0, free[t] - used);
  }
  pre_.assign(n_cls_, std::vector<double>(static_cast<std::size_t>(nx_ + 1) * (ny_ + 1), 0.0));
  for (int k = 0; k < n_cls_; ++k) {
    auto &p = pre_[k];
    for (int iy = 0; iy < ny_; ++iy) {
      double row = 0.0;
      for (int ix = 0; ix < nx_; ++ix) {
        row += cap_[k][static_cast<std::size_t>(iy) * nx_ + ix];
        p[static_cast<std::size_t>(iy + 1) * (nx_ + 1) + ix + 1] =
            p[static_cast<std::size_t>(iy) * (nx_ + 1) + ix + 1] + row;
      }
    }
  }
}

void GlobalPlacer::check_feasible() const {
  std::vector<double> need(n_cls_, 0.0);
  for (std::size_t v = 0; v < movable_.size(); ++v) {
    need[cls_[v]] += static_cast<double>(d_.cells[movable_[v]].area());
  }
  const Region all{0, 0, nx_, ny_};
  const int K = static_cast<int>(d_.fences.size());
  for (int k = 0; k < n_cls_; ++k) {
    if (need[k] <= 0.0) continue;
    double cap = cap_sum(k, all);
    if (need[k] > params_.density_target * cap + 1e-9) {
      std::string what = k == 0 ? "default region" : k <= K ? "fence " + d_.fences[k - 1].name : "watermark region";
      throw RegionInfeasible(what + ": member area " + format_real(need[k], 0) + " exceeds capacity " +
                             format_real(cap, 0) + " at density " + format_real(params_.density_target, 3));
    }
  }
}

void GlobalPlacer::initial_spread(std::vector<double> &cx, std::vector<double> &cy) {
  Rng rng(params_.seed);
  std::vector<std::vector<double>> cum(n_cls_);
  for (int k = 0; k < n_cls_; ++k) {
    double acc = 0.0;
    cum[k].reserve(cap_[k].size());
    for (double c : cap_[k]) cum[k].push_back(acc += c);
  }
  cx.assign(movable_.size(), 0.0);
  cy.assign(movable_.size(), 0.0);
  for (std::size_t v = 0; v < movable_.size(); ++v) {
    const auto &cw = cum[cls_[v]];
    double total = cw.empty() ? 0.0 : cw.back();
    std::size_t t = 0;
    if (total > 0.0) {
      double u = rng.unit() * total;
      t = static_cast<std::size_t>(std::upper_bound(cw.begin(), cw.end(), u) - cw.begin());
      t = std::min(t, cw.size() - 1);
    }
    Rect r = tile_rect(static_cast<int>(t % nx_), static_cast<int>(t / nx_));
    cx[v] = static_cast<double>(r.x_lo) + rng.unit() * static_cast<double>(r.width());
    cy[v] = static_cast<double>(r.y_lo) + rng.unit() * static_cast<double>(r.height());
  }
}

// One B2B-linearized quadratic solve along an axis. Returns the mean net
// stiffness on the diagonal (used to scale anchors).
double GlobalPlacer::solve_axis(bool x_axis, std::vector<double> &pos, const std::vector<double> *anchor,
                                double anchor_weight) {
  const int n = static_cast<int>(movable_.size());
  std::vector<double> diag(n, 0.0), rhs(n, 0.0);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 8);

  struct PinPos {
    int cell;
    double off;
    double at;
  };
  std::vector<PinPos> pins;
  auto add_edge = [&](const PinPos &a, const PinPos &b, double w) {
    if (a.cell == b.cell) return;
    int va = var_[a.cell], vb = var_[b.cell];
    if (va >= 0 && vb >= 0) {
      diag[va] += w;
      diag[vb] += w;
      trip.emplace_back(va, vb, -w);
      trip.emplace_back(vb, va, -w);
      rhs[va] += w * (b.off - a.off);
      rhs[vb] += w * (a.off - b.off);
    } else if (va >= 0) {
      diag[va] += w;
      rhs[va] += w * (b.at - a.off);
    } else if (vb >= 0) {
      diag[vb] += w;
      rhs[vb] += w * (a.at - b.off);
    }
  };
  for (const Net &net : d_.nets) {
    const std::size_t p = net.pins.size();
    if (p < 2) continue;
    pins.clear();
    bool any_movable = false;
    for (const Pin &pin : net.pins) {
      const Cell &c = d_.cells[pin.cell];
      double off = x_axis ? static_cast<double>(pin.dx) - 0.5 * static_cast<double>(c.width)
                          : static_cast<double>(pin.dy) - 0.5 * static_cast<double>(c.height);
      pins.push_back({pin.cell, off, center_of(pin.cell, x_axis, pos) + off});
      any_movable = any_movable || var_[pin.cell] >= 0;
    }
    if (!any_movable) continue;
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < p; ++i) {
      if (pins[i].at < pins[lo].at) lo = i;
      if (pins[i].at > pins[hi].at) hi = i;
    }
    if (lo == hi) hi = (lo + 1) % p;
    const double factor = 2.0 / static_cast<double>(p - 1);
    auto weight = [&](std::size_t i, std::size_t j) {
      return factor / std::max(std::abs(pins[i].at - pins[j].at), 1.0);
    };
    add_edge(pins[lo], pins[hi], weight(lo, hi));
    for (std::size_t i = 0; i < p; ++i) {
      if (i == lo || i == hi) continue;
      add_edge(pins[i], pins[lo], weight(i, lo));
      add_edge(pins[i], pins[hi], weight(i, hi));
    }
  }
  double mean = 0.0;
  for (double v : diag) mean += v;
  mean = n > 0 ? mean / n : 0.0;
  if (mean <= 0.0) mean = 1.0;
  const double reg = 1e-4 * mean;
  for (int v = 0; v < n; ++v) {
    double w = reg;
    double target = pos[v];
    if (anchor) {
      w += anchor_weight * mean;
      target = (reg * pos[v] + anchor_weight * mean * (*anchor)[v]) / w;
    }
    diag[v] += w;
    rhs[v] += w * target;
    trip.emplace_back(v, v, diag[v]);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), n);
  Eigen::VectorXd x0 = Eigen::Map<Eigen::VectorXd>(pos.data(), n);
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-6);
  cg.setMaxIterations(std::max(200, n / 10));
  cg.compute(A);
  Eigen::VectorXd x = cg.solveWithGuess(b, x0);
  for (int v = 0; v < n; ++v) {
    const Cell &c = d_.cells[movable_[v]];
    double half = 0.5 * static_cast<double>(x_axis ? c.width : c.height);
    double lo = static_cast<double>(x_axis ? d_.die.x_lo : d_.die.y_lo) + half;
    double hi = static_cast<double>(x_axis ? d_.die.x_hi : d_.die.y_hi) - half;
    double val = std::isfinite(x[v]) ? x[v] : pos[v];
    pos[v] = std::clamp(val, lo, std::max(lo, hi));
  }
  return mean;
}

void GlobalPlacer::spread(const std::vector<double> &cx, const std::vector<double> &cy,
                          std::vector<double> &sx, std::vector<double> &sy) {
  sx = cx;
  sy = cy;
  for (int k = 0; k < n_cls_; ++k) {
    std::vector<int> idx;
    for (std::size_t v = 0; v < movable_.size(); ++v) {
      if (cls_[v] == k) idx.push_back(static_cast<int>(v));
    }
    if (idx.empty()) continue;
    bisect(k, idx, 0, idx.size(), Region{0, 0, nx_, ny_}, sx, sy);
  }
}

void GlobalPlacer::bisect(int k, std::vector<int> &idx, std::size_t b, std::size_t e, Region r,
                          std::vector<double> &sx, std::vector<double> &sy) {
  if (b >= e) return;
  auto area = [&](int v) { return static_cast<double>(d_.cells[movable_[v]].area()); };
  const int wt = r.x1 - r.x0, ht = r.y1 - r.y0;
  if (wt == 1 && ht == 1) {
    Rect t = tile_rect(r.x0, r.y0);
    std::sort(idx.begin() + b, idx.begin() + e, [&](int a, int c) {
      return sx[a] != sx[c] ? sx[a] < sx[c] : a < c;
    });
    const double m = static_cast<double>(e - b);
    for (std::size_t i = b; i < e; ++i) {
      sx[idx[i]] = static_cast<double>(t.x_lo) + (static_cast<double>(i - b) + 0.5) / m * static_cast<double>(t.width());
      sy[idx[i]] = 0.5 * static_cast<double>(t.y_lo + t.y_hi);
    }
    return;
  }
  const double xlen = static_cast<double>(tile_rect(r.x1 - 1, r.y0).x_hi - tile_rect(r.x0, r.y0).x_lo);
  const double ylen = static_cast<double>(tile_rect(r.x0, r.y1 - 1).y_hi - tile_rect(r.x0, r.y0).y_lo);
  const bool split_x = ht == 1 || (wt > 1 && xlen >= ylen);
  Region left = r, right = r;
  double cut, lo_edge, hi_edge, perp;
  if (split_x) {
    int mid = r.x0 + wt / 2;
    left.x1 = mid;
    right.x0 = mid;
    cut = static_cast<double>(tile_rect(mid, r.y0).x_lo);
    lo_edge = static_cast<double>(tile_rect(r.x0, r.y0).x_lo);
    hi_edge = lo_edge + xlen;
    perp = ylen;
  } else {
    int mid = r.y0 + ht / 2;
    left.y1 = mid;
    right.y0 = mid;
    cut = static_cast<double>(tile_rect(r.x0, mid).y_lo);
    lo_edge = static_cast<double>(tile_rect(r.x0, r.y0).y_lo);
    hi_edge = lo_edge + ylen;
    perp = xlen;
  }
  std::vector<double> &coord = split_x ? sx : sy;
  std::sort(idx.begin() + b, idx.begin() + e, [&](int a, int c) {
    return coord[a] != coord[c] ? coord[a] < coord[c] : a < c;
  });
  double total = 0.0;
  for (std::size_t i = b; i < e; ++i) total += area(idx[i]);
  const double cap_l = cap_sum(k, left), cap_r = cap_sum(k, right);
  const double cap = cap_l + cap_r;
  const double fill = cap > 0.0 ? std::max(spread_target_, total / cap) : spread_target_;
  const double lim_l = fill * cap_l, lim_r = fill * cap_r;

  std::size_t m = b;
  double a_l = 0.0;
  while (m < e && coord[idx[m]] < cut) a_l += area(idx[m++]);
  double a_r = total - a_l;
  if (a_l > lim_l + 1e-9 && m > b) {
    std::size_t old = m;
    double moved = 0.0;
    while (m > b && a_l > lim_l + 1e-9) {
      double a = area(idx[--m]);
      a_l -= a;
      a_r += a;
      moved += a;
    }
    // Keep the last moved cell when that balances the two sides better.
    if (m < old && cap_l > 0.0 && cap_r > 0.0) {
      double a = area(idx[m]);
      double now = std::max(a_l / cap_l, a_r / cap_r);
      double back = std::max((a_l + a) / cap_l, (a_r - a) / cap_r);
      if (back < now) {
        a_l += a;
        a_r -= a;
        moved -= a;
        ++m;
      }
    }
    double band = std::min(hi_edge - cut, moved / std::max(perp * fill, 1.0));
    const double cnt = static_cast<double>(old - m);
    for (std::size_t i = m; i < old && cnt > 0; ++i) {
      coord[idx[i]] = cut + (static_cast<double>(i - m) + 0.5) / cnt * band;
    }
  } else if (a_r > lim_r + 1e-9 && m < e) {
    std::size_t old = m;
    double moved = 0.0;
    while (m < e && a_r > lim_r + 1e-9) {
      double a = area(idx[m++]);
      a_r -= a;
      a_l += a;
      moved += a;
    }
    if (m > old && cap_l > 0.0 && cap_r > 0.0) {
      double a = area(idx[m - 1]);
      double now = std::max(a_l / cap_l, a_r / cap_r);
      double back = std::max((a_l - a) / cap_l, (a_r + a) / cap_r);
      if (back < now) {
        a_l -= a;
        a_r += a;
        moved -= a;
        --m;
      }
    }
    double band = std::min(cut - lo_edge, moved / std::max(perp * fill, 1.0));
    const double cnt = static_cast<double>(m - old);
    for (std::size_t i = old; i < m && cnt > 0; ++i) {
      coord[idx[i]] = cut - band + (static_cast<double>(i - old) + 0.5) / cnt * band;
    }
  }
  bisect(k, idx, b, m, left, sx, sy);
  bisect(k, idx, m, e, right, sx, sy);
}

Placement GlobalPlacer::integerize(const std::vector<double> &cx, const std::vector<double> &cy) const {
  Placement p = Placement::from_design(d_, Stage::Global);
  for (std::size_t v = 0; v < movable_.size(); ++v) {
    const Cell &c = d_.cells[movable_[v]];
    Coord x = std::llround(cx[v] - 0.5 * static_cast<double>(c.width));
    Coord y = std::llround(cy[v] - 0.5 * static_cast<double>(c.height));
    p.x[c.id] = std::clamp(x, d_.die.x_lo, std::max(d_.die.x_lo, d_.die.x_hi - c.width));
    p.y[c.id] = std::clamp(y, d_.die.y_lo, std::max(d_.die.y_lo, d_.die.y_hi - c.height));
  }
  return p;
}

// Enforces region membership on integer coordinates.
void GlobalPlacer::project(Placement &p) const {
  auto clamp_into = [](Coord v, Coord lo, Coord hi) { return std::clamp(v, lo, std::max(lo, hi)); };
  std::vector<Rect> avoid;
  for (const FenceRegion &f : d_.fences) avoid.insert(avoid.end(), f.rects.begin(), f.rects.end());
  for (const Cell &c : d_.cells) {
    if (c.kind == CellKind::Macro) avoid.push_back(Rect{c.x, c.y, c.x + c.width, c.y + c.height});
  }
  for (int cell : movable_) {
    const Cell &c = d_.cells[cell];
    Coord &x = p.x[cell];
    Coord &y = p.y[cell];
    if (c.region >= 0) {
      const auto &rects = d_.fences[c.region].rects;
      Coord best = std::numeric_limits<Coord>::max();
      Coord bx = x, by = y;
      for (const Rect &r : rects) {
        if (r.width() < c.width || r.height() < c.height) continue;
        Coord nx = clamp_into(x, r.x_lo, r.x_hi - c.width);
        Coord ny = clamp_into(y, r.y_lo, r.y_hi - c.height);
        Coord cost = std::abs(nx - x) + std::abs(ny - y);
        if (cost < best) {
          best = cost;
          bx = nx;
          by = ny;
        }
      }
      if (best == std::numeric_limits<Coord>::max()) {
        throw RegionInfeasible("cell " + c.name + " does not fit in any rect of fence " +
                               d_.fences[c.region].name);
      }
      x = bx;
      y = by;
      continue;
    }
    if (!cons_.watermark) continue;
    const Rect &w = cons_.watermark->rect;
    if (cons_.watermark->is_member(cell)) {
      if (w.width() < c.width || w.height() < c.height) {
        throw RegionInfeasible("cell " + c.name + " does not fit in the watermark region");
      }
      x = clamp_into(x, w.x_lo, w.x_hi - c.width);
      y = clamp_into(y, w.y_lo, w.y_hi - c.height);
    } else if (center_in(w, x, y, c.width, c.height)) {
      struct Option {
        Coord x, y;
      };
      Option opts[4] = {{w.x_lo - c.width, y}, {w.x_hi, y}, {x, w.y_lo - c.height}, {x, w.y_hi}};
      Coord best = std::numeric_limits<Coord>::max();
      Coord best_hit = std::numeric_limits<Coord>::max();
      Option pick{x, y}, pick_hit{x, y};
      for (Option o : opts) {
        if (o.x < d_.die.x_lo || o.x + c.width > d_.die.x_hi || o.y < d_.die.y_lo ||
            o.y + c.height > d_.die.y_hi) {
          continue;
        }
        Coord cost = std::abs(o.x - x) + std::abs(o.y - y);
        Rect box{o.x, o.y, o.x + c.width, o.y + c.height};
        bool hit = false;
        for (const Rect &a : avoid) hit = hit || a.intersects(box);
        if (!hit && cost < best) {
          best = cost;
          pick = o;
        }
        if (cost < best_hit) {
          best_hit = cost;
          pick_hit = o;
        }
      }
      if (best == std::numeric_limits<Coord>::max()) pick = pick_hit;
      x = pick.x;
      y = pick.y;
    }
  }
}

GlobalResult GlobalPlacer::run(const Placement *warm) {
  check_feasible();
  GlobalResult res;
  std::vector<double> cx, cy;
  if (warm) {
    cx.resize(movable_.size());
    cy.resize(movable_.size());
    for (std::size_t v = 0; v < movable_.size(); ++v) {
      const Cell &c = d_.cells[movable_[v]];
      cx[v] = static_cast<double>(warm->x[c.id]) + 0.5 * static_cast<double>(c.width);
      cy[v] = static_cast<double>(warm->y[c.id]) + 0.5 * static_cast<double>(c.height);
    }
  } else {
    initial_spread(cx, cy);
  }
  res.initial_hpwl = hpwl(d_, integerize(cx, cy));
  if (movable_.empty()) {
    res.placement = integerize(cx, cy);
    res.converged = true;
    return res;
  }
  if (warm) {
    // An incremental run keeps the warm placement whenever its projection
    // already meets the density target.
    Placement start = integerize(cx, cy);
    project(start);
    if (params_.warm_iterations == 0 ||
        max_bin_density(d_, start, params_) <= params_.density_target + 0.05) {
      res.placement = std::move(start);
      res.converged = true;
      return res;
    }
  }
  if (!warm) {
    for (int i = 0; i < 5; ++i) {
      solve_axis(true, cx, nullptr, 0.0);
      solve_axis(false, cy, nullptr, 0.0);
    }
  }
  const int budget = warm ? std::min(params_.warm_iterations, params_.max_iterations) : params_.max_iterations;
  double lambda = warm ? params_.warm_lambda : params_.lambda_init;
  Coord best_h = std::numeric_limits<Coord>::max();
  Placement best;
  Coord prev = -1;
  int streak = 0;
  std::vector<double> sx, sy;
  for (int it = 0; it < budget; ++it) {
    spread(cx, cy, sx, sy);
    Placement upper = integerize(sx, sy);
    Coord h = hpwl(d_, upper);
    res.iterations = it + 1;
    if (h < best_h) {
      best_h = h;
      best = upper;
    }
    Coord lower = hpwl(d_, integerize(cx, cy));
    bool small_change = prev > 0 && std::abs(static_cast<double>(h - prev)) <=
                                        params_.convergence_tol * static_cast<double>(prev);
    streak = small_change ? streak + 1 : 0;
    prev = h;
    if (streak >= 2 || (h > 0 && static_cast<double>(h - lower) < 0.05 * static_cast<double>(h))) {
      res.converged = true;
      break;
    }
    if (it + 1 == budget) break;
    solve_axis(true, cx, &sx, lambda);
    solve_axis(false, cy, &sy, lambda);
    lambda *= params_.lambda_mult;
  }
  if (warm) res.converged = true;
  project(best);
  res.placement = std::move(best);
  return res;
}

}  // namespace

GlobalResult global_place_ex(const Design &design, const RegionConstraintSet &constraints,
                             const PlaceParams &params, const Placement *warm) {
  params.validate();
  constraints.validate(design);
  GlobalPlacer gp(design, constraints, params);
  return gp.run(warm);
}

Placement global_place(const Design &design, const RegionConstraintSet &constraints, const PlaceParams &params) {
  return global_place_ex(design, constraints, params).placement;
}

double max_bin_density(const Design &design, const Placement &p, const PlaceParams &params) {
  const Coord side = params.bin_rows * design.row_height;
  const Rect &die = design.die;
  const int nbx = static_cast<int>(std::max<Coord>(1, die.width() / side));
  const int nby = static_cast<int>(std::max<Coord>(1, die.height() / side));
  std::vector<Coord> xb, yb;
  for (int i = 0; i <= nbx; ++i) xb.push_back(die.x_lo + die.width() * i / nbx);
  for (int i = 0; i <= nby; ++i) yb.push_back(die.y_lo + die.height() * i / nby);
  auto index = [](const std::vector<Coord> &b, Coord v) {
    int i = static_cast<int>(std::upper_bound(b.begin(), b.end(), v) - b.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(b.size()) - 2);
  };
  std::vector<double> mov(static_cast<std::size_t>(nbx) * nby, 0.0), blk(mov.size(), 0.0);
  auto raster = [&](const Rect &b, std::vector<double> &out) {
    Rect q{std::max(b.x_lo, die.x_lo), std::max(b.y_lo, die.y_lo), std::min(b.x_hi, die.x_hi),
           std::min(b.y_hi, die.y_hi)};
    if (!q.valid()) return;
    for (int iy = index(yb, q.y_lo); iy <= index(yb, q.y_hi - 1); ++iy) {
      for (int ix = index(xb, q.x_lo); ix <= index(xb, q.x_hi - 1); ++ix) {
        Rect bin{xb[ix], yb[iy], xb[ix + 1], yb[iy + 1]};
        out[static_cast<std::size_t>(iy) * nbx + ix] += static_cast<double>(bin.overlap_area(q));
      }
    }
  };
  for (const Cell &c : design.cells) {
    Rect b = p.box(design, c.id);
    if (c.fixed()) {
      if (c.kind == CellKind::Macro) raster(b, blk);
    } else {
      raster(b, mov);
    }
  }
  double worst = 0.0;
  for (int iy = 0; iy < nby; ++iy) {
    for (int ix = 0; ix < nbx; ++ix) {
      Rect bin{xb[ix], yb[iy], xb[ix + 1], yb[iy + 1]};
      std::size_t i = static_cast<std::size_t>(iy) * nbx + ix;
      double free = static_cast<double>(bin.area()) - blk[i];
      if (free < 0.5 * static_cast<double>(bin.area())) continue;
      worst = std::max(worst, mov[i] / free);
    }
  }
  return worst;
}

}  // namespace wmp
