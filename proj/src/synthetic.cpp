#include "wmplace/synthetic.hpp"

#include <cmath>

#include "wmplace/errors.hpp"
#include "wmplace/rng.hpp"

namespace wmp {

namespace {

struct Point {
  Coord x = 0;
  Coord y = 0;
};

bool overlaps_any(const Rect &r, const std::vector<Rect> &others, Coord gap) {
  Rect grown{r.x_lo - gap, r.y_lo - gap, r.x_hi + gap, r.y_hi + gap};
  for (const Rect &o : others) {
    if (grown.intersects(o)) return true;
  }
  return false;
}

// Row-aligned box of roughly `area`, placed away from `avoid`.
Rect place_block(Rng &rng, Coord area, Coord die_w, Coord rows, Coord rh,
                 const std::vector<Rect> &avoid, Coord gap, double jitter,
                 const char *what) {
  double side = std::sqrt(static_cast<double>(area));
  double skew = 1.0 + jitter * (2.0 * rng.unit() - 1.0);
  Coord h_rows = std::max<Coord>(1, std::llround(side * skew / rh));
  h_rows = std::min(h_rows, rows);
  Coord w = std::max<Coord>(rh, (area + h_rows * rh - 1) / (h_rows * rh));
  if (w > die_w) w = die_w;
  for (int attempt = 0; attempt < 4000; ++attempt) {
    Coord x = rng.range(0, die_w - w);
    Coord y = rh * rng.range(0, rows - h_rows);
    Rect r{x, y, x + w, y + h_rows * rh};
    if (!overlaps_any(r, avoid, gap)) return r;
  }
  throw InfeasibleConfig(std::string("could not place ") + what +
                         " without overlap");
}

int sample_degree(Rng &rng) {
  double u = rng.unit();
  if (u < 0.45) return 2;
  if (u < 0.70) return 3;
  if (u < 0.85) return 4;
  if (u < 0.95) return 5;
  return 6;
}

}  // namespace

Design generate_synthetic(const SyntheticConfig &cfg, std::uint64_t seed) {
  if (cfg.n_cells < 1) throw InvalidParams("n_cells must be at least 1");
  if (!(cfg.utilization > 0.0 && cfg.utilization <= 0.95)) {
    throw InvalidParams("utilization must lie in (0, 0.95]");
  }
  if (cfg.n_nets < 0 || cfg.n_macros < 0 || cfg.n_fences < 0) {
    throw InvalidParams("entity counts must be non-negative");
  }
  if (cfg.row_height < 1 || cfg.min_width < 1 || cfg.max_width < cfg.min_width ||
      cfg.die_aspect <= 0.0) {
    throw InvalidParams("invalid cell geometry parameters");
  }
  Rng rng(seed);
  const Coord rh = cfg.row_height;
  Design d;
  d.name = "synth" + std::to_string(cfg.n_cells) + "_s" + std::to_string(seed);
  d.row_height = rh;

  bool allow_double = cfg.n_cells >= 50 && cfg.double_height_fraction > 0.0;
  Coord movable_area = 0;
  for (int i = 0; i < cfg.n_cells; ++i) {
    Cell c;
    c.id = i;
    c.name = "c" + std::to_string(i);
    c.width = rng.range(cfg.min_width, cfg.max_width);
    c.height = (allow_double && rng.chance(cfg.double_height_fraction)) ? 2 * rh : rh;
    movable_area += c.area();
    d.cells.push_back(std::move(c));
  }

  double base = static_cast<double>(movable_area) / cfg.utilization;
  std::vector<Coord> macro_area(cfg.n_macros);
  double total_macro = 0;
  for (int m = 0; m < cfg.n_macros; ++m) {
    macro_area[m] = std::max<Coord>(rh * rh, std::llround(0.03 * base));
    total_macro += static_cast<double>(macro_area[m]);
  }
  double die_area = base + total_macro;
  Coord rows = std::max<Coord>(
      1, std::llround(std::sqrt(die_area / cfg.die_aspect) / static_cast<double>(rh)));
  Coord die_w = static_cast<Coord>(std::ceil(die_area / static_cast<double>(rows * rh)));
  die_w = std::max(die_w, cfg.max_width);
  d.die = Rect{0, 0, die_w, rows * rh};
  for (Coord r = 0; r < rows; ++r) d.rows.push_back(Row{0, die_w, r * rh});
  if (allow_double && rows < 2) {
    for (Cell &c : d.cells) c.height = rh;
  }

  // Macros first: they shape the free space everything else samples from.
  std::vector<Rect> macros;
  for (int m = 0; m < cfg.n_macros; ++m) {
    if (macro_area[m] > d.die.area() / 2) {
      throw InfeasibleConfig("macro does not fit in the die");
    }
    macros.push_back(place_block(rng, macro_area[m], die_w, rows, rh, macros,
                                 rh, 0.3, "macro"));
  }
  std::vector<Rect> blocked = macros;
  std::vector<Rect> fence_rects;
  for (int f = 0; f < cfg.n_fences; ++f) {
    Coord area = std::max<Coord>(rh * rh, std::llround(0.08 * die_area));
    Rect r = place_block(rng, area, die_w, rows, rh, blocked, 0, 0.2, "fence");
    blocked.push_back(r);
    fence_rects.push_back(r);
    FenceRegion fr;
    fr.id = f;
    fr.name = "region" + std::to_string(f);
    fr.rects.push_back(r);
    d.fences.push_back(fr);
  }

  // Hidden positions drive net locality, fence membership and initial coords.
  std::vector<Point> hidden(cfg.n_cells);
  for (int i = 0; i < cfg.n_cells; ++i) {
    Point p;
    for (int attempt = 0; attempt < 100; ++attempt) {
      p.x = rng.range(0, die_w - 1);
      p.y = rng.range(0, rows * rh - 1);
      Rect probe{p.x, p.y, p.x + 1, p.y + 1};
      if (!overlaps_any(probe, macros, 0)) break;
    }
    hidden[i] = p;
  }
  for (int f = 0; f < cfg.n_fences; ++f) {
    const Rect &r = fence_rects[f];
    Coord budget = static_cast<Coord>(cfg.utilization * static_cast<double>(r.area()));
    Coord used = 0;
    for (int i = 0; i < cfg.n_cells; ++i) {
      Cell &c = d.cells[i];
      if (c.region >= 0 || c.height != rh) continue;
      Rect probe{hidden[i].x, hidden[i].y, hidden[i].x + 1, hidden[i].y + 1};
      if (!r.intersects(probe) || used + c.area() > budget) continue;
      c.region = f;
      used += c.area();
    }
  }
  for (int i = 0; i < cfg.n_cells; ++i) {
    Cell &c = d.cells[i];
    c.x = std::clamp<Coord>(hidden[i].x - c.width / 2, 0, die_w - c.width);
    c.y = std::clamp<Coord>((hidden[i].y / rh) * rh, 0, rows * rh - c.height);
  }

  for (int m = 0; m < cfg.n_macros; ++m) {
    Cell c;
    c.id = static_cast<int>(d.cells.size());
    c.name = "m" + std::to_string(m);
    c.kind = CellKind::Macro;
    c.x = macros[m].x_lo;
    c.y = macros[m].y_lo;
    c.width = macros[m].width();
    c.height = macros[m].height();
    d.cells.push_back(std::move(c));
  }

  int n_io = cfg.n_io >= 0 ? cfg.n_io
                           : static_cast<int>(std::llround(std::sqrt(cfg.n_cells)));
  n_io = std::min(n_io, cfg.n_nets);
  std::vector<Point> pad_pos(n_io);
  const int first_pad = static_cast<int>(d.cells.size());
  for (int j = 0; j < n_io; ++j) {
    Cell c;
    c.id = static_cast<int>(d.cells.size());
    c.name = "p" + std::to_string(j);
    c.kind = CellKind::Io;
    c.width = 1;
    c.height = 1;
    switch (rng.below(4)) {
      case 0:
        c.x = rng.range(0, die_w - 1);
        c.y = -1;
        break;
      case 1:
        c.x = rng.range(0, die_w - 1);
        c.y = rows * rh;
        break;
      case 2:
        c.x = -1;
        c.y = rng.range(0, rows * rh - 1);
        break;
      default:
        c.x = die_w;
        c.y = rng.range(0, rows * rh - 1);
        break;
    }
    pad_pos[j] = Point{std::clamp<Coord>(c.x, 0, die_w - 1),
                       std::clamp<Coord>(c.y, 0, rows * rh - 1)};
    d.cells.push_back(std::move(c));
  }

  // Locality buckets over hidden positions, about 16 cells each.
  double bucket_side = std::sqrt(die_area * 16.0 / cfg.n_cells);
  int bx = std::max(1, static_cast<int>(std::ceil(die_w / bucket_side)));
  int by = std::max(1, static_cast<int>(std::ceil(rows * rh / bucket_side)));
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(bx) * by);
  auto bucket_of = [&](const Point &p) {
    int ix = std::min(bx - 1, static_cast<int>(p.x / bucket_side));
    int iy = std::min(by - 1, static_cast<int>(p.y / bucket_side));
    return std::pair<int, int>(ix, iy);
  };
  for (int i = 0; i < cfg.n_cells; ++i) {
    auto [ix, iy] = bucket_of(hidden[i]);
    buckets[static_cast<std::size_t>(iy) * bx + ix].push_back(i);
  }

  std::vector<int> order(cfg.n_cells);
  for (int i = 0; i < cfg.n_cells; ++i) order[i] = i;
  rng.shuffle(order);

  for (int k = 0; k < cfg.n_nets; ++k) {
    Net net;
    net.id = k;
    net.name = "n" + std::to_string(k);
    std::vector<int> members;
    Point anchor;
    if (k < n_io) {
      members.push_back(first_pad + k);
      anchor = pad_pos[k];
    } else {
      int c0 = order[(k - n_io) % cfg.n_cells];
      members.push_back(c0);
      anchor = hidden[c0];
    }
    int degree = std::min(sample_degree(rng),
                          static_cast<int>(members.size()) + cfg.n_cells -
                              (k < n_io ? 0 : 1));
    auto taken = [&](int id) {
      return std::find(members.begin(), members.end(), id) != members.end();
    };
    while (static_cast<int>(members.size()) < degree) {
      int pick = -1;
      auto [ix, iy] = bucket_of(anchor);
      for (int tries = 0; tries < 8 && pick < 0; ++tries) {
        int nx = std::clamp(ix + static_cast<int>(rng.range(-1, 1)), 0, bx - 1);
        int ny = std::clamp(iy + static_cast<int>(rng.range(-1, 1)), 0, by - 1);
        const auto &b = buckets[static_cast<std::size_t>(ny) * bx + nx];
        if (b.empty()) continue;
        int cand = b[rng.below(b.size())];
        if (!taken(cand)) pick = cand;
      }
      if (pick < 0) {
        for (int tries = 0; tries < 64 && pick < 0; ++tries) {
          int cand = static_cast<int>(rng.below(cfg.n_cells));
          if (!taken(cand)) pick = cand;
        }
      }
      if (pick < 0) break;
      members.push_back(pick);
    }
    // Driver = lowest rank: pads first, then lowest cell id.
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      bool pa = d.cells[a].kind == CellKind::Io;
      bool pb = d.cells[b].kind == CellKind::Io;
      if (pa != pb) return pa;
      return a < b;
    });
    for (int id : members) {
      const Cell &c = d.cells[id];
      net.pins.push_back(Pin{id, rng.range(0, c.width), rng.range(0, c.height)});
    }
    net.endpoint = rng.chance(cfg.endpoint_fraction);
    d.nets.push_back(std::move(net));
  }

  d.finalize();
  return d;
}

double measured_utilization(const Design &design) {
  Coord blocked = 0;
  for (const Cell &c : design.cells) {
    if (c.kind != CellKind::Macro) continue;
    blocked += design.die.overlap_area(Rect{c.x, c.y, c.x + c.width, c.y + c.height});
  }
  double free_area = static_cast<double>(design.die.area() - blocked);
  return static_cast<double>(design.movable_area()) / free_area;
}

}  // namespace wmp
