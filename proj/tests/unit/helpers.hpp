#pragma once

#include <string>
#include <vector>

#include "wmplace/design.hpp"
#include "wmplace/synthetic.hpp"

namespace wmp::test {

// Hand-built designs: rows tile the die, pins sit at cell origins.
class Builder {
 public:
  Builder(Coord width, Coord height, Coord row_height, std::string name = "hand") {
    d_.name = std::move(name);
    d_.die = Rect{0, 0, width, height};
    d_.row_height = row_height;
    for (Coord y = 0; y + row_height <= height; y += row_height) d_.rows.push_back(Row{0, width, y});
  }

  int cell(Coord w, Coord h, Coord x, Coord y, CellKind kind = CellKind::Movable, int region = -1) {
    Cell c;
    c.id = static_cast<int>(d_.cells.size());
    c.name = "c" + std::to_string(c.id);
    c.width = w;
    c.height = h;
    c.x = x;
    c.y = y;
    c.kind = kind;
    c.region = region;
    d_.cells.push_back(c);
    return c.id;
  }

  int net(const std::vector<int> &cells, bool endpoint = false, std::vector<Pin> pins = {}) {
    Net n;
    n.id = static_cast<int>(d_.nets.size());
    n.name = "n" + std::to_string(n.id);
    for (int c : cells) n.pins.push_back(Pin{c, 0, 0});
    for (const Pin &p : pins) n.pins.push_back(p);
    n.endpoint = endpoint;
    d_.nets.push_back(n);
    return n.id;
  }

  int fence(std::vector<Rect> rects) {
    FenceRegion f;
    f.id = static_cast<int>(d_.fences.size());
    f.name = "f" + std::to_string(f.id);
    f.rects = std::move(rects);
    d_.fences.push_back(f);
    return f.id;
  }

  Design build() {
    Design d = d_;
    d.finalize();
    return d;
  }

 private:
  Design d_;
};

inline Design synthetic(int cells, std::uint64_t seed, int macros = 0, int fences = 0) {
  SyntheticConfig cfg;
  cfg.n_cells = cells;
  cfg.n_nets = cells * 11 / 10;
  cfg.n_macros = macros;
  cfg.n_fences = fences;
  return generate_synthetic(cfg, seed);
}

inline std::string fixture(const std::string &rel) { return std::string(WMPLACE_FIXTURES) + "/" + rel; }

}  // namespace wmp::test
