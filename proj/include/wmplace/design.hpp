#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wmp {

// Integer placement units; row_height is the vertical base unit.
using Coord = std::int64_t;

// Half-open box [x_lo, x_hi) x [y_lo, y_hi).
struct Rect {
  Coord x_lo = 0;
  Coord y_lo = 0;
  Coord x_hi = 0;
  Coord y_hi = 0;

  Coord width() const { return x_hi - x_lo; }
  Coord height() const { return y_hi - y_lo; }
  Coord area() const { return width() * height(); }
  bool valid() const { return x_lo < x_hi && y_lo < y_hi; }

  bool contains(const Rect &o) const {
    return o.x_lo >= x_lo && o.x_hi <= x_hi && o.y_lo >= y_lo &&
           o.y_hi <= y_hi;
  }
  bool intersects(const Rect &o) const {
    return o.x_lo < x_hi && x_lo < o.x_hi && o.y_lo < y_hi && y_lo < o.y_hi;
  }
  Coord overlap_area(const Rect &o) const {
    Coord w = std::min(x_hi, o.x_hi) - std::max(x_lo, o.x_lo);
    Coord h = std::min(y_hi, o.y_hi) - std::max(y_lo, o.y_lo);
    return (w > 0 && h > 0) ? w * h : 0;
  }
  bool operator==(const Rect &) const = default;
};

// True when the center of box (x, y, w, h) lies in r. Evaluated on doubled
// coordinates so odd widths stay exact.
inline bool center_in(const Rect &r, Coord x, Coord y, Coord w, Coord h) {
  Coord cx = 2 * x + w;
  Coord cy = 2 * y + h;
  return cx >= 2 * r.x_lo && cx < 2 * r.x_hi && cy >= 2 * r.y_lo &&
         cy < 2 * r.y_hi;
}

enum class CellKind { Movable, Macro, Io, Buffer };

const char *to_string(CellKind kind);
std::optional<CellKind> cell_kind_from_string(std::string_view s);

struct Cell {
  int id = 0;
  std::string name;
  Coord width = 1;
  Coord height = 1;
  CellKind kind = CellKind::Movable;
  int region = -1;  // fence region id, -1 when unconstrained
  // Design coordinates (lower-left). Authoritative for fixed cells; initial
  // location for movable ones.
  Coord x = 0;
  Coord y = 0;

  bool fixed() const { return kind == CellKind::Macro || kind == CellKind::Io; }
  Coord area() const { return width * height; }
};

struct Pin {
  int cell = 0;
  Coord dx = 0;  // offset from the cell's lower-left corner
  Coord dy = 0;
  bool operator==(const Pin &) const = default;
};

struct Net {
  int id = 0;
  std::string name;
  std::vector<Pin> pins;  // pins[0] is the driver
  bool endpoint = false;
};

struct Row {
  Coord x_lo = 0;
  Coord x_hi = 0;
  Coord y = 0;
  bool operator==(const Row &) const = default;
};

struct FenceRegion {
  int id = 0;
  std::string name;
  std::vector<Rect> rects;
};

// Immutable netlist + geometry. Construct through the fields and then call
// finalize(), which validates invariants and builds the derived indices.
struct Design {
  std::string name;
  Rect die;
  Coord row_height = 1;
  std::vector<Row> rows;
  std::vector<Cell> cells;
  std::vector<Net> nets;
  std::vector<FenceRegion> fences;

  // Derived: nets touching each cell, in ascending net id.
  std::vector<std::vector<int>> cell_nets;

  void finalize();
  // Returns human-readable invariant violations (empty when valid).
  std::vector<std::string> check_invariants() const;

  int num_cells() const { return static_cast<int>(cells.size()); }
  int find_cell(std::string_view cell_name) const;
  std::vector<int> movable_cells() const;
  Coord movable_area() const;
  bool fenced(int cell) const { return cells[cell].region >= 0; }

 private:
  std::unordered_map<std::string, int> by_name_;
};

enum class Stage { Global, Legalized, Detailed };
const char *to_string(Stage stage);

struct Placement {
  std::vector<Coord> x;
  std::vector<Coord> y;
  Stage stage = Stage::Global;

  Placement() = default;
  // Initial placement: every cell at its design coordinates.
  static Placement from_design(const Design &design, Stage stage);

  std::size_t size() const { return x.size(); }
  Rect box(const Design &design, int cell) const {
    const Cell &c = design.cells[cell];
    return Rect{x[cell], y[cell], x[cell] + c.width, y[cell] + c.height};
  }
  bool same_positions(const Placement &o) const {
    return x == o.x && y == o.y;
  }
};

}  // namespace wmp
