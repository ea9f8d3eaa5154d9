#include "wmplace/design.hpp"

#include <map>

#include "wmplace/errors.hpp"

namespace wmp {

const char *to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Movable:
      return "movable";
    case CellKind::Macro:
      return "macro";
    case CellKind::Io:
      return "io";
    case CellKind::Buffer:
      return "buffer";
  }
  return "movable";
}

std::optional<CellKind> cell_kind_from_string(std::string_view s) {
  if (s == "movable") return CellKind::Movable;
  if (s == "macro") return CellKind::Macro;
  if (s == "io") return CellKind::Io;
  if (s == "buffer") return CellKind::Buffer;
  return std::nullopt;
}

const char *to_string(Stage stage) {
  switch (stage) {
    case Stage::Global:
      return "global";
    case Stage::Legalized:
      return "legalized";
    case Stage::Detailed:
      return "detailed";
  }
  return "global";
}

void Design::finalize() {
  auto problems = check_invariants();
  if (!problems.empty()) {
    std::string msg = "invalid design '" + name + "': " + problems.front();
    if (problems.size() > 1) {
      msg += " (+" + std::to_string(problems.size() - 1) + " more)";
    }
    throw InvalidDesign(msg);
  }
  by_name_.clear();
  for (const Cell &c : cells) by_name_.emplace(c.name, c.id);
  cell_nets.assign(cells.size(), {});
  for (const Net &n : nets) {
    for (const Pin &p : n.pins) {
      auto &list = cell_nets[p.cell];
      if (list.empty() || list.back() != n.id) list.push_back(n.id);
    }
  }
}

std::vector<std::string> Design::check_invariants() const {
  std::vector<std::string> out;
  if (!die.valid()) out.push_back("die rectangle is empty");
  if (row_height <= 0) out.push_back("row height must be positive");

  std::map<Coord, std::vector<const Row *>> by_y;
  for (const Row &r : rows) {
    if (r.x_lo >= r.x_hi) out.push_back("empty row at y=" + std::to_string(r.y));
    if (r.x_lo < die.x_lo || r.x_hi > die.x_hi || r.y < die.y_lo ||
        r.y + row_height > die.y_hi) {
      out.push_back("row at y=" + std::to_string(r.y) + " leaves the die");
    }
    by_y[r.y].push_back(&r);
  }
  Coord prev_y = 0;
  bool first = true;
  for (auto &[y, list] : by_y) {
    if (!first && y < prev_y + row_height) {
      out.push_back("rows at y=" + std::to_string(prev_y) + " and y=" +
                    std::to_string(y) + " overlap");
    }
    first = false;
    prev_y = y;
    std::sort(list.begin(), list.end(),
              [](const Row *a, const Row *b) { return a->x_lo < b->x_lo; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->x_lo < list[i - 1]->x_hi) {
        out.push_back("sub-rows overlap at y=" + std::to_string(y));
      }
    }
  }

  std::unordered_map<std::string, int> names;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell &c = cells[i];
    if (c.id != static_cast<int>(i)) out.push_back("cell ids are not dense");
    if (!names.emplace(c.name, c.id).second) {
      out.push_back("duplicate cell name " + c.name);
    }
    if (c.width <= 0 || c.height <= 0) {
      out.push_back("cell " + c.name + " has non-positive size");
    }
    if (!c.fixed() && row_height > 0 && c.height % row_height != 0) {
      out.push_back("movable cell " + c.name +
                    " height is not a multiple of the row height");
    }
    if (c.region >= static_cast<int>(fences.size()) || c.region < -1) {
      out.push_back("cell " + c.name + " references unknown fence region");
    }
    if (c.region >= 0 && c.fixed()) {
      out.push_back("fixed cell " + c.name + " cannot be a fence member");
    }
  }

  for (std::size_t i = 0; i < nets.size(); ++i) {
    const Net &n = nets[i];
    if (n.id != static_cast<int>(i)) out.push_back("net ids are not dense");
    if (n.pins.empty()) out.push_back("net " + n.name + " has no pins");
    for (const Pin &p : n.pins) {
      if (p.cell < 0 || p.cell >= static_cast<int>(cells.size())) {
        out.push_back("net " + n.name + " references a missing cell");
        continue;
      }
      const Cell &c = cells[p.cell];
      if (p.dx < 0 || p.dx > c.width || p.dy < 0 || p.dy > c.height) {
        out.push_back("pin offset outside cell " + c.name + " on net " + n.name);
      }
    }
  }

  for (std::size_t i = 0; i < fences.size(); ++i) {
    const FenceRegion &f = fences[i];
    if (f.id != static_cast<int>(i)) out.push_back("fence ids are not dense");
    if (f.rects.empty()) out.push_back("fence " + f.name + " has no rects");
    for (const Rect &r : f.rects) {
      if (!r.valid() || !die.contains(r)) {
        out.push_back("fence " + f.name + " rect outside the die");
      }
    }
  }
  return out;
}

int Design::find_cell(std::string_view cell_name) const {
  auto it = by_name_.find(std::string(cell_name));
  return it == by_name_.end() ? -1 : it->second;
}

std::vector<int> Design::movable_cells() const {
  std::vector<int> out;
  for (const Cell &c : cells) {
    if (!c.fixed()) out.push_back(c.id);
  }
  return out;
}

Coord Design::movable_area() const {
  Coord a = 0;
  for (const Cell &c : cells) {
    if (!c.fixed()) a += c.area();
  }
  return a;
}

Placement Placement::from_design(const Design &design, Stage stage) {
  Placement p;
  p.stage = stage;
  p.x.reserve(design.cells.size());
  p.y.reserve(design.cells.size());
  for (const Cell &c : design.cells) {
    p.x.push_back(c.x);
    p.y.push_back(c.y);
  }
  return p;
}

}  // namespace wmp
