#include "wmplace/bookshelf.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wmplace/errors.hpp"

namespace fs = std::filesystem;

namespace wmp {

namespace {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

// Splits a file into non-empty, comment-free token lines. ':' is always a
// standalone token so "NumNodes:4" and "NumNodes : 4" read the same.
std::vector<Line> read_lines(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  std::vector<Line> out;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string spaced;
    spaced.reserve(raw.size() + 8);
    for (char ch : raw) {
      if (ch == ':') {
        spaced += " : ";
      } else {
        spaced += ch;
      }
    }
    std::istringstream ss(spaced);
    Line line;
    line.number = number;
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

bool is_header(const Line &line) {
  return !line.tokens.empty() && line.tokens[0] == "UCLA";
}

double parse_number(const std::string &file, const Line &line,
                    const std::string &tok) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception &) {
    throw SyntaxError(file, line.number, tok);
  }
}

Coord parse_coord(const std::string &file, const Line &line,
                  const std::string &tok) {
  return static_cast<Coord>(std::llround(parse_number(file, line, tok)));
}

// Value after "Key :" on a line.
const std::string &keyed_value(const std::string &file, const Line &line,
                               std::size_t key_index) {
  if (line.tokens.size() <= key_index + 2 ||
      line.tokens[key_index + 1] != ":") {
    throw SyntaxError(file, line.number, line.tokens[key_index]);
  }
  return line.tokens[key_index + 2];
}

struct RawNode {
  std::string name;
  Coord w = 0;
  Coord h = 0;
  bool terminal = false;
  int line = 0;
};

std::string half_units(Coord twice) {
  // twice / 2 printed exactly.
  std::string s = std::to_string(twice / 2);
  if (twice % 2 != 0) {
    if (twice < 0 && twice / 2 == 0) s = "-0";
    s += ".5";
  }
  return s;
}

}  // namespace

Design parse_bookshelf(const fs::path &aux_path) {
  const std::string aux_file = aux_path.string();
  auto aux_lines = read_lines(aux_path);
  fs::path dir = aux_path.parent_path();
  std::map<std::string, fs::path> files;
  for (const Line &line : aux_lines) {
    for (const std::string &tok : line.tokens) {
      fs::path p(tok);
      std::string ext = p.extension().string();
      if (ext == ".nodes" || ext == ".nets" || ext == ".pl" ||
          ext == ".scl" || ext == ".wts" || ext == ".fence") {
        files[ext] = dir / p;
      }
    }
  }
  for (const char *ext : {".nodes", ".nets", ".pl", ".scl"}) {
    if (!files.count(ext)) {
      throw MissingFile(aux_file + " does not name a " + ext + " file");
    }
  }

  Design design;
  design.name = aux_path.stem().string();

  // .scl first: row height classifies terminals.
  {
    const std::string file = files[".scl"].string();
    auto lines = read_lines(files[".scl"]);
    bool in_row = false;
    Row row;
    Coord height = 0, spacing = 1, origin = 0, num_sites = 0;
    bool have_origin = false;
    for (const Line &line : lines) {
      if (is_header(line)) continue;
      const std::string &key = line.tokens[0];
      if (key == "NumRows" || key == "NumRow") continue;
      if (key == "CoreRow") {
        if (line.tokens.size() < 2 || line.tokens[1] != "Horizontal") {
          throw SyntaxError(file, line.number,
                            line.tokens.size() > 1 ? line.tokens[1] : key);
        }
        in_row = true;
        row = Row{};
        height = 0;
        spacing = 1;
        origin = 0;
        num_sites = 0;
        have_origin = false;
        continue;
      }
      if (!in_row) throw SyntaxError(file, line.number, key);
      if (key == "End") {
        if (!have_origin || height <= 0) {
          throw SyntaxError(file, line.number, key);
        }
        if (design.rows.empty()) {
          design.row_height = height;
        } else if (height != design.row_height) {
          throw SyntaxError(file, line.number, std::to_string(height));
        }
        row.x_lo = origin;
        row.x_hi = origin + num_sites * spacing;
        design.rows.push_back(row);
        in_row = false;
      } else if (key == "Coordinate") {
        row.y = parse_coord(file, line, keyed_value(file, line, 0));
      } else if (key == "Height") {
        height = parse_coord(file, line, keyed_value(file, line, 0));
      } else if (key == "Sitespacing") {
        spacing = parse_coord(file, line, keyed_value(file, line, 0));
      } else if (key == "Sitewidth" || key == "Siteorient" ||
                 key == "Sitesymmetry") {
        keyed_value(file, line, 0);
      } else if (key == "SubrowOrigin") {
        origin = parse_coord(file, line, keyed_value(file, line, 0));
        have_origin = true;
        for (std::size_t i = 3; i + 2 < line.tokens.size() + 0; ++i) {
          if (line.tokens[i] == "NumSites" || line.tokens[i] == "Numsites") {
            num_sites = parse_coord(file, line, keyed_value(file, line, i));
          }
        }
      } else {
        throw SyntaxError(file, line.number, key);
      }
    }
    if (in_row) throw SyntaxError(file, lines.empty() ? 0 : lines.back().number, "CoreRow");
    if (design.rows.empty()) throw SyntaxError(file, 0, "NumRows");
    std::sort(design.rows.begin(), design.rows.end(),
              [](const Row &a, const Row &b) {
                return a.y != b.y ? a.y < b.y : a.x_lo < b.x_lo;
              });
    for (std::size_t i = 1; i < design.rows.size(); ++i) {
      const Row &a = design.rows[i - 1];
      const Row &b = design.rows[i];
      bool same_band = b.y < a.y + design.row_height;
      if (same_band && (b.y != a.y || b.x_lo < a.x_hi)) {
        throw OverlappingRows(file, 0,
                              "rows at y=" + std::to_string(a.y) + " and y=" +
                                  std::to_string(b.y) + " overlap");
      }
    }
    Rect die{design.rows[0].x_lo, design.rows[0].y, design.rows[0].x_hi,
             design.rows[0].y + design.row_height};
    for (const Row &r : design.rows) {
      die.x_lo = std::min(die.x_lo, r.x_lo);
      die.x_hi = std::max(die.x_hi, r.x_hi);
      die.y_lo = std::min(die.y_lo, r.y);
      die.y_hi = std::max(die.y_hi, r.y + design.row_height);
    }
    design.die = die;
  }

  // .nodes
  std::vector<RawNode> nodes;
  {
    const std::string file = files[".nodes"].string();
    for (const Line &line : read_lines(files[".nodes"])) {
      if (is_header(line)) continue;
      const std::string &key = line.tokens[0];
      if (key == "NumNodes" || key == "NumTerminals") {
        keyed_value(file, line, 0);
        continue;
      }
      if (line.tokens.size() < 3) throw SyntaxError(file, line.number, key);
      RawNode n;
      n.name = key;
      n.w = parse_coord(file, line, line.tokens[1]);
      n.h = parse_coord(file, line, line.tokens[2]);
      n.line = line.number;
      if (line.tokens.size() > 3) {
        const std::string &flag = line.tokens[3];
        if (flag == "terminal" || flag == "terminal_NI") {
          n.terminal = true;
        } else {
          throw SyntaxError(file, line.number, flag);
        }
      }
      if (n.w <= 0 || n.h <= 0) throw SyntaxError(file, line.number, key);
      nodes.push_back(std::move(n));
    }
  }
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!index.emplace(nodes[i].name, static_cast<int>(i)).second) {
      throw SyntaxError(files[".nodes"].string(), nodes[i].line, nodes[i].name);
    }
  }

  // .pl
  std::vector<char> seen(nodes.size(), 0);
  std::vector<Coord> px(nodes.size(), 0), py(nodes.size(), 0);
  std::vector<char> fixed_mark(nodes.size(), 0);
  int pl_last_line = 0;
  {
    const std::string file = files[".pl"].string();
    for (const Line &line : read_lines(files[".pl"])) {
      pl_last_line = line.number;
      if (is_header(line)) continue;
      if (line.tokens.size() < 3) throw SyntaxError(file, line.number, line.tokens[0]);
      auto it = index.find(line.tokens[0]);
      if (it == index.end()) throw SyntaxError(file, line.number, line.tokens[0]);
      int id = it->second;
      px[id] = parse_coord(file, line, line.tokens[1]);
      py[id] = parse_coord(file, line, line.tokens[2]);
      seen[id] = 1;
      for (std::size_t i = 3; i < line.tokens.size(); ++i) {
        const std::string &t = line.tokens[i];
        if (t == "/FIXED" || t == "/FIXED_NI") fixed_mark[id] = 1;
      }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!seen[i]) throw SyntaxError(file, pl_last_line, nodes[i].name);
    }
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const RawNode &n = nodes[i];
    Cell c;
    c.id = static_cast<int>(i);
    c.name = n.name;
    c.width = n.w;
    c.height = n.h;
    c.x = px[i];
    c.y = py[i];
    if (n.terminal || fixed_mark[i]) {
      bool big = n.w >= design.row_height && n.h >= design.row_height;
      c.kind = big ? CellKind::Macro : CellKind::Io;
    }
    design.cells.push_back(std::move(c));
  }

  // .nets
  {
    const std::string file = files[".nets"].string();
    auto lines = read_lines(files[".nets"]);
    std::size_t i = 0;
    while (i < lines.size()) {
      const Line &line = lines[i];
      if (is_header(line)) {
        ++i;
        continue;
      }
      const std::string &key = line.tokens[0];
      if (key == "NumNets" || key == "NumPins") {
        keyed_value(file, line, 0);
        ++i;
        continue;
      }
      if (key != "NetDegree") throw SyntaxError(file, line.number, key);
      Coord degree = parse_coord(file, line, keyed_value(file, line, 0));
      Net net;
      net.id = static_cast<int>(design.nets.size());
      net.name = line.tokens.size() > 3 ? line.tokens[3]
                                        : "net" + std::to_string(net.id);
      ++i;
      for (Coord k = 0; k < degree; ++k, ++i) {
        if (i >= lines.size()) {
          throw SyntaxError(file, line.number, net.name);
        }
        const Line &pl = lines[i];
        auto it = index.find(pl.tokens[0]);
        if (it == index.end()) {
          throw DanglingPinReference(file, pl.number,
                                     "pin references unknown node '" +
                                         pl.tokens[0] + "'");
        }
        const Cell &c = design.cells[it->second];
        Pin pin;
        pin.cell = c.id;
        double ox = 0, oy = 0;
        // name dir [: ox oy]
        if (pl.tokens.size() >= 5 && pl.tokens[2] == ":") {
          ox = parse_number(file, pl, pl.tokens[3]);
          oy = parse_number(file, pl, pl.tokens[4]);
        } else if (pl.tokens.size() != 2 && pl.tokens.size() != 1) {
          throw SyntaxError(file, pl.number, pl.tokens.back());
        }
        pin.dx = static_cast<Coord>(std::llround((c.width + 2.0 * ox) / 2.0));
        pin.dy = static_cast<Coord>(std::llround((c.height + 2.0 * oy) / 2.0));
        pin.dx = std::clamp<Coord>(pin.dx, 0, c.width);
        pin.dy = std::clamp<Coord>(pin.dy, 0, c.height);
        net.pins.push_back(pin);
      }
      if (net.pins.empty()) throw SyntaxError(file, line.number, net.name);
      design.nets.push_back(std::move(net));
    }
  }

  // .wts: only unit weights are accepted.
  if (files.count(".wts") && fs::exists(files[".wts"])) {
    const std::string file = files[".wts"].string();
    for (const Line &line : read_lines(files[".wts"])) {
      if (is_header(line) || line.tokens.size() < 2) continue;
      double w = parse_number(file, line, line.tokens[1]);
      if (w != 1.0) throw SyntaxError(file, line.number, line.tokens[1]);
    }
  }

  fs::path fence = files.count(".fence")
                       ? files[".fence"]
                       : dir / (aux_path.stem().string() + ".fence");
  if (fs::exists(fence)) {
    const std::string file = fence.string();
    std::map<int, FenceRegion> regions;
    std::vector<std::pair<int, std::string>> members;
    std::unordered_map<std::string, int> net_index;
    for (const Net &n : design.nets) net_index.emplace(n.name, n.id);
    for (const Line &line : read_lines(fence)) {
      const std::string &key = line.tokens[0];
      if (key == "region" && line.tokens.size() == 6) {
        int id = static_cast<int>(parse_coord(file, line, line.tokens[1]));
        Rect r{parse_coord(file, line, line.tokens[2]),
               parse_coord(file, line, line.tokens[3]),
               parse_coord(file, line, line.tokens[4]),
               parse_coord(file, line, line.tokens[5])};
        if (!r.valid()) throw SyntaxError(file, line.number, line.tokens[1]);
        auto &reg = regions[id];
        reg.id = id;
        reg.name = "region" + std::to_string(id);
        reg.rects.push_back(r);
      } else if (key == "member" && line.tokens.size() == 3) {
        int id = static_cast<int>(parse_coord(file, line, line.tokens[1]));
        members.emplace_back(id, line.tokens[2]);
        if (index.find(line.tokens[2]) == index.end()) {
          throw DanglingPinReference(file, line.number,
                                     "member references unknown node '" +
                                         line.tokens[2] + "'");
        }
      } else if (key == "endpoint" && line.tokens.size() == 2) {
        auto it = net_index.find(line.tokens[1]);
        if (it == net_index.end()) {
          throw SyntaxError(file, line.number, line.tokens[1]);
        }
        design.nets[it->second].endpoint = true;
      } else {
        throw SyntaxError(file, line.number, key);
      }
    }
    // Dense ids in ascending order of the declared ids.
    std::map<int, int> remap;
    for (auto &[id, reg] : regions) {
      int dense = static_cast<int>(design.fences.size());
      remap[id] = dense;
      reg.id = dense;
      design.fences.push_back(reg);
    }
    for (auto &[id, name] : members) {
      auto it = remap.find(id);
      if (it == remap.end()) {
        throw SyntaxError(file, 0, "member of undeclared region " +
                                       std::to_string(id));
      }
      Cell &c = design.cells[index[name]];
      if (c.region >= 0 && c.region != it->second) {
        throw SyntaxError(file, 0, name);
      }
      c.region = it->second;
    }
  }

  design.finalize();
  return design;
}

std::string format_pl(const Design &design, const Placement &placement) {
  std::ostringstream out;
  out << "UCLA pl 1.0\n\n";
  for (const Cell &c : design.cells) {
    out << c.name << ' ' << placement.x[c.id] << ' ' << placement.y[c.id]
        << " : N";
    if (c.fixed()) out << " /FIXED";
    out << '\n';
  }
  return out.str();
}

void write_pl(const Design &design, const Placement &placement,
              const fs::path &path) {
  std::ofstream out(path);
  if (!out) throw MissingFile(path.string());
  out << format_pl(design, placement);
}

Placement read_pl(const Design &design, const fs::path &path, Stage stage) {
  const std::string file = path.string();
  Placement p = Placement::from_design(design, stage);
  std::vector<char> seen(design.cells.size(), 0);
  int last = 0;
  for (const Line &line : read_lines(path)) {
    last = line.number;
    if (is_header(line)) continue;
    if (line.tokens.size() < 3) throw SyntaxError(file, line.number, line.tokens[0]);
    int id = design.find_cell(line.tokens[0]);
    if (id < 0) throw SyntaxError(file, line.number, line.tokens[0]);
    p.x[id] = parse_coord(file, line, line.tokens[1]);
    p.y[id] = parse_coord(file, line, line.tokens[2]);
    seen[id] = 1;
  }
  for (const Cell &c : design.cells) {
    if (!seen[c.id] && !c.fixed()) throw SyntaxError(file, last, c.name);
  }
  return p;
}

fs::path write_bookshelf(const Design &design, const Placement &placement,
                         const fs::path &dir, const std::string &stem) {
  fs::create_directories(dir);
  bool sidecar = !design.fences.empty() ||
                 std::any_of(design.nets.begin(), design.nets.end(),
                             [](const Net &n) { return n.endpoint; });
  {
    std::ofstream out(dir / (stem + ".aux"));
    out << "RowBasedPlacement : " << stem << ".nodes " << stem << ".nets "
        << stem << ".pl " << stem << ".scl";
    if (sidecar) out << ' ' << stem << ".fence";
    out << '\n';
  }
  {
    std::ofstream out(dir / (stem + ".nodes"));
    std::size_t terminals = 0;
    for (const Cell &c : design.cells) terminals += c.fixed() ? 1 : 0;
    out << "UCLA nodes 1.0\n\n";
    out << "NumNodes : " << design.cells.size() << '\n';
    out << "NumTerminals : " << terminals << "\n\n";
    for (const Cell &c : design.cells) {
      out << "  " << c.name << ' ' << c.width << ' ' << c.height;
      if (c.fixed()) out << " terminal";
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / (stem + ".nets"));
    std::size_t pins = 0;
    for (const Net &n : design.nets) pins += n.pins.size();
    out << "UCLA nets 1.0\n\n";
    out << "NumNets : " << design.nets.size() << '\n';
    out << "NumPins : " << pins << "\n\n";
    for (const Net &n : design.nets) {
      out << "NetDegree : " << n.pins.size() << ' ' << n.name << '\n';
      for (std::size_t k = 0; k < n.pins.size(); ++k) {
        const Pin &p = n.pins[k];
        const Cell &c = design.cells[p.cell];
        out << "  " << c.name << (k == 0 ? " O : " : " I : ")
            << half_units(2 * p.dx - c.width) << ' '
            << half_units(2 * p.dy - c.height) << '\n';
      }
    }
  }
  write_pl(design, placement, dir / (stem + ".pl"));
  {
    std::ofstream out(dir / (stem + ".scl"));
    out << "UCLA scl 1.0\n\n";
    out << "NumRows : " << design.rows.size() << "\n\n";
    for (const Row &r : design.rows) {
      out << "CoreRow Horizontal\n"
          << "  Coordinate : " << r.y << '\n'
          << "  Height : " << design.row_height << '\n'
          << "  Sitewidth : 1\n"
          << "  Sitespacing : 1\n"
          << "  Siteorient : 1\n"
          << "  Sitesymmetry : 1\n"
          << "  SubrowOrigin : " << r.x_lo << " NumSites : " << (r.x_hi - r.x_lo)
          << '\n'
          << "End\n";
    }
  }
  if (sidecar) {
    std::ofstream out(dir / (stem + ".fence"));
    for (const FenceRegion &f : design.fences) {
      for (const Rect &r : f.rects) {
        out << "region " << f.id << ' ' << r.x_lo << ' ' << r.y_lo << ' '
            << r.x_hi << ' ' << r.y_hi << '\n';
      }
    }
    for (const Cell &c : design.cells) {
      if (c.region >= 0) out << "member " << c.region << ' ' << c.name << '\n';
    }
    for (const Net &n : design.nets) {
      if (n.endpoint) out << "endpoint " << n.name << '\n';
    }
  }
  return dir / (stem + ".aux");
}

}  // namespace wmp
