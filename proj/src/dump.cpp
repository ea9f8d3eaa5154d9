#include "wmplace/dump.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "wmplace/errors.hpp"

namespace wmp {

using nlohmann::json;

json rect_to_json(const Rect &r) { return json::array({r.x_lo, r.y_lo, r.x_hi, r.y_hi}); }

Rect rect_from_json(const json &j) {
  if (!j.is_array() || j.size() != 4) throw CorruptDocument("rect must be [x_lo, y_lo, x_hi, y_hi]");
  return Rect{j[0].get<Coord>(), j[1].get<Coord>(), j[2].get<Coord>(), j[3].get<Coord>()};
}

json design_to_json(const Design &d) {
  json doc;
  doc["format"] = "wmplace-design";
  doc["version"] = kDocumentVersion;
  doc["name"] = d.name;
  doc["die"] = rect_to_json(d.die);
  doc["row_height"] = d.row_height;
  json rows = json::array();
  for (const Row &r : d.rows) rows.push_back(json::array({r.x_lo, r.x_hi, r.y}));
  doc["rows"] = rows;
  json cells = json::array();
  for (const Cell &c : d.cells) {
    cells.push_back(json{{"name", c.name},
                         {"w", c.width},
                         {"h", c.height},
                         {"kind", to_string(c.kind)},
                         {"region", c.region},
                         {"x", c.x},
                         {"y", c.y}});
  }
  doc["cells"] = cells;
  json nets = json::array();
  for (const Net &n : d.nets) {
    json pins = json::array();
    for (const Pin &p : n.pins) pins.push_back(json::array({p.cell, p.dx, p.dy}));
    nets.push_back(json{{"name", n.name}, {"endpoint", n.endpoint}, {"pins", pins}});
  }
  doc["nets"] = nets;
  json fences = json::array();
  for (const FenceRegion &f : d.fences) {
    json rects = json::array();
    for (const Rect &r : f.rects) rects.push_back(rect_to_json(r));
    fences.push_back(json{{"name", f.name}, {"rects", rects}});
  }
  doc["fences"] = fences;
  return doc;
}

Design design_from_json(const json &doc) {
  try {
    if (doc.at("format").get<std::string>() != "wmplace-design") {
      throw CorruptDocument("not a design document");
    }
    int version = doc.at("version").get<int>();
    if (version != kDocumentVersion) {
      throw VersionMismatch("design document version " + std::to_string(version) +
                            " (supported: " + std::to_string(kDocumentVersion) + ")");
    }
    Design d;
    d.name = doc.at("name").get<std::string>();
    d.die = rect_from_json(doc.at("die"));
    d.row_height = doc.at("row_height").get<Coord>();
    for (const json &r : doc.at("rows")) {
      d.rows.push_back(Row{r.at(0).get<Coord>(), r.at(1).get<Coord>(), r.at(2).get<Coord>()});
    }
    for (const json &jc : doc.at("cells")) {
      Cell c;
      c.id = static_cast<int>(d.cells.size());
      c.name = jc.at("name").get<std::string>();
      c.width = jc.at("w").get<Coord>();
      c.height = jc.at("h").get<Coord>();
      auto kind = cell_kind_from_string(jc.at("kind").get<std::string>());
      if (!kind) throw CorruptDocument("unknown cell kind for " + c.name);
      c.kind = *kind;
      c.region = jc.at("region").get<int>();
      c.x = jc.at("x").get<Coord>();
      c.y = jc.at("y").get<Coord>();
      d.cells.push_back(std::move(c));
    }
    for (const json &jn : doc.at("nets")) {
      Net n;
      n.id = static_cast<int>(d.nets.size());
      n.name = jn.at("name").get<std::string>();
      n.endpoint = jn.at("endpoint").get<bool>();
      for (const json &p : jn.at("pins")) {
        n.pins.push_back(Pin{p.at(0).get<int>(), p.at(1).get<Coord>(), p.at(2).get<Coord>()});
      }
      d.nets.push_back(std::move(n));
    }
    for (const json &jf : doc.at("fences")) {
      FenceRegion f;
      f.id = static_cast<int>(d.fences.size());
      f.name = jf.at("name").get<std::string>();
      for (const json &r : jf.at("rects")) f.rects.push_back(rect_from_json(r));
      d.fences.push_back(std::move(f));
    }
    d.finalize();
    return d;
  } catch (const json::exception &e) {
    throw CorruptDocument(std::string("malformed design document: ") + e.what());
  }
}

std::string design_dump(const Design &design) { return design_to_json(design).dump(); }

std::string sha256_hex(const std::string &data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char *hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string design_fingerprint(const Design &design) { return sha256_hex(design_dump(design)); }

void save_design(const Design &design, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw MissingFile(path);
  out << design_to_json(design).dump(1) << '\n';
}

Design load_design(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path);
  std::stringstream ss;
  ss << in.rdbuf();
  json doc = json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded()) throw CorruptDocument("design document is not valid JSON: " + path);
  return design_from_json(doc);
}

}  // namespace wmp
