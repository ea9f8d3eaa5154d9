#include <fstream>
#include <sstream>

#include "wmplace/dump.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/icmarks.hpp"

namespace wmp {

using nlohmann::json;

namespace {

json pairs(const std::vector<Coord> &a, const std::vector<Coord> &b) {
  json out = json::array();
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back({a[i], b[i]});
  return out;
}

void unpairs(const json &j, std::vector<Coord> &a, std::vector<Coord> &b) {
  for (const json &e : j) {
    if (!e.is_array() || e.size() != 2) throw CorruptDocument("coordinate pair expected");
    a.push_back(e[0].get<Coord>());
    b.push_back(e[1].get<Coord>());
  }
}

json gw_params_json(const GwParams &p) {
  return {{"window_w", p.window_w}, {"window_h", p.window_h}, {"stride", p.stride}, {"alpha", p.alpha},
          {"beta", p.beta},         {"gamma", p.gamma},       {"n_bits", p.n_bits},
          {"grid_fallback", p.grid_fallback}, {"pwlr_max", p.pwlr_max}};
}

GwParams gw_params_from(const json &j) {
  GwParams p;
  p.window_w = j.at("window_w").get<Coord>();
  p.window_h = j.at("window_h").get<Coord>();
  p.stride = j.at("stride").get<Coord>();
  p.alpha = j.at("alpha").get<double>();
  p.beta = j.at("beta").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.n_bits = j.at("n_bits").get<int>();
  p.grid_fallback = j.at("grid_fallback").get<bool>();
  p.pwlr_max = j.at("pwlr_max").get<double>();
  return p;
}

json place_params_json(const PlaceParams &p) {
  return {{"density_target", p.density_target},
          {"bin_rows", p.bin_rows},
          {"max_iterations", p.max_iterations},
          {"lambda_init", p.lambda_init},
          {"lambda_mult", p.lambda_mult},
          {"convergence_tol", p.convergence_tol},
          {"seed", p.seed},
          {"dp_passes", p.dp_passes},
          {"warm_iterations", p.warm_iterations},
          {"warm_lambda", p.warm_lambda}};
}

PlaceParams place_params_from(const json &j) {
  PlaceParams p;
  p.density_target = j.at("density_target").get<double>();
  p.bin_rows = j.at("bin_rows").get<Coord>();
  p.max_iterations = j.at("max_iterations").get<int>();
  p.lambda_init = j.at("lambda_init").get<double>();
  p.lambda_mult = j.at("lambda_mult").get<double>();
  p.convergence_tol = j.at("convergence_tol").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.dp_passes = j.at("dp_passes").get<int>();
  p.warm_iterations = j.at("warm_iterations").get<int>();
  p.warm_lambda = j.at("warm_lambda").get<double>();
  return p;
}

}  // namespace

json certificate_to_json(const Certificate &c) {
  json doc;
  doc["format"] = "wmplace-certificate";
  doc["version"] = c.version;
  doc["scheme"] = c.scheme;
  doc["seed"] = c.seed;
  doc["signature"] = c.signature.to_string();
  doc["fingerprint"] = c.fingerprint;
  doc["baseline_hpwl"] = c.baseline_hpwl;
  doc["watermarked_hpwl"] = c.watermarked_hpwl;
  doc["params"] = {{"gw", gw_params_json(c.gw_params)},
                   {"dw", {{"d_x", c.dw_params.d_x}, {"d_y", c.dw_params.d_y}}},
                   {"place", place_params_json(c.place_params)}};
  if (c.gw) {
    doc["gw"] = {{"region", rect_to_json(c.gw->region)},
                 {"members", c.gw->members},
                 {"score", c.gw->score},
                 {"raw_score", c.gw->raw_score},
                 {"params", gw_params_json(c.gw->params)}};
  }
  if (c.dw) {
    const DwWatermark &w = *c.dw;
    doc["dw"] = {{"signature", w.signature.to_string()},
                 {"pool_x", w.pool_x},
                 {"pool_y", w.pool_y},
                 {"cells", w.cells},
                 {"move", pairs(w.move_x, w.move_y)},
                 {"itr", pairs(w.itr_x, w.itr_y)},
                 {"dist", pairs(w.dist_x, w.dist_y)},
                 {"d_x", w.params.d_x},
                 {"d_y", w.params.d_y}};
  }
  if (c.baseline) {
    const BaselineWatermark &b = *c.baseline;
    doc["baseline"] = {{"scheme", b.scheme},
                       {"cells", b.cells},
                       {"parity", b.parity},
                       {"ref", pairs(b.ref_x, b.ref_y)},
                       {"move", pairs(b.move_x, b.move_y)},
                       {"chains", b.chains}};
  }
  return doc;
}

Certificate certificate_from_json(const json &doc) {
  if (!doc.is_object() || doc.value("format", "") != "wmplace-certificate") {
    throw CorruptDocument("not a wmplace certificate");
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer()) {
    throw CorruptDocument("certificate lacks a version");
  }
  int version = doc["version"].get<int>();
  if (version != kCertificateVersion) {
    throw VersionMismatch("certificate version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kCertificateVersion) + ")");
  }
  try {
    Certificate c;
    c.version = version;
    c.scheme = doc.at("scheme").get<std::string>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.signature = Signature::parse(doc.at("signature").get<std::string>());
    c.fingerprint = doc.at("fingerprint").get<std::string>();
    c.baseline_hpwl = doc.at("baseline_hpwl").get<Coord>();
    c.watermarked_hpwl = doc.at("watermarked_hpwl").get<Coord>();
    const json &params = doc.at("params");
    c.gw_params = gw_params_from(params.at("gw"));
    c.dw_params.d_x = params.at("dw").at("d_x").get<Coord>();
    c.dw_params.d_y = params.at("dw").at("d_y").get<Coord>();
    c.place_params = place_params_from(params.at("place"));
    if (doc.contains("gw")) {
      const json &g = doc["gw"];
      GwWatermark w;
      w.region = rect_from_json(g.at("region"));
      w.members = g.at("members").get<std::vector<int>>();
      w.score = g.at("score").get<double>();
      w.raw_score = g.at("raw_score").get<double>();
      w.params = gw_params_from(g.at("params"));
      c.gw = std::move(w);
    }
    if (doc.contains("dw")) {
      const json &d = doc["dw"];
      DwWatermark w;
      w.signature = Signature::parse(d.at("signature").get<std::string>());
      w.pool_x = d.at("pool_x").get<std::size_t>();
      w.pool_y = d.at("pool_y").get<std::size_t>();
      w.cells = d.at("cells").get<std::vector<int>>();
      unpairs(d.at("move"), w.move_x, w.move_y);
      unpairs(d.at("itr"), w.itr_x, w.itr_y);
      unpairs(d.at("dist"), w.dist_x, w.dist_y);
      w.params.d_x = d.at("d_x").get<Coord>();
      w.params.d_y = d.at("d_y").get<Coord>();
      const std::size_t n = w.cells.size();
      if (w.move_x.size() != n || w.itr_x.size() != n || w.dist_x.size() != n ||
          w.signature.bits.size() != n) {
        throw CorruptDocument("dw block lengths disagree");
      }
      c.dw = std::move(w);
    }
    if (doc.contains("baseline")) {
      const json &b = doc["baseline"];
      BaselineWatermark w;
      w.scheme = b.at("scheme").get<std::string>();
      w.cells = b.at("cells").get<std::vector<int>>();
      w.parity = b.at("parity").get<std::vector<int>>();
      unpairs(b.at("ref"), w.ref_x, w.ref_y);
      unpairs(b.at("move"), w.move_x, w.move_y);
      w.chains = b.at("chains").get<std::vector<std::vector<std::string>>>();
      c.baseline = std::move(w);
    }
    return c;
  } catch (const json::exception &e) {
    throw CorruptDocument(std::string("malformed certificate: ") + e.what());
  } catch (const InvalidParams &e) {
    throw CorruptDocument(std::string("malformed certificate: ") + e.what());
  }
}

bool Certificate::operator==(const Certificate &o) const {
  return certificate_to_json(*this) == certificate_to_json(o);
}

std::string format_certificate(const Certificate &cert) { return certificate_to_json(cert).dump(2) + "\n"; }

void save_certificate(const Certificate &cert, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << format_certificate(cert);
  if (!out) throw Error("cannot write " + path);
}

Certificate load_certificate(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path);
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::exception &e) {
    throw CorruptDocument(path + ": " + e.what());
  }
  return certificate_from_json(doc);
}

}  // namespace wmp
