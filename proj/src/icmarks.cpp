#include "wmplace/icmarks.hpp"

#include <cmath>

#include "wmplace/dump.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"
#include "wmplace/strength.hpp"

namespace wmp {

IcmarksResult insert_icmarks(const Design &design, const Signature &signature, const GwParams &gw_params,
                             const DwParams &dw_params, const PlaceParams &place_params, std::uint64_t seed,
                             const PipelineResult *baseline) {
  if (signature.size() == 0) throw InvalidParams("signature must hold at least one bit");
  GwParams gp = gw_params;
  gp.n_bits = signature.size();
  gp.validate(design);
  dw_params.validate(design);
  place_params.validate();

  IcmarksResult r;
  GwResult g = insert_gw(design, gp, place_params, baseline);
  r.baseline = std::move(g.baseline);
  GwWatermark gw = std::move(g.watermark);
  RegionConstraintSet cons = gw.constraints();
  r.global = std::move(g.watermarked.global);
  r.legalized = std::move(g.watermarked.legalized);
  DwResult dw = insert_dw(design, r.legalized, signature, dw_params, seed, cons, place_params, &gw.members);
  r.intermediate = std::move(dw.intermediate);
  r.placement = std::move(dw.placement);

  Certificate &c = r.certificate;
  c.scheme = "icmarks";
  c.seed = seed;
  c.signature = signature;
  c.gw = std::move(gw);
  c.dw = std::move(dw.watermark);
  c.gw_params = c.gw->params;
  c.dw_params = c.dw->params;
  c.place_params = place_params;
  c.fingerprint = design_fingerprint(design);
  c.baseline_hpwl = hpwl(design, r.baseline.detailed);
  c.watermarked_hpwl = hpwl(design, r.placement);
  return r;
}

namespace {

void check_fingerprint(const Design &design, const Certificate &cert) {
  if (design_fingerprint(design) != cert.fingerprint) {
    throw FingerprintMismatch("certificate was issued for a different design (fingerprint " +
                              cert.fingerprint.substr(0, 12) + ")");
  }
}

void check_size(const Design &design, const Placement &placement) {
  if (placement.size() != design.cells.size()) {
    throw InvalidParams("placement holds " + std::to_string(placement.size()) + " cells, design has " +
                        std::to_string(design.cells.size()));
  }
}

}  // namespace

WerTriple extract_icmarks(const Design &design, const Placement &placement, const Certificate &cert) {
  check_fingerprint(design, cert);
  check_size(design, placement);
  if (!cert.gw || !cert.dw) throw CorruptDocument("icmarks certificate lacks a watermark block");
  WerTriple t;
  t.gw = extract_gw(design, placement, *cert.gw);
  t.dw = extract_dw(placement, *cert.dw);
  t.wer = (t.gw + t.dw) / 2.0;
  return t;
}

WerReport verify(const Design &design, const Placement &placement, const Certificate &cert) {
  WerReport r;
  const std::string &s = cert.scheme;
  if (s == "buffer_insertion") {
    if (!cert.baseline) throw CorruptDocument("buffer_insertion certificate lacks its payload");
    r.wer = buffer_insertion_extract(design, *cert.baseline);
    return r;
  }
  check_fingerprint(design, cert);
  check_size(design, placement);
  if (s == "icmarks") {
    WerTriple t = extract_icmarks(design, placement, cert);
    r.gw = t.gw;
    r.dw = t.dw;
    r.wer = t.wer;
  } else if (s == "gw") {
    if (!cert.gw) throw CorruptDocument("gw certificate lacks its payload");
    r.gw = extract_gw(design, placement, *cert.gw);
    r.wer = *r.gw;
  } else if (s == "dw") {
    if (!cert.dw) throw CorruptDocument("dw certificate lacks its payload");
    r.dw = extract_dw(placement, *cert.dw);
    r.wer = *r.dw;
  } else if (s == "row_parity") {
    if (!cert.baseline) throw CorruptDocument("row_parity certificate lacks its payload");
    r.wer = row_parity_extract(design, placement, *cert.baseline);
  } else if (s == "cell_scattering") {
    if (!cert.baseline) throw CorruptDocument("cell_scattering certificate lacks its payload");
    r.wer = cell_scattering_extract(placement, *cert.baseline);
  } else {
    throw CorruptDocument("unknown scheme '" + s + "'");
  }
  return r;
}

StrengthReport watermark_strength(const Design &design, const Placement &placement, const Certificate &cert) {
  const double ln10 = std::log(10.0);
  StrengthReport r;
  if (cert.gw) {
    const GwWatermark &g = *cert.gw;
    std::int64_t inside = 0;
    for (int id : g.members) {
      const Cell &c = design.cells[id];
      inside += center_in(g.region, placement.x[id], placement.y[id], c.width, c.height);
    }
    double p = static_cast<double>(g.region.area()) / static_cast<double>(design.die.area());
    r.log10_gw = log_strength_gw(static_cast<std::int64_t>(g.members.size()), inside, std::min(1.0, p)) / ln10;
  }
  if (cert.dw) {
    const DwWatermark &w = *cert.dw;
    std::int64_t c_wx = 0, c_wy = 0, mx = 0, my = 0;
    for (std::size_t i = 0; i < w.cells.size(); ++i) {
      int id = w.cells[i];
      bool match = w.itr_x[i] - placement.x[id] == w.dist_x[i] && w.itr_y[i] - placement.y[id] == w.dist_y[i];
      if (w.signature.bits[i]) {
        ++c_wx;
        mx += match;
      } else {
        ++c_wy;
        my += match;
      }
    }
    auto ratio = [](std::int64_t a, std::size_t b) {
      return b ? std::min(1.0, static_cast<double>(a) / static_cast<double>(b)) : 1.0;
    };
    r.log10_dw = log_strength_dw(c_wx, c_wy, mx, my, ratio(c_wx, w.pool_x), ratio(c_wy, w.pool_y)) / ln10;
  }
  if (cert.scheme == "row_parity" && cert.baseline) {
    std::int64_t n = static_cast<std::int64_t>(cert.baseline->cells.size());
    std::int64_t hits = std::llround(row_parity_extract(design, placement, *cert.baseline) * n / 100.0);
    r.log10_gw = log_strength_gw(n, hits, 0.5) / ln10;
  }
  r.log10_total = r.log10_gw.value_or(0.0) + r.log10_dw.value_or(0.0);
  return r;
}

}  // namespace wmp
