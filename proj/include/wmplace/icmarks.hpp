#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "wmplace/baselines.hpp"
#include "wmplace/dw.hpp"
#include "wmplace/gw.hpp"
#include "wmplace/placer.hpp"

namespace wmp {

inline constexpr int kCertificateVersion = 1;

struct Certificate {
  int version = kCertificateVersion;
  std::string scheme;  // gw | dw | icmarks | row_parity | cell_scattering | buffer_insertion
  std::uint64_t seed = 0;
  Signature signature;
  std::optional<GwWatermark> gw;
  std::optional<DwWatermark> dw;
  std::optional<BaselineWatermark> baseline;
  GwParams gw_params;
  DwParams dw_params;
  PlaceParams place_params;
  std::string fingerprint;  // of the unmodified design
  Coord baseline_hpwl = 0;  // same-seed non-watermarked pipeline
  Coord watermarked_hpwl = 0;

  bool operator==(const Certificate &o) const;
};

nlohmann::json certificate_to_json(const Certificate &cert);
Certificate certificate_from_json(const nlohmann::json &doc);  // VersionMismatch, CorruptDocument
std::string format_certificate(const Certificate &cert);       // canonical text
void save_certificate(const Certificate &cert, const std::string &path);
Certificate load_certificate(const std::string &path);

struct IcmarksResult {
  PipelineResult baseline;
  Placement global;        // region-constrained global placement
  Placement legalized;     // P_lg
  Placement intermediate;  // P_itr
  Placement placement;     // P_wm
  Certificate certificate;
};

// Lowest-score region of the baseline placement, region-constrained global
// placement and legalization, DW perturbation restricted to the region
// members, then constrained detailed placement.
IcmarksResult insert_icmarks(const Design &design, const Signature &signature, const GwParams &gw_params,
                             const DwParams &dw_params, const PlaceParams &place_params, std::uint64_t seed,
                             const PipelineResult *baseline = nullptr);

struct WerTriple {
  double gw = 0.0;
  double dw = 0.0;
  double wer = 0.0;  // (gw + dw) / 2
};

// Throws FingerprintMismatch when the certificate belongs to another design.
WerTriple extract_icmarks(const Design &design, const Placement &placement, const Certificate &cert);

// Per-scheme extraction. Unused components are absent.
struct WerReport {
  std::optional<double> gw;
  std::optional<double> dw;
  double wer = 0.0;
};

// Dispatches on the certificate scheme. Buffer-insertion certificates are
// checked against the (modified) design as given, without the fingerprint
// guard; every other scheme requires a matching fingerprint.
WerReport verify(const Design &design, const Placement &placement, const Certificate &cert);

struct StrengthReport {
  std::optional<double> log10_gw;
  std::optional<double> log10_dw;
  double log10_total = 0.0;
};

// Coincidence probability of the evidence found in `placement`: GW uses
// p = area(R_w) / area(die) over |C_w1| trials; DW uses p_x = |C_wx| / |C_x|
// and p_y = |C_wy| / |C_y|; Row Parity uses p = 1/2.
StrengthReport watermark_strength(const Design &design, const Placement &placement, const Certificate &cert);

}  // namespace wmp
