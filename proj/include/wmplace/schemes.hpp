#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wmplace/constraints.hpp"
#include "wmplace/icmarks.hpp"

namespace wmp {

const std::vector<std::string> &scheme_names();
bool is_scheme(const std::string &name);

struct SchemeConfig {
  std::string scheme = "icmarks";
  Signature signature;
  GwParams gw;
  DwParams dw;
  PlaceParams place;
  std::uint64_t seed = 1;
};

struct SchemeRun {
  Design design;  // differs from the input only for buffer insertion
  PipelineResult baseline;
  Placement placement;  // final watermarked placement
  Certificate certificate;
  RegionConstraintSet constraints;  // the watermark region, when the scheme has one
  // Legal intermediate and final placements, for auditing.
  std::vector<std::pair<std::string, Placement>> stages;
};

// Runs `cfg.scheme` on the design. For gw the region must hold as many cells
// as the signature has bits. A precomputed unconstrained pipeline run with
// the same place params may be passed in.
SchemeRun run_scheme(const Design &design, const SchemeConfig &cfg, const PipelineResult *baseline = nullptr);

}  // namespace wmp
