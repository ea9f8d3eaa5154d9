#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmplace/design.hpp"
#include "wmplace/dw.hpp"
#include "wmplace/metrics.hpp"
#include "wmplace/placer.hpp"

namespace wmp {

struct BaselineWatermark {
  std::string scheme;      // row_parity | cell_scattering | buffer_insertion
  std::vector<int> cells;  // per bit (buffer insertion: the split net's first buffer)
  // row_parity: required row parity per bit.
  std::vector<int> parity;
  // cell_scattering: position before the move and the applied shift.
  std::vector<Coord> ref_x, ref_y, move_x, move_y;
  // buffer_insertion: buffer cell names per bit, in chain order.
  std::vector<std::vector<std::string>> chains;
};

struct BaselineResult {
  Design design;  // modified netlist for buffer insertion, else a copy
  Placement placement;
  BaselineWatermark watermark;
};

int row_index(const Design &design, Coord y);

// Each chosen cell ends on a row whose index parity equals its bit, then the
// placement is re-legalized and detail-placed. Throws InsufficientCandidates.
BaselineResult row_parity_insert(const Design &design, const Placement &legalized, const Signature &signature,
                                 std::uint64_t seed, const PlaceParams &place_params);
double row_parity_extract(const Design &design, const Placement &placement, const BaselineWatermark &wm);

// Displacements applied after detailed placement: bit 1 along y, bit 0
// along x, with no compensation pass. Throws InsufficientCandidates.
BaselineResult cell_scattering_insert(const Design &design, const Placement &detailed, const Signature &signature,
                                      std::uint64_t seed, const DwParams &params = {});
double cell_scattering_extract(const Placement &placement, const BaselineWatermark &wm);

struct BufferParams {
  double margin_fraction = 0.1;  // non-critical: net slack >= fraction * max RAT
};

// Timing model used to judge net criticality: the RAT equals the worst
// arrival, so the critical path has zero slack.
DelayModel buffer_delay_model(const Design &design, const Placement &placement);

// Per bit, splits a non-critical net through a chain of buffers (one for a
// 1-bit, two for a 0-bit) placed at the nearest free sites, then re-runs
// legalization and detailed placement. Throws NoTimingMargin or
// InsufficientCandidates.
BaselineResult buffer_insertion_insert(const Design &design, const Placement &placement, const Signature &signature,
                                       std::uint64_t seed, const PlaceParams &place_params,
                                       const BufferParams &params = {});
// Share of recorded chains still present with the recorded length.
double buffer_insertion_extract(const Design &design, const BaselineWatermark &wm);

}  // namespace wmp
