#pragma once

#include <cstdint>

#include "wmplace/design.hpp"

namespace wmp {

struct SyntheticConfig {
  int n_cells = 2000;
  int n_nets = 2200;
  int n_macros = 0;
  int n_fences = 0;
  double utilization = 0.6;  // movable area / (die area - macro area)
  double die_aspect = 1.0;   // width / height
  int n_io = -1;             // -1: about sqrt(n_cells)
  double double_height_fraction = 0.02;
  double endpoint_fraction = 0.1;
  Coord row_height = 12;
  Coord min_width = 2;
  Coord max_width = 12;
};

// Deterministic for fixed (cfg, seed). Movable cells take ids 0..n_cells-1,
// then macros, then IO pads (1x1, just outside the die edges). Every net's
// first pin is its lowest-ranked pin (IO pads first, then lowest cell id), so
// the driver graph is acyclic.
Design generate_synthetic(const SyntheticConfig &cfg, std::uint64_t seed);

// Free area = die area minus macro footprints inside the die.
double measured_utilization(const Design &design);

}  // namespace wmp
