#pragma once

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wmplace/constraints.hpp"
#include "wmplace/design.hpp"

namespace wmp {

Coord net_hpwl(const Design &design, const Placement &placement, int net);
Coord hpwl(const Design &design, const Placement &placement);

// wm / orig; InvalidBaseline when orig <= 0.
double pwlr(double wm_hpwl, double orig_hpwl);

struct DensityGrid {
  int bins_x = 1;
  int bins_y = 1;
  Rect area;                     // gridded rectangle (the die)
  std::vector<double> occupancy; // row-major, iy * bins_x + ix

  double at(int ix, int iy) const { return occupancy[static_cast<std::size_t>(iy) * bins_x + ix]; }
  double bin_area() const {
    return static_cast<double>(area.area()) / (static_cast<double>(bins_x) * bins_y);
  }
  double max_occupancy() const;
};

// Area-weighted rasterization of every cell (fixed and movable) clipped to
// the die.
DensityGrid density_map(const Design &design, const Placement &placement, int bins_x, int bins_y);

struct LegalityReport {
  std::vector<std::pair<int, int>> overlap_pairs;  // (lower id, higher id)
  std::vector<int> off_row_cells;
  std::vector<int> out_of_die_cells;
  std::vector<int> fence_violations;

  bool legal() const {
    return overlap_pairs.empty() && off_row_cells.empty() && out_of_die_cells.empty() &&
           fence_violations.empty();
  }
  std::string summary() const;
};

// Audits movable cells: pairwise overlaps (with each other and with fixed
// cells), row alignment, die containment, fence membership (member bbox
// outside its fence) and, when constraints carry a watermark region, center
// membership in both directions.
LegalityReport check_legal(const Design &design, const Placement &placement,
                           const RegionConstraintSet &constraints = {});

struct DelayModel {
  double unit_delay_per_length = 1.0;
  // Required arrival time per endpoint net id; others use default_rat.
  std::map<int, double> endpoint_rats;
  double default_rat = 1e18;
};

struct TimingResult {
  std::vector<int> endpoints;      // endpoint net ids, ascending
  std::vector<double> arrival;     // per endpoint
  std::vector<double> slack;       // per endpoint
  std::vector<double> net_slack;   // worst slack of paths through each net (+inf off-path)
  double tns = 0.0;
  double wns = 0.0;
  double max_rat = 0.0;
};

// Linear delay model: a net adds unit_delay * HPWL from its driver (first pin)
// to each sink. Endpoint nets terminate paths. When no net carries the
// endpoint flag, nets whose sinks drive nothing are used as endpoints.
// Throws CombinationalCycle with the offending cell loop.
TimingResult timing_analyze(const Design &design, const Placement &placement,
                            const DelayModel &model);

struct EvalReport {
  std::string design;
  std::string scheme;
  std::string stage;
  Coord hpwl = 0;
  double pwlr = 1.0;
  double tns = 0.0;
  double wns = 0.0;
  double wer = 0.0;
  bool legal = false;
  int bits = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

// Fixed-precision decimal used in every CSV the tools emit.
std::string format_real(double v, int digits = 6);

}  // namespace wmp
