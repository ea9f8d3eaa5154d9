#pragma once

#include <cstdint>

#include "wmplace/constraints.hpp"
#include "wmplace/design.hpp"

namespace wmp {

struct PlaceParams {
  double density_target = 0.8;    // 𝒟
  Coord bin_rows = 4;             // density audit bin side, in row heights
  int max_iterations = 40;
  double lambda_init = 0.05;      // anchor weight, relative to mean net stiffness
  double lambda_mult = 1.5;
  double convergence_tol = 2e-3;  // relative change of the spread HPWL
  std::uint64_t seed = 1;
  int dp_passes = 5;
  int warm_iterations = 3;        // 0: projection only
  double warm_lambda = 4.0;

  void validate() const;
};

struct GlobalResult {
  Placement placement;
  bool converged = false;
  int iterations = 0;
  Coord initial_hpwl = 0;  // HPWL of the seeded initial spread (or warm start)
};

// Analytical placement: B2B quadratic solves alternated with class-aware
// rough-legalization spreading, anchored with an escalating weight. The
// returned iterate is the lowest-HPWL spread placement seen, projected so fence
// members sit inside their fence and watermark membership is exact. When
// `warm` is given the run is incremental: the projected warm placement is
// returned as is if it meets the density target, otherwise a short, strongly
// anchored loop starts from it.
// Throws RegionInfeasible when a class's cell area exceeds 𝒟 times its area.
GlobalResult global_place_ex(const Design &design, const RegionConstraintSet &constraints,
                             const PlaceParams &params, const Placement *warm = nullptr);
Placement global_place(const Design &design, const RegionConstraintSet &constraints,
                       const PlaceParams &params);

// Row legalization: multi-height cells greedily first, then Abacus on
// single-height cells in x order. Segments are class-tagged so fence and
// watermark membership carry through. Throws LegalizationOverflow.
Placement legalize(const Design &design, const Placement &global,
                   const RegionConstraintSet &constraints);

// Swap / slide / 3-cell reorder passes within class-tagged segments; commits
// only strict HPWL decreases. Never changes rows.
Placement detailed_place(const Design &design, const Placement &legal,
                         const RegionConstraintSet &constraints, const PlaceParams &params);

struct PipelineResult {
  Placement global;
  Placement legalized;
  Placement detailed;
  bool gp_converged = false;
};

PipelineResult run_pipeline(const Design &design, const RegionConstraintSet &constraints,
                            const PlaceParams &params, const Placement *warm = nullptr);

// Worst ratio of movable area to non-macro area over audit bins whose free
// area is at least half the bin.
double max_bin_density(const Design &design, const Placement &placement, const PlaceParams &params);

}  // namespace wmp
