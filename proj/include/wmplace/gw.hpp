#pragma once

#include <vector>

#include "wmplace/constraints.hpp"
#include "wmplace/design.hpp"
#include "wmplace/placer.hpp"

namespace wmp {

struct GwParams {
  Coord window_w = 0;  // 0: 10 row heights
  Coord window_h = 0;  // 0: 10 row heights
  Coord stride = 0;    // 0: the window size, per axis
  double alpha = 0.1;
  double beta = 0.1;
  double gamma = 1.0;
  int n_bits = 50;  // N_w
  // When the constrained run exceeds pwlr_max, insertion retries alpha and
  // beta over {0, 0.1, 0.5}.
  bool grid_fallback = true;
  double pwlr_max = 1.005;

  // Copy with defaults filled in from the design.
  GwParams resolved(const Design &design) const;
  // Throws InvalidParams. Weights must lie in [0, 1] unless `unbounded`.
  void validate(const Design &design, bool unbounded = false) const;
  bool weights_in_range() const;
};

struct GwWatermark {
  Rect region;               // R_w
  std::vector<int> members;  // C_w1, ascending
  double score = 0.0;        // normalized
  double raw_score = 0.0;
  GwParams params;           // resolved

  RegionConstraintSet constraints() const {
    return RegionConstraintSet::with_watermark(region, members);
  }
};

struct WindowScore {
  Rect window;
  double raw = 1.0;
  double score = 1.0;
  bool valid = false;
  int n_inside = 0;  // N_c
};

// Raw f of one window; 1.0 when the window touches a macro or a fence, or
// holds fewer than N_w cells.
double score_window(const Design &design, const Placement &placement, const Rect &window,
                    const GwParams &params);

// Movable cells whose bounding box lies inside the window.
std::vector<int> cells_inside(const Design &design, const Placement &placement, const Rect &window);

// Full sweep, sorted by (score, y, x). Valid raw scores are min-max
// normalized over the sweep; invalid windows stay at 1.0.
std::vector<WindowScore> rank_windows(const Design &design, const Placement &placement,
                                      const GwParams &params, bool unbounded = false);

// Lowest-score valid window. Throws NoValidWindow.
GwWatermark select_region(const Design &design, const Placement &placement, const GwParams &params);

struct GwResult {
  PipelineResult baseline;     // unconstrained run; baseline.detailed is P_ori
  PipelineResult watermarked;  // constrained run; watermarked.detailed is P_wm
  GwWatermark watermark;
};

// Region-constrained re-placement around the lowest-score window of P_ori,
// warm-started from P_ori. A precomputed baseline run may be passed to skip
// the unconstrained run. With grid_fallback, the first (alpha, beta) grid
// point meeting pwlr_max wins, else the one with the lowest PWLR; the
// watermark records the weights actually used.
GwResult insert_gw(const Design &design, const GwParams &params, const PlaceParams &place_params,
                   const PipelineResult *baseline = nullptr);

// 100 * max(0, members inside - foreign cells inside) / |C_w1|, by center.
double extract_gw(const Design &design, const Placement &placement, const GwWatermark &wm);

}  // namespace wmp
