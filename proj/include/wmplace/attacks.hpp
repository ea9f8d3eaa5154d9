#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmplace/gw.hpp"
#include "wmplace/icmarks.hpp"
#include "wmplace/placer.hpp"

namespace wmp {

// Each perturbation ends with the restoring legalization and detailed
// placement, run without any watermark region.

// Swaps floor(fraction * movable) single-height cells in random disjoint pairs.
Placement sla_placement(const Design &design, const Placement &placement, double fraction, std::uint64_t seed,
                        const PlaceParams &place_params);
// Shifts floor(fraction * movable) cells that have room by d_x or d_y.
Placement cpa_placement(const Design &design, const Placement &placement, double fraction, Coord d_x, Coord d_y,
                        std::uint64_t seed, const PlaceParams &place_params);
// One extra detailed placement round with twice the pass budget.
Placement oa_placement(const Design &design, const Placement &placement, const PlaceParams &place_params);
// Shifts every cell with room inside the top_k lowest-score windows of the
// given placement, scored with the adversary's weights (unbounded allowed).
Placement ara_placement(const Design &design, const Placement &placement, const GwParams &guess, int top_k,
                        Coord d_x, Coord d_y, std::uint64_t seed, const PlaceParams &place_params);

// Where the owner's region lands when an adversary re-scores the watermarked
// placement with its own weights (which may lie outside [0, 1]).
struct RankReport {
  int rank = 0;  // 1-based position of R_w among all windows; 0 if the guess grid misses it
  int windows = 0;
  int valid_windows = 0;
  double score = 1.0;  // normalized score of R_w under the guess
  bool weights_in_range = true;
};

RankReport region_rank(const Design &design, const Placement &placement, const Certificate &cert,
                       const GwParams &guess);

struct AttackSpec {
  std::string attack = "sla";  // sla | cpa | oa | ara
  double fraction = 0.001;
  int top_k = 1;
  GwParams guess;
  Coord d_x = 1;
  Coord d_y = 0;  // 0: one row height
  std::uint64_t seed = 1;

  std::string param() const;  // fraction, top-k or "-"
  void validate() const;      // throws InvalidParams
};

struct AttackOutcome {
  std::string scheme;
  std::string attack;
  std::string param;
  std::uint64_t seed = 0;
  Placement placement;
  double pwlr = 1.0;  // against the certificate's non-watermarked baseline
  WerReport wer;
  double wer_min = 90.0;
  double pwlr_max = 1.005;

  bool success() const { return wer.wer < wer_min && pwlr <= pwlr_max; }
  static std::string csv_header();
  std::string csv_row() const;
};

AttackOutcome run_attack(const Design &design, const Placement &placement, const Certificate &cert,
                         const AttackSpec &spec, const PlaceParams &place_params);

AttackOutcome attack_sla(const Design &design, const Placement &placement, const Certificate &cert, double fraction,
                         std::uint64_t seed, const PlaceParams &place_params);
AttackOutcome attack_cpa(const Design &design, const Placement &placement, const Certificate &cert, double fraction,
                         std::uint64_t seed, const PlaceParams &place_params, Coord d_x = 1, Coord d_y = 0);
AttackOutcome attack_oa(const Design &design, const Placement &placement, const Certificate &cert,
                        const PlaceParams &place_params);
AttackOutcome attack_ara(const Design &design, const Placement &placement, const Certificate &cert,
                         const GwParams &guess, int top_k, std::uint64_t seed, const PlaceParams &place_params);

// Runs the trials on `workers` threads; results come back in spec order.
std::vector<AttackOutcome> run_attack_sweep(const Design &design, const Placement &placement,
                                            const Certificate &cert, const std::vector<AttackSpec> &specs,
                                            const PlaceParams &place_params, int workers = 1);

}  // namespace wmp
