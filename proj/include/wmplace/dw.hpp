#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmplace/constraints.hpp"
#include "wmplace/design.hpp"
#include "wmplace/placer.hpp"
#include "wmplace/segments.hpp"

namespace wmp {

struct Signature {
  std::vector<std::uint8_t> bits;  // B_N, each 0 or 1

  // "0b0101...", "0x3f..." (4 bits per digit, MSB first) or a bare bit string.
  // Throws InvalidParams.
  static Signature parse(const std::string &text);
  static Signature random(int n, std::uint64_t seed);
  std::string to_string() const;  // "0b..." form
  int size() const { return static_cast<int>(bits.size()); }
  int ones() const;
  bool operator==(const Signature &o) const { return bits == o.bits; }
};

struct DwParams {
  Coord d_x = 1;
  Coord d_y = 0;  // 0: one row height

  DwParams resolved(const Design &design) const;
  void validate(const Design &design) const;  // throws InvalidParams
};

struct Candidate {
  int cell = -1;
  Coord dx = 0;
  Coord dy = 0;
};

struct DwCandidates {
  std::vector<Candidate> x;  // C_x with D_x
  std::vector<Candidate> y;  // C_y with D_y
};

// Tracks a placement under single-cell shifts that keep it legal: same row
// segment for x moves, a same-class free landing for y moves.
class MoveEngine {
 public:
  MoveEngine(const Design &design, const Placement &placement, const RegionConstraintSet &constraints);
  MoveEngine(const MoveEngine &) = delete;
  MoveEngine &operator=(const MoveEngine &) = delete;

  // Signed x shift with more clearance (ties positive), or 0 if neither fits.
  Coord x_direction(int cell, Coord d_x) const;
  Coord y_direction(int cell, Coord d_y) const;
  bool can_move(int cell, Coord dx, Coord dy) const;
  // Re-validates against the current state; applies and returns true if legal.
  bool try_apply(const Candidate &c);
  bool eligible(int cell) const;  // movable, single height, on a row segment of its class

  const Placement &placement() const { return p_; }
  const SegmentMap &segments() const { return segs_; }

 private:
  int segment_of(int cell, int level, Coord x) const;

  const Design &d_;
  RegionConstraintSet cons_;
  Placement p_;
  SegmentMap segs_;
  Occupancy occ_;
  std::vector<int> cls_;
};

// Row-by-row (ascending y, then x) scan. When `filter` is given (sorted ids),
// only those cells are considered.
DwCandidates select_candidates(const Design &design, const Placement &placement, Coord d_x, Coord d_y,
                               const RegionConstraintSet &constraints = {},
                               const std::vector<int> *filter = nullptr);

// Shuffled pools in, consumed moves out (signature order). Bits equal to
// `x_bit` draw from pools.x, the others from pools.y; a cell is used at most
// once and every move is re-validated on `engine`, which is left holding the
// result. Throws InsufficientCandidates.
std::vector<Candidate> consume_signature(MoveEngine &engine, const DwCandidates &pools,
                                         const Signature &signature, std::uint8_t x_bit = 1);

struct DwWatermark {
  Signature signature;
  std::size_t pool_x = 0, pool_y = 0;  // |C_x|, |C_y| at insertion
  std::vector<int> cells;  // C_w2 in bit order
  std::vector<Coord> move_x, move_y;  // applied shift per cell
  std::vector<Coord> itr_x, itr_y;    // P_itr(C_w2)
  std::vector<Coord> dist_x, dist_y;  // P_itr(C_w2) - P_wm(C_w2)
  DwParams params;                    // resolved
};

struct DwResult {
  Placement intermediate;  // P_itr
  Placement placement;     // P_wm
  DwWatermark watermark;
};

// Shuffles both pools with `seed`, then bit 1 consumes the next valid x
// candidate and bit 0 the next valid y candidate, re-validating each move
// against the moves already made. Detailed placement with `constraints`
// follows. Throws InsufficientCandidates.
DwResult insert_dw(const Design &design, const Placement &legalized, const Signature &signature,
                   const DwParams &params, std::uint64_t seed, const RegionConstraintSet &constraints,
                   const PlaceParams &place_params, const std::vector<int> *filter = nullptr);

// Percentage of C_w2 whose P_itr - P' equals the recorded Dist exactly.
double extract_dw(const Placement &placement, const DwWatermark &wm);

}  // namespace wmp
