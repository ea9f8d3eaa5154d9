#include "wmplace/dw.hpp"

#include <algorithm>
#include <cctype>

#include "wmplace/errors.hpp"
#include "wmplace/rng.hpp"

namespace wmp {

Signature Signature::parse(const std::string &text) {
  Signature s;
  std::string t = text;
  bool hex = false;
  if (t.size() >= 2 && t[0] == '0' && (t[1] == 'b' || t[1] == 'B')) {
    t = t.substr(2);
  } else if (t.size() >= 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    t = t.substr(2);
    hex = true;
  }
  if (t.empty()) throw InvalidParams("empty signature '" + text + "'");
  for (char ch : t) {
    if (hex) {
      if (!std::isxdigit(static_cast<unsigned char>(ch))) {
        throw InvalidParams("bad hex digit in signature '" + text + "'");
      }
      int v = std::isdigit(static_cast<unsigned char>(ch)) ? ch - '0'
                                                           : std::tolower(static_cast<unsigned char>(ch)) - 'a' + 10;
      for (int b = 3; b >= 0; --b) s.bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
    } else {
      if (ch != '0' && ch != '1') throw InvalidParams("bad bit in signature '" + text + "'");
      s.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
  }
  return s;
}

Signature Signature::random(int n, std::uint64_t seed) {
  if (n <= 0) throw InvalidParams("signature length must be positive");
  Rng rng(seed);
  Signature s;
  for (int i = 0; i < n; ++i) s.bits.push_back(static_cast<std::uint8_t>(rng.below(2)));
  return s;
}

std::string Signature::to_string() const {
  std::string out = "0b";
  for (std::uint8_t b : bits) out.push_back(b ? '1' : '0');
  return out;
}

int Signature::ones() const {
  return static_cast<int>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

DwParams DwParams::resolved(const Design &design) const {
  DwParams p = *this;
  if (p.d_y == 0) p.d_y = design.row_height;
  return p;
}

void DwParams::validate(const Design &design) const {
  DwParams p = resolved(design);
  if (p.d_x <= 0) throw InvalidParams("d_x must be positive");
  if (p.d_y <= 0 || p.d_y % design.row_height != 0) {
    throw InvalidParams("d_y must be a positive multiple of the row height");
  }
}

MoveEngine::MoveEngine(const Design &design, const Placement &placement, const RegionConstraintSet &constraints)
    : d_(design), cons_(constraints), p_(placement), segs_(design, cons_, true), occ_(design, segs_, p_) {
  cls_.resize(design.cells.size());
  for (const Cell &c : design.cells) cls_[c.id] = cell_class(design, cons_, c.id);
}

int MoveEngine::segment_of(int cell, int level, Coord x) const {
  if (level < 0) return -1;
  int seg = segs_.find_segment(level, x, x + d_.cells[cell].width);
  if (seg < 0 || segs_.segments(level)[seg].cls != cls_[cell]) return -1;
  return seg;
}

bool MoveEngine::eligible(int cell) const {
  const Cell &c = d_.cells[cell];
  if (c.fixed() || c.height != d_.row_height) return false;
  return segment_of(cell, segs_.level_of_y(p_.y[cell]), p_.x[cell]) >= 0;
}

Coord MoveEngine::x_direction(int cell, Coord d_x) const {
  if (!eligible(cell)) return 0;
  const Coord x = p_.x[cell], w = d_.cells[cell].width;
  int level = segs_.level_of_y(p_.y[cell]);
  auto [lo, hi] = occ_.free_interval(level, segment_of(cell, level, x), x, x + w, cell);
  if (lo >= hi) return 0;
  Coord right = hi - (x + w), left = x - lo;
  bool r_ok = right >= d_x, l_ok = left >= d_x;
  if (r_ok && (!l_ok || right >= left)) return d_x;
  if (l_ok) return -d_x;
  return 0;
}

Coord MoveEngine::y_direction(int cell, Coord d_y) const {
  if (!eligible(cell)) return 0;
  const Coord x = p_.x[cell], y = p_.y[cell], w = d_.cells[cell].width;
  Coord best_dir = 0, best_room = -1;
  for (Coord dir : {d_y, -d_y}) {
    int level = segs_.level_of_y(y + dir);
    int seg = segment_of(cell, level, x);
    if (seg < 0) continue;
    auto [lo, hi] = occ_.free_interval(level, seg, x, x + w, cell);
    if (!(lo <= x && x + w <= hi && lo < hi)) continue;
    Coord room = hi - lo - w;
    if (room > best_room) {
      best_room = room;
      best_dir = dir;
    }
  }
  return best_dir;
}

bool MoveEngine::can_move(int cell, Coord dx, Coord dy) const {
  if (!eligible(cell) || (dx == 0 && dy == 0)) return false;
  const Coord nx = p_.x[cell] + dx, w = d_.cells[cell].width;
  int level = segs_.level_of_y(p_.y[cell] + dy);
  int seg = segment_of(cell, level, nx);
  if (seg < 0) return false;
  return occ_.is_free(level, seg, nx, nx + w, cell);
}

bool MoveEngine::try_apply(const Candidate &c) {
  if (!can_move(c.cell, c.dx, c.dy)) return false;
  occ_.remove(c.cell);
  p_.x[c.cell] += c.dx;
  p_.y[c.cell] += c.dy;
  occ_.insert(c.cell, p_.x[c.cell], p_.y[c.cell]);
  return true;
}

DwCandidates select_candidates(const Design &design, const Placement &placement, Coord d_x, Coord d_y,
                               const RegionConstraintSet &constraints, const std::vector<int> *filter) {
  MoveEngine engine(design, placement, constraints);
  std::vector<int> order;
  for (const Cell &c : design.cells) {
    if (filter && !std::binary_search(filter->begin(), filter->end(), c.id)) continue;
    if (engine.eligible(c.id)) order.push_back(c.id);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (placement.y[a] != placement.y[b]) return placement.y[a] < placement.y[b];
    if (placement.x[a] != placement.x[b]) return placement.x[a] < placement.x[b];
    return a < b;
  });
  DwCandidates out;
  for (int id : order) {
    if (Coord dx = engine.x_direction(id, d_x)) out.x.push_back({id, dx, 0});
    if (Coord dy = engine.y_direction(id, d_y)) out.y.push_back({id, 0, dy});
  }
  return out;
}

std::vector<Candidate> consume_signature(MoveEngine &engine, const DwCandidates &pools,
                                         const Signature &signature, std::uint8_t x_bit) {
  std::size_t need_x = 0;
  for (std::uint8_t b : signature.bits) need_x += b == x_bit;
  const std::size_t need_y = signature.bits.size() - need_x;
  std::vector<char> consumed(engine.placement().size(), 0);
  std::size_t next_x = 0, next_y = 0, done_x = 0, done_y = 0;
  std::vector<Candidate> out;
  for (std::uint8_t bit : signature.bits) {
    const bool along_x = bit == x_bit;
    const std::vector<Candidate> &pool = along_x ? pools.x : pools.y;
    std::size_t &next = along_x ? next_x : next_y;
    bool placed = false;
    while (next < pool.size()) {
      const Candidate &c = pool[next++];
      if (consumed[c.cell] || !engine.try_apply(c)) continue;
      consumed[c.cell] = 1;
      out.push_back(c);
      placed = true;
      break;
    }
    if (!placed) {
      if (along_x) throw InsufficientCandidates("x", need_x, done_x);
      throw InsufficientCandidates("y", need_y, done_y);
    }
    ++(along_x ? done_x : done_y);
  }
  return out;
}

DwResult insert_dw(const Design &design, const Placement &legalized, const Signature &signature,
                   const DwParams &params, std::uint64_t seed, const RegionConstraintSet &constraints,
                   const PlaceParams &place_params, const std::vector<int> *filter) {
  params.validate(design);
  const DwParams dp = params.resolved(design);
  if (signature.size() == 0) throw InvalidParams("signature must hold at least one bit");
  DwCandidates cand = select_candidates(design, legalized, dp.d_x, dp.d_y, constraints, filter);
  const std::size_t ones = static_cast<std::size_t>(signature.ones());
  const std::size_t zeros = signature.bits.size() - ones;
  if (cand.x.size() < ones) throw InsufficientCandidates("x", ones, cand.x.size());
  if (cand.y.size() < zeros) throw InsufficientCandidates("y", zeros, cand.y.size());

  Rng rng(seed);
  rng.shuffle(cand.x);
  rng.shuffle(cand.y);

  MoveEngine engine(design, legalized, constraints);
  DwResult r;
  r.watermark.signature = signature;
  r.watermark.params = dp;
  r.watermark.pool_x = cand.x.size();
  r.watermark.pool_y = cand.y.size();
  for (const Candidate &c : consume_signature(engine, cand, signature)) {
    r.watermark.cells.push_back(c.cell);
    r.watermark.move_x.push_back(c.dx);
    r.watermark.move_y.push_back(c.dy);
  }

  r.intermediate = engine.placement();
  r.intermediate.stage = Stage::Legalized;
  r.placement = detailed_place(design, r.intermediate, constraints, place_params);
  for (int id : r.watermark.cells) {
    r.watermark.itr_x.push_back(r.intermediate.x[id]);
    r.watermark.itr_y.push_back(r.intermediate.y[id]);
    r.watermark.dist_x.push_back(r.intermediate.x[id] - r.placement.x[id]);
    r.watermark.dist_y.push_back(r.intermediate.y[id] - r.placement.y[id]);
  }
  return r;
}

double extract_dw(const Placement &placement, const DwWatermark &wm) {
  if (wm.cells.empty()) return 0.0;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < wm.cells.size(); ++i) {
    int id = wm.cells[i];
    if (id < 0 || static_cast<std::size_t>(id) >= placement.size()) continue;
    if (wm.itr_x[i] - placement.x[id] == wm.dist_x[i] && wm.itr_y[i] - placement.y[id] == wm.dist_y[i]) ++matched;
  }
  return 100.0 * static_cast<double>(matched) / static_cast<double>(wm.cells.size());
}

}  // namespace wmp
