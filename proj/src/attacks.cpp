#include "wmplace/attacks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "wmplace/dw.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"
#include "wmplace/rng.hpp"

namespace wmp {

namespace {

Placement restore(const Design &design, const Placement &p, const PlaceParams &pp) {
  Placement lg = legalize(design, p, {});
  return detailed_place(design, lg, {}, pp);
}

std::size_t movable_count(const Design &design) {
  std::size_t n = 0;
  for (const Cell &c : design.cells) n += !c.fixed();
  return n;
}

// Picks one of the available shifts, at random when both exist.
bool shift_with_room(MoveEngine &engine, int cell, Coord d_x, Coord d_y, Rng &rng) {
  Coord dx = engine.x_direction(cell, d_x);
  Coord dy = engine.y_direction(cell, d_y);
  if (dx == 0 && dy == 0) return false;
  bool along_x = dy == 0 || (dx != 0 && rng.below(2) == 0);
  return along_x ? engine.try_apply({cell, dx, 0}) : engine.try_apply({cell, 0, dy});
}

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

Placement sla_placement(const Design &design, const Placement &placement, double fraction, std::uint64_t seed,
                        const PlaceParams &place_params) {
  std::vector<int> pool;
  for (const Cell &c : design.cells) {
    if (!c.fixed() && c.height == design.row_height) pool.push_back(c.id);
  }
  const std::size_t k = std::min(pool.size(), static_cast<std::size_t>(
                                                  std::floor(fraction * static_cast<double>(movable_count(design)))));
  const std::size_t pairs = k / 2;
  if (pairs == 0) return placement;
  Rng rng(seed);
  rng.shuffle(pool);
  Placement p = placement;
  for (std::size_t i = 0; i < pairs; ++i) {
    int a = pool[2 * i], b = pool[2 * i + 1];
    std::swap(p.x[a], p.x[b]);
    std::swap(p.y[a], p.y[b]);
  }
  return restore(design, p, place_params);
}

Placement cpa_placement(const Design &design, const Placement &placement, double fraction, Coord d_x, Coord d_y,
                        std::uint64_t seed, const PlaceParams &place_params) {
  if (d_y == 0) d_y = design.row_height;
  const std::size_t k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(movable_count(design))));
  if (k == 0) return placement;
  DwCandidates cand = select_candidates(design, placement, d_x, d_y, {});
  std::vector<int> cells;
  for (const Candidate &c : cand.x) cells.push_back(c.cell);
  for (const Candidate &c : cand.y) cells.push_back(c.cell);
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  if (cells.empty()) return placement;
  Rng rng(seed);
  rng.shuffle(cells);
  MoveEngine engine(design, placement, {});
  std::size_t moved = 0;
  for (std::size_t i = 0; i < cells.size() && moved < k; ++i) moved += shift_with_room(engine, cells[i], d_x, d_y, rng);
  return restore(design, engine.placement(), place_params);
}

Placement oa_placement(const Design &design, const Placement &placement, const PlaceParams &place_params) {
  PlaceParams pp = place_params;
  pp.dp_passes *= 2;
  return restore(design, placement, pp);
}

Placement ara_placement(const Design &design, const Placement &placement, const GwParams &guess, int top_k,
                        Coord d_x, Coord d_y, std::uint64_t seed, const PlaceParams &place_params) {
  if (d_y == 0) d_y = design.row_height;
  std::vector<WindowScore> ranked = rank_windows(design, placement, guess, true);
  MoveEngine engine(design, placement, {});
  Rng rng(seed);
  int taken = 0;
  for (const WindowScore &w : ranked) {
    if (taken >= top_k || !w.valid) break;
    ++taken;
    std::vector<int> cells = cells_inside(design, engine.placement(), w.window);
    const Placement &cur = engine.placement();
    std::sort(cells.begin(), cells.end(), [&](int a, int b) {
      if (cur.y[a] != cur.y[b]) return cur.y[a] < cur.y[b];
      if (cur.x[a] != cur.x[b]) return cur.x[a] < cur.x[b];
      return a < b;
    });
    for (int id : cells) shift_with_room(engine, id, d_x, d_y, rng);
  }
  return restore(design, engine.placement(), place_params);
}

RankReport region_rank(const Design &design, const Placement &placement, const Certificate &cert,
                       const GwParams &guess) {
  if (!cert.gw) throw InvalidParams("scheme '" + cert.scheme + "' has no watermark region to rank");
  RankReport r;
  r.weights_in_range = guess.weights_in_range();
  std::vector<WindowScore> ranked = rank_windows(design, placement, guess, true);
  r.windows = static_cast<int>(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    r.valid_windows += ranked[i].valid;
    if (ranked[i].window == cert.gw->region) {
      r.rank = static_cast<int>(i) + 1;
      r.score = ranked[i].score;
    }
  }
  return r;
}

std::string AttackSpec::param() const {
  if (attack == "sla" || attack == "cpa") return short_real(fraction);
  if (attack == "ara") return "top" + std::to_string(top_k);
  return "-";
}

void AttackSpec::validate() const {
  if (attack == "sla") {
    if (!(fraction > 0.0 && fraction <= 0.5)) throw InvalidParams("sla fraction must lie in (0, 0.5]");
  } else if (attack == "cpa") {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidParams("cpa fraction must lie in (0, 1]");
  } else if (attack == "ara") {
    if (top_k < 1) throw InvalidParams("ara top-k must be at least 1");
  } else if (attack != "oa") {
    throw InvalidParams("unknown attack '" + attack + "'");
  }
  if (d_x <= 0 || d_y < 0) throw InvalidParams("attack shifts must be positive");
}

std::string AttackOutcome::csv_header() { return "scheme,attack,param,seed,pwlr,wer_gw,wer_dw,wer,success"; }

std::string AttackOutcome::csv_row() const {
  std::ostringstream s;
  s << scheme << ',' << attack << ',' << param << ',' << seed << ',' << format_real(pwlr) << ','
    << (wer.gw ? format_real(*wer.gw, 4) : "") << ',' << (wer.dw ? format_real(*wer.dw, 4) : "") << ','
    << format_real(wer.wer, 4) << ',' << (success() ? 1 : 0);
  return s.str();
}

AttackOutcome run_attack(const Design &design, const Placement &placement, const Certificate &cert,
                         const AttackSpec &spec, const PlaceParams &place_params) {
  spec.validate();
  AttackOutcome o;
  o.scheme = cert.scheme;
  o.attack = spec.attack;
  o.param = spec.param();
  o.seed = spec.seed;
  if (spec.attack == "sla") {
    o.placement = sla_placement(design, placement, spec.fraction, spec.seed, place_params);
  } else if (spec.attack == "cpa") {
    o.placement = cpa_placement(design, placement, spec.fraction, spec.d_x, spec.d_y, spec.seed, place_params);
  } else if (spec.attack == "oa") {
    o.placement = oa_placement(design, placement, place_params);
  } else {
    o.placement =
        ara_placement(design, placement, spec.guess, spec.top_k, spec.d_x, spec.d_y, spec.seed, place_params);
  }
  o.pwlr = pwlr(static_cast<double>(hpwl(design, o.placement)), static_cast<double>(cert.baseline_hpwl));
  o.wer = verify(design, o.placement, cert);
  return o;
}

AttackOutcome attack_sla(const Design &design, const Placement &placement, const Certificate &cert, double fraction,
                         std::uint64_t seed, const PlaceParams &place_params) {
  AttackSpec s;
  s.attack = "sla";
  s.fraction = fraction;
  s.seed = seed;
  return run_attack(design, placement, cert, s, place_params);
}

AttackOutcome attack_cpa(const Design &design, const Placement &placement, const Certificate &cert, double fraction,
                         std::uint64_t seed, const PlaceParams &place_params, Coord d_x, Coord d_y) {
  AttackSpec s;
  s.attack = "cpa";
  s.fraction = fraction;
  s.seed = seed;
  s.d_x = d_x;
  s.d_y = d_y;
  return run_attack(design, placement, cert, s, place_params);
}

AttackOutcome attack_oa(const Design &design, const Placement &placement, const Certificate &cert,
                        const PlaceParams &place_params) {
  AttackSpec s;
  s.attack = "oa";
  return run_attack(design, placement, cert, s, place_params);
}

AttackOutcome attack_ara(const Design &design, const Placement &placement, const Certificate &cert,
                         const GwParams &guess, int top_k, std::uint64_t seed, const PlaceParams &place_params) {
  AttackSpec s;
  s.attack = "ara";
  s.guess = guess;
  s.top_k = top_k;
  s.seed = seed;
  return run_attack(design, placement, cert, s, place_params);
}

std::vector<AttackOutcome> run_attack_sweep(const Design &design, const Placement &placement,
                                            const Certificate &cert, const std::vector<AttackSpec> &specs,
                                            const PlaceParams &place_params, int workers) {
  for (const AttackSpec &s : specs) s.validate();
  std::vector<AttackOutcome> out(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        out[i] = run_attack(design, placement, cert, specs[i], place_params);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(specs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (std::thread &t : pool) t.join();
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace wmp
