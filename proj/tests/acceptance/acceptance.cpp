// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "wmplace/attacks.hpp"
#include "wmplace/bookshelf.hpp"
#include "wmplace/cli.hpp"
#include "wmplace/dump.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"
#include "wmplace/schemes.hpp"
#include "wmplace/strength.hpp"
#include "wmplace/synthetic.hpp"

using namespace wmp;

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool all_ok = true;

void report(int n, bool ok, const std::string &detail) {
  all_ok = all_ok && ok;
  std::printf("%s %d %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Design synthetic(int cells, int macros, int fences, std::uint64_t seed = 7) {
  SyntheticConfig cfg;
  cfg.n_cells = cells;
  cfg.n_nets = cells * 11 / 10;
  cfg.n_macros = macros;
  cfg.n_fences = fences;
  return generate_synthetic(cfg, seed);
}

// Legality ledger shared by criteria 1-4.
struct LegalityLog {
  int checked = 0;
  std::vector<std::string> failures;

  void check(const std::string &what, const Design &d, const Placement &p, const RegionConstraintSet &cons = {}) {
    ++checked;
    LegalityReport r = check_legal(d, p, cons);
    if (!r.legal()) failures.push_back(what + ": " + r.summary());
  }

  void check_run(const std::string &what, const Design &input, const SchemeRun &run) {
    for (const auto &[stage, p] : run.stages) {
      const Design &d = p.size() == input.cells.size() ? input : run.design;
      bool baseline = stage.rfind("baseline", 0) == 0;
      check(what + "/" + stage, d, p, baseline ? RegionConstraintSet{} : run.constraints);
    }
  }
};

LegalityLog legality;

SchemeConfig scheme_config(const std::string &scheme, int bits, Coord window) {
  SchemeConfig sc;
  sc.scheme = scheme;
  sc.signature = Signature::random(bits, 3);
  sc.seed = 5;
  sc.gw.window_w = window;
  sc.gw.window_h = window;
  return sc;
}

double run_pwlr(const SchemeRun &r) {
  return pwlr(r.certificate.watermarked_hpwl, r.certificate.baseline_hpwl);
}

struct Bench {
  Design design;
  PipelineResult base;
};

// ---------------------------------------------------------------- 1

void criterion1(std::vector<Bench> &benches) {
  auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  const std::vector<std::tuple<int, int, int>> shapes = {{2000, 0, 0}, {8000, 2, 1}, {20000, 0, 0}};
  for (auto [cells, macros, fences] : shapes) {
    Bench b{synthetic(cells, macros, fences), {}};
    b.base = run_pipeline(b.design, {}, PlaceParams{});
    legality.check("base" + std::to_string(cells) + "/legalized", b.design, b.base.legalized);
    legality.check("base" + std::to_string(cells) + "/detailed", b.design, b.base.detailed);
    try {
      SchemeRun r = run_scheme(b.design, scheme_config("icmarks", 50, 16 * b.design.row_height), &b.base);
      legality.check_run("c1/" + std::to_string(cells), b.design, r);
      WerReport w = verify(r.design, r.placement, r.certificate);
      double q = run_pwlr(r);
      bool good = w.wer == 100.0 && q <= 1.005;
      ok = ok && good;
      detail += std::to_string(cells) + ":wer=" + fmt("%.1f", w.wer) + ",pwlr=" + fmt("%.5f", q) + " ";
    } catch (const Error &e) {
      ok = false;
      detail += std::to_string(cells) + ":" + e.what() + " ";
    }
    benches.push_back(std::move(b));
  }
  double secs = seconds_since(t0);
  ok = ok && secs < 300.0;
  report(1, ok, "insertion fidelity " + detail + "time=" + fmt("%.0fs", secs));
}

// ---------------------------------------------------------------- 2

double tail_oracle(int n, int x, double p) {
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    int k = __builtin_popcount(mask);
    if (k >= x) total += std::pow(p, k) * std::pow(1.0 - p, n - k);
  }
  return total;
}

void criterion2() {
  double rp = strength_gw(50, 50, 0.5);
  double comb = strength_combined(9.09e-53, 8.08e-62);
  double comb_err = std::abs(comb - 7.35e-114) / 7.35e-114;
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    int n = std::uniform_int_distribution<int>(1, 12)(rng);
    int x = std::uniform_int_distribution<int>(0, n)(rng);
    double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double expect = tail_oracle(n, x, p);
    double got = strength_gw(n, x, p);
    double rel = expect == 0.0 ? std::abs(got) : std::abs(got - expect) / expect;
    worst = std::max(worst, rel);
  }
  bool ok = rp >= 8.7e-16 && rp <= 9.0e-16 && comb_err <= 0.005 && worst <= 1e-12;
  report(2, ok, "strength rp50=" + fmt("%.3e", rp) + " combined=" + fmt("%.3e", comb) +
                    " oracle_max_rel=" + fmt("%.1e", worst));
}

// ---------------------------------------------------------------- 3

void criterion3(const Bench &b) {
  auto t0 = Clock::now();
  const std::vector<std::string> schemes = {"icmarks", "gw", "row_parity", "dw", "cell_scattering"};
  bool robust = true, broken = false;
  std::map<std::string, double> min_gw;
  std::map<std::string, double> witness;  // scheme/attack -> min wer
  std::string errors;
  for (const std::string &s : schemes) {
    try {
      SchemeRun r = run_scheme(b.design, scheme_config(s, 50, 16 * b.design.row_height), &b.base);
      legality.check_run("c3/" + s, b.design, r);
      std::vector<AttackSpec> specs;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto add = [&](const std::string &attack, double fraction, int top_k) {
          AttackSpec a;
          a.attack = attack;
          a.fraction = fraction;
          a.top_k = top_k;
          a.seed = seed;
          a.guess = r.certificate.gw_params;
          specs.push_back(a);
        };
        add("sla", 0.001, 1);
        add("sla", 0.005, 1);
        add("cpa", 0.001, 1);
        add("cpa", 0.01, 1);
        add("cpa", 0.1, 1);
        add("oa", 0.001, 1);
        add("ara", 0.001, 1);
        add("ara", 0.001, 5);
      }
      std::vector<AttackOutcome> out = run_attack_sweep(r.design, r.placement, r.certificate, specs,
                                                        r.certificate.place_params, 1);
      for (const AttackOutcome &o : out) {
        legality.check("c3/" + s + "/" + o.attack + o.param, r.design, o.placement);
        if (o.wer.gw) {
          double &m = min_gw.try_emplace(s, 100.0).first->second;
          m = std::min(m, *o.wer.gw);
        }
        bool listed = (s == "row_parity" && o.attack == "ara" && o.param == "top5") ||
                      (s == "dw" && o.attack == "oa") || (s == "cell_scattering" && o.attack == "cpa" && o.param == "0.1");
        if (listed) {
          double &m = witness.try_emplace(s + ":" + o.attack + o.param, 100.0).first->second;
          m = std::min(m, o.wer.wer);
          broken = broken || o.wer.wer < 90.0;
        }
      }
    } catch (const Error &e) {
      errors += s + ":" + e.what() + " ";
      if (s == "icmarks" || s == "gw") robust = false;
    }
  }
  for (const char *s : {"icmarks", "gw"}) robust = robust && min_gw.count(s) && min_gw[s] >= 90.0;
  double secs = seconds_since(t0);
  std::string detail = "attack robustness";
  for (auto &[s, v] : min_gw) detail += " " + s + ".min_wer_gw=" + fmt("%.2f", v);
  for (auto &[k, v] : witness) detail += " " + k + ".min_wer=" + fmt("%.2f", v);
  detail += " " + errors + "time=" + fmt("%.0fs", secs);
  report(3, robust && broken && secs < 900.0, detail);
}

// ---------------------------------------------------------------- 4

struct CapacityResult {
  int capacity = 0;
  std::string trace;
};

CapacityResult capacity_of(const Bench &b, const std::string &scheme, const std::vector<int> &lengths) {
  CapacityResult out;
  const Coord rh = b.design.row_height;
  const bool regional = scheme == "icmarks" || scheme == "gw";
  int window_rh = 10;
  for (int bits : lengths) {
    bool sustained = false;
    std::string note = "x";
    for (int w = window_rh; regional ? w <= 120 : w == window_rh; w += 5) {
      try {
        SchemeRun r = run_scheme(b.design, scheme_config(scheme, bits, w * rh), &b.base);
        legality.check_run("c4/" + scheme + std::to_string(bits), b.design, r);
        WerReport wer = verify(r.design, r.placement, r.certificate);
        double q = run_pwlr(r);
        note = fmt("%.5f", q);
        if (q <= 1.005 && wer.wer >= 90.0) {
          sustained = true;
          if (regional) {
            window_rh = w;
            note += "@" + std::to_string(w) + "rh";
          }
          break;
        }
      } catch (const InvalidParams &) {
        break;  // window no longer fits the die
      } catch (const Error &) {
      }
    }
    out.trace += std::to_string(bits) + "=" + (sustained ? note : "x" + (note == "x" ? "" : note)) + ";";
    if (sustained) out.capacity = std::max(out.capacity, bits);
  }
  return out;
}

void criterion4(const Bench &b) {
  auto t0 = Clock::now();
  const std::vector<int> lengths = {30, 50, 100, 200, 500, 1000};
  std::map<std::string, CapacityResult> cap;
  for (const char *s : {"icmarks", "gw", "dw", "row_parity"}) cap[s] = capacity_of(b, s, lengths);
  bool ok = cap["icmarks"].capacity >= cap["gw"].capacity && cap["gw"].capacity >= cap["dw"].capacity &&
            cap["dw"].capacity >= cap["row_parity"].capacity;
  std::string detail = "capacity";
  for (const char *s : {"icmarks", "gw", "dw", "row_parity"}) {
    detail += std::string(" ") + s + "=" + std::to_string(cap[s].capacity) + "[" + cap[s].trace + "]";
  }
  report(4, ok, detail + " time=" + fmt("%.0fs", seconds_since(t0)));
}

// ---------------------------------------------------------------- 5

void criterion5() {
  std::string detail = "legality checked=" + std::to_string(legality.checked) +
                       " failures=" + std::to_string(legality.failures.size());
  if (!legality.failures.empty()) detail += " first=" + legality.failures.front();
  report(5, legality.failures.empty() && legality.checked > 0, detail);
}

// ---------------------------------------------------------------- 6

bool center_inside(const Rect &r, const Cell &c, Coord x, Coord y) {
  double cx = static_cast<double>(x) + 0.5 * static_cast<double>(c.width);
  double cy = static_cast<double>(y) + 0.5 * static_cast<double>(c.height);
  return cx >= static_cast<double>(r.x_lo) && cx < static_cast<double>(r.x_hi) && cy >= static_cast<double>(r.y_lo) &&
         cy < static_cast<double>(r.y_hi);
}

double gw_oracle(const Design &d, const Placement &p, const GwWatermark &wm) {
  std::set<int> members(wm.members.begin(), wm.members.end()), inside;
  for (const Cell &c : d.cells) {
    if (!c.fixed() && center_inside(wm.region, c, p.x[c.id], p.y[c.id])) inside.insert(c.id);
  }
  std::vector<int> hit, foreign;
  std::set_intersection(inside.begin(), inside.end(), members.begin(), members.end(), std::back_inserter(hit));
  std::set_difference(inside.begin(), inside.end(), members.begin(), members.end(), std::back_inserter(foreign));
  long net = std::max(0L, static_cast<long>(hit.size()) - static_cast<long>(foreign.size()));
  return 100.0 * static_cast<double>(net) / static_cast<double>(members.size());
}

double dw_oracle(const Placement &p, const DwWatermark &wm) {
  std::set<std::tuple<int, Coord, Coord>> expected, observed;
  for (std::size_t i = 0; i < wm.cells.size(); ++i) {
    int c = wm.cells[i];
    expected.insert({c, wm.dist_x[i], wm.dist_y[i]});
    observed.insert({c, wm.itr_x[i] - p.x[c], wm.itr_y[i] - p.y[c]});
  }
  std::vector<std::tuple<int, Coord, Coord>> both;
  std::set_intersection(expected.begin(), expected.end(), observed.begin(), observed.end(), std::back_inserter(both));
  return 100.0 * static_cast<double>(both.size()) / static_cast<double>(expected.size());
}

void criterion6() {
  int mismatches = 0;
  std::mt19937_64 rng(66);
  for (int t = 0; t < 500; ++t) {
    Design d = synthetic(40, 0, 0, static_cast<std::uint64_t>(t) + 1);
    Placement p = Placement::from_design(d, Stage::Detailed);
    std::vector<int> movable = d.movable_cells();
    auto coord = [&](Coord lo, Coord hi) { return std::uniform_int_distribution<Coord>(lo, hi)(rng); };
    for (int c : movable) {
      p.x[c] = coord(d.die.x_lo, d.die.x_hi - d.cells[c].width);
      p.y[c] = coord(d.die.y_lo, d.die.y_hi - d.cells[c].height);
    }
    GwWatermark gw;
    Coord x0 = coord(d.die.x_lo, d.die.x_hi - 1), y0 = coord(d.die.y_lo, d.die.y_hi - 1);
    gw.region = Rect{x0, y0, coord(x0 + 1, d.die.x_hi), coord(y0 + 1, d.die.y_hi)};
    std::vector<int> shuffled = movable;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::size_t k = std::uniform_int_distribution<std::size_t>(1, shuffled.size())(rng);
    gw.members.assign(shuffled.begin(), shuffled.begin() + static_cast<long>(k));
    // Bias half the members into the region so all WER levels occur.
    for (int m : gw.members) {
      if (rng() % 2) {
        p.x[m] = std::clamp<Coord>((gw.region.x_lo + gw.region.x_hi) / 2 - d.cells[m].width / 2, d.die.x_lo,
                                   d.die.x_hi - d.cells[m].width);
        p.y[m] = std::clamp<Coord>((gw.region.y_lo + gw.region.y_hi) / 2 - d.cells[m].height / 2, d.die.y_lo,
                                   d.die.y_hi - d.cells[m].height);
      }
    }
    std::sort(gw.members.begin(), gw.members.end());

    DwWatermark dw;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::size_t nd = std::uniform_int_distribution<std::size_t>(1, shuffled.size())(rng);
    for (std::size_t i = 0; i < nd; ++i) {
      int c = shuffled[i];
      dw.cells.push_back(c);
      dw.dist_x.push_back(coord(-2, 2));
      dw.dist_y.push_back(coord(-1, 1) * d.row_height);
      bool keep = rng() % 3 != 0;
      dw.itr_x.push_back(p.x[c] + (keep ? dw.dist_x.back() : dw.dist_x.back() + coord(1, 3)));
      dw.itr_y.push_back(p.y[c] + dw.dist_y.back());
    }

    Certificate cert;
    cert.scheme = "icmarks";
    cert.gw = gw;
    cert.dw = dw;
    cert.fingerprint = design_fingerprint(d);
    double g = gw_oracle(d, p, gw), w = dw_oracle(p, dw);
    WerTriple got = extract_icmarks(d, p, cert);
    if (extract_gw(d, p, gw) != g || extract_dw(p, dw) != w || got.gw != g || got.dw != w ||
        got.wer != (g + w) / 2.0) {
      ++mismatches;
    }
  }

  const std::vector<std::string> &schemes = scheme_names();
  int successes = 0, failed_inserts = 0, not_full = 0;
  std::map<std::string, int> per_scheme;
  for (int seed = 1; seed <= 200; ++seed) {
    Design d = synthetic(500, seed % 3 == 0 ? 1 : 0, seed % 4 == 0 ? 1 : 0, static_cast<std::uint64_t>(seed));
    const std::string &scheme = schemes[static_cast<std::size_t>(seed) % schemes.size()];
    SchemeConfig sc;
    sc.scheme = scheme;
    sc.signature = Signature::random(16, static_cast<std::uint64_t>(seed));
    sc.seed = static_cast<std::uint64_t>(seed);
    sc.gw.window_w = sc.gw.window_h = 8 * d.row_height;
    try {
      SchemeRun r = run_scheme(d, sc);
      ++successes;
      ++per_scheme[scheme];
      if (verify(r.design, r.placement, r.certificate).wer != 100.0) ++not_full;
    } catch (const Error &) {
      ++failed_inserts;
    }
  }
  bool every_scheme = per_scheme.size() == schemes.size();
  report(6, mismatches == 0 && not_full == 0 && every_scheme,
         "extraction oracle_mismatches=" + std::to_string(mismatches) + "/500 self_extraction_below_100=" +
             std::to_string(not_full) + "/" + std::to_string(successes) +
             " insert_errors=" + std::to_string(failed_inserts));
}

// ---------------------------------------------------------------- 7

// Geometry-only recheck of one moved cell against every other box.
bool move_is_clean(const Design &d, const Placement &p, int cell, Coord x, Coord y) {
  const Cell &c = d.cells[cell];
  Rect box{x, y, x + c.width, y + c.height};
  if (!d.die.contains(box)) return false;
  bool on_row = false;
  for (const Row &r : d.rows) on_row = on_row || (r.y == y && r.x_lo <= x && x + c.width <= r.x_hi);
  if (!on_row) return false;
  for (const Cell &o : d.cells) {
    if (o.id == cell || o.kind == CellKind::Io) continue;
    Rect ob{p.x[o.id], p.y[o.id], p.x[o.id] + o.width, p.y[o.id] + o.height};
    if (ob.overlap_area(box) > 0) return false;
  }
  if (c.region >= 0) {
    Coord covered = 0;
    for (const Rect &r : d.fences[c.region].rects) covered += r.overlap_area(box);
    if (covered != box.area()) return false;
  }
  return true;
}

void criterion7() {
  long candidates = 0, dirty = 0;
  int itr_checked = 0, itr_illegal = 0, skipped = 0;
  for (int t = 1; t <= 100; ++t) {
    Design d = synthetic(1000, t % 3 == 0 ? 1 : 0, t % 5 == 0 ? 1 : 0, static_cast<std::uint64_t>(100 + t));
    PlaceParams pp;
    pp.seed = static_cast<std::uint64_t>(t);
    Placement legal = run_pipeline(d, {}, pp).legalized;
    DwParams dp = DwParams{}.resolved(d);
    DwCandidates c = select_candidates(d, legal, dp.d_x, dp.d_y);
    for (const std::vector<Candidate> *pool : {&c.x, &c.y}) {
      for (const Candidate &k : *pool) {
        ++candidates;
        dirty += !move_is_clean(d, legal, k.cell, legal.x[k.cell] + k.dx, legal.y[k.cell] + k.dy);
      }
    }
    try {
      DwResult r = insert_dw(d, legal, Signature::random(32, static_cast<std::uint64_t>(t)), DwParams{},
                             static_cast<std::uint64_t>(t), {}, pp);
      ++itr_checked;
      itr_illegal += !check_legal(d, r.intermediate).legal();
    } catch (const InsufficientCandidates &) {
      ++skipped;
    }
  }
  report(7, dirty == 0 && itr_illegal == 0 && itr_checked > 0,
         "candidate soundness candidates=" + std::to_string(candidates) + " overlapping=" + std::to_string(dirty) +
             " p_itr_illegal=" + std::to_string(itr_illegal) + "/" + std::to_string(itr_checked) +
             " skipped=" + std::to_string(skipped));
}

// ---------------------------------------------------------------- 8

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string sweep_csv(const std::vector<AttackOutcome> &out) {
  std::string s = AttackOutcome::csv_header() + "\n";
  for (const AttackOutcome &o : out) s += o.csv_row() + "\n";
  return s;
}

void criterion8(const Bench &b) {
  std::vector<std::string> diffs;
  SchemeConfig sc = scheme_config("icmarks", 50, 16 * b.design.row_height);
  SchemeRun r1 = run_scheme(b.design, sc);
  SchemeRun r2 = run_scheme(b.design, sc);
  if (format_pl(r1.design, r1.placement) != format_pl(r2.design, r2.placement)) diffs.push_back("placement");
  if (format_certificate(r1.certificate) != format_certificate(r2.certificate)) diffs.push_back("certificate");

  std::vector<AttackSpec> specs;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    for (const char *a : {"sla", "cpa", "oa", "ara"}) {
      AttackSpec s;
      s.attack = a;
      s.fraction = 0.005;
      s.top_k = 5;
      s.seed = seed;
      s.guess = r1.certificate.gw_params;
      specs.push_back(s);
    }
  }
  const PlaceParams &pp = r1.certificate.place_params;
  std::vector<AttackOutcome> w1 = run_attack_sweep(b.design, r1.placement, r1.certificate, specs, pp, 1);
  std::vector<AttackOutcome> w1b = run_attack_sweep(b.design, r1.placement, r1.certificate, specs, pp, 1);
  std::vector<AttackOutcome> w4 = run_attack_sweep(b.design, r1.placement, r1.certificate, specs, pp, 4);
  if (sweep_csv(w1) != sweep_csv(w1b)) diffs.push_back("sweep-rerun");
  if (sweep_csv(w1) != sweep_csv(w4)) diffs.push_back("sweep-workers");
  for (std::size_t i = 0; i < w1.size(); ++i) {
    if (format_pl(b.design, w1[i].placement) != format_pl(b.design, w4[i].placement)) {
      diffs.push_back("attack-placement");
      break;
    }
  }

  fs::path root = fs::temp_directory_path() / "wmplace_acceptance";
  fs::remove_all(root);
  std::ostringstream sink;
  fs::create_directories(root);
  save_design(b.design, (root / "design.json").string());
  for (const char *run : {"a", "b"}) {
    for (const char *workers : {"1", "4"}) {
      fs::path out = root / (std::string(run) + workers);
      cli_main({"watermark", "--out", (out / "wm").string(), "--design", (root / "design.json").string(), "--scheme",
                "icmarks", "--bits", "50", "--window", std::to_string(16 * b.design.row_height), "--seed", "5"},
               sink, sink);
      cli_main({"attack", "--out", (out / "atk").string(), "--design", (root / "design.json").string(), "--placement",
                (out / "wm" / "placement.pl").string(), "--cert", (out / "wm" / "cert.wmcert").string(), "--attack",
                "cpa", "--fraction", "0.01", "--trials", "4", "--workers", workers},
               sink, sink);
    }
  }
  for (const char *f : {"wm/placement.pl", "wm/cert.wmcert", "wm/eval.csv", "atk/outcome.csv", "atk/placement.pl"}) {
    std::string ref = slurp(root / "a1" / f);
    bool same = !ref.empty();
    for (const char *other : {"a4", "b1", "b4"}) same = same && slurp(root / other / f) == ref;
    if (!same) diffs.push_back(std::string("cli:") + f);
  }
  std::string detail = "determinism";
  for (const std::string &d : diffs) detail += " differs:" + d;
  if (diffs.empty()) detail += " placements, certificates and csvs identical across runs and workers {1,4}";
  report(8, diffs.empty(), detail);
}

}  // namespace

int main() {
  try {
    std::vector<Bench> benches;
    criterion1(benches);
    criterion2();
    criterion3(benches[1]);
    criterion4(benches[2]);
    criterion5();
    criterion6();
    criterion7();
    criterion8(benches[0]);
  } catch (const std::exception &e) {
    std::printf("FAIL - aborted: %s\n", e.what());
    return 1;
  }
  return all_ok ? 0 : 1;
}
