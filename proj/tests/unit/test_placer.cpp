#include "doctest.h"
#include "helpers.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/gw.hpp"
#include "wmplace/metrics.hpp"
#include "wmplace/placer.hpp"

using namespace wmp;
using wmp::test::Builder;

namespace {

bool member_centers_exact(const Design &d, const Placement &p, const WatermarkRegion &w) {
  for (const Cell &c : d.cells) {
    if (c.fixed()) continue;
    bool in = center_in(w.rect, p.x[c.id], p.y[c.id], c.width, c.height);
    if (in != w.is_member(c.id)) return false;
  }
  return true;
}

bool fence_centers_inside(const Design &d, const Placement &p) {
  for (const Cell &c : d.cells) {
    if (c.fixed() || c.region < 0) continue;
    bool in = false;
    for (const Rect &r : d.fences[c.region].rects) in = in || center_in(r, p.x[c.id], p.y[c.id], c.width, c.height);
    if (!in) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parameter validation") {
  PlaceParams p;
  CHECK_NOTHROW(p.validate());
  p.density_target = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p.density_target = 0.8;
  p.max_iterations = 0;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
}

TEST_CASE("global placement examples") {
  SUBCASE("lone cell") {
    Builder b(40, 40, 4);
    b.cell(4, 4, 3, 7);
    Design d = b.build();
    Placement p = global_place(d, {}, PlaceParams{});
    CHECK(hpwl(d, p) == 0);
    CHECK(d.die.contains(Rect{p.x[0], p.y[0], p.x[0] + 4, p.y[0] + 4}));
  }
  SUBCASE("connected pair shortens") {
    Builder b(100, 100, 4);
    int a = b.cell(4, 4, 0, 0);
    int c = b.cell(4, 4, 96, 96);
    b.net({a, c});
    Design d = b.build();
    GlobalResult g = global_place_ex(d, {}, PlaceParams{});
    CHECK(hpwl(d, g.placement) < g.initial_hpwl);
  }
  SUBCASE("overfull watermark region") {
    Builder b(100, 100, 2);
    std::vector<int> members;
    for (int i = 0; i < 30; ++i) members.push_back(b.cell(2, 2, (i % 10) * 10, (i / 10) * 10));
    for (int i = 0; i < 30; ++i) b.cell(2, 2, 50 + (i % 10) * 4, 60 + (i / 10) * 10);
    Design d = b.build();
    // 0.8 * 40 = 32 units of area host 8 cells of area 4.
    RegionConstraintSet cons = RegionConstraintSet::with_watermark(Rect{0, 0, 10, 4}, members);
    CHECK_THROWS_AS(global_place(d, cons, PlaceParams{}), RegionInfeasible);
  }
}

TEST_CASE("global placement contract on synthetic designs") {
  Design d = test::synthetic(800, 4, 2, 1);
  PlaceParams pp;
  GlobalResult g = global_place_ex(d, {}, pp);
  CHECK(hpwl(d, g.placement) <= g.initial_hpwl);
  CHECK(max_bin_density(d, g.placement, pp) <= pp.density_target + 0.05);
  CHECK(fence_centers_inside(d, g.placement));
  GlobalResult again = global_place_ex(d, {}, pp);
  CHECK(again.placement.x == g.placement.x);
  CHECK(again.placement.y == g.placement.y);

  PipelineResult base = run_pipeline(d, {}, pp);
  GwParams gp;
  gp.n_bits = 20;
  GwWatermark wm = select_region(d, base.detailed, gp);
  RegionConstraintSet cons = wm.constraints();
  PipelineResult r = run_pipeline(d, cons, pp);
  for (const Placement *p : {&r.global, &r.legalized, &r.detailed}) {
    CHECK(member_centers_exact(d, *p, *cons.watermark));
    CHECK(fence_centers_inside(d, *p));
  }
  CHECK(max_bin_density(d, r.global, pp) <= pp.density_target + 0.05);
}

TEST_CASE("legalization examples") {
  SUBCASE("legal input is a fixed point") {
    Builder b(40, 8, 4);
    b.cell(4, 4, 0, 0);
    b.cell(6, 4, 10, 0);
    b.cell(3, 4, 5, 4);
    Design d = b.build();
    Placement in = Placement::from_design(d, Stage::Global);
    Placement out = legalize(d, in, {});
    CHECK(out.x == in.x);
    CHECK(out.y == in.y);
  }
  SUBCASE("overlapping pair separates in row, order kept") {
    Builder b(40, 4, 4);
    b.cell(4, 4, 10, 0);
    b.cell(4, 4, 12, 0);
    Design d = b.build();
    Placement out = legalize(d, Placement::from_design(d, Stage::Global), {});
    CHECK(check_legal(d, out).legal());
    CHECK(out.y[0] == 0);
    CHECK(out.y[1] == 0);
    CHECK(out.x[0] + 4 <= out.x[1]);
    // Abacus optimum for two equal-weight cells: split the overlap evenly.
    CHECK(out.x[0] == 9);
    CHECK(out.x[1] == 13);
  }
  SUBCASE("double-height cell is placed first") {
    Builder b(20, 8, 4);
    int tall = b.cell(4, 8, 6, 0);
    int small = b.cell(4, 4, 7, 0);
    Design d = b.build();
    Placement out = legalize(d, Placement::from_design(d, Stage::Global), {});
    CHECK(check_legal(d, out).legal());
    CHECK(out.x[tall] == 6);
    CHECK(out.y[tall] == 0);
    CHECK(out.x[small] != 7);
  }
}

TEST_CASE("detailed placement examples") {
  SUBCASE("no improving move") {
    Builder b(40, 4, 4);
    int a = b.cell(4, 4, 10, 0);
    int c = b.cell(4, 4, 14, 0);
    b.net({a, c});
    Design d = b.build();
    Placement in = Placement::from_design(d, Stage::Legalized);
    Placement out = detailed_place(d, in, {}, PlaceParams{});
    CHECK(out.x == in.x);
    CHECK(out.y == in.y);
  }
  SUBCASE("improving swap is committed") {
    Builder b(40, 4, 4);
    int a = b.cell(4, 4, 4, 0);
    int c = b.cell(4, 4, 30, 0);
    int right = b.cell(1, 1, 40, 0, CellKind::Io);
    int left = b.cell(1, 1, -1, 0, CellKind::Io);
    b.net({right, a});
    b.net({left, c});
    Design d = b.build();
    Placement in = Placement::from_design(d, Stage::Legalized);
    Placement out = detailed_place(d, in, {}, PlaceParams{});
    CHECK(check_legal(d, out).legal());
    CHECK(hpwl(d, out) < hpwl(d, in));
    CHECK(out.x[a] > out.x[c]);
  }
  SUBCASE("swap leaving a fence is rejected") {
    Builder b(40, 4, 4);
    int f = b.fence({Rect{0, 0, 12, 4}});
    int a = b.cell(4, 4, 4, 0, CellKind::Movable, f);
    int c = b.cell(4, 4, 30, 0);
    int right = b.cell(1, 1, 40, 0, CellKind::Io);
    int left = b.cell(1, 1, -1, 0, CellKind::Io);
    b.net({right, a});
    b.net({left, c});
    Design d = b.build();
    Placement in = Placement::from_design(d, Stage::Legalized);
    Placement out = detailed_place(d, in, {}, PlaceParams{});
    CHECK(check_legal(d, out).legal());
    CHECK(out.x[a] + 4 <= 12);
    CHECK(hpwl(d, out) <= hpwl(d, in));
  }
}

TEST_CASE("pipeline legality, monotonicity and determinism") {
  for (std::uint64_t seed : {1, 2, 3}) {
    Design d = test::synthetic(500, seed, static_cast<int>(seed % 3), static_cast<int>(seed % 2));
    PlaceParams pp;
    pp.seed = seed;
    PipelineResult r = run_pipeline(d, {}, pp);
    CHECK(check_legal(d, r.legalized).legal());
    CHECK(check_legal(d, r.detailed).legal());
    CHECK(hpwl(d, r.detailed) <= hpwl(d, r.legalized));
    PipelineResult again = run_pipeline(d, {}, pp);
    CHECK(again.detailed.x == r.detailed.x);
    CHECK(again.detailed.y == r.detailed.y);
    Placement dp = detailed_place(d, r.detailed, {}, pp);
    CHECK(hpwl(d, dp) <= hpwl(d, r.detailed));
  }
}
