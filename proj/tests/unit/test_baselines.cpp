#include "doctest.h"
#include "helpers.hpp"
#include "wmplace/baselines.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"

using namespace wmp;
using wmp::test::Builder;

namespace {

// Drops a cell and every pin on it, renumbering the rest.
Design remove_cell(const Design &d, int victim) {
  Design out = d;
  out.cells.erase(out.cells.begin() + victim);
  for (std::size_t i = 0; i < out.cells.size(); ++i) out.cells[i].id = static_cast<int>(i);
  std::vector<Net> nets;
  for (Net n : out.nets) {
    std::vector<Pin> pins;
    for (Pin p : n.pins) {
      if (p.cell == victim) continue;
      if (p.cell > victim) --p.cell;
      pins.push_back(p);
    }
    if (pins.empty()) continue;
    n.pins = pins;
    n.id = static_cast<int>(nets.size());
    nets.push_back(n);
  }
  out.nets = nets;
  out.finalize();
  return out;
}

}  // namespace

TEST_CASE("row parity examples") {
  SUBCASE("cell already on a matching row stays") {
    Builder b(20, 12, 2);
    b.cell(2, 2, 6, 2);
    Design d = b.build();
    Placement p = Placement::from_design(d, Stage::Legalized);
    BaselineResult r = row_parity_insert(d, p, Signature::parse("1"), 1, PlaceParams{});
    CHECK(r.placement.x[0] == 6);
    CHECK(r.placement.y[0] == 2);
    CHECK(row_parity_extract(d, r.placement, r.watermark) == 100.0);
  }
  SUBCASE("even row moves to a neighbouring odd row") {
    Builder b(20, 12, 2);
    b.cell(2, 2, 6, 8);
    Design d = b.build();
    Placement p = Placement::from_design(d, Stage::Legalized);
    BaselineResult r = row_parity_insert(d, p, Signature::parse("1"), 1, PlaceParams{});
    int row = row_index(d, r.placement.y[0]);
    CHECK((row == 3 || row == 5));
    CHECK(check_legal(d, r.placement).legal());
  }
  SUBCASE("odd rows blocked") {
    Builder b(10, 4, 2);
    b.cell(10, 2, 0, 2, CellKind::Macro);
    b.cell(2, 2, 0, 0);
    Design d = b.build();
    Placement p = Placement::from_design(d, Stage::Legalized);
    CHECK_THROWS_AS(row_parity_insert(d, p, Signature::parse("1"), 1, PlaceParams{}), InsufficientCandidates);
  }
}

TEST_CASE("row parity on a synthetic design") {
  Design d = test::synthetic(600, 2);
  PlaceParams pp;
  PipelineResult base = run_pipeline(d, {}, pp);
  BaselineResult r = row_parity_insert(d, base.legalized, Signature::random(20, 4), 4, pp);
  CHECK(check_legal(d, r.placement).legal());
  CHECK(row_parity_extract(d, r.placement, r.watermark) == 100.0);
  Placement one = r.placement;
  one.y[r.watermark.cells[0]] += d.row_height;
  CHECK(row_parity_extract(d, one, r.watermark) == doctest::Approx(95.0));
  Placement all = r.placement;
  for (int c : r.watermark.cells) all.y[c] += d.row_height;
  CHECK(row_parity_extract(d, all, r.watermark) == 0.0);
}

TEST_CASE("cell scattering") {
  SUBCASE("a 1-bit moves the cell up one row") {
    Builder b(20, 8, 4);
    b.cell(2, 4, 8, 0);
    Design d = b.build();
    Placement p = Placement::from_design(d, Stage::Detailed);
    BaselineResult r = cell_scattering_insert(d, p, Signature::parse("1"), 1);
    CHECK(r.placement.y[0] == 4);
    CHECK(r.placement.x[0] == 8);
    CHECK(cell_scattering_extract(r.placement, r.watermark) == 100.0);
  }
  SUBCASE("extraction under reverts") {
    Design d = test::synthetic(600, 3);
    Placement det = run_pipeline(d, {}, PlaceParams{}).detailed;
    BaselineResult r = cell_scattering_insert(d, det, Signature::random(10, 2), 2);
    CHECK(check_legal(d, r.placement).legal());
    CHECK(cell_scattering_extract(r.placement, r.watermark) == 100.0);
    Placement one = r.placement;
    one.x[r.watermark.cells[0]] = r.watermark.ref_x[0];
    one.y[r.watermark.cells[0]] = r.watermark.ref_y[0];
    CHECK(cell_scattering_extract(one, r.watermark) == doctest::Approx(90.0));
    CHECK(cell_scattering_extract(det, r.watermark) == 0.0);
  }
  SUBCASE("costs at least as much wirelength as dw on average") {
    Design d = test::synthetic(2000, 1);
    PlaceParams pp;
    PipelineResult base = run_pipeline(d, {}, pp);
    double cs_sum = 0.0, dw_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Signature sig = Signature::random(200, seed);
      BaselineResult cs = cell_scattering_insert(d, base.detailed, sig, seed);
      DwResult dw = insert_dw(d, base.legalized, sig, DwParams{}, seed, {}, pp);
      cs_sum += static_cast<double>(hpwl(d, cs.placement));
      dw_sum += static_cast<double>(hpwl(d, dw.placement));
    }
    CHECK(cs_sum >= dw_sum);
  }
}

TEST_CASE("buffer insertion") {
  Builder b(30, 8, 4);
  int a = b.cell(2, 4, 0, 0);
  int z = b.cell(2, 4, 20, 0);
  int c = b.cell(2, 4, 0, 4);
  int e = b.cell(2, 4, 2, 4);
  b.net({a, z}, true);
  b.net({c, e}, true);
  Design d = b.build();
  Placement p = Placement::from_design(d, Stage::Detailed);

  SUBCASE("a 1-bit splits the slack net through one buffer") {
    BaselineResult r = buffer_insertion_insert(d, p, Signature::parse("1"), 1, PlaceParams{});
    CHECK(r.design.nets.size() == 3);
    CHECK(r.design.cells.size() == 5);
    REQUIRE(r.watermark.chains.size() == 1);
    CHECK(r.watermark.chains[0].size() == 1);
    CHECK(r.design.nets[0].pins.size() == 2);
    CHECK(r.design.nets[0].pins[1].cell == z);
    CHECK(r.design.nets[1].pins[0].cell == c);
    CHECK(check_legal(r.design, r.placement).legal());
    CHECK(buffer_insertion_extract(r.design, r.watermark) == 100.0);
  }
  SUBCASE("a 0-bit chains two buffers") {
    BaselineResult r = buffer_insertion_insert(d, p, Signature::parse("0"), 1, PlaceParams{});
    CHECK(r.design.nets.size() == 4);
    REQUIRE(r.watermark.chains.size() == 1);
    CHECK(r.watermark.chains[0].size() == 2);
    CHECK(buffer_insertion_extract(r.design, r.watermark) == 100.0);
    int second = r.design.find_cell(r.watermark.chains[0][1]);
    CHECK(buffer_insertion_extract(remove_cell(r.design, second), r.watermark) == 0.0);
  }
  SUBCASE("no slack anywhere") {
    Builder t(30, 4, 4);
    int u = t.cell(2, 4, 0, 0);
    int v = t.cell(2, 4, 20, 0);
    t.net({u, v}, true);
    Design tight = t.build();
    CHECK_THROWS_AS(buffer_insertion_insert(tight, Placement::from_design(tight, Stage::Detailed),
                                            Signature::parse("1"), 1, PlaceParams{}),
                    NoTimingMargin);
  }
}

TEST_CASE("buffer insertion on a synthetic design") {
  Design d = test::synthetic(600, 5);
  PlaceParams pp;
  Placement det = run_pipeline(d, {}, pp).detailed;
  DelayModel model = buffer_delay_model(d, det);
  TimingResult t = timing_analyze(d, det, model);
  BaselineResult r = buffer_insertion_insert(d, det, Signature::random(12, 3), 3, pp);
  CHECK(check_legal(r.design, r.placement).legal());
  CHECK(buffer_insertion_extract(r.design, r.watermark) == 100.0);
  const double margin = BufferParams{}.margin_fraction * t.max_rat;
  for (const Net &n : d.nets) {
    if (t.net_slack[n.id] >= margin) continue;
    REQUIRE(r.design.nets[n.id].pins.size() == n.pins.size());
    for (std::size_t k = 0; k < n.pins.size(); ++k) CHECK(r.design.nets[n.id].pins[k].cell == n.pins[k].cell);
  }
  int first = r.design.find_cell(r.watermark.chains[0][0]);
  double expect = 100.0 * static_cast<double>(r.watermark.chains.size() - 1) / r.watermark.chains.size();
  CHECK(buffer_insertion_extract(remove_cell(r.design, first), r.watermark) == doctest::Approx(expect));
}
