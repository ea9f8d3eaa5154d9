#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "wmplace/attacks.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"
#include "wmplace/schemes.hpp"

using namespace wmp;
using wmp::test::Builder;

namespace {

struct Runs {
  Design design = test::synthetic(2000, 1);
  SchemeRun icmarks = run(design, "icmarks");
  SchemeRun dw = run(design, "dw");

  static SchemeRun run(const Design &d, const std::string &scheme) {
    SchemeConfig cfg;
    cfg.scheme = scheme;
    cfg.signature = Signature::random(50, 9);
    cfg.seed = 9;
    cfg.gw.window_w = 16 * d.row_height;
    cfg.gw.window_h = 16 * d.row_height;
    return run_scheme(d, cfg);
  }
};

const Runs &runs() {
  static Runs r;
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("attack specs") {
  AttackSpec s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.param() == "0.001");
  s.attack = "ara";
  s.top_k = 5;
  CHECK(s.param() == "top5");
  s.attack = "oa";
  CHECK(s.param() == "-");
  s.attack = "nope";
  CHECK_THROWS_AS(s.validate(), InvalidParams);
  s.attack = "sla";
  s.fraction = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidParams);
  s.fraction = 0.6;
  CHECK_THROWS_AS(s.validate(), InvalidParams);
  CHECK(AttackOutcome::csv_header() == "scheme,attack,param,seed,pwlr,wer_gw,wer_dw,wer,success");
}

TEST_CASE("empty perturbations leave the placement alone") {
  const Runs &r = runs();
  const Design &d = r.design;
  const Placement &p = r.icmarks.placement;
  Placement sla = sla_placement(d, p, 0.0005, 1, r.icmarks.certificate.place_params);
  CHECK(sla.x == p.x);
  CHECK(sla.y == p.y);
  AttackOutcome o = attack_sla(d, p, r.icmarks.certificate, 0.0005, 1, r.icmarks.certificate.place_params);
  CHECK(o.wer.wer == 100.0);
  CHECK_FALSE(o.success());

  Builder b(10, 4, 4);
  for (int i = 0; i < 5; ++i) b.cell(2, 4, 2 * i, 0);
  Design packed = b.build();
  Placement q = Placement::from_design(packed, Stage::Detailed);
  Placement cpa = cpa_placement(packed, q, 1.0, 1, 4, 1, PlaceParams{});
  CHECK(cpa.x == q.x);

  Builder f(40, 4, 4);
  int a = f.cell(4, 4, 10, 0);
  int c = f.cell(4, 4, 14, 0);
  f.net({a, c});
  Design fixed = f.build();
  Placement fp = Placement::from_design(fixed, Stage::Detailed);
  CHECK(oa_placement(fixed, fp, PlaceParams{}).x == fp.x);
}

TEST_CASE("attacks are legal and deterministic") {
  const Runs &r = runs();
  const Design &d = r.design;
  const Certificate &cert = r.icmarks.certificate;
  const PlaceParams &pp = cert.place_params;
  std::vector<AttackSpec> specs;
  for (std::string name : {"sla", "cpa", "oa", "ara"}) {
    AttackSpec s;
    s.attack = name;
    s.fraction = 0.005;
    s.top_k = 5;
    s.guess = cert.gw_params;
    s.seed = 3;
    specs.push_back(s);
  }
  for (const AttackSpec &s : specs) {
    AttackOutcome o = run_attack(d, r.icmarks.placement, cert, s, pp);
    CHECK(check_legal(d, o.placement).legal());
    REQUIRE(o.wer.gw);
    CHECK(*o.wer.gw >= 90.0);
    AttackOutcome again = run_attack(d, r.icmarks.placement, cert, s, pp);
    CHECK(again.csv_row() == o.csv_row());
    CHECK(again.placement.x == o.placement.x);
    CHECK(o.success() == (o.wer.wer < 90.0 && o.pwlr <= 1.005));
  }
  std::vector<AttackOutcome> one = run_attack_sweep(d, r.icmarks.placement, cert, specs, pp, 1);
  std::vector<AttackOutcome> four = run_attack_sweep(d, r.icmarks.placement, cert, specs, pp, 4);
  REQUIRE(one.size() == specs.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].csv_row() == four[i].csv_row());
    CHECK(one[i].attack == specs[i].attack);
  }
}

TEST_CASE("cpa removes a dw watermark for some seed") {
  const Runs &r = runs();
  double worst = 100.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    AttackOutcome o = attack_cpa(r.design, r.dw.placement, r.dw.certificate, 0.1, seed, r.dw.certificate.place_params);
    REQUIRE(o.wer.dw);
    worst = std::min(worst, *o.wer.dw);
    CHECK(check_legal(r.design, o.placement).legal());
  }
  CHECK(worst < 90.0);
}

TEST_CASE("adaptive region attack outside the owner's region") {
  const Runs &r = runs();
  const Certificate &cert = r.icmarks.certificate;
  GwParams guess = cert.gw_params;
  bool found = false;
  for (double a : {25.0, 0.0, 1.0}) {
    for (double b : {15.0, 0.0, 1.0}) {
      guess.alpha = a;
      guess.beta = b;
      guess.gamma = a > 1.0 ? 10.0 : cert.gw_params.gamma;
      if (region_rank(r.design, r.icmarks.placement, cert, guess).rank != 1) {
        found = true;
        break;
      }
    }
    if (found) break;
  }
  REQUIRE(found);
  AttackOutcome o = attack_ara(r.design, r.icmarks.placement, cert, guess, 1, 1, cert.place_params);
  REQUIRE(o.wer.gw);
  CHECK(*o.wer.gw == 100.0);
}

TEST_CASE("region rank report") {
  const Runs &r = runs();
  const Certificate &cert = r.icmarks.certificate;
  RankReport own = region_rank(r.design, r.icmarks.placement, cert, cert.gw_params);
  CHECK(own.rank >= 1);
  CHECK(own.windows >= own.valid_windows);
  CHECK(own.weights_in_range);
  GwParams forged = cert.gw_params;
  forged.alpha = 25;
  forged.beta = 15;
  forged.gamma = 10;
  RankReport f = region_rank(r.design, r.icmarks.placement, cert, forged);
  CHECK_FALSE(f.weights_in_range);
  CHECK(f.windows == own.windows);
  CHECK_THROWS_AS(region_rank(r.design, r.dw.placement, r.dw.certificate, forged), InvalidParams);
}

TEST_CASE("median wer does not rise with the attacked fraction") {
  const Runs &r = runs();
  for (const SchemeRun *run : {&r.icmarks, &r.dw}) {
    for (std::string attack : {"sla", "cpa"}) {
      double prev = 101.0;
      for (double fraction : {0.001, 0.005, 0.01, 0.1}) {
        std::vector<double> wers;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
          AttackSpec s;
          s.attack = attack;
          s.fraction = fraction;
          s.seed = seed;
          wers.push_back(run_attack(r.design, run->placement, run->certificate, s, run->certificate.place_params).wer.wer);
        }
        double m = median(wers);
        CHECK_MESSAGE(m <= prev, run->certificate.scheme << " " << attack << " " << fraction);
        prev = m;
      }
    }
  }
}
