#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "wmplace/cli.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/report.hpp"

using namespace wmp;

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli_main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

fs::path scratch(const std::string &name) {
  fs::path p = fs::temp_directory_path() / ("wmplace_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// A 2k design shared by the end-to-end cases.
const fs::path &design2k() {
  static fs::path dir = [] {
    fs::path d = scratch("design");
    Run r = cli({"gen", "--out", d.string(), "--cells", "2000", "--design-seed", "1"});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> watermark_args(const fs::path &out, const std::string &scheme) {
  return {"watermark", "--out", out.string(), "--design", (design2k() / "design.json").string(),
          "--scheme", scheme, "--bits", "50", "--window", "192", "--seed", "7"};
}

}  // namespace

TEST_CASE("csv parsing") {
  CsvTable t = parse_csv("a,b,c\n1,2,3\n\n4,,6\n");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1].empty());
  CHECK(t.column("c") == 2);
  CHECK(t.column("z") == -1);
  CHECK(format_csv(t) == "a,b,c\n1,2,3\n4,,6\n");
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), CorruptDocument);
}

TEST_CASE("report tables") {
  CsvTable attacks = parse_csv(
      "scheme,attack,param,seed,pwlr,wer_gw,wer_dw,wer,success\n"
      "icmarks,sla,0.001,1,1.001000,100.0000,96.0000,98.0000,0\n"
      "icmarks,sla,0.001,2,1.003000,100.0000,80.0000,90.0000,0\n"
      "dw,cpa,0.1,1,1.000000,,70.0000,70.0000,1\n");
  CHECK(is_attack_csv(attacks));
  CHECK_FALSE(is_eval_csv(attacks));
  CHECK(format_csv(attack_table({attacks})) ==
        "scheme,attack,param,trials,pwlr_mean,wer_gw_min,wer_dw_min,wer_min,wer_median,successes\n"
        "dw,cpa,0.1,1,1.000000,,70.0000,70.0000,70.0000,1\n"
        "icmarks,sla,0.001,2,1.002000,100.0000,80.0000,90.0000,94.0000,0\n");

  CsvTable eval = parse_csv(
      "design,scheme,stage,hpwl,pwlr,tns,wns,wer,legal,bits\n"
      "d,gw,baseline,1000,1.000000,0.000,0.000,0.0000,1,0\n"
      "d,gw,watermarked,1004,1.004000,0.000,0.000,100.0000,1,50\n"
      "d,gw,watermarked,1003,1.003000,0.000,0.000,100.0000,1,50\n"
      "d,gw,watermarked,1008,1.008000,0.000,0.000,100.0000,1,100\n"
      "d,gw,watermarked,1001,1.001000,0.000,0.000,100.0000,1,200\n");
  CsvTable cap = capacity_table({eval}, ReportThresholds{});
  CHECK(format_csv(cap) ==
        "design,scheme,bits,runs,pwlr_max,wer_min,sustained\n"
        "d,gw,50,2,1.004000,100.0000,1\n"
        "d,gw,100,1,1.008000,100.0000,0\n"
        "d,gw,200,1,1.001000,100.0000,1\n");
  CHECK(format_csv(capacity_summary(cap)) ==
        "design,scheme,capacity,lengths_tested\n"
        "d,gw,200,50 100 200\n");
}

TEST_CASE("report command golden output") {
  fs::path dir = scratch("report");
  spit(dir / "a.csv",
       "scheme,attack,param,seed,pwlr,wer_gw,wer_dw,wer,success\n"
       "gw,oa,-,1,1.000500,100.0000,,100.0000,0\n");
  Run r = cli({"report", "--out", (dir / "r").string(), "--csv", (dir / "a.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "r" / "attack_table.csv") ==
        "scheme,attack,param,trials,pwlr_mean,wer_gw_min,wer_dw_min,wer_min,wer_median,successes\n"
        "gw,oa,-,1,1.000500,100.0000,,100.0000,100.0000,0\n");
  CHECK(fs::exists(dir / "r" / "capacity_summary.csv"));
}

TEST_CASE("usage and pipeline errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"watermark"}).code == kExitUsage);
  CHECK(cli({"place", "--out", "x", "--bogus"}).code == kExitUsage);
  CHECK(cli({"watermark", "--out", "x", "--scheme", "nope"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"-h"}).code == kExitUsage);

  fs::path dir = scratch("errors");
  spit(dir / "broken.json", "{\"not\": ");
  Run r = cli({"place", "--out", (dir / "o").string(), "--design", (dir / "broken.json").string()});
  CHECK(r.code == kExitPipeline);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("end-to-end smoke on a 2k design") {
  auto start = std::chrono::steady_clock::now();
  fs::path dir = scratch("smoke");
  const std::string design = (design2k() / "design.json").string();
  REQUIRE(cli({"place", "--out", (dir / "place").string(), "--design", design}).code == 0);
  CHECK(fs::exists(dir / "place" / "eval.csv"));

  Run wm = cli(watermark_args(dir / "wm", "icmarks"));
  REQUIRE_MESSAGE(wm.code == 0, wm.err);
  for (const char *f : {"placement.pl", "cert.wmcert", "eval.csv", "config.resolved"}) CHECK(fs::exists(dir / "wm" / f));

  Run ver = cli({"verify", "--out", (dir / "ver").string(), "--design", design, "--placement",
                 (dir / "wm" / "placement.pl").string(), "--cert", (dir / "wm" / "cert.wmcert").string()});
  CHECK(ver.code == kExitOk);
  CHECK(ver.out.find("wer 100") != std::string::npos);

  Run atk = cli({"attack", "--out", (dir / "atk").string(), "--design", design, "--placement",
                 (dir / "wm" / "placement.pl").string(), "--cert", (dir / "wm" / "cert.wmcert").string(),
                 "--attack", "sla", "--fraction", "0.001", "--trials", "2"});
  CHECK(atk.code == kExitOk);
  CsvTable outcome = parse_csv(slurp(dir / "atk" / "outcome.csv"));
  CHECK(is_attack_csv(outcome));
  CHECK(outcome.rows.size() == 2);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 60.0);
}

TEST_CASE("removed watermark fails verification") {
  fs::path dir = scratch("removed");
  const std::string design = (design2k() / "design.json").string();
  REQUIRE(cli(watermark_args(dir / "wm", "cell_scattering")).code == 0);
  Run atk = cli({"attack", "--out", (dir / "atk").string(), "--design", design, "--placement",
                 (dir / "wm" / "placement.pl").string(), "--cert", (dir / "wm" / "cert.wmcert").string(),
                 "--attack", "cpa", "--fraction", "0.1"});
  REQUIRE(atk.code == 0);
  Run ver = cli({"verify", "--out", (dir / "ver").string(), "--design", design, "--placement",
                 (dir / "atk" / "placement.pl").string(), "--cert", (dir / "wm" / "cert.wmcert").string()});
  CHECK(ver.code == kExitBelowThreshold);
}

TEST_CASE("seed from the environment and config replay") {
  fs::path dir = scratch("replay");
  std::vector<std::string> args = watermark_args(dir / "explicit", "dw");
  REQUIRE(cli(args).code == 0);

  args = watermark_args(dir / "env", "dw");
  args.resize(args.size() - 2);
  setenv("WM_SEED", "7", 1);
  Run env = cli(args);
  unsetenv("WM_SEED");
  REQUIRE(env.code == 0);
  CHECK(slurp(dir / "env" / "cert.wmcert") == slurp(dir / "explicit" / "cert.wmcert"));

  Run replay = cli({"--config", (dir / "explicit" / "config.resolved").string(), "watermark", "--out",
                    (dir / "replayed").string()});
  REQUIRE_MESSAGE(replay.code == 0, replay.err);
  CHECK(slurp(dir / "replayed" / "cert.wmcert") == slurp(dir / "explicit" / "cert.wmcert"));
  CHECK(slurp(dir / "replayed" / "placement.pl") == slurp(dir / "explicit" / "placement.pl"));
}

TEST_CASE("installed binary matches the library entry point") {
  fs::path dir = scratch("binary");
  std::string cmd = std::string(WMPLACE_CLI) + " gen --out " + (dir / "g").string() +
                    " --cells 100 --design-seed 3 > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  REQUIRE(cli({"gen", "--out", (dir / "l").string(), "--cells", "100", "--design-seed", "3"}).code == 0);
  CHECK(slurp(dir / "g" / "design.json") == slurp(dir / "l" / "design.json"));
  std::string bad = std::string(WMPLACE_CLI) + " gen > /dev/null 2>&1";
  int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == kExitUsage);
}
