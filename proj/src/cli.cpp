#include "wmplace/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wmplace/attacks.hpp"
#include "wmplace/bookshelf.hpp"
#include "wmplace/dump.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"
#include "wmplace/report.hpp"
#include "wmplace/schemes.hpp"
#include "wmplace/synthetic.hpp"

namespace fs = std::filesystem;

namespace wmp {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string out;

  // design source
  std::string design;
  int cells = 2000;
  int nets = 0;  // 0: 1.1 x cells
  int macros = 0;
  int fences = 0;
  double util = 0.6;
  std::uint64_t design_seed = 1;

  // placer
  double density = 0.8;
  int dp_passes = 5;
  std::uint64_t place_seed = 1;

  // watermark
  std::string scheme = "icmarks";
  std::string signature;
  int bits = 50;
  std::uint64_t seed = 1;
  double alpha = 0.1;
  double beta = 0.1;
  double gamma = 1.0;
  Coord window = 0;
  Coord stride = 0;
  bool no_grid_fallback = false;
  Coord d_x = 1;
  Coord d_y = 0;

  // thresholds
  double pwlr_max = 1.005;
  double wer_min = 90.0;

  // attack / verify / report
  std::string placement;
  std::string cert;
  std::string attack = "sla";
  std::vector<double> fractions;
  std::vector<int> topk;
  int trials = 1;
  int workers = 1;
  std::vector<std::string> csv;
};

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("write failed: " + path.string());
}

std::string read_text(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingFile(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Design load_design_file(const std::string &path) {
  std::string ext = fs::path(path).extension().string();
  if (ext == ".aux") return parse_bookshelf(path);
  if (ext == ".json") return load_design(path);
  throw UsageError("design file must be a .aux bundle or a .json document: " + path);
}

Design design_source(const Options &o) {
  if (!o.design.empty()) return load_design_file(o.design);
  SyntheticConfig cfg;
  cfg.n_cells = o.cells;
  cfg.n_nets = o.nets > 0 ? o.nets : o.cells * 11 / 10;
  cfg.n_macros = o.macros;
  cfg.n_fences = o.fences;
  cfg.utilization = o.util;
  return generate_synthetic(cfg, o.design_seed);
}

PlaceParams place_params(const Options &o) {
  PlaceParams p;
  p.density_target = o.density;
  p.dp_passes = o.dp_passes;
  p.seed = o.place_seed;
  p.validate();
  return p;
}

GwParams gw_params(const Options &o) {
  GwParams p;
  p.alpha = o.alpha;
  p.beta = o.beta;
  p.gamma = o.gamma;
  p.window_w = p.window_h = o.window;
  p.stride = o.stride;
  p.n_bits = o.bits;
  p.grid_fallback = !o.no_grid_fallback;
  p.pwlr_max = o.pwlr_max;
  return p;
}

void add_design_source(CLI::App *sub, Options &o) {
  sub->add_option("--design", o.design, "design file (.aux bundle or .json); synthetic when absent")
      ->check(CLI::ExistingFile);
  sub->add_option("--cells", o.cells, "synthetic: movable cells")->capture_default_str();
  sub->add_option("--nets", o.nets, "synthetic: nets (0: 1.1 x cells)")->capture_default_str();
  sub->add_option("--macros", o.macros, "synthetic: fixed macros")->capture_default_str();
  sub->add_option("--fences", o.fences, "synthetic: fence regions")->capture_default_str();
  sub->add_option("--util", o.util, "synthetic: utilization")->capture_default_str();
  sub->add_option("--design-seed", o.design_seed, "synthetic: generator seed")->capture_default_str();
}

void add_place(CLI::App *sub, Options &o) {
  sub->add_option("--density", o.density, "density target")->capture_default_str();
  sub->add_option("--dp-passes", o.dp_passes, "detailed placement pass budget")->capture_default_str();
  sub->add_option("--place-seed", o.place_seed, "global placement seed")->capture_default_str();
}

void add_gw(CLI::App *sub, Options &o) {
  sub->add_option("--alpha", o.alpha, "window score weight on N_w / N_c")->capture_default_str();
  sub->add_option("--beta", o.beta, "window score weight on cell area")->capture_default_str();
  sub->add_option("--gamma", o.gamma, "window score weight on boundary overlap")->capture_default_str();
  sub->add_option("--window", o.window, "square window side (0: 10 row heights)")->capture_default_str();
  sub->add_option("--stride", o.stride, "window stride (0: window size)")->capture_default_str();
}

void add_seed(CLI::App *sub, Options &o) {
  sub->add_option("--seed", o.seed, "seed")->envname("WM_SEED")->capture_default_str();
}

DelayModel reference_delays(const Design &design, const Placement &placement) {
  return buffer_delay_model(design, placement);
}

EvalReport eval_row(const Design &design, const Placement &placement, const std::string &scheme,
                    const std::string &stage, double base_hpwl, const DelayModel &model,
                    const RegionConstraintSet &cons) {
  EvalReport e;
  e.design = design.name;
  e.scheme = scheme;
  e.stage = stage;
  e.hpwl = hpwl(design, placement);
  e.pwlr = pwlr(static_cast<double>(e.hpwl), base_hpwl);
  TimingResult t = timing_analyze(design, placement, model);
  e.tns = t.tns;
  e.wns = t.wns;
  e.legal = check_legal(design, placement, cons).legal();
  return e;
}

int cmd_gen(const Options &o, std::ostream &out) {
  Design d = design_source(o);
  fs::path dir(o.out);
  Placement p = Placement::from_design(d, Stage::Global);
  write_bookshelf(d, p, dir, "design");
  save_design(d, (dir / "design.json").string());
  write_pl(d, p, dir / "placement.pl");
  out << "design " << d.name << ": " << d.num_cells() << " cells, " << d.nets.size() << " nets -> " << dir.string()
      << "\n";
  return kExitOk;
}

int cmd_place(const Options &o, std::ostream &out) {
  Design d = design_source(o);
  PlaceParams pp = place_params(o);
  PipelineResult r = run_pipeline(d, {}, pp);
  fs::path dir(o.out);
  write_pl(d, r.detailed, dir / "placement.pl");
  save_design(d, (dir / "design.json").string());
  const double base = static_cast<double>(hpwl(d, r.detailed));
  DelayModel model = reference_delays(d, r.detailed);
  std::string csv = EvalReport::csv_header() + "\n";
  for (const auto &[stage, p] : {std::pair<const char *, const Placement *>{"global", &r.global},
                                 {"legalized", &r.legalized},
                                 {"detailed", &r.detailed}}) {
    csv += eval_row(d, *p, "none", stage, base, model, {}).csv_row() + "\n";
  }
  write_text(dir / "eval.csv", csv);
  out << "hpwl " << static_cast<Coord>(base) << " legal " << (check_legal(d, r.detailed).legal() ? 1 : 0) << "\n";
  return kExitOk;
}

int cmd_watermark(const Options &o, std::ostream &out) {
  Design d = design_source(o);
  SchemeConfig cfg;
  cfg.scheme = o.scheme;
  try {
    cfg.signature = o.signature.empty() ? Signature::random(o.bits, o.seed) : Signature::parse(o.signature);
  } catch (const InvalidParams &e) {
    throw UsageError(e.what());
  }
  cfg.gw = gw_params(o);
  cfg.dw.d_x = o.d_x;
  cfg.dw.d_y = o.d_y;
  cfg.place = place_params(o);
  cfg.seed = o.seed;
  SchemeRun run = run_scheme(d, cfg);

  fs::path dir(o.out);
  write_pl(run.design, run.placement, dir / "placement.pl");
  save_design(run.design, (dir / "design.json").string());
  save_certificate(run.certificate, (dir / "cert.wmcert").string());

  const double base = static_cast<double>(run.certificate.baseline_hpwl);
  DelayModel model = reference_delays(d, run.baseline.detailed);
  EvalReport b = eval_row(d, run.baseline.detailed, o.scheme, "baseline", base, model, {});
  b.bits = cfg.signature.size();
  EvalReport w = eval_row(run.design, run.placement, o.scheme, "watermarked", base, model, run.constraints);
  w.bits = cfg.signature.size();
  WerReport wer = verify(run.design, run.placement, run.certificate);
  w.wer = wer.wer;
  write_text(dir / "eval.csv", EvalReport::csv_header() + "\n" + b.csv_row() + "\n" + w.csv_row() + "\n");
  out << "scheme " << o.scheme << " bits " << w.bits << " pwlr " << format_real(w.pwlr) << " wer "
      << format_real(w.wer, 4) << " legal " << (w.legal ? 1 : 0) << "\n";
  return kExitOk;
}

struct Suspect {
  Design design;
  Placement placement;
  Certificate cert;
};

Suspect load_suspect(const Options &o) {
  if (o.design.empty() || o.placement.empty() || o.cert.empty()) {
    throw UsageError("--design, --placement and --cert are all required");
  }
  Suspect s;
  s.design = load_design_file(o.design);
  s.placement = read_pl(s.design, o.placement);
  s.cert = load_certificate(o.cert);
  return s;
}

int cmd_attack(const Options &o, std::ostream &out) {
  Suspect s = load_suspect(o);
  std::vector<AttackSpec> specs;
  std::vector<double> fractions = o.fractions.empty() ? std::vector<double>{0.001} : o.fractions;
  std::vector<int> topk = o.topk.empty() ? std::vector<int>{1} : o.topk;
  for (int t = 0; t < o.trials; ++t) {
    AttackSpec base;
    base.attack = o.attack;
    base.seed = o.seed + static_cast<std::uint64_t>(t);
    base.guess = gw_params(o);
    base.d_x = o.d_x;
    base.d_y = o.d_y;
    if (o.attack == "sla" || o.attack == "cpa") {
      for (double f : fractions) {
        AttackSpec a = base;
        a.fraction = f;
        specs.push_back(a);
      }
    } else if (o.attack == "ara") {
      for (int k : topk) {
        AttackSpec a = base;
        a.top_k = k;
        specs.push_back(a);
      }
    } else {
      specs.push_back(base);
    }
  }
  try {
    for (const AttackSpec &a : specs) a.validate();
  } catch (const InvalidParams &e) {
    throw UsageError(e.what());
  }
  if (o.attack == "ara" && !gw_params(o).weights_in_range()) {
    out << "note: adversary weights lie outside [0, 1]; scored without the range check\n";
  }
  std::vector<AttackOutcome> res =
      run_attack_sweep(s.design, s.placement, s.cert, specs, s.cert.place_params, o.workers);
  fs::path dir(o.out);
  std::string csv = AttackOutcome::csv_header() + "\n";
  for (AttackOutcome &r : res) {
    r.wer_min = o.wer_min;
    r.pwlr_max = o.pwlr_max;
    csv += r.csv_row() + "\n";
  }
  write_text(dir / "outcome.csv", csv);
  write_pl(s.design, res.front().placement, dir / "placement.pl");
  out << csv;
  return kExitOk;
}

int cmd_verify(const Options &o, std::ostream &out) {
  Suspect s = load_suspect(o);
  WerReport r = verify(s.design, s.placement, s.cert);
  out << "scheme " << s.cert.scheme;
  if (r.gw) out << " wer_gw " << format_real(*r.gw, 4);
  if (r.dw) out << " wer_dw " << format_real(*r.dw, 4);
  out << " wer " << format_real(r.wer, 4) << "\n";
  return r.wer >= o.wer_min ? kExitOk : kExitBelowThreshold;
}

int cmd_report(const Options &o, std::ostream &out) {
  std::vector<CsvTable> tables;
  for (const std::string &path : o.csv) {
    CsvTable t = parse_csv(read_text(path));
    if (!is_attack_csv(t) && !is_eval_csv(t)) throw UsageError("unrecognized csv layout: " + path);
    tables.push_back(std::move(t));
  }
  fs::path dir(o.out);
  ReportThresholds th{o.pwlr_max, o.wer_min};
  CsvTable attacks = attack_table(tables);
  CsvTable capacity = capacity_table(tables, th);
  CsvTable summary = capacity_summary(capacity);
  write_text(dir / "attack_table.csv", format_csv(attacks));
  write_text(dir / "capacity_table.csv", format_csv(capacity));
  write_text(dir / "capacity_summary.csv", format_csv(summary));
  if (!attacks.rows.empty()) out << format_csv(attacks);
  if (!capacity.rows.empty()) out << format_csv(capacity) << format_csv(summary);
  if (!o.cert.empty()) {
    Suspect s = load_suspect(o);
    GwParams guess = gw_params(o);
    RankReport r = region_rank(s.design, s.placement, s.cert, guess);
    std::string csv = "rank,windows,valid_windows,score,weights_in_range\n" + std::to_string(r.rank) + "," +
                      std::to_string(r.windows) + "," + std::to_string(r.valid_windows) + "," +
                      format_real(r.score) + "," + (r.weights_in_range ? "1" : "0") + "\n";
    write_text(dir / "rank.csv", csv);
    out << "watermark region rank " << r.rank << " of " << r.windows << " windows (" << r.valid_windows
        << " valid), score " << format_real(r.score) << "\n";
    if (!r.weights_in_range) out << "note: ranking weights lie outside [0, 1]; scored without the range check\n";
  }
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  Options o;
  CLI::App app{"Placement watermarking: generate, place, watermark, attack, verify, report"};
  app.name("wmplace");
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);
  app.set_config("--config", "", "replay a config.resolved file");

  auto common = [&](CLI::App *sub) {
    sub->configurable();
    sub->add_option("--out", o.out, "output directory")->required();
  };
  auto thresholds = [&](CLI::App *sub) {
    sub->add_option("--pwlr-max", o.pwlr_max, "quality threshold")->capture_default_str()->check(
        CLI::PositiveNumber);
    sub->add_option("--wer-min", o.wer_min, "extraction threshold, percent")->capture_default_str()->check(
        CLI::PositiveNumber);
  };
  auto suspect = [&](CLI::App *sub) {
    sub->add_option("--design", o.design, "design file (.aux or .json)")->check(CLI::ExistingFile);
    sub->add_option("--placement", o.placement, "placement (.pl)")->check(CLI::ExistingFile);
    sub->add_option("--cert", o.cert, "certificate (.wmcert)")->check(CLI::ExistingFile);
  };

  CLI::App *gen = app.add_subcommand("gen", "write a design bundle");
  common(gen);
  add_design_source(gen, o);

  CLI::App *place = app.add_subcommand("place", "run the unconstrained placement pipeline");
  common(place);
  add_design_source(place, o);
  add_place(place, o);

  CLI::App *wm = app.add_subcommand("watermark", "insert a watermark");
  common(wm);
  add_design_source(wm, o);
  add_place(wm, o);
  add_gw(wm, o);
  add_seed(wm, o);
  thresholds(wm);
  wm->add_option("--scheme", o.scheme, "scheme")->check(CLI::IsMember(scheme_names()))->capture_default_str();
  auto *sig = wm->add_option("--signature", o.signature, "signature: 0b..., 0x... or a bit string");
  wm->add_option("--bits", o.bits, "random signature length when --signature is absent")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->excludes(sig);
  wm->add_option("--dx", o.d_x, "x displacement")->capture_default_str();
  wm->add_option("--dy", o.d_y, "y displacement (0: one row height)")->capture_default_str();
  wm->add_flag("--no-grid-fallback", o.no_grid_fallback, "keep the given weights even above --pwlr-max");

  CLI::App *atk = app.add_subcommand("attack", "run removal attacks against a watermarked placement");
  common(atk);
  suspect(atk);
  add_gw(atk, o);
  add_seed(atk, o);
  thresholds(atk);
  atk->add_option("--attack", o.attack, "attack")
      ->check(CLI::IsMember({"sla", "cpa", "oa", "ara"}))
      ->capture_default_str();
  atk->add_option("--fraction", o.fractions, "sla/cpa fraction (repeatable)");
  atk->add_option("--topk", o.topk, "ara windows (repeatable)");
  atk->add_option("--bits", o.bits, "ara: guessed signature length")->capture_default_str();
  atk->add_option("--trials", o.trials, "seeds per setting, from --seed up")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  atk->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  atk->add_option("--dx", o.d_x, "x shift")->capture_default_str();
  atk->add_option("--dy", o.d_y, "y shift (0: one row height)")->capture_default_str();

  CLI::App *ver = app.add_subcommand("verify", "extract a watermark and check the threshold");
  common(ver);
  suspect(ver);
  ver->add_option("--wer-min", o.wer_min, "extraction threshold, percent")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  CLI::App *rep = app.add_subcommand("report", "aggregate attack and evaluation CSVs");
  common(rep);
  thresholds(rep);
  rep->add_option("--csv", o.csv, "input csv (repeatable)")->required()->check(CLI::ExistingFile);
  suspect(rep);
  add_gw(rep, o);
  rep->add_option("--bits", o.bits, "rank: guessed signature length")->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    fs::create_directories(o.out);
    for (CLI::App *sub : {gen, place, wm, atk, ver, rep}) {
      if (sub->parsed()) {
        // Unset paths and lists are left out so the file replays cleanly.
        std::istringstream lines(sub->config_to_str(true, false));
        std::string text = "[" + sub->get_name() + "]\n", line;
        while (std::getline(lines, line)) {
          if (line.size() < 3 || line.compare(line.size() - 3, 3, "=\"\"") != 0) text += line + "\n";
        }
        write_text(fs::path(o.out) / "config.resolved", text);
      }
    }
    if (gen->parsed()) return cmd_gen(o, out);
    if (place->parsed()) return cmd_place(o, out);
    if (wm->parsed()) return cmd_watermark(o, out);
    if (atk->parsed()) return cmd_attack(o, out);
    if (ver->parsed()) return cmd_verify(o, out);
    return cmd_report(o, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
}

}  // namespace wmp
