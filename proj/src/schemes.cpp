#include "wmplace/schemes.hpp"

#include <algorithm>

#include "wmplace/dump.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"

namespace wmp {

const std::vector<std::string> &scheme_names() {
  static const std::vector<std::string> names{"gw",           "dw",           "icmarks", "row_parity",
                                              "cell_scattering", "buffer_insertion"};
  return names;
}

bool is_scheme(const std::string &name) {
  const auto &n = scheme_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

SchemeRun run_scheme(const Design &design, const SchemeConfig &cfg, const PipelineResult *baseline) {
  if (!is_scheme(cfg.scheme)) throw InvalidParams("unknown scheme '" + cfg.scheme + "'");
  if (cfg.signature.size() == 0) throw InvalidParams("signature must hold at least one bit");
  cfg.place.validate();
  SchemeRun run;
  run.baseline = baseline ? *baseline : run_pipeline(design, {}, cfg.place);
  run.stages.emplace_back("baseline_legalized", run.baseline.legalized);
  run.stages.emplace_back("baseline_detailed", run.baseline.detailed);

  Certificate &c = run.certificate;
  c.scheme = cfg.scheme;
  c.seed = cfg.seed;
  c.signature = cfg.signature;
  c.gw_params = cfg.gw.resolved(design);
  c.gw_params.n_bits = cfg.signature.size();
  c.dw_params = cfg.dw.resolved(design);
  c.place_params = cfg.place;
  c.fingerprint = design_fingerprint(design);
  c.baseline_hpwl = hpwl(design, run.baseline.detailed);
  run.design = design;

  const std::string &s = cfg.scheme;
  if (s == "icmarks") {
    IcmarksResult r = insert_icmarks(design, cfg.signature, cfg.gw, cfg.dw, cfg.place, cfg.seed, &run.baseline);
    run.stages.emplace_back("legalized", r.legalized);
    run.stages.emplace_back("intermediate", r.intermediate);
    run.placement = std::move(r.placement);
    c = std::move(r.certificate);
    run.constraints = c.gw->constraints();
  } else if (s == "gw") {
    GwParams gp = cfg.gw;
    gp.n_bits = cfg.signature.size();
    GwResult r = insert_gw(design, gp, cfg.place, &run.baseline);
    run.stages.emplace_back("legalized", r.watermarked.legalized);
    run.placement = std::move(r.watermarked.detailed);
    c.gw = std::move(r.watermark);
    c.gw_params = c.gw->params;
    run.constraints = c.gw->constraints();
  } else if (s == "dw") {
    DwResult r = insert_dw(design, run.baseline.legalized, cfg.signature, cfg.dw, cfg.seed, {}, cfg.place);
    run.stages.emplace_back("intermediate", r.intermediate);
    run.placement = std::move(r.placement);
    c.dw = std::move(r.watermark);
  } else if (s == "row_parity") {
    BaselineResult r = row_parity_insert(design, run.baseline.legalized, cfg.signature, cfg.seed, cfg.place);
    run.placement = std::move(r.placement);
    c.baseline = std::move(r.watermark);
  } else if (s == "cell_scattering") {
    BaselineResult r = cell_scattering_insert(design, run.baseline.detailed, cfg.signature, cfg.seed, cfg.dw);
    run.placement = std::move(r.placement);
    c.baseline = std::move(r.watermark);
  } else {
    BaselineResult r = buffer_insertion_insert(design, run.baseline.detailed, cfg.signature, cfg.seed, cfg.place);
    run.design = std::move(r.design);
    run.placement = std::move(r.placement);
    c.baseline = std::move(r.watermark);
  }
  c.watermarked_hpwl = hpwl(run.design, run.placement);
  run.stages.emplace_back("watermarked", run.placement);
  return run;
}

}  // namespace wmp
