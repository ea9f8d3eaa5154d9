#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "wmplace/attacks.hpp"
#include "wmplace/bookshelf.hpp"
#include "wmplace/cli.hpp"
#include "wmplace/dump.hpp"
#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"
#include "wmplace/schemes.hpp"
#include "wmplace/strength.hpp"
#include "wmplace/synthetic.hpp"

namespace py = pybind11;
using namespace wmp;

PYBIND11_MODULE(_wmplace, m) {
  m.doc() = "placement watermarking core";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<Rect>(m, "Rect")
      .def(py::init<>())
      .def(py::init([](Coord a, Coord b, Coord c, Coord d) { return Rect{a, b, c, d}; }))
      .def_readwrite("x_lo", &Rect::x_lo)
      .def_readwrite("y_lo", &Rect::y_lo)
      .def_readwrite("x_hi", &Rect::x_hi)
      .def_readwrite("y_hi", &Rect::y_hi)
      .def("__eq__", [](const Rect &a, const Rect &b) { return a == b; })
      .def("__repr__", [](const Rect &r) {
        std::ostringstream s;
        s << "Rect(" << r.x_lo << ", " << r.y_lo << ", " << r.x_hi << ", " << r.y_hi << ")";
        return s.str();
      });

  py::class_<Design>(m, "Design")
      .def_readonly("name", &Design::name)
      .def_readonly("die", &Design::die)
      .def_readonly("row_height", &Design::row_height)
      .def_property_readonly("num_cells", &Design::num_cells)
      .def_property_readonly("num_nets", [](const Design &d) { return d.nets.size(); })
      .def_property_readonly("num_fences", [](const Design &d) { return d.fences.size(); })
      .def("find_cell", &Design::find_cell)
      .def("fingerprint", [](const Design &d) { return design_fingerprint(d); });

  py::class_<Placement>(m, "Placement")
      .def_readwrite("x", &Placement::x)
      .def_readwrite("y", &Placement::y)
      .def("__len__", &Placement::size)
      .def_static("from_design", [](const Design &d) { return Placement::from_design(d, Stage::Global); });

  py::class_<SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("n_cells", &SyntheticConfig::n_cells)
      .def_readwrite("n_nets", &SyntheticConfig::n_nets)
      .def_readwrite("n_macros", &SyntheticConfig::n_macros)
      .def_readwrite("n_fences", &SyntheticConfig::n_fences)
      .def_readwrite("utilization", &SyntheticConfig::utilization);

  m.def("generate_synthetic", &generate_synthetic, py::arg("config"), py::arg("seed"));
  m.def("parse_bookshelf", [](const std::string &aux) { return parse_bookshelf(aux); });
  m.def("load_design", &load_design);
  m.def("save_design", &save_design);
  m.def("read_pl", [](const Design &d, const std::string &p) { return read_pl(d, p); });
  m.def("write_pl", [](const Design &d, const Placement &p, const std::string &path) { write_pl(d, p, path); });

  py::class_<PlaceParams>(m, "PlaceParams")
      .def(py::init<>())
      .def_readwrite("density_target", &PlaceParams::density_target)
      .def_readwrite("dp_passes", &PlaceParams::dp_passes)
      .def_readwrite("seed", &PlaceParams::seed);

  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("global_", &PipelineResult::global)
      .def_readonly("legalized", &PipelineResult::legalized)
      .def_readonly("detailed", &PipelineResult::detailed);

  m.def("run_pipeline", [](const Design &d, const PlaceParams &p) { return run_pipeline(d, {}, p); },
        py::arg("design"), py::arg("params") = PlaceParams{});
  m.def("hpwl", &hpwl);
  m.def("pwlr", &pwlr);
  m.def("legality_issues", [](const Design &d, const Placement &p) {
    LegalityReport r = check_legal(d, p);
    return r.legal() ? std::string() : r.summary();
  });

  py::class_<Signature>(m, "Signature")
      .def_static("parse", &Signature::parse)
      .def_static("random", &Signature::random)
      .def_readonly("bits", &Signature::bits)
      .def("__len__", &Signature::size)
      .def("__str__", &Signature::to_string);

  py::class_<GwParams>(m, "GwParams")
      .def(py::init<>())
      .def_readwrite("window_w", &GwParams::window_w)
      .def_readwrite("window_h", &GwParams::window_h)
      .def_readwrite("stride", &GwParams::stride)
      .def_readwrite("alpha", &GwParams::alpha)
      .def_readwrite("beta", &GwParams::beta)
      .def_readwrite("gamma", &GwParams::gamma)
      .def_readwrite("n_bits", &GwParams::n_bits);

  py::class_<Certificate>(m, "Certificate")
      .def_readonly("scheme", &Certificate::scheme)
      .def_readonly("seed", &Certificate::seed)
      .def_readonly("signature", &Certificate::signature)
      .def_readonly("baseline_hpwl", &Certificate::baseline_hpwl)
      .def_readonly("watermarked_hpwl", &Certificate::watermarked_hpwl)
      .def_property_readonly("region",
                             [](const Certificate &c) -> std::optional<Rect> {
                               if (!c.gw) return std::nullopt;
                               return c.gw->region;
                             })
      .def("to_text", &format_certificate);
  m.def("load_certificate", &load_certificate);
  m.def("save_certificate", &save_certificate);

  py::class_<SchemeRun>(m, "SchemeRun")
      .def_readonly("design", &SchemeRun::design)
      .def_readonly("placement", &SchemeRun::placement)
      .def_readonly("certificate", &SchemeRun::certificate)
      .def_readonly("baseline", &SchemeRun::baseline);

  m.def(
      "watermark",
      [](const Design &d, const std::string &scheme, const Signature &sig, std::uint64_t seed,
         const GwParams &gw, const PlaceParams &pp) {
        SchemeConfig c;
        c.scheme = scheme;
        c.signature = sig;
        c.seed = seed;
        c.gw = gw;
        c.place = pp;
        return run_scheme(d, c);
      },
      py::arg("design"), py::arg("scheme"), py::arg("signature"), py::arg("seed") = 1,
      py::arg("gw") = GwParams{}, py::arg("place") = PlaceParams{});
  m.def("scheme_names", &scheme_names);

  m.def("verify", [](const Design &d, const Placement &p, const Certificate &c) {
    WerReport r = verify(d, p, c);
    py::dict out;
    out["wer"] = r.wer;
    out["wer_gw"] = r.gw ? py::cast(*r.gw) : py::none();
    out["wer_dw"] = r.dw ? py::cast(*r.dw) : py::none();
    return out;
  });

  m.def(
      "attack",
      [](const Design &d, const Placement &p, const Certificate &c, const std::string &attack, double fraction,
         int top_k, std::uint64_t seed) {
        AttackSpec s;
        s.attack = attack;
        s.fraction = fraction;
        s.top_k = top_k;
        s.seed = seed;
        AttackOutcome o = run_attack(d, p, c, s, c.place_params);
        py::dict out;
        out["placement"] = o.placement;
        out["pwlr"] = o.pwlr;
        out["wer"] = o.wer.wer;
        out["success"] = o.success();
        out["csv_row"] = o.csv_row();
        return out;
      },
      py::arg("design"), py::arg("placement"), py::arg("certificate"), py::arg("attack"),
      py::arg("fraction") = 0.001, py::arg("top_k") = 1, py::arg("seed") = 1);

  m.def("strength_gw", &strength_gw, py::arg("n"), py::arg("x"), py::arg("p"));
  m.def("strength_dw", &strength_dw);
  m.def("strength_combined", &strength_combined);

  m.def("cli", [](const std::vector<std::string> &args) {
    std::ostringstream out, err;
    int code = cli_main(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
