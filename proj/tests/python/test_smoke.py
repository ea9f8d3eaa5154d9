import os
import tempfile

import wmplace


def small_design(cells=300):
    cfg = wmplace.SyntheticConfig()
    cfg.n_cells = cells
    cfg.n_nets = cells * 11 // 10
    return wmplace.generate_synthetic(cfg, 3)


def test_pipeline_is_legal():
    d = small_design()
    r = wmplace.run_pipeline(d)
    assert len(r.detailed) == d.num_cells
    assert wmplace.legality_issues(d, r.detailed) == ""


def test_dw_roundtrip_through_certificate_file():
    d = small_design()
    sig = wmplace.Signature.parse("0b1011001110")
    run = wmplace.watermark(d, "dw", sig, seed=4)
    assert wmplace.verify(run.design, run.placement, run.certificate)["wer"] == 100.0
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "cert.wmcert")
        wmplace.save_certificate(run.certificate, path)
        cert = wmplace.load_certificate(path)
        assert cert.to_text() == run.certificate.to_text()


def test_strength_matches_closed_form():
    assert abs(wmplace.strength_gw(50, 50, 0.5) - 0.5 ** 50) < 1e-28


def test_cli_usage_error():
    code, _, err = wmplace.cli(["place", "--out", tempfile.gettempdir(), "--bogus"])
    assert code == 2
    assert "bogus" in err


def test_fixture_bundle_parses():
    fixtures = os.environ.get("WMPLACE_FIXTURES")
    if not fixtures:
        return
    d = wmplace.parse_bookshelf(os.path.join(fixtures, "toy", "toy.aux"))
    assert d.num_cells >= 4
