import json
import math

import numpy as np
import pytest

from ergomap.cli import main


def run(*argv):
    return main(list(argv))


@pytest.fixture
def mtri_bundle(tmp_path):
    out = tmp_path / "mtri.json"
    assert run("build-map", "--density", "triangular", "--uniform", "triangle:1",
               "--out", str(out)) == 0
    return out


# -- build-map -----------------------------------------------------------------

def test_build_map_writes_bundle_and_transform(tmp_path, mtri_bundle):
    doc = json.loads(mtri_bundle.read_text())
    assert doc["format"] == "ergomap-map"
    assert (mtri_bundle.parent / doc["transform_file"]).exists()


def test_build_map_2d_with_order(tmp_path):
    out = tmp_path / "cb.json"
    assert run("build-map", "--density", "checkerboard:2:0.4:1.6",
               "--uniform", "baker", "--order", "2,1", "--out", str(out)) == 0
    assert json.loads(out.read_text())["ordering"] == [2, 1]


def test_build_map_from_pgm(tmp_path, coin_pgm):
    out = tmp_path / "coin.json"
    assert run("build-map", "--density", str(coin_pgm),
               "--uniform", "product(translation:0.6, translation:0.2)",
               "--out", str(out)) == 0


def test_build_map_dimension_mismatch(tmp_path):
    assert run("build-map", "--density", "ramp", "--uniform", "baker",
               "--out", str(tmp_path / "x.json")) == 1


def test_build_map_bad_spec(tmp_path):
    assert run("build-map", "--density", "wiggle", "--uniform", "baker",
               "--out", str(tmp_path / "x.json")) == 1


def test_usage_error_exit_code():
    assert run("no-such-command") == 2
    assert run("orbit", "--unknown-flag") == 2


# -- orbit / hist -----------------------------------------------------------------

def test_orbit_and_hist_pipeline(tmp_path, mtri_bundle):
    orbit_csv = tmp_path / "orbit.csv"
    assert run("orbit", "--map", str(mtri_bundle), "--x0", "0.3", "--n", "20000",
               "--out", str(orbit_csv)) == 0
    lines = orbit_csv.read_text().strip().split("\n")
    assert lines[0] == "step,x1"
    assert len(lines) == 20001

    hist_csv = tmp_path / "hist.csv"
    assert run("hist", "--orbit", str(orbit_csv), "--bins", "50",
               "--out", str(hist_csv)) == 0
    rows = hist_csv.read_text().strip().split("\n")
    assert rows[0] == "bin_left,bin_right,density"
    assert len(rows) == 51


def test_orbit_thin_and_burnin(tmp_path, mtri_bundle):
    out = tmp_path / "o.csv"
    assert run("orbit", "--map", str(mtri_bundle), "--n", "1000", "--burnin", "100",
               "--thin", "10", "--out", str(out)) == 0
    assert len(out.read_text().strip().split("\n")) == 101


def test_orbit_2d_and_hist_pgm(tmp_path):
    bundle = tmp_path / "cb.json"
    run("build-map", "--density", "checkerboard", "--uniform",
        "product(asym:0.3, asym:0.9)", "--out", str(bundle))
    orbit_csv = tmp_path / "orbit2.csv"
    assert run("orbit", "--map", str(bundle), "--x0", "0.3,0.3", "--n", "5000",
               "--out", str(orbit_csv)) == 0
    assert orbit_csv.read_text().startswith("step,x1,x2")
    hist_csv = tmp_path / "h.csv"
    hist_pgm = tmp_path / "h.pgm"
    assert run("hist", "--orbit", str(orbit_csv), "--bins", "4,4",
               "--out", str(hist_csv), "--pgm", str(hist_pgm)) == 0
    assert hist_pgm.read_bytes().startswith(b"P5")


def test_orbit_missing_bundle(tmp_path):
    assert run("orbit", "--map", str(tmp_path / "none.json"),
               "--out", str(tmp_path / "o.csv")) == 1


# -- lyapunov ----------------------------------------------------------------------

def test_lyapunov_theoretical_output(capsys, mtri_bundle):
    assert run("lyapunov", "--map", str(mtri_bundle), "--mode", "theoretical") == 0
    out = capsys.readouterr().out.strip().split("\n")[-1]
    assert out == f"h={math.log(2.0):.6f} mode=theoretical n=16384"


def test_lyapunov_empirical_output(capsys, mtri_bundle):
    assert run("lyapunov", "--map", str(mtri_bundle), "--mode", "empirical",
               "--n", "50000") == 0
    out = capsys.readouterr().out.strip().split("\n")[-1]
    value = float(out.split()[0].split("=")[1])
    assert value == pytest.approx(math.log(2.0), abs=5e-3)


# -- verify -------------------------------------------------------------------------

@pytest.mark.parametrize("check", ["fp-residual", "roundtrip", "uniformity", "commute"])
def test_verify_checks_pass(check, mtri_bundle):
    assert run("verify", "--map", str(mtri_bundle), "--check", check,
               "--points", "200") == 0


def test_verify_2d_roundtrip_and_commute(tmp_path):
    bundle = tmp_path / "cb.json"
    run("build-map", "--density", "checkerboard", "--uniform", "baker",
        "--out", str(bundle))
    assert run("verify", "--map", str(bundle), "--check", "roundtrip") == 0
    assert run("verify", "--map", str(bundle), "--check", "commute",
               "--points", "300") == 0


# -- transport ------------------------------------------------------------------------

def test_transport_pushes_csv(tmp_path):
    samples = tmp_path / "in.csv"
    rng = np.random.default_rng(5)
    xs = np.sqrt(rng.uniform(0, 1, 2000))  # ramp-distributed
    samples.write_text("x1\n" + "\n".join(f"{v:.17g}" for v in xs) + "\n")
    out = tmp_path / "out.csv"
    assert run("transport", "--from", "ramp", "--to", "triangular",
               "--uniform", "identity", "--in", str(samples), "--out", str(out)) == 0
    pushed = np.array([float(v) for v in out.read_text().strip().split("\n")[1:]])
    # triangular CDF of pushed values should be uniform-ish
    from ergomap import build_transform, ks_uniformity, triangular

    stats = ks_uniformity(build_transform(triangular()).forward(pushed))
    assert stats[0] < 0.05


# -- config file ------------------------------------------------------------------------

def test_config_file_supplies_defaults(tmp_path, mtri_bundle):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 500, "thin": 5}))
    out = tmp_path / "o.csv"
    assert run("orbit", "--map", str(mtri_bundle), "--out", str(out),
               "--config", str(cfg)) == 0
    assert len(out.read_text().strip().split("\n")) == 101  # header + 500/5


def test_flags_override_config(tmp_path, mtri_bundle):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 500}))
    out = tmp_path / "o.csv"
    assert run("orbit", "--map", str(mtri_bundle), "--n", "100", "--out", str(out),
               "--config", str(cfg)) == 0
    assert len(out.read_text().strip().split("\n")) == 101


def test_malformed_config_is_parse_error(tmp_path, mtri_bundle):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert run("orbit", "--map", str(mtri_bundle), "--out",
               str(tmp_path / "o.csv"), "--config", str(cfg)) == 1


# -- reproduce ----------------------------------------------------------------------------

def test_reproduce_table1_and_determinism(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    assert run("reproduce", "--figure", "table1", "--out-dir", str(d1)) == 0
    assert run("reproduce", "--figure", "table1", "--out-dir", str(d2)) == 0
    b1 = (d1 / "table1.csv").read_bytes()
    assert b1 == (d2 / "table1.csv").read_bytes()
    rows = b1.decode().strip().split("\n")
    assert rows[0] == "l,h_empirical,h_theoretical"
    assert len(rows) == 6
    # the two symbolic rows carry only the closed form
    assert rows[4].split(",")[1] == ""
    l4 = rows[3].split(",")
    assert float(l4[1]) == pytest.approx(math.log(8.0), abs=5e-3)


def test_reproduce_mtri_artifacts(tmp_path):
    d = tmp_path / "fig"
    assert run("reproduce", "--figure", "mtri", "--out-dir", str(d)) == 0
    summary = (d / "mtri_summary.txt").read_text()
    fields = dict(
        line.split("=", 1) for line in summary.strip().split("\n") if "=" in line
    )
    assert float(fields["h_empirical"]) == pytest.approx(math.log(2.0), abs=1e-3)
    assert float(fields["tv"]) < 0.01
    assert (d / "mtri_hist.csv").exists()
    assert (d / "mtri_map.json").exists()
