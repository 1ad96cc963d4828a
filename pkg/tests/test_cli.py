import json
import math

import pytest
from hypothesis import given, strategies as st

from btspec.cli import bundled_config, main, parse_config_text
from btspec.cli.commands import auto_periods
from btspec.cli.config import ConfigError
from btspec.cli.io import fmt, read_csv_body
from btspec.spectra.airy import RE_TARGET


# ---- config parsing -----------------------------------------------------------------

def test_defaults_and_units_resolved():
    cfg = parse_config_text("g = 10\nhole = none")
    res = cfg.resolved()
    assert res["g"] == 10.0 and res["N"] == 64 and res["Nt"] == 256
    assert cfg.problem().shape.kind == "none"


@pytest.mark.parametrize("text, msg", [
    ("g = 10\nfoo = 1", "unknown key"),
    ("g = 10\ng = 11", "duplicate"),
    ("g = -1", "positive"),
    ("g = 0", "positive"),
    ("g = 10\nN = 3.5", "N"),
    ("g = 10\nhole = square", "hole kind"),
    ("g = 10\nradius = 0.7", "semi-axis"),
    ("g = 10\ng_values = 3, 2", "ascending"),
    ("g = 10\ng_values = 2, 3\nN_values = 8", "one entry per g"),
    ("g = nan", "finite"),
    ("just words", "key = value"),
])
def test_bad_configs_are_rejected(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config_text(text)


def test_missing_g_is_rejected_when_a_problem_is_built():
    with pytest.raises(ConfigError, match="g is required"):
        parse_config_text("hole = none").problem()


def test_q_range_excludes_stop():
    cfg = parse_config_text("g = 1\nq_range = 0, 1, 4")
    assert cfg.q_list() == [0.0, 0.25, 0.5, 0.75]
    assert parse_config_text("g = 1\nq = 0.3").q_list() == [0.3]


def test_bundled_configs_parse():
    for name in ("no_hole", "disk", "sweep", "asymptotics"):
        parse_config_text(bundled_config(name), name)
    with pytest.raises(ConfigError):
        bundled_config("nope")


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips_floats(x):
    assert float(fmt(x)) == x


def test_auto_periods_meets_the_decay_target():
    for g in (250.0, 500.0, 1000.0, 2000.0):
        s = auto_periods(g)
        mu = math.exp(-(2 * math.pi / g) * RE_TARGET * g ** (2 / 3))
        assert mu ** s <= 0.1 < mu ** (s - 1) or s == 1
    assert [auto_periods(g) for g in (250.0, 500.0, 1000.0, 2000.0)] == [2, 3, 4, 4]


# ---- command line -------------------------------------------------------------------

def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


SMALL_DISK = """g = 20
hole = disk
radius = 0.25
N = 12
Nt = 64
arnoldi_m = 12
nev = 3
solver_tol = 1e-12
strip_L = 2
"""


def test_validate_bundled_config_passes(tmp_path, capsys):
    assert main(["validate", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 6
    header, rows = read_csv_body(tmp_path / "validation.csv")
    assert header == ["check", "passed", "detail"] and all(r[1] == "1" for r in rows)


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["spectrum", "--config", write_cfg(tmp_path, "g = -2")]) == 2
    assert main(["spectrum", "--config", write_cfg(tmp_path, "g = 2\nwat = 1")]) == 2
    assert main(["spectrum", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["spectrum"]) == 2
    assert main(["validate", "--set", "g=0", "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_set_overrides_a_key(tmp_path):
    out = tmp_path / "o"
    assert main(["spectrum", "--config", "no_hole", "--set", "N=2", "--out", str(out)]) == 0
    doc = json.loads((out / "summary.json").read_text())
    assert doc["config"]["N"] == 2 and doc["config"]["g"] == 150.0


def test_spectrum_csv_is_byte_identical_across_runs(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_DISK)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["spectrum", "--config", cfg, "--out", str(a)]) == 0
    assert main(["spectrum", "--config", cfg, "--out", str(b)]) == 0
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()
    text = (a / "spectrum.csv").read_text()
    assert "# config g = 20" in text and "# note:" in text
    doc = json.loads((a / "summary.json").read_text())
    assert doc["detected"] and doc["caveat"] and doc["config"]["radius"] == 0.25
    assert "wall_time_s" in doc["metadata"]


def test_sweep_is_periodic_in_q(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_DISK + f"q_values = 0, {2 * math.pi!r}\n")
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, rows = read_csv_body(tmp_path / "spectrum.csv")
    iq, ire, iim = header.index("q"), header.index("re_lambda"), header.index("im_lambda")
    first = [complex(float(r[ire]), float(r[iim])) for r in rows if float(r[iq]) == 0.0]
    second = [complex(float(r[ire]), float(r[iim])) for r in rows if float(r[iq]) != 0.0]
    assert len(first) == len(second) > 0
    for u, v in zip(first, second):
        assert abs(u - v) <= 1e-8 * abs(u)


def test_strip_reconstruct_and_crosscheck(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_DISK + "arnoldi_tol = 1e-9\n")
    assert main(["strip", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    assert main(["crosscheck", "--config", cfg, "--out", str(tmp_path / "c")]) == 0
    doc = json.loads((tmp_path / "c" / "summary.json").read_text())
    assert doc["passed"] and doc["relative_mismatch"] <= 0.05
    assert main(["reconstruct", "--config", cfg, "--out", str(tmp_path / "r")]) == 0
    header, rows = read_csv_body(tmp_path / "r" / "eigenfunction.csv")
    assert header == ["x", "y", "re_u", "im_u"] and len(rows) > 0
    assert json.loads((tmp_path / "r" / "summary.json").read_text())["residual"] <= 5e-2


def test_reconstruct_requires_p0_zero(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_DISK + "p0 = 0.1\n")
    assert main(["reconstruct", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_pseudospectra_with_plots(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_DISK + "ps_n_im = 2\nps_tol = 1e-4\n")
    assert main(["pseudospectra", "--config", cfg, "--out", str(tmp_path), "--plots"]) == 0
    header, rows = read_csv_body(tmp_path / "pseudospectra.csv")
    assert len(rows) == 2 and all(r[3] == "1" for r in rows)
    svg = (tmp_path / "pseudospectra.svg").read_text()
    assert "btspec" in svg and "radius" in svg


def test_asymptotics_on_a_small_ladder(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_DISK + "g_values = 20, 40, 80\nN_values = 12, 12, 12\n")
    assert main(["asymptotics", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, rows = read_csv_body(tmp_path / "asymptotics.csv")
    assert [float(r[0]) for r in rows] == [20.0, 40.0, 80.0]
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["anchor_x"] == -0.25 and doc["fit"] is not None
