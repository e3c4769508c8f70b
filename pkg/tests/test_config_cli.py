import csv
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from splitdg.cases import Case
from splitdg.cli import main, run_sweep
from splitdg.config import ConfigError, build_config, format_config, load_config, parse_text
from splitdg.fluxes import Flux, SurfaceDissipation

KG_RUN = """\
# 2-D density wave, early KG blow-up
case = density_wave_2d
flux = kg
degree = 3
cells = 4x4
t_final = 1.0
diagnostic_interval = 0.05
"""

SHORT_RUN = """\
case = density_wave_1d
flux = mkep
degree = 2
cells = 4
t_final = 0.02   # trailing comment
diagnostic_interval = 0.01
"""


@pytest.fixture
def write(tmp_path):
    def _write(text, name="run.cfg"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


def test_parse_full_config(write):
    cfg = load_config(write(KG_RUN + "surface_dissipation = lax_friedrichs\ncfl = 0.1\ngamma = 1.3\nseed = 7\n"))
    s = cfg.solver
    assert s.case.case == Case.DENSITY_WAVE_2D
    assert s.scheme.flux == Flux.KG and s.scheme.surface_dissipation == SurfaceDissipation.LAX_FRIEDRICHS
    assert s.cells == (4, 4) and s.degree == 3 and s.cfl == 0.1 and s.gamma == 1.3
    assert cfg.seed == 7 and cfg.output_path is None


def test_scalar_cells_broadcast(write):
    cfg = load_config(write(KG_RUN.replace("cells = 4x4", "cells = 6")))
    assert cfg.solver.cells == (6, 6)


@pytest.mark.parametrize(
    "text, fragment",
    [
        (KG_RUN.replace("flux = kg", "flux = roe"), "line 3"),
        (KG_RUN.replace("degree = 3", "degree = three"), "line 4"),
        (KG_RUN + "colour = blue\n", "line 8"),
        (KG_RUN + "flux = mkep\n", "duplicate"),
        (KG_RUN + "just words\n", "line 8"),
        (KG_RUN.replace("t_final = 1.0\n", ""), "t_final"),
        (KG_RUN.replace("cells = 4x4", "cells = 4,4,4"), "line 5"),
        (KG_RUN + "domain = 0\n", "line 8"),
        (KG_RUN + "cfl = -1\n", "cfl"),
    ],
)
def test_config_errors(write, text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        load_config(write(text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


@given(
    flux=st.sampled_from([f.label for f in Flux]),
    degree=st.integers(1, 8),
    cells=st.integers(1, 16),
    t_final=st.floats(0, 100),
    cfl=st.floats(0.01, 1.0),
)
def test_config_round_trip(flux, degree, cells, t_final, cfl):
    entries = {"case": "density_wave_2d", "flux": flux, "degree": str(degree), "cells": str(cells),
               "t_final": repr(t_final), "cfl": repr(cfl)}
    parsed, _ = parse_text(format_config(entries))
    assert parsed == entries
    cfg = build_config(parsed)
    assert cfg.solver.t_final == t_final and cfg.solver.cfl == cfl and cfg.solver.degree == degree
    assert cfg.replace(degree=degree + 1).solver.degree == degree + 1


def read_csv(path):
    lines = path.read_text().splitlines()
    body = [l for l in lines if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body)))), [l for l in lines if l.startswith("#")]


def test_run_blowup_exit_code(write, tmp_path, capsys):
    out = tmp_path / "kg.csv"
    assert main(["run", str(write(KG_RUN)), "--output", str(out)]) == 2
    assert "blowup t=" in capsys.readouterr().out
    rows, summary = read_csv(out)
    assert list(rows[0]) == ["t", "ke", "en", "total_mass", "min_rho", "min_p"]
    assert float(rows[0]["ke"]) == 0.0 and float(rows[0]["en"]) == 0.0
    t_blow = float(summary[0].split("=")[1].split()[0])
    assert 0.09 <= t_blow <= 0.17
    assert float(rows[-1]["t"]) == t_blow


def test_run_completes_and_is_deterministic(write, tmp_path):
    cfg = write(SHORT_RUN + f"output_path = {tmp_path / 'a.csv'}\n")
    assert main(["run", str(cfg)]) == 0
    assert main(["run", str(cfg), "--output", str(tmp_path / "b.csv")]) == 0
    a = (tmp_path / "a.csv").read_text()
    assert a == (tmp_path / "b.csv").read_text()
    rows, summary = read_csv(tmp_path / "a.csv")
    assert summary == ["# blowup_time=none"]
    assert [float(r["t"]) for r in rows] == pytest.approx([0.0, 0.01, 0.02])
    # values are written with 17 significant digits
    assert all("%.17g" % float(v) == v for r in rows for v in r.values())


def test_run_config_error_exit_code(write, capsys):
    assert main(["run", str(write(KG_RUN.replace("flux = kg", "flux = roe")))]) == 1
    assert "line 3" in capsys.readouterr().err


def test_sweep_table(write, tmp_path, capsys):
    cfg = write(KG_RUN.replace("t_final = 1.0", "t_final = 0.2"))
    out = tmp_path / "sweep.csv"
    assert main(["sweep", str(cfg), "--axis", "degree", "--values", "2,3", "--fluxes", "kg,mkep",
                 "--output", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["degree", "kg", "mkep"]
    assert [r[0] for r in rows[1:]] == ["2", "3"]
    assert rows[2][2] == "none"
    assert 0.09 <= float(rows[2][1]) <= 0.17


def test_sweep_records_failed_cells(write):
    cfg = load_config(write(KG_RUN.replace("t_final = 1.0", "t_final = 0.01")))
    table = run_sweep(cfg, "degree", ["0", "2"], [Flux.MKEP])
    assert table[0] == ("0", ["error"])
    assert table[1] == ("2", [None])


def test_sweep_parallel_matches_serial(write, monkeypatch):
    cfg = load_config(write(KG_RUN.replace("t_final = 1.0", "t_final = 0.2")))
    serial = run_sweep(cfg, "flux", ["kg", "mkep"], [])
    monkeypatch.setenv("SPLITDG_WORKERS", "2")
    assert run_sweep(cfg, "flux", ["kg", "mkep"], []) == serial


@pytest.mark.parametrize("argv", [["sweep", "CFG", "--axis", "degree", "--values", ""],
                                  ["sweep", "CFG", "--axis", "gamma", "--values", "1"],
                                  ["sweep", "CFG", "--axis", "flux", "--values", "roe"]])
def test_sweep_bad_arguments(write, argv):
    path = str(write(KG_RUN))
    assert main([a.replace("CFG", path) for a in argv]) == 1


def _csv_out(capsys):
    return dict(csv.reader(io.StringIO(capsys.readouterr().out)))


@pytest.mark.parametrize("scheme", ["mkep", "keep_pe"])
def test_analyze_linear_conserving(scheme, capsys):
    assert main(["analyze-linear", "--scheme", scheme, "--elements", "4", "--degree", "3"]) == 0
    out = _csv_out(capsys)
    assert abs(float(out["energy_rate"])) <= 1e-11
    assert out["identities_pass"] == "True"


def test_analyze_linear_central_reports(capsys):
    assert main(["analyze-linear", "--scheme", "central"]) == 0
    assert abs(float(_csv_out(capsys)["energy_rate"])) > 1e-6


def test_analyze_linear_kg(capsys):
    assert main(["analyze-linear", "--scheme", "kg"]) == 0
    assert float(_csv_out(capsys)["spectral_abscissa"]) > 0.0
    assert main(["analyze-linear", "--scheme", "kg", "--fd", "--cells", "12"]) == 0
    out = _csv_out(capsys)
    assert out["closed_form_agrees"] == "True"


@pytest.mark.parametrize("scheme", ["central", "ducros", "mkep"])
def test_analyze_linear_fd(scheme, capsys):
    assert main(["analyze-linear", "--scheme", scheme, "--fd", "--cells", "16"]) == 0
    out = _csv_out(capsys)
    assert float(out["energy_rate_computed"]) == pytest.approx(float(out["energy_rate_closed_form"]), abs=1e-12)


@pytest.mark.parametrize("argv", [["analyze-linear", "--scheme", "roe"],
                                  ["analyze-linear", "--scheme", "kg", "--fd", "--velocity", "0.5"],
                                  ["analyze-linear", "--scheme", "mkep", "--degree", "0"],
                                  ["analyze-linear", "--elements", "x"],
                                  ["check-sbp"],
                                  ["frobnicate"]])
def test_bad_flags_exit_one(argv):
    assert main(argv) == 1


def test_check_sbp(capsys):
    assert main(["check-sbp", "--degree", "6"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows[0]["degree"] == "6"
    assert float(rows[0]["sbp_residual"]) <= 1e-12
    assert main(["check-sbp", "--degree", "8", "--all"]) == 0
    assert len(list(csv.DictReader(io.StringIO(capsys.readouterr().out)))) == 8
    assert main(["check-sbp", "--degree", "0"]) == 1
