import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from lambda_cavity.cli import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    HEADER,
    RunConfig,
    get_preset,
    main,
    parse_args,
    preset_table,
    run,
)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_parse_preset():
    rc = parse_args(["--preset", "fig1a", "--out", "a.csv"])
    assert (rc.delta1, rc.delta2, rc.p, rc.nbar) == (0.0, 0.0, None, 25.0)
    assert rc.out_path == "a.csv"


def test_parse_fig3_motion_regime():
    rc = parse_args(["--delta1", "0", "--delta2", "100", "--p", "3"])
    assert (rc.delta1, rc.delta2, rc.p) == (0.0, 100.0, 3)
    assert rc.nbar == 25.0 and rc.t_max == 50.0 and rc.samples == 2000


def test_preset_overrides_physics_flags():
    rc = parse_args(["--preset", "fig4e", "--delta1", "1", "--nbar", "3", "--tmax", "7"])
    assert (rc.delta1, rc.delta2, rc.p, rc.nbar, rc.t_max) == (5.0, 4.0, 3, 25.0, 7.0)


@pytest.mark.parametrize("argv", [
    ["--delta1", "abc"],
    ["--bogus"],
    ["--p", "0"],
    ["--samples", "1"],
    ["--tmax", "-1"],
    ["--preset", "fig9a"],
    ["--format", "json"],
])
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code == EXIT_USAGE


def test_help_lists_presets(capsys):
    with pytest.raises(SystemExit) as exc:
        parse_args(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "fig3a" in out and "100" in out and "fig2 uses delta = 10" in out


def test_preset_table():
    table = dict(preset_table())
    assert len(table) == 24
    assert (table["fig3a"].delta1, table["fig3a"].delta2, table["fig3a"].p) == (0.0, 100.0, None)
    assert table["fig1e"].p == 3 and table["fig1c"].p == 1
    assert table["fig2b"].delta1 == table["fig2b"].delta2 == 10.0
    assert all(rc.nbar == 25.0 for rc in table.values())
    with pytest.raises(KeyError):
        get_preset("fig5a")


def test_fig1a_first_row(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["--preset", "fig1a", "--samples", "50", "--out", str(out)]) == EXIT_OK
    header, rows = read_csv(out)
    assert header == HEADER
    first = rows[0]
    assert float(first[0]) == 0.0 and float(first[2]) < 1e-10 and float(first[3]) == pytest.approx(1.0)
    assert {r[6] for r in rows} == {"Resonant"}


def test_fig4_general_path(tmp_path):
    out = tmp_path / "f4.csv"
    assert main(["--preset", "fig4a", "--samples", "100", "--out", str(out)]) == EXIT_OK
    _, rows = read_csv(out)
    assert {r[6] for r in rows} == {"GeneralAnalytic"}


def test_fig1c_scaled_time_bounded(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["--preset", "fig1c", "--samples", "400", "--out", str(out)]) == EXIT_OK
    _, rows = read_csv(out)
    st = np.array([float(r[1]) for r in rows])
    assert st.min() >= 0.0 and st.max() <= 2.0
    assert st.max() > 1.99


def test_rows_are_physical(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["--delta1", "5", "--delta2", "4", "--p", "1", "--samples", "300", "--out", str(out)]) == EXIT_OK
    _, rows = read_csv(out)
    data = np.array([[float(x) for x in r[:6]] for r in rows])
    assert np.abs(data[:, 3:6].sum(axis=1) - 1).max() < 1e-9
    assert data[:, 2].min() >= 0 and data[:, 2].max() <= math.log(3)
    assert {r[6] for r in rows} == {"NumericODE"}


def test_stdout_output(capsys):
    assert main(["--preset", "fig2a", "--samples", "3"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(HEADER) and len(lines) == 4


def test_io_failure(tmp_path, capsys):
    bad = tmp_path / "missing" / "x.csv"
    assert run(RunConfig(samples=3, out_path=str(bad))) == EXIT_FAILURE
    assert "cannot write" in capsys.readouterr().err


def test_physics_failure(monkeypatch, capsys):
    import lambda_cavity.cli as cli

    def boom(*args, **kwargs):
        raise ArithmeticError("step size underflow")

    monkeypatch.setattr(cli, "entropy_series", boom)
    assert run(RunConfig(samples=3)) == EXIT_FAILURE
    assert "underflow" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run([sys.executable, "-m", "lambda_cavity", "--preset", "fig3b", "--samples", "20",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith(",".join(HEADER))
    proc = subprocess.run([sys.executable, "-m", "lambda_cavity", "--nbar", "x"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
