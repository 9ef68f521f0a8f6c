import json
import subprocess
import sys

import pytest

from iontide.cli import main
from iontide.scenarios import (
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_PASS,
    Check,
    ConfigError,
    RunReport,
    Table,
    build_config,
    load_config,
    read_table,
    write_table,
)
from iontide.units import UnitError, parse_quantity


@pytest.mark.parametrize(
    "text, unit, value",
    [
        ("50um", "m", 50e-6),
        ("1.2MHz", "Hz", 1.2e6),
        ("360ps", "s", 360e-12),
        ("-0.014 1/um", "1/m", -14e3),
        ("8e-6 V/m^2", "V/m^2", 8e-6),
        ("20meV", None, None),
    ],
)
def test_parse_quantity(text, unit, value):
    got = parse_quantity(text, unit)
    if value is not None:
        assert got == pytest.approx(value)


@pytest.mark.parametrize("text, unit", [("50 furlongs", "m"), ("5MHz", "s"), ("abc", None)])
def test_parse_quantity_errors(text, unit):
    with pytest.raises(UnitError):
        parse_quantity(text, unit)


def write_ini(tmp_path, body):
    path = tmp_path / "run.ini"
    path.write_text(body)
    return path


def test_config_defaults_and_overrides(tmp_path):
    cfg = load_config(write_ini(tmp_path, "[scenario]\nname = fig9\nseed = 4\n[protocol]\ntau = 2ns\n"))
    assert cfg.name == "fig9" and cfg.seed == 4
    assert cfg.quantity("protocol", "tau", "s") == pytest.approx(2e-9)
    assert cfg.quantity("protocol", "z0", "m") == pytest.approx(50e-6)
    assert cfg.sweep().samples == 200
    assert build_config("fig6").quantity("grid", "points") == 16384


@pytest.mark.parametrize(
    "body",
    [
        "[scenario]\nname = fig10\n",
        "[scenario]\nname = fig9\n[sweep]\nparameter = bogus\n",
        "[scenario]\nname = fig9\n[sweep]\nstart = inf s\n",
        "[scenario]\nname = fig9\n[sweep]\nsamples = many\n",
        "[scenario]\nname = fig6\n[grid]\npreset = huge\n",
        "not an ini file",
        "[trap]\nf_z = 1MHz\n",
    ],
)
def test_config_errors(tmp_path, body):
    with pytest.raises(ConfigError):
        load_config(write_ini(tmp_path, body))


def test_config_name_mismatch(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write_ini(tmp_path, "[scenario]\nname = fig9\n"), "fig6")


def test_cli_config_error_exit_code(tmp_path, capsys):
    path = write_ini(tmp_path, "[scenario]\nname = micromotion\n[trap]\nC0 = 100 parsecs\n")
    assert main(["run", "micromotion", "--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err
    assert main(["run", "fig9", "--config", str(tmp_path / "missing.ini")]) == EXIT_CONFIG


def test_cli_list(capsys):
    assert main(["list"]) == EXIT_PASS
    out = capsys.readouterr().out
    for name in ("fig6", "fig7", "fig9", "squeeze", "kick", "micromotion"):
        assert name in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "iontide", "list"], capture_output=True, text=True, check=True)
    assert "micromotion" in res.stdout


def _strip_timestamp(path):
    return [line for line in path.read_text().splitlines() if not line.startswith("# timestamp:")]


@pytest.mark.parametrize("scenario, code", [("micromotion", EXIT_PASS), ("fig9", EXIT_PASS), ("squeeze", EXIT_FAIL)])
def test_cli_run_is_reproducible(tmp_path, scenario, code):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", scenario, "--out", str(a), "--seed", "1"]) == code
    assert main(["run", scenario, "--out", str(b), "--seed", "1"]) == code
    csvs = sorted(p.name for p in a.glob("*.csv"))
    assert csvs
    for name in csvs:
        assert _strip_timestamp(a / name) == _strip_timestamp(b / name)
    report = json.loads((a / "report.json").read_text())
    assert report["scenario"] == scenario
    assert {c["status"] for c in report["checks"]} <= {"PASS", "FAIL", "SKIP"}


def test_csv_metadata_and_units(tmp_path):
    main(["run", "micromotion", "--out", str(tmp_path)])
    table, meta = read_table(tmp_path / "micromotion.csv")
    assert meta["scenario"] == "micromotion"
    assert meta["trap.C0"] == "100um"
    assert "timestamp" in meta
    assert len(table.columns) == len(table.units)
    assert all(isinstance(v, float) for v in table.rows[0])


def test_table_round_trip(tmp_path):
    t = Table(("x", "y"), ("m", "1"))
    t.append(1.5e-6, 0.25)
    t.append(2.0, 1 / 3)
    write_table(tmp_path / "t.csv", t, {"k": "v"}, timestamp=False)
    back, meta = read_table(tmp_path / "t.csv")
    assert back.rows == t.rows and meta == {"k": "v"}
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "# k: v"


def test_report_exit_codes():
    rep = RunReport("x")
    rep.add(Check("a", "1", "1", "0", True))
    rep.add(Check("b", "1", "-", "0", None))
    assert rep.exit_code == EXIT_PASS
    rep.add(Check("c", "1", "2", "0", False))
    assert rep.exit_code == EXIT_FAIL
    with pytest.raises(ValueError):
        rep.add(Check("a", "1", "1", "0", True))
    assert json.loads(rep.to_json())["checks"][2]["status"] == "FAIL"
