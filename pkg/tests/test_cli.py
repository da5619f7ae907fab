from __future__ import annotations

import csv
import io
import json
from math import pi

import pytest

from qdsindex.cli import RunConfig, UsageError, main, parse_tuple, resolve_config, _parser
from qdsindex.errors import ConfigError
from qdsindex.models import circle_model
from qdsindex.qds import suspend_triple


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ini_round_trip():
    cfg = RunConfig(model="sphere", lmax=30, M=25, fit_points=40, eps_tail=1e-9, tolerances={"residues": 1e-7}, format="csv")
    back = RunConfig.from_ini(cfg.to_ini())
    assert back == cfg


def test_bad_ini_value():
    with pytest.raises(ConfigError):
        RunConfig.from_ini("[model]\nsuspension_size = many\n")
    with pytest.raises(ConfigError):
        RunConfig.from_ini("not an ini file")


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(RunConfig(model="sphere", M=30, lmax=20).to_ini())
    args = _parser().parse_args(["residues", "--config", str(path), "--suspension-size", "12"])
    cfg = resolve_config(args)
    assert (cfg.model, cfg.lmax, cfg.M) == ("sphere", 20, 12)


def test_config_from_environment(tmp_path):
    path = tmp_path / "env.ini"
    path.write_text("[model]\nname = circle\nlambda = 60\n")
    args = _parser().parse_args(["residues"])
    cfg = resolve_config(args, environ={"QDSINDEX_CONFIG": str(path)})
    assert cfg.model == "circle" and cfg.Lambda == 60


def test_missing_config_file(capsys, tmp_path):
    code, _, err = _run(capsys, "residues", "--config", str(tmp_path / "absent.ini"))
    assert code == 2 and "cannot read config file" in err


def test_exit_two_on_small_suspension(capsys):
    code, out, err = _run(capsys, "residues", "--suspension-size", "1")
    assert code == 2 and out == "" and "at least 2" in err


def test_exit_two_on_malformed_tuple(capsys):
    code, _, err = _run(capsys, "cocycle", "--model", "circle", "--lambda", "40", "z|q; z|p")
    assert code == 2 and "error" in err
    code, _, _ = _run(capsys, "cocycle", "--model", "circle", "--lambda", "40", "z|p")
    assert code == 2


def test_tolerance_flag_syntax(capsys):
    code, _, _ = _run(capsys, "residues", "--tolerance", "residues")
    assert code == 2


def test_torus_residues_report(capsys):
    code, out, _ = _run(capsys, "residues", "--model", "torus")
    report = json.loads(out)
    assert code == 0
    assert report["schema"] == 1 and report["command"] == "residues"
    assert report["summary"]["failed"] == 0
    recs = {r["name"]: r for r in report["records"]}
    assert recs["residues.torus.1.m2"]["computed"]["re"] == pytest.approx(2 * pi, rel=1e-6)
    assert recs["residues.torus.gamma.m2"]["computed"]["re"] == pytest.approx(0, abs=1e-8)
    names = [r["name"] for r in report["records"]]
    assert names == sorted(names)


def test_csv_output_to_file(capsys, tmp_path):
    path = tmp_path / "out.csv"
    code, out, _ = _run(capsys, "residues", "--model", "circle", "--lambda", "100", "--format", "csv", "--output", str(path))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    row = next(r for r in rows if r["name"] == "residues.circle.1.m1")
    assert float(row["computed_re"]) == pytest.approx(1.0, rel=1e-8)
    assert row["pass"] == "1"


def test_reports_are_deterministic(capsys):
    def strip(text):
        rep = json.loads(text)
        for r in rep["records"]:
            r.pop("runtime_ms")
        return rep

    argv = ("residues", "--model", "circle", "--lambda", "80")
    a = strip(_run(capsys, *argv)[1])
    b = strip(_run(capsys, *argv)[1])
    assert a == b


def test_tuple_grammar():
    T = suspend_triple(circle_model(40), 12)
    elems = parse_tuple("z|p; S^2; z^-1|e1,0; 1|S^-1", T)
    assert [e.kind for e in elems] == ["AK", "SHIFT", "AK", "SHIFT"]
    assert elems[1].shift == 2
    with pytest.raises(UsageError):
        parse_tuple("z|e1", T)
    with pytest.raises(UsageError):
        parse_tuple("", T)


def test_cocycle_shift_pair_on_circle(capsys):
    code, out, _ = _run(capsys, "cocycle", "--model", "circle", "--lambda", "100", "S^-1; S^1")
    rec = json.loads(out)["records"][0]
    assert code == 0 and rec["provenance"] == "computed"
    # sqrt(pi) sqrt(2i) times the residue -1/2 of the shift pair
    assert complex(rec["computed"]["re"], rec["computed"]["im"]) == pytest.approx(-0.5 * pi**0.5 * (1 + 1j))


def test_cocycle_parity_mismatch(capsys):
    code, _, err = _run(capsys, "cocycle", "--model", "torus", "U|p; V|p")
    assert code == 2 and "odd count" in err
