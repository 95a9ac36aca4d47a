import filecmp
import json
import subprocess
import sys

import pytest

from eqcsm.cli import EXIT_FAIL, EXIT_HEAVY, EXIT_INPUT, EXIT_MATH, EXIT_OK, RunConfig, main
from eqcsm.polyarith import MultiPoly, parse_poly


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def test_integrate_examples(capsys):
    assert run(capsys, "integrate", "--grass", "1,4", "--power", "2")[:2] == (EXIT_OK, "0")
    assert run(capsys, "integrate", "--grass", "3,7", "--volume")[:2] == (EXIT_OK, "462")
    code, out, _ = run(capsys, "integrate", "--grass", "1,3", "--power", "4")
    assert code == EXIT_OK
    assert parse_poly(out, 3) == parse_poly("t1^2 + t2^2 + t3^2 + t1*t2 + t1*t3 + t2*t3", 3)


def test_integrate_template_and_json(capsys):
    code, out, _ = run(capsys, "integrate", "--grass", "2,4", "--template", "x1^2*x2^2", "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert MultiPoly.from_json(data) == MultiPoly.const(4, 1)


def test_integrate_table_file(capsys, tmp_path):
    from eqcsm.grassloc import c1_power_template, instantiate
    path = tmp_path / "table.json"
    path.write_text(json.dumps(instantiate(c1_power_template(2, 4), 2, 4).to_json()))
    assert run(capsys, "integrate", "--grass", "2,4", "--table", str(path))[:2] == (EXIT_OK, "2")
    assert run(capsys, "integrate", "--grass", "2,5", "--table", str(path))[0] == EXIT_INPUT


def test_integrate_non_polynomial_is_math_error(capsys, tmp_path):
    table = {"grass": [1, 2], "classes": [
        {"point": [1], "poly": {"nvars": 2, "terms": [{"exp": [0, 0], "coef": "1"}]}},
        {"point": [2], "poly": {"nvars": 2, "terms": []}}]}
    path = tmp_path / "t.json"
    path.write_text(json.dumps(table))
    code, _, err = run(capsys, "integrate", "--grass", "1,2", "--table", str(path))
    assert code == EXIT_MATH and "inconsistent" in err


def test_input_errors(capsys):
    assert run(capsys, "integrate", "--grass", "2")[0] == EXIT_INPUT
    assert run(capsys, "integrate", "--grass", "2,4", "--template", "x1^2")[0] == EXIT_INPUT
    assert run(capsys, "nosuchcommand")[0] == EXIT_INPUT
    assert run(capsys, "integrate", "--grass", "2,4")[0] == EXIT_INPUT


def test_residue_schur_expand(capsys):
    assert run(capsys, "residue", "--grass", "2,4", "--power", "4")[:2] == (EXIT_OK, "2")
    code, out, _ = run(capsys, "schur", "--partition", "21", "--vars", "1,2")
    assert parse_poly(out, 2) == parse_poly("t1^2*t2 + t1*t2^2", 2)
    code, out, _ = run(capsys, "expand", "--poly", "t3 + t4 - t1 - t2", "--nvars", "4",
                       "--vars", "1,2", "--vars2", "3,4", "--negate")
    assert code == EXIT_OK and len(out.splitlines()) == 2
    assert run(capsys, "expand", "--poly", "t1", "--nvars", "2", "--vars", "1,2")[0] == EXIT_INPUT


def test_gysin(capsys):
    code, out, _ = run(capsys, "gysin", "--grass", "2,4", "--J", "32", "--K", "0")
    assert code == EXIT_OK and out == "1 * S_1"
    assert run(capsys, "gysin", "--grass", "2,4", "--J", "1", "--K", "1")[:2] == (EXIT_OK, "0")
    assert run(capsys, "gysin", "--grass", "2,4", "--J", "1", "--K", "1", "--strict")[0] == EXIT_INPUT


def test_omega1_text(capsys):
    code, out, _ = run(capsys, "omega1", "--n", "1")
    assert code == EXIT_OK and "deg=1: t2 - t1" in out
    code, out, _ = run(capsys, "omega1", "--n", "2")
    line = next(l for l in out.splitlines() if l.startswith("deg=1:"))
    assert parse_poly(line.split(":", 1)[1], 4) == parse_poly("t3+t4-t1-t2", 4)


def test_omega1_heavy_gate(capsys):
    code, _, err = run(capsys, "omega1", "--n", "4")
    assert code == EXIT_HEAVY and "--heavy" in err


def test_omega1_methods_write_identical_files(capsys, tmp_path):
    outs = []
    for method in ("direct", "gkm", "grouped"):
        out = tmp_path / method
        code, _, _ = run(capsys, "omega1", "--n", "3", "--method", method, "--out", str(out),
                         "--cache-dir", str(tmp_path / f"cache-{method}"), "--quiet")
        assert code == EXIT_OK
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == ["f_3.json", "schur.json", "table.json"]
    for other in outs[1:]:
        match, mismatch, errors = filecmp.cmpfiles(outs[0], other, names, shallow=False)
        assert match == names and not mismatch and not errors


def test_omega1_workers_do_not_change_output(capsys, tmp_path):
    for w in ("1", "3"):
        run(capsys, "omega1", "--n", "2", "--workers", w, "--out", str(tmp_path / w), "--quiet")
    names = sorted(p.name for p in (tmp_path / "1").iterdir())
    assert filecmp.cmpfiles(tmp_path / "1", tmp_path / "3", names, shallow=False)[0] == names


def test_cache_env_variable(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("EQCSM_CACHE_DIR", str(tmp_path / "c"))
    assert run(capsys, "omega1", "--n", "2", "--quiet")[0] == EXIT_OK
    assert sorted(p.name for p in (tmp_path / "c").iterdir()) == ["f_1.json", "f_2.json"]


def test_positivity(capsys, tmp_path):
    run(capsys, "omega1", "--n", "2", "--out", str(tmp_path), "--quiet")
    f2 = str(tmp_path / "f_2.json")
    code, out, _ = run(capsys, "positivity", "--class", f2, "--tree", "1>2,2>4,4>3")
    assert code == EXIT_OK and out.startswith("PASS")
    code, out, _ = run(capsys, "positivity", "--class", f2, "--tree", "1>3,2>3,2>4")
    assert code == EXIT_FAIL and out.startswith("FAIL")
    line = tmp_path / "line.json"
    line.write_text(json.dumps(parse_poly("t2 - t1", 2).to_json()))
    assert run(capsys, "positivity", "--class", str(line), "--tree", "1>2")[:2] == (EXIT_OK, "PASS")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(parse_poly("t1", 2).to_json()))
    assert run(capsys, "positivity", "--class", str(bad), "--tree", "1>2")[0] == EXIT_INPUT


def test_cone(capsys):
    code, out, _ = run(capsys, "cone", "--a", "0,4,-2")
    assert parse_poly(out, 1) == parse_poly("4*t1 - 2*t1^2 + t1^3", 1)
    code, out, _ = run(capsys, "cone", "--weights", "t1,t2", "--nvars", "2")
    assert out == "t1*t2"
    assert run(capsys, "cone")[0] == EXIT_INPUT


def test_verify_list_and_suite(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == EXIT_OK and "localization" in out and "heavy" in out
    code, out, _ = run(capsys, "verify", "cones")
    assert code == EXIT_OK and out.splitlines()[-1] == "1/1 passed"
    assert run(capsys, "verify", "heavy")[0] == EXIT_HEAVY
    assert run(capsys, "verify", "nonsense")[0] == EXIT_INPUT


def test_run_config_validation(tmp_path):
    with pytest.raises(ValueError):
        RunConfig(workers=0)
    with pytest.raises(ValueError):
        RunConfig(output="xml")
    cfg = RunConfig(cache_dir=tmp_path / "new")
    assert cfg.cache_dir.is_dir()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eqcsm", "omega1", "--n", "1"],
                          capture_output=True, text=True, check=True)
    assert "deg=1: t2 - t1" in proc.stdout
