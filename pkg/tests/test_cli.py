import csv
import io
import json

import pytest

from multatlas.cli import UsageError, main, parse_complex, parse_periods


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("text,want", [
    ("-2,0", -2), ("0.1,-0.2", 0.1 - 0.2j), ("1+2i", 1 + 2j), ("1-2i", 1 - 2j),
    ("-0.75", -0.75), ("2i", 2j), ("-i", -1j), ("1e-3+1e-2j", 0.001 + 0.01j),
])
def test_parse_complex(text, want):
    assert parse_complex(text) == want


@pytest.mark.parametrize("text", ["", "1,2,3", "abc", "1+2x", "i2"])
def test_parse_complex_rejects(text):
    with pytest.raises(UsageError):
        parse_complex(text)


def test_parse_periods():
    assert parse_periods("3") == [3]
    assert parse_periods("1-4") == [1, 2, 3, 4]
    with pytest.raises(UsageError):
        parse_periods("4-1")


def test_orbits_minus_two(tmp_path, capsys):
    code, out, _ = run(capsys, "--out-dir", str(tmp_path), "orbits", "--c", "-2,0", "--period", "1")
    assert code == 0
    r = [x for x in rows(out) if float(x["z_re"]) == 2.0][0]
    assert float(r["rho_re"]) == pytest.approx(4)
    assert float(r["rho_prime_re"]) == pytest.approx(-2 / 3)
    assert float(r["nu_re"]) == pytest.approx(-1 / 6, abs=1e-12)
    assert (tmp_path / "orbits_manifest.json").exists()


def test_orbits_c0(tmp_path, capsys):
    code, out, _ = run(capsys, "--out-dir", str(tmp_path), "orbits", "--c", "0,0", "--period", "2")
    (r,) = rows(out)
    assert float(r["rho_re"]) == pytest.approx(4) and float(r["nu_re"]) == pytest.approx(0.5)
    code, out, _ = run(capsys, "--out-dir", str(tmp_path), "orbits", "--c", "0+0i", "--period", "1")
    rs = rows(out)
    assert len(rs) == 2
    sup = [x for x in rs if x["stability"] == "superattracting_flagged"]
    assert len(sup) == 1 and sup[0]["nu_re"] == ""


def test_orbits_incomplete_exit_code(tmp_path, capsys):
    args = ["--out-dir", str(tmp_path), "orbits", "--c", "-0.75", "--period", "2"]
    assert run(capsys, *args)[0] == 3
    assert run(capsys, *args, "--allow-partial")[0] == 0


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, "--out-dir", str(tmp_path), "orbits", "--c", "1+2x", "--period", "1")[0] == 2
    assert run(capsys, "--out-dir", str(tmp_path), "orbits", "--c", "1", "--period", "13")[0] == 2
    assert run(capsys, "--out-dir", str(tmp_path), "xset", "--bounds", "1,0,0,1", "--res", "2x2")[0] == 2
    assert run(capsys, "--out-dir", str(tmp_path), "verify", "--only", "nope")[0] == 2
    assert run(capsys, "--out-dir", str(tmp_path / "nope"), "yc", "--c", "0")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["orbits", "--bogus"])
    assert e.value.code == 2


def test_yc_c0(tmp_path, capsys):
    code, out, _ = run(capsys, "--out-dir", str(tmp_path), "yc", "--c", "0,0", "--max-period", "3")
    assert code == 0
    data = (tmp_path / "yc.csv").read_text().splitlines()
    assert len(data) == 5
    assert (tmp_path / "yc.svg").exists()
    m = json.loads((tmp_path / "yc.json").read_text())
    assert m["config"]["max_period"] == 3 and m["incomplete_periods"] == []


def test_yc_incomplete_still_succeeds(tmp_path, capsys):
    code, _, err = run(capsys, "--out-dir", str(tmp_path), "yc", "--c", "-0.75", "--max-period", "2")
    assert code == 0 and "incomplete" in err
    assert json.loads((tmp_path / "yc.json").read_text())["incomplete_periods"] == [2]


def test_xset_examples(tmp_path, capsys):
    code, out, _ = run(capsys, "--out-dir", str(tmp_path), "xset", "--res", "1x1",
                       "--bounds", "-0.1,0.1,-0.1,0.1", "--threads", "1")
    assert code == 0 and "IN_M=1" in out
    code, out, _ = run(capsys, "--out-dir", str(tmp_path), "xset", "--bounds", "2.9,3.1,-0.1,0.1",
                       "--res", "8x8", "--max-period", "8", "--out", "far.png", "--threads", "1")
    assert code == 0 and "NOT_DETECTED=64" in out
    m = json.loads((tmp_path / "far.json").read_text())
    assert m["config"]["res"] == "8x8" and m["config"]["threads"] == 1


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('max_period = 2\n[xset]\nres = "2x2"\nbounds = "2.9,3.1,-0.1,0.1"\nout = "cfg.png"\n')
    code, _, _ = run(capsys, "--out-dir", str(tmp_path), "--config", str(cfg), "xset",
                     "--res", "3x3", "--threads", "1")
    assert code == 0
    m = json.loads((tmp_path / "cfg.json").read_text())
    assert m["config"]["res"] == "3x3"  # flag wins
    assert m["config"]["max_period"] == 2  # file wins over default
    assert m["config"]["tile_size"] == 32  # default
    bad = tmp_path / "bad.toml"
    bad.write_text("frobnicate = 1\n")
    assert run(capsys, "--config", str(bad), "xset")[0] == 2


def test_threads_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MULTATLAS_THREADS", "1")
    run(capsys, "--out-dir", str(tmp_path), "xset", "--res", "1x1", "--bounds", "-0.1,0.1,-0.1,0.1")
    assert json.loads((tmp_path / "xset.json").read_text())["config"]["threads"] == 1


def test_verify_filter_and_determinism(tmp_path, capsys):
    args = ["--out-dir", str(tmp_path), "verify", "--seed", "42", "--only", "summation,hull", "--k", "4"]
    code, first, _ = run(capsys, *args)
    assert code == 0
    lines = first.strip().splitlines()
    assert len(lines) == 2 and lines[0].startswith("PASS summation") and "k = 1..4" in lines[0]
    assert run(capsys, *args)[1] == first
    assert json.loads((tmp_path / "verify_manifest.json").read_text())["config"]["seed"] == 42


def test_verify_failure_exit_code(tmp_path, capsys, monkeypatch):
    from multatlas import verify

    monkeypatch.setitem(verify.CHECKS, "hull",
                        lambda rng: verify.CheckResult("hull", False, 1.0, 0.5, "forced"))
    code, out, err = run(capsys, "--out-dir", str(tmp_path), "verify", "--only", "hull")
    assert code == 1 and out.startswith("FAIL hull") and "hull" in err
