import csv
import io
import json
import os

import pytest
from click.testing import CliRunner

from fig8rt.cli import CACHE_FILE, InvariantCache, load_config, main, parse_pq_list, parse_r_range
from fig8rt.invariants import jeffrey


def run(args, env=None, **kw):
    res = CliRunner().invoke(main, args, env=env or {}, catch_exceptions=False, **kw)
    return res


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_invariant_zero_surgery_matches_closed_form():
    res = run(["invariant", "-p", "0", "-q", "1", "-r", "5..40"])
    assert res.exit_code == 0
    out = rows(res.output)
    assert len(out) == 36
    for row in out:
        r = int(row["r"])
        tau = complex(float(row["tau_re"]), float(row["tau_im"]))
        assert abs(tau - jeffrey(r)) < 1e-10


def test_cache_round_trip_is_bit_identical(tmp_path):
    args = ["--cache-dir", str(tmp_path), "invariant", "-p", "5", "-q", "2", "-r", "7,9,11"]
    first = run(args)
    assert first.exit_code == 0
    assert os.path.exists(tmp_path / CACHE_FILE)
    cache = InvariantCache(str(tmp_path))
    assert len(cache.entries) == 3
    second = run(args)
    assert second.output == first.output
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".tau_cache.")]


def test_cache_ignores_other_versions(tmp_path):
    with open(tmp_path / CACHE_FILE, "w") as fh:
        fh.write(json.dumps({"key": [1, 1, 5], "tau_re": 9.0, "tau_im": 9.0, "version": 0}) + "\n")
        fh.write("not json\n")
    assert InvariantCache(str(tmp_path)).get(1, 1, 5) is None


def test_non_reduced_slope_is_usage_error():
    res = CliRunner().invoke(main, ["invariant", "-p", "2", "-q", "4", "-r", "10"])
    assert res.exit_code == 2
    assert "p/q not in lowest terms" in res.output


def test_critical_zero_surgery():
    res = run(["critical", "-p", "0", "-q", "1"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert len(doc["points"]) == 2
    assert sorted(round(pt["cs"], 12) for pt in doc["points"]) == [0.2, 0.8]
    for pt in doc["points"]:
        det = complex(*pt["det_h"]) if isinstance(pt["det_h"], list) else pt["det_h"]
        assert abs(det - 5) < 1e-9
        assert pt["defect"] < 1e-9


def test_critical_three_includes_endpoint():
    doc = json.loads(run(["critical", "-p", "3"]).output)
    assert any(abs(pt["theta"] - 1 / 6) < 1e-12 for pt in doc["points"])


def test_chern_simons_and_jones_and_asymptotics():
    cs = json.loads(run(["chern-simons", "-p", "0"]).output)
    assert cs["p"] == 0 and cs["classes"]
    res = run(["--format", "json", "jones", "-r", "50"])
    assert res.exit_code == 0 and json.loads(res.output)[0]["r"] == 50
    res = run(["--sigma-mode", "zero", "asymptotics", "-p", "2", "-r", "60"])
    assert res.exit_code == 0 and "60" in res.output


def test_verify_volume_writes_report(tmp_path):
    res = run(["verify", "volume", "--out", str(tmp_path)])
    assert res.exit_code == 0
    assert "PASS volume" in res.output
    docs = json.load(open(tmp_path / "volume_report.json"))
    assert docs[0]["passed"] is True


def test_verify_aec_hyperbolic_is_conjectural(tmp_path):
    res = run(["verify", "aec", "--pq", "5/1", "--r", "50,100", "--out", str(tmp_path)])
    assert res.exit_code == 0
    assert "conjectural" in res.output and "REPORT aec" in res.output


def test_verify_unknown_suite():
    res = CliRunner().invoke(main, ["verify", "bogus"])
    assert res.exit_code == 2


def test_sweep_columns_and_parallel_equals_serial(tmp_path):
    base = ["sweep", "--pq", "1/1,2/1", "--r", "50,60"]
    serial = run(base)
    assert serial.exit_code == 0
    out = rows(serial.output)
    assert list(out[0]) == ["p", "q", "r", "tau_re", "tau_im", "pred_re", "pred_im", "rel_residual"]
    assert len(out) == 4
    par = run(["--threads", "2"] + base + ["--out", str(tmp_path / "s.csv")])
    assert par.exit_code == 0
    assert open(tmp_path / "s.csv").read() == serial.output


def test_config_layering(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("threads = 3\noutput_format = json\n# comment\nm_multiplicity = 2\n")
    c = load_config(str(cfg), flags={"threads": 5}, environ={"FIG8_M_MULTIPLICITY": "6"})
    assert (c.threads, c.output_format, c.m_multiplicity) == (5, "json", 6)
    c = load_config(str(cfg), flags={}, environ={"FIG8_CACHE_DIR": "/tmp/x"})
    assert c.threads == 3 and c.cache_dir == "/tmp/x"


@pytest.mark.parametrize("content", ["threads = 0\n", "bogus = 1\n", "no equals here\n", "quad_tol = abc\n"])
def test_bad_config_exits_2(tmp_path, content):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(content)
    res = CliRunner().invoke(main, ["--config", str(cfg), "invariant", "-p", "1", "-r", "5"])
    assert res.exit_code == 2


def test_bad_env_exits_2():
    res = CliRunner().invoke(main, ["invariant", "-p", "1", "-r", "5"], env={"FIG8_THREADS": "-1"})
    assert res.exit_code == 2


def test_parsers():
    assert parse_r_range("5..8") == [5, 6, 7, 8]
    assert parse_r_range("3,9") == [3, 9]
    assert parse_pq_list("1/1,-3/2") == [(1, 1), (-3, 2)]


def test_report_schema_golden(tmp_path):
    run(["verify", "specfun", "--out", str(tmp_path)])
    docs = json.load(open(tmp_path / "specfun_report.json"))
    for d in docs:
        assert list(d) == ["name", "params", "tolerance", "max_defect", "passed", "samples"]
        assert isinstance(d["samples"], list)
