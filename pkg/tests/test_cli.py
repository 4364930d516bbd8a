import json
import subprocess
import sys

import jsonschema
import pytest

from caylex.cli import (EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, UsageError,
                        main, parse_radii)

try:
    from importlib.resources import files
    SCHEMA = json.loads(files("caylex").joinpath("schema.json").read_text())
except Exception:   # pragma: no cover
    SCHEMA = None


def run_cli(args, **kw):
    return subprocess.run([sys.executable, "-m", "caylex.cli", *args],
                          capture_output=True, **kw)


def test_parse_radii():
    assert parse_radii("3:6") == [3, 4, 5, 6]
    assert parse_radii("4:64:*2") == [4, 8, 16, 32, 64]
    assert parse_radii("4:20:+8") == [4, 12, 20]
    assert parse_radii("5:5") == [5]
    for bad in ["", "4", "4:2", "0:5", "4:8:x2", "4:8:*1", "4:8:+0", "a:b"]:
        with pytest.raises(UsageError):
            parse_radii(bad)


def test_ball_json(tmp_path):
    out = tmp_path / "ball.json"
    assert main(["ball", "--group", "Z^3", "--radius", "3",
                 "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    assert report["results"]["n_vertices"] == 63
    assert report["results"]["sphere_sizes"] == [1, 6, 18, 38]
    jsonschema.validate(report, SCHEMA)


def test_unknown_family_exit_code():
    proc = run_cli(["ball", "--group", "Q5", "--radius", "2"])
    assert proc.returncode == EXIT_USAGE
    assert b"unknown family" in proc.stderr


def test_usage_error_on_bad_subcommand():
    proc = run_cli(["frobnicate"])
    assert proc.returncode == EXIT_USAGE


def test_capacity_json_schema_and_values(tmp_path):
    out = tmp_path / "scan.json"
    assert main(["capacity", "--group", "Z^1", "--p", "2",
                 "--radii", "4:16:*2", "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    jsonschema.validate(report, SCHEMA)
    entries = report["results"]["entries"]
    assert [e["R"] for e in entries] == [4, 8, 16]
    assert entries[0]["capacity"] == pytest.approx(1.0, rel=1e-9)
    assert all(e["residual"] <= 1e-10 for e in entries)


def test_capacity_csv(tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["capacity", "--group", "Z^1", "--p", "2",
                 "--radii", "4:8:*2", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("R,capacity")
    assert len(lines) == 3


def test_bad_radii_exit_code():
    proc = run_cli(["capacity", "--group", "Z^1", "--p", "2",
                    "--radii", "8:4"])
    assert proc.returncode == EXIT_USAGE


def test_vertex_cap_exit_code():
    proc = run_cli(["ball", "--group", "F_2", "--radius", "12"],
                   env={"CAYLEX_MAX_VERTICES": "1000", "PATH": "/usr/bin:/bin"})
    assert proc.returncode == EXIT_RESOURCE


def test_royden_json(tmp_path):
    out = tmp_path / "trend.json"
    assert main(["royden", "--group", "Z^2", "--source", "constant",
                 "--radii", "3:5", "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["results"]["verdict"] == "harmonic-part-vanishing"


def test_iso_csv(tmp_path):
    out = tmp_path / "iso.csv"
    assert main(["iso", "--group", "Z^2", "--nmax", "5",
                 "--out", str(out)]) == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,boundary_size,exact"
    assert lines[1].startswith("1,1,")


def test_sobolev_json(tmp_path):
    out = tmp_path / "sob.json"
    assert main(["sobolev", "--group", "Z^3", "--d", "3", "--samples", "30",
                 "--nmax", "4", "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    jsonschema.validate(report, SCHEMA)
    res = report["results"]
    assert res["cprime"] == pytest.approx(8.0 * res["constant"])
    assert res["violation_count"] == 0


def test_lemma61_and_pairing_commands(tmp_path):
    assert main(["lemma61", "--group", "Z^2", "--samples", "50",
                 "--scalar-samples", "1000",
                 "--out", str(tmp_path / "l.json")]) == EXIT_OK
    assert main(["pairing", "--group", "F_2", "--samples", "20",
                 "--out", str(tmp_path / "p.json")]) == EXIT_OK
    for name in ("l.json", "p.json"):
        jsonschema.validate(json.loads((tmp_path / name).read_text()), SCHEMA)


def test_verify_single_suite(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "norms", "--seed", "3",
                 "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["results"][0]["passed"] is True


def test_verify_unknown_suite():
    assert main(["verify", "--suite", "bogus"]) == EXIT_USAGE


def test_determinism_across_runs_bytes(tmp_path):
    outs = []
    for _ in range(2):
        proc = run_cli(["capacity", "--group", "Z^1", "--p", "2",
                        "--radii", "4:16:*2"])
        assert proc.returncode == EXIT_OK
        outs.append(proc.stdout)
    assert outs[0] == outs[1]


def test_atomic_write_leaves_no_temp_files(tmp_path):
    out = tmp_path / "ball.json"
    main(["ball", "--group", "Z^2", "--radius", "2", "--out", str(out)])
    leftovers = [p for p in tmp_path.iterdir() if p.name != "ball.json"]
    assert leftovers == []
