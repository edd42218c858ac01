import csv
import io
import json
import math

import pytest

from ivtree.cli import main
from ivtree.errors import ConfigError
from ivtree.fixedpoint import thresholds
from ivtree.sweep import (
    CSV_COLUMNS,
    Axis,
    SweepSpec,
    evaluate_point,
    rows_to_csv,
    run_sweep,
    spec_from_mapping,
)

REGION_COUNT = {"unique": 1, "boundary": 2, "three": 3}


def reduced_spec(nc=40, nd=40, **kw):
    return SweepSpec("reduced", {"c": Axis(0.01, 5, nc, "log"), "d": Axis(1, 20, nd, "log")}, **kw)


def parse_csv(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(body))


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_reduced_grid_three_roots_only_above_three():
    rows = list(run_sweep(reduced_spec(), threads=4))
    assert len(rows) == 1600
    three = [r for r in rows if r.region == "three"]
    assert three and all(r.d > 3 for r in three)
    for r in rows:
        assert REGION_COUNT[r.region] == r.num_roots
        us = [u for u in (r.u1, r.u2, r.u3) if u is not None]
        assert len(us) == r.num_roots and us == sorted(us)


def test_grid_window_matches_thresholds():
    rows = list(run_sweep(reduced_spec(), threads=4))
    cs = sorted({r.c for r in rows})
    ratio = cs[1] / cs[0]
    by_d = {}
    for r in rows:
        if r.region == "three":
            by_d.setdefault(r.d, []).append(r.c)
    assert by_d
    for d, inside in by_d.items():
        e1, e2 = thresholds(d)
        assert e1 < min(inside) <= e1 * ratio
        assert e2 / ratio <= max(inside) < e2


def test_reference_point_physical():
    spec = SweepSpec("physical", {"J": Axis(-13, -13), "Jp": Axis(34.6, 34.6), "T": Axis(27.5, 27.5)})
    rows = list(run_sweep(spec, threads=1))
    assert len(rows) == 1 and rows[0].num_roots == 3
    assert len({rows[0].f1, rows[0].f2, rows[0].f3}) == 3
    assert "# note:" in rows_to_csv(rows)


def test_one_by_one_grid_is_single_evaluation():
    spec = SweepSpec("reduced", {"c": Axis(0.5, 0.5), "d": Axis(9.0, 9.0)})
    (row,) = run_sweep(spec, threads=1)
    assert row == evaluate_point("reduced", (0.5, 9.0))


def test_row_count_is_product_of_steps():
    spec = SweepSpec("physical", {"J": Axis(-1, 1, 3), "Jp": Axis(0.5, 2, 4), "T": Axis(0.5, 5, 5, "log")})
    assert spec.size == 60 == len(list(run_sweep(spec, threads=2)))


def test_csv_schema_and_empty_cells():
    text = rows_to_csv(run_sweep(reduced_spec(6, 6), threads=1))
    assert text.startswith("# convention: beta = 1/T")
    header = next(ln for ln in text.splitlines() if not ln.startswith("#"))
    assert tuple(header.split(",")) == CSV_COLUMNS
    for r in parse_csv(text):
        n = int(r["num_roots"])
        assert all(r[f"u{i}"] for i in range(1, n + 1))
        assert all(r[f"u{i}"] == "" for i in range(n + 1, 4))
        assert float(r["c"]) == float(repr(float(r["c"])))


def test_csv_deterministic_across_threads():
    spec = reduced_spec(15, 15, outputs=frozenset({"roots", "free_energy", "entropy", "region"}))
    outs = {rows_to_csv(run_sweep(spec, threads=t)) for t in (1, 1, 3, 8)}
    assert len(outs) == 1


@pytest.mark.parametrize("bad", [
    {"mode": "reduced", "grid": {"c": {"min": 1, "max": 0.5, "steps": 3}, "d": 2}},
    {"mode": "reduced", "grid": {"c": {"min": -1, "max": 1, "steps": 3, "scale": "log"}, "d": 2}},
    {"mode": "reduced", "grid": {"c": {"min": 0.1, "max": 1, "steps": 0}, "d": 2}},
    {"mode": "reduced", "grid": {"c": 1.0}},
    {"mode": "physical", "grid": {"J": 1, "Jp": 1, "T": 0.0}},
    {"mode": "sideways", "grid": {}},
    {"mode": "reduced", "grid": {"c": 1, "d": 2}, "outputs": ["magnetisation"]},
    {"mode": "reduced", "grid": {"c": {"min": 1, "stepz": 2}, "d": 2}},
])
def test_config_errors_carry_a_path(bad):
    with pytest.raises(ConfigError) as ei:
        spec_from_mapping(bad)
    assert ei.value.path


def test_cli_fixed_points_reference_point(capsys):
    code, out, _ = run_cli(capsys, "fixed-points", "--J", "-13", "--Jp", "34.6", "--T", "27.5")
    assert code == 0
    assert "# note:" in out and "# stability: attracting;repelling;attracting" in out
    (row,) = parse_csv(out)
    assert row["num_roots"] == "3" and row["region"] == "three" and row["J"] == "-13.0"


def test_cli_fixed_points_json(capsys):
    code, out, _ = run_cli(capsys, "fixed-points", "--c", "2", "--d", "0.5", "--format", "json")
    payload = json.loads(out)
    assert code == 0 and payload["rows"][0]["num_roots"] == 1
    assert payload["rows"][0]["multiplicity"] == [1]


def test_cli_scan_and_out_file(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    code, out, _ = run_cli(capsys, "scan", "--mode", "reduced", "--c", "0.01:5:7:log", "--d", "1:20:5:log",
                           "--threads", "2", "--out", str(path))
    assert code == 0 and out == ""
    assert len(parse_csv(path.read_text())) == 35


def test_cli_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "s.toml"
    cfg.write_text('mode = "reduced"\noutputs = ["roots", "region"]\n'
                   '[grid.c]\nmin = 0.1\nmax = 1.0\nsteps = 4\n[grid.d]\nmin = 2.0\nmax = 8.0\nsteps = 3\n')
    code, out, _ = run_cli(capsys, "scan", "--config", str(cfg), "--threads", "1")
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 12 and rows[0]["f1"] == ""
    code, out, _ = run_cli(capsys, "scan", "--config", str(cfg), "--d", "5", "--outputs", "free_energy", "--threads", "1")
    rows = parse_csv(out)
    assert len(rows) == 4 and {r["d"] for r in rows} == {"5.0"} and rows[0]["f1"] and rows[0]["u1"] == ""


def test_cli_config_error_exit_code(capsys, tmp_path):
    code, _, err = run_cli(capsys, "scan", "--mode", "reduced", "--c", "1:0.5:3", "--d", "2")
    assert code == 2 and "grid.c" in err
    bad = tmp_path / "bad.toml"
    bad.write_text("mode = [")
    code, _, _ = run_cli(capsys, "scan", "--config", str(bad))
    assert code == 2
    code, _, _ = run_cli(capsys, "fixed-points", "--J", "1")
    assert code == 2


def test_cli_free_energy_and_entropy(capsys):
    code, out, _ = run_cli(capsys, "free-energy", "--J", "0", "--Jp", "0", "--beta", "2", "--depth", "4")
    (row,) = parse_csv(out)
    assert code == 0
    assert float(row["f_paper"]) == pytest.approx(-math.log(2) / 2, rel=1e-15)
    assert float(row["f_numeric"]) == pytest.approx(math.log(2) / 2, rel=1e-14)
    code, out, _ = run_cli(capsys, "entropy", "--J", "0", "--Jp", "0", "--beta", "2", "--format", "json")
    (row,) = json.loads(out)["rows"]
    assert row["s_analytic"] == pytest.approx(math.log(2), rel=1e-15)


def test_cli_verify_exit_codes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--level", "quick")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run_cli(capsys, "verify", "--level", "quick", "--perturb", "1e-2")
    assert code == 1
    failed = [ln for ln in out.splitlines() if "FAIL" in ln]
    assert any("consistency" in ln for ln in failed)


def test_verify_full_deterministic(capsys):
    outs = set()
    for threads in ("1", "8"):
        code, out, _ = run_cli(capsys, "verify", "--level", "full", "--threads", threads)
        assert code == 0
        outs.add(out)
    assert len(outs) == 1
