"""Command-line surface: flags, file outputs, exit codes, reproducibility."""

import csv
import json
import math

import numpy as np
import pytest

from excursions.cli import (
    DEFAULT_SEED,
    EXIT_ACCEPTANCE_FAILED,
    EXIT_CENSOR_BUDGET,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    _fmt,
    _parse_range,
    build_parser,
    main,
)
from excursions import DomainError


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_parser_defaults_are_documented_values():
    p = build_parser()
    a = p.parse_args(["verify-c2"])
    assert (a.alpha, a.u, a.n, a.window_factor) == (2.0, 6.0, 5000, 20.0)
    assert (a.grid_step_factor, a.seed) == (0.01, DEFAULT_SEED)
    a = p.parse_args(["verify-ht"])
    assert (a.alpha, a.u, a.window_factor) == (1.0, 10.0, 50.0)
    a = p.parse_args(["limit-cdf"])
    assert a.range == "0:10:0.01"


def test_fmt_round_trips_floats():
    for x in (math.pi, 0.1, 1e-17, 12345.6789):
        assert float(_fmt(x)) == x
    assert _fmt(7) == "7"


def test_parse_range():
    np.testing.assert_allclose(_parse_range("0:1:0.25"), [0.0, 0.25, 0.5, 0.75, 1.0])
    assert _parse_range("0:10:0.01").size == 1001
    for bad in ("1:0:1", "0:1:0", "0:1", "a:b:c"):
        with pytest.raises(DomainError):
            _parse_range(bad)


def test_limit_cdf_csv_output(tmp_path):
    out = tmp_path / "cdf.csv"
    assert main(["limit-cdf", "--range", "0:3:0.5", "--out", str(out)]) == EXIT_OK
    header, rows = _read_csv(out)
    assert header == ["x", "cdf"]
    assert len(rows) == 7
    table = {float(x): float(c) for x, c in rows}
    assert table[0.0] == 0.0
    # frozen oracle: the chi(3)/Maxwell closed form at x = 2, scale sqrt(2)
    assert table[2.0] == pytest.approx(0.4275932955291201, abs=1e-9)
    cdfs = [float(c) for _, c in rows]
    assert cdfs == sorted(cdfs)


def test_limit_cdf_json_output(tmp_path):
    out = tmp_path / "cdf.json"
    assert main(["limit-cdf", "--range", "0:1:0.5", "--format", "json", "--out", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert [row["x"] for row in payload] == [0.0, 0.5, 1.0]
    assert payload[1]["cdf"] == pytest.approx(0.01132285782420836, abs=1e-9)


def test_limit_cdf_rejects_rough_kernel(tmp_path):
    out = tmp_path / "cdf.csv"
    assert main(["limit-cdf", "--alpha", "1", "--out", str(out)]) == EXIT_CONFIG_ERROR
    assert not out.exists()


def test_regime_commands_validate_alpha(tmp_path):
    out = str(tmp_path / "r.json")
    assert main(["verify-c2", "--alpha", "1", "--out", out]) == EXIT_CONFIG_ERROR
    assert main(["verify-ht", "--alpha", "2", "--out", out]) == EXIT_CONFIG_ERROR
    assert main(["verify-c2", "--n", "50", "--out", out]) == EXIT_CONFIG_ERROR


def test_sample_paths_csv_shape_and_determinism(tmp_path):
    out1, out2 = tmp_path / "p1.csv", tmp_path / "p2.csv"
    argv = ["sample-paths", "--n", "3", "--u", "4", "--seed", "11"]
    assert main(argv + ["--out", str(out1)]) == EXIT_OK
    assert main(argv + ["--out", str(out2)]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    header, rows = _read_csv(out1)
    assert header == ["t", "value", "replicate"]
    reps = {int(r[2]) for r in rows}
    assert reps == {0, 1, 2}
    n_points = sum(1 for r in rows if r[2] == "0")
    assert len(rows) == 3 * n_points
    # conditioned draws exceed the threshold at t = 0
    at_origin = [float(r[1]) for r in rows if float(r[0]) == 0.0]
    assert all(v > 4.0 for v in at_origin)


def test_verify_c2_writes_self_describing_report(tmp_path):
    out = tmp_path / "report.json"
    code = main(
        ["verify-c2", "--n", "150", "--seed", "2023", "--out", str(out)]
    )
    payload = json.loads(out.read_text())
    assert code == (EXIT_OK if payload["passed"] else EXIT_ACCEPTANCE_FAILED)
    assert payload["schema_version"] == 1
    assert payload["config"]["n"] == 150
    assert payload["config"]["master_seed"] == 2023
    assert payload["config"]["cli"]["window_factor"] == 20.0
    qcsv = tmp_path / "report.quantiles.csv"
    header, rows = _read_csv(qcsv)
    assert header == ["p", "empirical", "reference"]
    assert [float(r[0]) for r in rows] == [0.05, 0.25, 0.5, 0.75, 0.95]


def test_verify_c2_reports_are_reproducible_minus_runtime(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["verify-c2", "--n", "150", "--seed", "2023"]
    code_a = main(argv + ["--out", str(a)])
    code_b = main(argv + ["--out", str(b)])
    assert code_a == code_b
    pa, pb = json.loads(a.read_text()), json.loads(b.read_text())
    pa.pop("runtime_seconds")
    pb.pop("runtime_seconds")
    assert pa == pb


def test_verify_c2_censor_budget_exit_code(tmp_path):
    out = str(tmp_path / "r.json")
    code = main(["verify-c2", "--n", "150", "--window-factor", "0.5", "--out", out])
    assert code == EXIT_CENSOR_BUDGET


def test_diagnostics_outputs(tmp_path):
    out = tmp_path / "diag.csv"
    code = main(["diagnostics", "--n", "80", "--seed", "5", "--out", str(out)])
    assert code == EXIT_OK
    header, rows = _read_csv(out)
    assert header == ["t", "pitman_ratio"]
    ratios = {float(t): float(v) for t, v in rows}
    smallest_t = min(ratios)
    assert ratios[smallest_t] == pytest.approx(1.0, abs=1e-3)
    cov = tmp_path / "diag.covariance.csv"
    header, rows = _read_csv(cov)
    assert header == ["s", "t", "empirical", "target", "se", "n"]
    assert len(rows) == 3
    # target column carries the exact fBm covariance values
    assert float(rows[0][3]) == pytest.approx(2.0 * math.pi, rel=1e-12)


def test_diagnostics_json_format_carries_both_tables(tmp_path):
    out = tmp_path / "diag.json"
    code = main(
        ["diagnostics", "--n", "80", "--seed", "5", "--format", "json", "--out", str(out)]
    )
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert set(doc) == {"pitman_ratio", "covariance"}
    curve = doc["pitman_ratio"]
    assert len(curve) == 25
    assert curve[-1]["ratio"] == pytest.approx(1.0, abs=1e-3)
    assert len(doc["covariance"]) == 3
    assert doc["covariance"][0]["target"] == pytest.approx(2.0 * math.pi, rel=1e-12)
    # json mode writes a single self-contained file, no csv sidecar
    assert list(tmp_path.iterdir()) == [out]


def test_diagnostics_rejects_smooth_kernel(tmp_path):
    out = str(tmp_path / "d.csv")
    assert main(["diagnostics", "--alpha", "2", "--out", out]) == EXIT_CONFIG_ERROR


def test_unknown_subcommand_is_an_argparse_error():
    with pytest.raises(SystemExit):
        main(["no-such-command"])
