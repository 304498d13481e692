"""Command-line front end: verification runs, limit-law tables, path dumps,
and convergence diagnostics.

Exit codes: 0 ok, 1 acceptance failed, 2 configuration error, 3 censor budget
exceeded, 4 covariance synthesis failed.  EXCURSION_THREADS caps replicate
parallelism.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path as FilePath

import numpy as np

from .errors import (
    CensorBudgetExceeded,
    DomainError,
    ExcursionsError,
    SynthesisError,
)
from .kernels import make_kernel, pitman_ratio, second_derivative_at_zero
from .limit_law import C2LimitParams, c2_limit_cdf
from .sampling import build_sampler, sample_conditional_exceedance
from .streams import substream_seed
from .verify import (
    C2_WINDOW_FACTOR,
    DEFAULT_STEP_FACTOR,
    HT_WINDOW_FACTOR,
    PATH_LANE,
    Regime,
    VerificationGrids,
    c2_grid,
    covariance_panel,
    heavy_tail_grid,
    limit_grid,
    run_verification,
)

EXIT_OK = 0
EXIT_ACCEPTANCE_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_CENSOR_BUDGET = 3
EXIT_SYNTHESIS_ERROR = 4

DEFAULT_SEED = 1729
_COVARIANCE_PAIRS = ((1.0, 1.0), (1.0, 2.0), (-1.0, 1.0))


def _fmt(value) -> str:
    """Shortest decimal text that parses back to exactly the same float."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: str, payload) -> None:
    FilePath(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _quantile_csv_path(out: str) -> str:
    p = FilePath(out)
    return str(p.with_name(p.stem + ".quantiles.csv"))


def _write_report(report, out: str) -> None:
    _write_json(out, report.to_dict())
    _write_csv(
        _quantile_csv_path(out),
        ["p", "empirical", "reference"],
        [(row["p"], row["empirical"], row["reference"]) for row in report.quantiles],
    )


def _add_common(sp, *, alpha: float, u: float, n: int, window_factor: float) -> None:
    sp.add_argument("--alpha", type=float, default=alpha, help=f"kernel exponent (default {alpha})")
    sp.add_argument("--r0", type=float, default=1.0, help="covariance at zero (default 1.0)")
    sp.add_argument("--u", type=float, default=u, help=f"threshold level (default {u})")
    sp.add_argument("--n", type=int, default=n, help=f"replicates (default {n})")
    sp.add_argument(
        "--grid-step-factor",
        type=float,
        default=DEFAULT_STEP_FACTOR,
        help=f"grid step in regime units (default {DEFAULT_STEP_FACTOR})",
    )
    sp.add_argument(
        "--window-factor",
        type=float,
        default=window_factor,
        help=f"window half-width in regime units (default {window_factor})",
    )
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")


def cmd_verify_c2(args) -> int:
    if args.alpha != 2.0:
        raise DomainError("verify-c2 requires --alpha 2")
    kernel = make_kernel(args.alpha, args.r0)
    grid = c2_grid(args.u, args.grid_step_factor, args.window_factor)
    report = run_verification(
        Regime.C2,
        kernel,
        args.u,
        VerificationGrids(grid),
        args.n,
        args.seed,
        extra_config=_flag_echo(args),
    )
    _write_report(report, args.out)
    return EXIT_OK if report.passed else EXIT_ACCEPTANCE_FAILED


def cmd_verify_ht(args) -> int:
    if not 0.0 < args.alpha < 2.0:
        raise DomainError("verify-ht requires --alpha in (0, 2)")
    kernel = make_kernel(args.alpha, args.r0)
    grids = VerificationGrids(
        heavy_tail_grid(kernel, args.u, args.grid_step_factor, args.window_factor),
        limit_grid(),
    )
    report = run_verification(
        Regime.HEAVY_TAIL,
        kernel,
        args.u,
        grids,
        args.n,
        args.seed,
        extra_config=_flag_echo(args),
    )
    _write_report(report, args.out)
    return EXIT_OK if report.passed else EXIT_ACCEPTANCE_FAILED


def _flag_echo(args) -> dict:
    echo = {}
    for key in ("grid_step_factor", "window_factor", "format"):
        if hasattr(args, key):
            echo[key] = getattr(args, key)
    return {"cli": echo}


def _parse_range(spec: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise DomainError(f"range must look like start:stop:step, got {spec!r}") from exc
    if step <= 0 or stop < start:
        raise DomainError(f"range needs step > 0 and stop >= start, got {spec!r}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def cmd_limit_cdf(args) -> int:
    if args.alpha != 2.0:
        raise DomainError("limit-cdf applies to the smooth regime; requires --alpha 2")
    kernel = make_kernel(args.alpha, args.r0)
    params = C2LimitParams(kernel.r0, second_derivative_at_zero(kernel))
    xs = _parse_range(args.range)
    rows = [(float(x), c2_limit_cdf(params, float(x))) for x in xs]
    if args.format == "json":
        _write_json(args.out, [{"x": x, "cdf": c} for x, c in rows])
    else:
        _write_csv(args.out, ["x", "cdf"], rows)
    return EXIT_OK


def cmd_sample_paths(args) -> int:
    kernel = make_kernel(args.alpha, args.r0)
    if args.alpha == 2.0:
        grid = c2_grid(args.u, args.grid_step_factor, args.window_factor)
    else:
        grid = heavy_tail_grid(kernel, args.u, args.grid_step_factor, args.window_factor)
    plan = build_sampler(kernel, grid)
    times = grid.times()
    rows = []
    for i in range(args.n):
        path = sample_conditional_exceedance(plan, args.u, substream_seed(args.seed, PATH_LANE, i))
        rows.extend((float(t), float(v), i) for t, v in zip(times, path.values))
    if args.format == "json":
        _write_json(args.out, [{"t": t, "value": v, "replicate": r} for t, v, r in rows])
    else:
        _write_csv(args.out, ["t", "value", "replicate"], rows)
    return EXIT_OK


def cmd_diagnostics(args) -> int:
    if not 0.0 < args.alpha < 2.0:
        raise DomainError("diagnostics applies to the heavy-tail regime; requires --alpha < 2")
    kernel = make_kernel(args.alpha, args.r0)
    # tail-matching curve on a log grid, t decreasing toward 0
    ts = np.geomspace(1.0, 1e-4, 25)
    curve = [(float(t), pitman_ratio(kernel, float(t))) for t in ts]

    grid = heavy_tail_grid(kernel, args.u, args.grid_step_factor, args.window_factor)
    panel = covariance_panel(kernel, args.u, _COVARIANCE_PAIRS, args.n, args.seed, grid)
    if args.format == "json":
        _write_json(
            args.out,
            {
                "pitman_ratio": [{"t": t, "ratio": r} for t, r in curve],
                "covariance": panel,
            },
        )
        return EXIT_OK
    _write_csv(args.out, ["t", "pitman_ratio"], curve)
    cov_path = FilePath(args.out)
    cov_out = str(cov_path.with_name(cov_path.stem + ".covariance.csv"))
    _write_csv(
        cov_out,
        ["s", "t", "empirical", "target", "se", "n"],
        [(r["s"], r["t"], r["empirical"], r["target"], r["se"], r["n"]) for r in panel],
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="excursions",
        description="Simulate high-threshold excursions of stationary Gaussian processes "
        "and verify their limiting length laws.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify-c2", help="smooth-regime verification run (alpha = 2)")
    _add_common(sp, alpha=2.0, u=6.0, n=5000, window_factor=C2_WINDOW_FACTOR)
    sp.add_argument("--out", default="report.json", help="report path (default report.json)")
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.set_defaults(handler=cmd_verify_c2)

    sp = sub.add_parser("verify-ht", help="heavy-tail verification run (alpha < 2)")
    _add_common(sp, alpha=1.0, u=10.0, n=5000, window_factor=HT_WINDOW_FACTOR)
    sp.add_argument("--out", default="report.json", help="report path (default report.json)")
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.set_defaults(handler=cmd_verify_ht)

    sp = sub.add_parser("limit-cdf", help="tabulate the smooth-regime limit CDF")
    sp.add_argument("--alpha", type=float, default=2.0, help="kernel exponent (must be 2)")
    sp.add_argument("--r0", type=float, default=1.0, help="covariance at zero (default 1.0)")
    sp.add_argument("--range", default="0:10:0.01", help="x grid as start:stop:step (default 0:10:0.01)")
    sp.add_argument("--out", default="limit_cdf.csv", help="output path (default limit_cdf.csv)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(handler=cmd_limit_cdf)

    sp = sub.add_parser("sample-paths", help="dump conditioned paths for inspection")
    _add_common(sp, alpha=2.0, u=6.0, n=5, window_factor=C2_WINDOW_FACTOR)
    sp.add_argument("--out", default="paths.csv", help="output path (default paths.csv)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(handler=cmd_sample_paths)

    sp = sub.add_parser("diagnostics", help="heavy-tail convergence diagnostics")
    _add_common(sp, alpha=1.0, u=10.0, n=1000, window_factor=HT_WINDOW_FACTOR)
    sp.add_argument("--out", default="diagnostics.csv", help="output path (default diagnostics.csv)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(handler=cmd_diagnostics)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except CensorBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CENSOR_BUDGET
    except SynthesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SYNTHESIS_ERROR
    except (DomainError, ExcursionsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
