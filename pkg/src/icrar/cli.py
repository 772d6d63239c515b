"""Command-line interface.

Subcommands
-----------
cv-table   simulate the critical-value table and write it as CSV
ci         confidence interval for a series read from a one-column CSV
mue        median-unbiased estimate for a series
mc         Monte Carlo study driven by a scenario configuration file
check      deterministic self-tests (invariance, recursion, weight limits)

Exit codes: 0 success, 1 domain/argument error, 2 I/O error, 3 failed
self-check. All floating-point output on stdout is printed at 6 significant
digits; files carry full double precision.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .exceptions import IcrError, ParameterError
from .intervals import DEFAULT_GRID_STEP, invert_ci, mue
from .limitdist import (
    BUNDLED_ALPHA_GRID,
    BUNDLED_H_GRID,
    PathGridConfig,
    alpha_beta,
    build_table,
    bundled_table,
    load_table,
    save_table,
    simulate_ih_path,
)
from .harness import render_results_csv, run_grid
from .simulate import load_scenario_file, substream, with_overrides
from .tstat import icr_estimate

__all__ = ["main", "main_entry"]


class _CliArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise _CliArgumentError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="icrar", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cv-table", help="simulate critical values and write a table CSV")
    p.add_argument("--b", type=int, default=300_000, dest="b_paths",
                   help="number of simulated paths per h (default 300000)")
    p.add_argument("--n-steps", type=int, default=50_000, help="grid subintervals (default 50000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--threads", type=int, default=1)

    for name in ("ci", "mue"):
        p = sub.add_parser(name, help=f"compute the {name} for a series CSV")
        p.add_argument("series", help="CSV file with a single 'y' column")
        if name == "ci":
            p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP)
        p.add_argument("--table", default=None, help="critical-value CSV (default: bundled)")
        p.add_argument("--out", default=None, help="optional JSON report path")

    p = sub.add_parser("mc", help="run Monte Carlo cells from a scenario config")
    p.add_argument("config", help="scenario configuration file")
    p.add_argument("--out", default=None, help="results CSV path")
    p.add_argument("--table", default=None)
    p.add_argument("--reps", type=int, default=None, help="override replication count")
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("check", help="run deterministic self-tests")
    p.add_argument("--table", default=None, help="also validate this table file")
    return parser


def _fmt6(value):
    if isinstance(value, float):
        return float(f"{value:.6g}")
    return value


def _print_report(report: dict) -> None:
    printable = {k: _fmt6(v) for k, v in report.items()}
    print(json.dumps(printable))


def _read_series_csv(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8-sig") as fh:
        lines = fh.readlines()
    header = None
    values = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if header is None:
            if line != "y":
                raise ParameterError(f"{path}: line {lineno}: expected header 'y', got {line!r}")
            header = line
            continue
        try:
            values.append(float(line))
        except ValueError as exc:
            raise ParameterError(f"{path}: line {lineno}: not a number: {line!r}") from exc
    if header is None:
        raise ParameterError(f"{path}: missing 'y' header")
    if len(values) < 5:
        raise ParameterError(f"{path}: need at least 5 observations, got {len(values)}")
    return np.asarray(values)


def _resolve_table(path):
    return load_table(path) if path else bundled_table()


def _cmd_cv_table(args) -> int:
    cfg = PathGridConfig(n_steps=args.n_steps, n_paths=args.b_paths, seed=args.seed)
    t0 = time.perf_counter()
    table = build_table(BUNDLED_H_GRID, BUNDLED_ALPHA_GRID, cfg, workers=max(1, args.threads))
    save_table(table, args.out)
    wall = time.perf_counter() - t0
    print(
        f"wrote {table.h_grid.size * table.alpha_grid.size} rows to {args.out} "
        f"(paths={cfg.n_paths}, steps={cfg.n_steps}, seed={cfg.seed}, wall={wall:.6g}s)"
    )
    return 0


def _cmd_ci(args) -> int:
    series = _read_series_csv(args.series)
    result = invert_ci(series, args.alpha, _resolve_table(args.table), args.grid_step)
    report = {
        "lower": result.lower,
        "upper": result.upper,
        "alpha": result.alpha,
        "grid_step": result.grid_step,
        "disconnected": result.disconnected,
        "empty": result.empty,
    }
    _print_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh)
            fh.write("\n")
    return 0


def _cmd_mue(args) -> int:
    series = _read_series_csv(args.series)
    result = mue(series, _resolve_table(args.table), args.grid_step)
    report = {
        "rho_low": result.rho_low,
        "rho_up": result.rho_up,
        "estimate": result.estimate,
        "is_point": result.is_point,
        "grid_step": args.grid_step,
    }
    _print_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh)
            fh.write("\n")
    return 0


def _cmd_mc(args) -> int:
    specs = load_scenario_file(args.config)
    if args.reps is not None:
        if args.reps < 1:
            raise ParameterError(f"bad value for 'reps': {args.reps} (must be >= 1)")
        specs = [with_overrides(s, reps=args.reps) for s in specs]
    table = _resolve_table(args.table)
    results = run_grid(specs, table, workers=max(1, args.threads))
    for res in results:
        s = res.summary
        print(
            f"{res.cell_id}: cp={s.cp:.6g} al={s.avg_length:.6g} "
            f"amb={s.abs_median_bias:.6g} empty={s.empty_ci_count} "
            f"mc_se={s.mc_standard_error_cp:.6g}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_results_csv(results))
    return 0


def _check_invariance() -> bool:
    model_base = dict(n=150)
    for rho in (0.0, 0.5, 0.9):
        rng = substream(20_260_809, int(rho * 10))
        u = rng.standard_normal(150)
        t_ref = None
        for mu, y0 in ((0.0, 0.0), (7.0, 250.0), (-3.0, 1e4)):
            y = np.empty(151)
            level = y0
            y[0] = mu + level
            for i in range(150):
                level = rho * level + u[i]
                y[i + 1] = mu + level
            t = icr_estimate(y, rho).t
            if t_ref is None:
                t_ref = t
            elif abs(t - t_ref) > 1e-9 * abs(t_ref):
                return False
    return True


def _check_recursion() -> bool:
    rng = substream(7, 1)
    n = 200
    dw = rng.standard_normal(n) / np.sqrt(n)
    r = np.arange(1, n + 1) / n
    for h in (0.5, 2.0, 10.0):
        fast = simulate_ih_path(h, dw)
        brute = np.array([np.sum(np.exp(-(r[j] - r[: j + 1]) * h) * dw[: j + 1]) for j in range(n)])
        if np.max(np.abs(fast - brute)) > 1e-12:
            return False
    return True


def _check_weight_limits() -> bool:
    r = np.linspace(0.0, 1.0, 1001)
    alpha, beta = alpha_beta(1e-3, r)
    return (
        float(np.max(np.abs(alpha - (4.0 - 6.0 * r)))) <= 0.01
        and float(np.max(np.abs(beta - (12.0 * r - 6.0)))) <= 0.01
    )


def _cmd_check(args) -> int:
    checks = [
        ("initial-condition-invariance", _check_invariance),
        ("exponential-integrator-recursion", _check_recursion),
        ("projection-weight-limits", _check_weight_limits),
    ]
    if args.table:
        def _table_check() -> bool:
            try:
                load_table(args.table)
                return True
            except IcrError:
                return False
        checks.append(("table-validity", _table_check))
    failed = []
    for name, fn in checks:
        ok = fn()
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failed.append(name)
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handlers = {
            "cv-table": _cmd_cv_table,
            "ci": _cmd_ci,
            "mue": _cmd_mue,
            "mc": _cmd_mc,
            "check": _cmd_check,
        }
        return handlers[args.command](args)
    except _CliArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IcrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
