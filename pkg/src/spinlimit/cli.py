"""Command-line front end.

Usage:
    spinlimit cg --two-s 2 --two-m 2 --l 2
    spinlimit converge --n 0 --s-min 20 --s-max 5120
    spinlimit verify all --max-two-s 20
    spinlimit table limit --k-max 2 --n-max 2

Spins and projections are given as twice their value.  Exit codes: 0 on
success, 1 when a verification fails, 2 on usage or input errors.
"""

from __future__ import annotations

import csv
import io
import json
import os
import platform
import sys
import time
from functools import wraps

import click

from . import __version__
from .coupling import zero_projection_cg
from .exact import (
    MIN_PRECISION,
    HalfInt,
    ParityError,
    RangeError,
    decimal_digits,
    format_fixed,
    format_sci,
)
from .moyal import convergence_study, d_finite, limit_table
from .suites import DEFAULT_FINITE_TWO_S, SUITES, run_suite

SCHEMA_VERSION = 1
JSON_SAFE_INT = 2**53
# cells allowed in a single emitted table
TABLE_CELL_BUDGET = 1_000_000
FINITE_TWO_S_LIMIT = 20_000


def _parse_workers(ctx, param, value):
    if value == "auto":
        return os.cpu_count() or 1
    try:
        workers = int(value)
    except ValueError:
        raise click.BadParameter("expected a positive integer or 'auto'")
    if workers < 1:
        raise click.BadParameter("worker count must be at least 1")
    return workers


def _parse_int_list(ctx, param, value):
    if value is None:
        return None
    try:
        return [int(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter("expected a comma-separated list of integers")


def common_options(fn):
    @click.option("--precision", type=click.IntRange(min=MIN_PRECISION), default=256, show_default=True,
                  help="Binary precision of floating results.")
    @click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
                  help="Output format (default depends on the command).")
    @click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                  help="Write data here instead of standard output.")
    @click.option("--workers", default="1", callback=_parse_workers, show_default=True,
                  help="Worker processes, or 'auto'.")
    @click.option("--meta", is_flag=True, help="Attach run metadata (timestamps, versions).")
    @wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def _json_int(x: int):
    return str(x) if abs(x) > JSON_SAFE_INT else x


def _metadata(started: float) -> dict:
    return {
        "version": __version__,
        "python": platform.python_version(),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_seconds": round(time.time() - started, 3),
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _document(command: str, params: dict, rows: list, summary: dict, meta: dict | None) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": params,
        "rows": rows,
        "summary": summary,
    }
    if meta is not None:
        doc["meta"] = meta
    return json.dumps(doc, indent=2) + "\n"


def _csv(header: list, rows: list, trailer: list[str] = (), meta: dict | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    for line in trailer:
        buf.write(f"# {line}\n")
    if meta is not None:
        for key, value in meta.items():
            buf.write(f"# meta {key}: {value}\n")
    return buf.getvalue()


@click.group()
@click.version_option(__version__, prog_name="spinlimit")
def main():
    """Exact coupling coefficients and their large-spin sum rules."""


@main.command("cg")
@click.option("--two-s", type=int, required=True, help="2s.")
@click.option("--two-m", type=int, required=True, help="2m.")
@click.option("--l", "l", type=int, required=True, help="Coupled angular momentum l.")
@common_options
def cmd_cg(two_s, two_m, l, precision, fmt, out, workers, meta):
    """Print <s m s -m | l 0> exactly."""
    started = time.time()
    if two_s < 0:
        raise click.UsageError("range rule: 2s must be nonnegative")
    if (two_s - two_m) % 2:
        raise click.UsageError("parity rule: 2s and 2m must have the same parity (s - m integer)")
    if abs(two_m) > two_s:
        raise click.UsageError("projection rule: |m| must not exceed s")
    if l < 0:
        raise click.UsageError("range rule: l must be nonnegative")

    note = ""
    if l > two_s:
        note = "l exceeds 2s"
    try:
        value = zero_projection_cg(HalfInt(two_s), HalfInt(two_m), l)
    except (RangeError, ParityError) as exc:
        raise click.UsageError(str(exc))
    if value.is_zero() and not note:
        note = "selection rule"
    decimal = value.to_float(precision)
    exact = str(value)

    if fmt is None:
        text = exact
        if not value.is_zero():
            text += f" ≈ {format_fixed(decimal, decimal_digits(precision))}"
        if note:
            text += f" ({note})"
        _emit(text + "\n", out)
        return
    row = {
        "sign": value.sign,
        "radicand": str(value.radicand),
        "value": format_sci(decimal, precision),
    }
    meta_doc = _metadata(started) if meta else None
    if fmt == "json":
        summary = {"exact": exact}
        if note:
            summary["note"] = note
        params = {"two_s": two_s, "two_m": two_m, "l": l, "precision": precision}
        _emit(_document("cg", params, [row], summary, meta_doc), out)
    else:
        _emit(_csv(list(row), [list(row.values())], [f"note: {note}"] if note else [], meta_doc), out)


def _build_grid(grid, s_min, s_max, kind, step, ratio):
    if grid is not None:
        return grid
    if s_min < 1:
        raise click.UsageError("grid rule: 2s_min must be at least 1")
    if s_max is None:
        s_max = s_min
    if s_max < s_min:
        raise click.UsageError("grid rule: s_max must not be below s_min")
    values = []
    x = s_min
    if kind == "geometric":
        if ratio < 2:
            raise click.UsageError("grid rule: geometric ratio must be at least 2")
        while x <= s_max:
            values.append(x)
            x *= ratio
    else:
        step = step or s_min
        if step < 1:
            raise click.UsageError("grid rule: linear step must be positive")
        while x <= s_max:
            values.append(x)
            x += step
    return values


@main.command("converge")
@click.option("--n", "n", type=click.IntRange(min=0), required=True, help="Index n of S_n.")
@click.option("--grid", callback=_parse_int_list, default=None,
              help="Explicit comma-separated list of 2s values.")
@click.option("--s-min", "--two-s-min", "s_min", type=int, default=20, show_default=True,
              help="Smallest 2s of a generated grid.")
@click.option("--s-max", "--two-s-max", "s_max", type=int, default=5120, show_default=True,
              help="Largest 2s of a generated grid.")
@click.option("--grid-kind", type=click.Choice(["geometric", "linear"]), default="geometric", show_default=True)
@click.option("--ratio", type=int, default=2, show_default=True, help="Geometric grid ratio.")
@click.option("--step", type=int, default=None, help="Linear grid step in 2s (default 2s_min).")
@common_options
def cmd_converge(n, grid, s_min, s_max, grid_kind, ratio, step, precision, fmt, out, workers, meta):
    """Convergence study of S_n(s) towards 2."""
    started = time.time()
    two_s_values = _build_grid(grid, s_min, s_max, grid_kind, step, ratio)
    if not two_s_values:
        raise click.UsageError("grid rule: empty grid")
    if any(b <= a for a, b in zip(two_s_values, two_s_values[1:])):
        raise click.UsageError("grid rule: 2s values must be strictly increasing")
    if two_s_values[0] < max(n, 1):
        raise click.UsageError(f"range rule: need 2s >= n and s > 0 (2s={two_s_values[0]}, n={n})")

    report = convergence_study(n, [HalfInt(t) for t in two_s_values], precision, workers)
    slope = None if report.fitted_slope is None else float(f"{report.fitted_slope:.12g}")
    rows = [
        [spin.twice, format_sci(total, precision), format_sci(err, precision)]
        for spin, total, err in zip(report.grid, report.sums, report.abs_errors)
    ]
    meta_doc = _metadata(started) if meta else None
    if fmt == "json":
        params = {"n": n, "grid": two_s_values, "precision": precision}
        json_rows = [dict(zip(["two_s", "S_n_s", "abs_error"], row)) for row in rows]
        _emit(_document("converge", params, json_rows, {"fitted_slope": slope}, meta_doc), out)
    else:
        trailer = [f"fitted_slope: {'null' if slope is None else slope}"]
        _emit(_csv(["two_s", "S_n_s", "abs_error"], rows, trailer, meta_doc), out)


@main.command("verify")
@click.argument("suite", type=click.Choice(list(SUITES) + ["all"]))
@click.option("--max-two-s", type=click.IntRange(min=0), default=30, show_default=True,
              help="Largest 2s for the exact suites.")
@click.option("--k-max", type=click.IntRange(min=0), default=30, show_default=True,
              help="Largest k for the limit-table suite.")
@click.option("--finite-two-s", callback=_parse_int_list,
              default=",".join(map(str, DEFAULT_FINITE_TWO_S)), show_default=True,
              help="2s values for the finite-d suite.")
@common_options
def cmd_verify(suite, max_two_s, k_max, finite_two_s, precision, fmt, out, workers, meta):
    """Run a verification suite; exit 1 if any check fails."""
    started = time.time()
    if any(t < 1 for t in finite_two_s):
        raise click.UsageError("range rule: finite-d spins need 2s >= 1")
    records = run_suite(suite, max_two_s, k_max, finite_two_s, precision, workers)
    for record in records:
        if "warning" in record:
            click.echo(f"warning: {record['check']}: {record['warning']}", err=True)
    failed = [r for r in records if r["status"] != "pass"]
    summary = {"checks": len(records), "failed": len(failed), "status": "fail" if failed else "pass"}
    meta_doc = _metadata(started) if meta else None
    if fmt == "csv":
        header = ["suite", "check", "status", "cases", "worst_residual"]
        rows = [[r[h] for h in header] for r in records]
        _emit(_csv(header, rows, [f"status: {summary['status']}"], meta_doc), out)
    else:
        params = {"suite": suite, "max_two_s": max_two_s, "k_max": k_max,
                  "finite_two_s": finite_two_s, "precision": precision}
        _emit(_document("verify", params, records, summary, meta_doc), out)
    sys.exit(1 if failed else 0)


@main.command("table")
@click.argument("kind", type=click.Choice(["limit", "finite"]))
@click.option("--two-s", type=int, default=None, help="2s (finite tables only).")
@click.option("--k-max", type=click.IntRange(min=0), required=True)
@click.option("--n-max", type=click.IntRange(min=0), required=True)
@common_options
def cmd_table(kind, two_s, k_max, n_max, precision, fmt, out, workers, meta):
    """Dump a D[k, n] table, exact in the limit or at finite spin."""
    started = time.time()
    cells = (k_max + 1) * (n_max + k_max + 1)
    if cells > TABLE_CELL_BUDGET:
        raise click.UsageError(f"table of {cells} cells exceeds the budget of {TABLE_CELL_BUDGET}")
    if kind == "limit":
        rows = limit_table(k_max, n_max).rows()
        params = {"kind": kind, "k_max": k_max, "n_max": n_max}
        body = rows
        json_body = [[_json_int(x) for x in row] for row in rows]
    else:
        if two_s is None:
            raise click.UsageError("finite tables need --two-s")
        if two_s < 1 or two_s > FINITE_TWO_S_LIMIT:
            raise click.UsageError(f"range rule: need 1 <= 2s <= {FINITE_TWO_S_LIMIT}")
        if n_max > two_s:
            raise click.UsageError("range rule: n_max must not exceed 2s")
        table = d_finite(HalfInt(two_s), k_max, n_max, precision)
        body = [[format_sci(v, precision) for v in row] for row in table.rows()]
        json_body = body
        params = {"kind": kind, "two_s": two_s, "k_max": k_max, "n_max": n_max, "precision": precision}
    header = ["k"] + [f"n{n}" for n in range(n_max + 1)]
    meta_doc = _metadata(started) if meta else None
    if fmt == "json":
        json_rows = [{"k": k, "values": row} for k, row in enumerate(json_body)]
        _emit(_document("table", params, json_rows, {"rows": k_max + 1, "columns": n_max + 1}, meta_doc), out)
    else:
        _emit(_csv(header, [[k] + row for k, row in enumerate(body)], meta=meta_doc), out)


if __name__ == "__main__":
    main()
