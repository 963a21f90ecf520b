"""Named verification suites run by ``spinlimit verify``.

Each check returns a plain dict so the CLI can serialize it directly.  Work
is split over spins; results come back in input order whatever the worker
count, so reports are reproducible.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

from gmpy2 import mpq

from .asymptotics import gamma_integral
from .coupling import (
    check_m_recurrence,
    descend_from_stretched,
    literal_factorial_radicand,
    reduced_family,
    stretched_factorial_radicand,
    stretched_weighted,
    zero_projection_cg,
)
from .exact import DEFAULT_PRECISION, HalfInt, SqrtRational, format_sci
from .moyal import induction_solve, limit_table, t_values, verify_finite_recurrence, verify_sum_rule

SUITES = ("recurrence", "finite-d", "limit-table", "completeness", "stretched")
DEFAULT_FINITE_TWO_S = (1, 2, 10, 20, 50)


def _check(suite: str, name: str, passed: bool, cases: int, worst: str = "0", detail: str = "") -> dict:
    record = {
        "suite": suite,
        "check": name,
        "status": "pass" if passed else "fail",
        "cases": cases,
        "worst_residual": worst,
    }
    if detail:
        record["detail"] = detail
    return record


def _fan_out(fn: Callable, items: Sequence, workers: int) -> list:
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _recurrence_for_spin(two_s: int):
    failures, cases = [], 0
    for l in range(two_s + 1):
        verdict = check_m_recurrence(HalfInt(two_s), l)
        cases += verdict.checked
        if not verdict.passed:
            failures.append(f"s={HalfInt(two_s)} l={l} m={verdict.first_failure}")
    return cases, failures


def _oracles_for_spin(two_s: int):
    spin = HalfInt(two_s)
    failures, cases = [], 0
    for l in range(two_s + 1):
        family = reduced_family(spin, l)
        descent = descend_from_stretched(spin, l, two_s)
        for n in range(two_s + 1):
            m = HalfInt(two_s - 2 * n)
            racah = zero_projection_cg(spin, m, l)
            cases += 1
            if not (racah == family.coefficient(m) == descent[n]):
                failures.append(f"s={spin} l={l} m={m}")
    return cases, failures


def _completeness_for_spin(two_s: int):
    spin = HalfInt(two_s)
    totals = {HalfInt(tm): mpq(0) for tm in range(-two_s, two_s + 1, 2)}
    for l in range(two_s + 1):
        family = reduced_family(spin, l)
        for m in totals:
            totals[m] += family.coefficient(m).radicand
    failures = [f"s={spin} m={m} sum={v}" for m, v in totals.items() if v != 1]
    return len(totals), failures


def _stretched_for_spin(two_s: int):
    spin = HalfInt(two_s)
    failures, literal_ok = [], 0
    for l in range(two_s + 1):
        racah = zero_projection_cg(spin, spin, l)
        weighted = stretched_weighted(spin, l)
        if weighted * SqrtRational(1, mpq(2 * l + 1, two_s + 1)) != racah:
            failures.append(f"product form s={spin} l={l}")
        if stretched_factorial_radicand(spin, l) != weighted.radicand:
            failures.append(f"factorial form s={spin} l={l}")
        if literal_factorial_radicand(spin, l) * (two_s + 1) != weighted.radicand:
            failures.append(f"missing-factor ratio s={spin} l={l}")
        literal_ok += literal_factorial_radicand(spin, l) == weighted.radicand
    return two_s + 1, failures, literal_ok


def _summarize(suite: str, name: str, results, vacuous_note: str = "") -> dict:
    cases = sum(r[0] for r in results)
    failures = [f for r in results for f in r[1]]
    record = _check(
        suite,
        name,
        not failures,
        cases,
        "0" if not failures else "nonzero",
        "; ".join(failures[:5]),
    )
    if cases == 0 and vacuous_note:
        record["warning"] = vacuous_note
    return record


def run_recurrence(max_two_s: int, workers: int = 1) -> list[dict]:
    spins = list(range(1, max_two_s + 1))
    note = "vacuous: no (l, m) to check for 2s <= 0"
    return [
        _summarize("recurrence", "m-recurrence exact", _fan_out(_recurrence_for_spin, spins, workers), note),
        _summarize("recurrence", "racah = reduced = descent", _fan_out(_oracles_for_spin, spins, workers), note),
    ]


def run_completeness(max_two_s: int, workers: int = 1) -> list[dict]:
    spins = list(range(1, max_two_s + 1))
    return [
        _summarize(
            "completeness",
            "sum over l of squares is 1",
            _fan_out(_completeness_for_spin, spins, workers),
            "vacuous: no spins with 2s >= 1",
        )
    ]


def run_stretched(max_two_s: int, workers: int = 1) -> list[dict]:
    spins = list(range(1, max_two_s + 1))
    results = _fan_out(_stretched_for_spin, spins, workers)
    record = _summarize("stretched", "product and corrected factorial forms", [r[:2] for r in results])
    literal = sum(r[2] for r in results)
    record["literal_factorial_form_matches"] = literal
    return [record]


def run_finite_d(
    two_s_values: Sequence[int] = DEFAULT_FINITE_TWO_S,
    k_max: int = 4,
    precision: int = DEFAULT_PRECISION,
) -> list[dict]:
    records = []
    for two_s in two_s_values:
        n_max = min(5, two_s - 1) if two_s > 1 else 0
        report = verify_finite_recurrence(HalfInt(two_s), k_max, n_max, precision)
        records.append(
            _check(
                "finite-d",
                f"finite recurrence s={HalfInt(two_s)}",
                report.passed,
                len(report.residuals),
                format_sci(report.max_relative, precision),
                f"relative to largest term; tolerance 2^{report.tolerance_exponent}",
            )
        )
    return records


def run_limit_table(k_max: int = 30) -> list[dict]:
    table = limit_table(k_max, k_max)
    closed = [k for k in range(k_max + 1) if table.entry(k, 0) != gamma_integral(k)]
    sum_rule = verify_sum_rule(table, k_max)
    t_bad = []
    for k in range(k_max + 1):
        ts = t_values(table, k)
        if min(ts) != max(ts) or ts[0] != gamma_integral(k):
            t_bad.append(k)
    induction = induction_solve(k_max)
    return [
        _check("limit-table", "D[k,0] = 2^(k+1) k!", not closed, k_max + 1,
               detail=f"first failing k={closed[0]}" if closed else f"D[{k_max},0]={table.entry(k_max, 0)}"),
        _check("limit-table", "sum rule", sum_rule.passed, sum_rule.checked,
               detail="" if sum_rule.passed else f"first failing k={sum_rule.first_failure}"),
        _check("limit-table", "T_k^N independent of N", not t_bad, k_max + 1,
               detail=f"failing k={t_bad[:5]}" if t_bad else ""),
        _check("limit-table", "induction gives D[0,n] = 2", all(x == 2 for x in induction), k_max + 1),
    ]


def run_suite(
    name: str,
    max_two_s: int = 30,
    k_max: int = 30,
    finite_two_s: Sequence[int] = DEFAULT_FINITE_TWO_S,
    precision: int = DEFAULT_PRECISION,
    workers: int = 1,
) -> list[dict]:
    if name == "all":
        out = []
        for suite in SUITES:
            out += run_suite(suite, max_two_s, k_max, finite_two_s, precision, workers)
        return out
    if name == "recurrence":
        return run_recurrence(max_two_s, workers)
    if name == "completeness":
        return run_completeness(max_two_s, workers)
    if name == "stretched":
        return run_stretched(max_two_s, workers)
    if name == "finite-d":
        return run_finite_d(finite_two_s, 4, precision)
    if name == "limit-table":
        return run_limit_table(k_max)
    raise ValueError(f"unknown suite {name!r}")
