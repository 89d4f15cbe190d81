"""Timing/accuracy harness: direct quaternion arithmetic vs complex route.

Problem sizes follow the m = 3k, n = 2k, p = q = k family.  Both routes see
bitwise-identical random inputs on every trial, so the residual columns are
a cross-route accuracy comparison; the timing column is reported but never
asserted (relative speed depends on BLAS and matrix size, not on anything
this library promises).
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .qcore import QMatrix, random_qmat
from .geninv import outer_right, outer_w_left, pinv_report

__all__ = ["BenchCase", "BenchRecord", "SUITES", "run_bench", "emit_csv"]

CSV_COLUMNS = ["op", "route", "k", "trials", "mean_seconds",
               "res_outer", "res_one", "res_p3", "res_p4"]

SUITES = ("outer_right", "outer_w_left", "pinv_all4")

ROUTES = ("direct", "crep")


@dataclass(frozen=True)
class BenchCase:
    k: int
    trials: int
    seed: int

    @property
    def m(self) -> int:
        return 3 * self.k

    @property
    def n(self) -> int:
        return 2 * self.k

    @property
    def p(self) -> int:
        return self.k

    @property
    def q(self) -> int:
        return self.k


@dataclass(frozen=True)
class BenchRecord:
    op: str
    route: str
    k: int
    trials: int
    mean_seconds: float
    residuals: dict


def _trial_rng(seed, k, trial):
    # keyed so the draw depends only on (seed, k, trial), not on suite order
    return np.random.default_rng([seed, k, trial])


def _inputs_outer_right(case: BenchCase, trial: int):
    rng = _trial_rng(case.seed, case.k, trial)
    a = random_qmat(case.m, case.n, rng)
    s1 = random_qmat(case.n, case.p, rng)
    t1 = random_qmat(case.q, case.m, rng)
    return a, s1, t1


def _inputs_outer_w(case: BenchCase, trial: int):
    rng = _trial_rng(case.seed, case.k, trial)
    a = random_qmat(case.m, case.n, rng)
    w = random_qmat(case.n, case.m, rng)
    return a, w


def _ops_for(suite: str):
    if suite == "outer_right":
        return ["outer_right"]
    if suite == "outer_w_left":
        return ["outer_w_left"]
    if suite == "pinv_all4":
        return ["pinv_svd", "pinv_frd"]
    raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")


def _run_one(op: str, route: str, case: BenchCase, trial: int):
    """One timed constructor call; returns (seconds, residual map)."""
    if op == "outer_right":
        a, s1, t1 = _inputs_outer_right(case, trial)
        start = time.perf_counter()
        rep = outer_right(a, s1, t1, route=route)
        elapsed = time.perf_counter() - start
        return elapsed, {"res_outer": rep.residuals["outer"]}
    if op == "outer_w_left":
        a, w = _inputs_outer_w(case, trial)
        start = time.perf_counter()
        rep = outer_w_left(a, w, route=route)
        elapsed = time.perf_counter() - start
        return elapsed, {"res_outer": rep.residuals["outer"]}
    # pinv realizations: method encoded in the op name
    method = op.split("_")[1]
    rng = _trial_rng(case.seed, case.k, trial)
    a = random_qmat(case.m, case.n, rng)
    start = time.perf_counter()
    rep = pinv_report(a, method=method, route=route)
    elapsed = time.perf_counter() - start
    return elapsed, {"res_outer": rep.residuals["outer"],
                     "res_one": rep.residuals["one"],
                     "res_p3": rep.residuals["p3"],
                     "res_p4": rep.residuals["p4"]}


def run_bench(suite: str, k_list, trials: int, seed: int = 0):
    """Mean times and residuals for every (op, route, k) of the suite."""
    ops = _ops_for(suite)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    records = []
    for k in k_list:
        if k < 1:
            raise ValueError(f"size parameter must be >= 1, got k={k}")
        case = BenchCase(k=int(k), trials=int(trials), seed=int(seed))
        for op in ops:
            for route in ROUTES:
                times = []
                sums: dict = {}
                for trial in range(trials):
                    elapsed, res = _run_one(op, route, case, trial)
                    times.append(elapsed)
                    for key, val in res.items():
                        sums[key] = sums.get(key, 0.0) + val
                means = {key: val / trials for key, val in sums.items()}
                records.append(BenchRecord(
                    op=op, route=route, k=case.k, trials=trials,
                    mean_seconds=sum(times) / trials, residuals=means))
    return records


def emit_csv(records, path) -> None:
    """Write records with the fixed column order; absent residuals stay empty."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            row = [rec.op, rec.route, rec.k, rec.trials,
                   f"{rec.mean_seconds:.17g}"]
            for key in CSV_COLUMNS[5:]:
                val = rec.residuals.get(key)
                row.append("" if val is None else f"{val:.17g}")
            writer.writerow(row)
