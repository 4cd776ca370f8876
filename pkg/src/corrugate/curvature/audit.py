"""Identity battery for the curvature engine and discrepancy reporting.

Each check compares two independent evaluations of the same quantity.  A
comparison exceeding its tolerance becomes a :class:`Discrepancy` row instead of
an exception, so formula disagreements are recorded as findings.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .backend import compiled_available, ricci_scalar
from .engine import (MetricJet2, diagonal_metric_jet, diagonal_ricci_parts, diagonal_scalar_parts,
                     ricci_from_riemann, ricci_numpy, ricci_split, scalar_split)

COLUMNS = ("formula_id", "point", "lhs", "rhs", "abs_err", "rel_err")


@dataclass(frozen=True)
class Discrepancy:
    formula_id: str
    point: str
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float

    def to_row(self) -> list:
        return [self.formula_id, self.point, repr(self.lhs), repr(self.rhs), repr(self.abs_err), repr(self.rel_err)]


def discrepancies_to_csv(rows: Sequence[Discrepancy], header: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.to_row())
    return buf.getvalue()


def discrepancies_from_csv(text: str) -> list:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(lines)
    next(reader)
    return [Discrepancy(r[0], r[1], float(r[2]), float(r[3]), float(r[4]), float(r[5])) for r in reader]


def random_metric_jet(rng: np.random.Generator, n: int, batch: tuple = ()) -> MetricJet2:
    """Well-conditioned SPD metric with generic symmetric first and second derivatives."""
    A = rng.normal(size=batch + (n, n))
    g = A @ np.swapaxes(A, -1, -2) + n * np.eye(n)
    dg = rng.normal(size=batch + (n, n, n))
    dg = 0.5 * (dg + np.swapaxes(dg, -2, -3))
    d2g = rng.normal(size=batch + (n, n, n, n))
    d2g = 0.5 * (d2g + np.swapaxes(d2g, -3, -4))
    d2g = 0.5 * (d2g + np.swapaxes(d2g, -1, -2))
    return MetricJet2(g, dg, d2g)


def random_diagonal_exponents(rng: np.random.Generator, n: int, batch: tuple = ()):
    f = 0.3 * rng.normal(size=batch + (n,))
    df = rng.normal(size=batch + (n, n))
    d2f = rng.normal(size=batch + (n, n, n))
    d2f = 0.5 * (d2f + np.swapaxes(d2f, -1, -2))
    return f, df, d2f


def _rel(lhs, rhs) -> tuple:
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    abs_err = float(np.abs(lhs - rhs).max())
    scale = max(float(np.abs(rhs).max()), float(np.abs(lhs).max()), 1e-300)
    return abs_err, abs_err / scale


@dataclass
class BatteryResult:
    rows: list = field(default_factory=list)
    max_rel: dict = field(default_factory=dict)
    max_abs: dict = field(default_factory=dict)
    count: int = 0

    def record(self, formula_id: str, point: str, lhs, rhs, tol: float, relative: bool = True):
        abs_err, rel_err = _rel(lhs, rhs)
        self.max_rel[formula_id] = max(self.max_rel.get(formula_id, 0.0), rel_err)
        self.max_abs[formula_id] = max(self.max_abs.get(formula_id, 0.0), abs_err)
        measure = rel_err if relative else abs_err
        if measure > tol:
            l = float(np.asarray(lhs).ravel()[np.argmax(np.abs(np.asarray(lhs) - np.asarray(rhs)).ravel())])
            r = float(np.asarray(rhs).ravel()[np.argmax(np.abs(np.asarray(lhs) - np.asarray(rhs)).ravel())])
            self.rows.append(Discrepancy(formula_id, point, l, r, abs_err, rel_err))


def run_identity_battery(seed: int, dims: Sequence[int] = (2, 3, 4), count: int = 50,
                         tol_split: float = 1e-9, tol_diag: float = 1e-10) -> BatteryResult:
    """Compare every pair of independent curvature evaluations on random jets."""
    rng = np.random.default_rng(seed)
    res = BatteryResult()
    for n in dims:
        for s in range(count):
            point = f"n={n}#{s}"
            mj = random_metric_jet(rng, n)
            ric, scal = ricci_numpy(mj)
            R2, R1 = ricci_split(mj)
            S2, S1 = scalar_split(mj)
            ric_t, scal_t = ricci_from_riemann(mj)
            res.record("ricci_split", point, R2 + R1, ric, tol_split)
            res.record("scalar_split", point, S2 + S1, scal, tol_split)
            res.record("riemann_trace", point, scal_t, scal, tol_split)
            res.record("ricci_symmetry", point, ric, np.swapaxes(ric, -1, -2), tol_split)
            if compiled_available():
                ric_c, scal_c = ricci_scalar(mj, "compiled")
                res.record("compiled_kernel", point, scal_c, scal, tol_split)
            f, df, d2f = random_diagonal_exponents(rng, n)
            dj = diagonal_metric_jet(f, df, d2f)
            ric_d, scal_d = ricci_numpy(dj)
            dS2, dS1 = diagonal_scalar_parts(f, df, d2f)
            dR2, dR1 = diagonal_ricci_parts(f, df, d2f)
            res.record("diagonal_scalar", point, dS2 + dS1, scal_d, tol_diag)
            res.record("diagonal_ricci", point, dR2 + dR1, ric_d, tol_diag)
            res.count += 1
    return res
