"""Convergence reports, their CSV form, and log-log rate fitting."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class RateUndefinedError(ValueError):
    """A rate cannot be fitted (too few points or nonpositive values)."""


def fit_rate(pairs: Sequence) -> float:
    """Least-squares slope of ``log(value)`` against ``log(N)``, smallest ``N`` excluded."""
    pairs = sorted((float(N), float(v)) for N, v in pairs)
    if len(pairs) < 3:
        raise RateUndefinedError("need at least three sweep points")
    if any(not v > 0 for _, v in pairs):
        raise RateUndefinedError("values must be positive")
    N, v = np.array(pairs[1:]).T
    return float(np.polyfit(np.log(N), np.log(v), 1)[0])


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return "None"
    return str(v)


def _parse(s: str):
    if s in ("True", "False"):
        return s == "True"
    if s == "None":
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


@dataclass
class ConvergenceReport:
    """Per-row measurements of one experiment plus fitted slopes and verdict."""

    kind: str
    columns: tuple
    rows: list
    passed: bool
    seed: int = 0
    slopes: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    degenerate: bool = False
    config: list = field(default_factory=list)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# kind={self.kind}\n# seed={self.seed}\n# passed={self.passed}\n"
                  f"# degenerate={self.degenerate}\n")
        for line in self.config:
            buf.write(f"# config.{line}\n")
        for k, v in self.slopes.items():
            buf.write(f"# slope.{k}={_fmt(v)}\n")
        for k, v in self.metrics.items():
            buf.write(f"# metric.{k}={_fmt(v)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ConvergenceReport":
        head: dict = {}
        config, slopes, metrics = [], {}, {}
        body = []
        for line in text.splitlines():
            if line.startswith("# "):
                key, _, val = line[2:].partition("=")
                if key.startswith("config."):
                    config.append(line[len("# config."):])
                elif key.startswith("slope."):
                    slopes[key[len("slope."):]] = _parse(val)
                elif key.startswith("metric."):
                    metrics[key[len("metric."):]] = _parse(val)
                else:
                    head[key] = val
            elif line:
                body.append(line)
        reader = csv.reader(body)
        columns = tuple(next(reader))
        rows = [tuple(_parse(v) for v in r) for r in reader]
        return cls(head["kind"], columns, rows, head["passed"] == "True", int(head["seed"]), slopes, metrics,
                   head["degenerate"] == "True", config)
