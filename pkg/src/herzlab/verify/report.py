"""Check reports, tolerance bands and log-log slope fits."""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from ..errors import InputDomainError

__all__ = ["Band", "CheckReport", "SlopeFit", "slope_fit", "parallel_map", "jsonable", "PASS", "FAIL", "INCONCLUSIVE"]

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Band:
    """Closed interval ``[lower, upper]`` with an optional nominal ``target``."""

    lower: float = -math.inf
    upper: float = math.inf
    target: float | None = None

    @classmethod
    def around(cls, target: float, tol: float) -> "Band":
        return cls(target - tol, target + tol, target)

    @classmethod
    def relative(cls, target: float, rel: float) -> "Band":
        tol = abs(target) * rel
        return cls(target - tol, target + tol, target)

    @classmethod
    def at_most(cls, upper: float) -> "Band":
        return cls(-math.inf, upper)

    @classmethod
    def at_least(cls, lower: float) -> "Band":
        return cls(lower, math.inf)

    def contains(self, value: float) -> bool:
        return bool(np.isfinite(value)) and self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        return {"lower": _num(self.lower), "upper": _num(self.upper), "target": _num(self.target)}


def _num(v):
    """JSON-safe float: infinities become strings, None passes through."""
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


@dataclass
class CheckReport:
    """Outcome of one verification check.

    ``verdict`` is derived by :meth:`evaluate`: pass iff every measured value
    with a band lies inside it, unless the check marked itself inconclusive.
    ``points`` holds raw measurement rows for plotting.
    """

    check_name: str
    measured: dict[str, float] = field(default_factory=dict)
    expected: dict[str, Band] = field(default_factory=dict)
    verdict: str = INCONCLUSIVE
    samples: int = 0
    runtime: float = 0.0
    params: dict = field(default_factory=dict)
    points: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def evaluate(self, inconclusive: bool = False) -> "CheckReport":
        if inconclusive or not self.expected:
            self.verdict = INCONCLUSIVE
            return self
        ok = all(name in self.measured and band.contains(self.measured[name]) for name, band in self.expected.items())
        self.verdict = PASS if ok else FAIL
        return self

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def failures(self) -> list[str]:
        return [n for n, b in self.expected.items() if not (n in self.measured and b.contains(self.measured[n]))]

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = {
            "check_name": self.check_name,
            "verdict": self.verdict,
            "measured": {k: _num(v) for k, v in self.measured.items()},
            "expected": {k: b.to_dict() for k, b in self.expected.items()},
            "samples": self.samples,
            "runtime": self.runtime,
            "params": jsonable(self.params),
            "notes": list(self.notes),
        }
        if not include_runtime:
            d.pop("runtime")
        return d

    def to_json(self, path: str | Path | None = None, include_runtime: bool = True) -> str:
        d = self.to_dict(include_runtime)
        text = json.dumps(d, indent=2, sort_keys=True)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        cols: list[str] = []
        for row in self.points:
            cols.extend(c for c in row if c not in cols)
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            for row in self.points:
                w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()})
        return path

    def summary_line(self) -> str:
        shown = ", ".join(f"{k}={v:.6g}" for k, v in self.measured.items() if k in self.expected)
        return f"{self.verdict.upper():12s} {self.check_name}: {shown}"


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if hasattr(obj, "__dataclass_fields__"):
        return jsonable({k: getattr(obj, k) for k in obj.__dataclass_fields__})
    return obj


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float


def slope_fit(points: Sequence[tuple[float, float]]) -> SlopeFit:
    """Least-squares slope of log y against log x; ``residual`` is the RMS log misfit."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise InputDomainError("slope_fit needs at least three (x, y) pairs")
    if not (np.all(np.isfinite(pts)) and np.all(pts > 0)):
        raise InputDomainError("slope_fit needs finite positive data")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, icpt), *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = ly - A @ np.array([slope, icpt])
    return SlopeFit(float(slope), float(icpt), float(np.sqrt(np.mean(res**2))))


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("HERZLAB_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Iterable) -> list:
    """Order-preserving map over a thread pool capped by HERZLAB_THREADS (default 1)."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
