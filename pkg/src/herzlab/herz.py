"""Homogeneous Herz norms and Herz-type Triebel-Lizorkin quasi-norms on a grid.

Annuli are ``R_k = {2^{k-1} < |x| <= 2^k}`` with membership decided by the
node (cell center). The sum over k is truncated to ``[k_min, k_max]``; nodes
with ``|x| <= 2^{k_min - 1}`` (the origin included) are counted in the
innermost annulus ``k_min`` and nodes beyond ``2^{k_max}`` are dropped.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .field import GridSpec, SampledField, forward, inverse
from .lpdecomp import DyadicSystem, PeetreParams, _peetre_sup, lp_blocks

__all__ = [
    "HerzParams",
    "TLParams",
    "herz_norm",
    "ktl_norm",
    "ktl_norm_peetre",
    "ktl_norms",
    "lq_norm",
    "norm_breakdown",
    "export_breakdown_csv",
]

INF = math.inf


@dataclass(frozen=True)
class HerzParams:
    """Exponents of the Herz space K^alpha_{p,q}; ``k_min``/``k_max`` default from the grid."""

    p: float
    q: float
    alpha: float
    k_min: int | None = None
    k_max: int | None = None

    def __post_init__(self):
        if not (0 < self.p < INF):
            raise ParameterError(f"p must lie in (0, inf), got {self.p}")
        if not (self.q > 0):
            raise ParameterError(f"q must lie in (0, inf], got {self.q}")

    def resolve(self, grid: GridSpec) -> "HerzParams":
        """Fill default annulus bounds and validate against ``grid``."""
        k_min = self.k_min
        k_max = self.k_max
        if k_min is None:
            k_min = int(math.ceil(math.log2(grid.spacing))) + 1
        if k_max is None:
            k_max = int(math.floor(math.log2(grid.halfwidth * math.sqrt(grid.dim))))
        if not self.alpha > -grid.dim / self.p:
            raise ParameterError(f"alpha={self.alpha} must exceed -n/p={-grid.dim / self.p}")
        if not k_min <= k_max:
            raise ParameterError(f"empty annulus range [{k_min}, {k_max}]")
        if 2.0**k_min < grid.spacing * (1 - 1e-12):
            raise ParameterError(f"2^k_min={2.0**k_min} is below the grid spacing {grid.spacing}")
        if 2.0**k_max > grid.halfwidth * math.sqrt(grid.dim) * (1 + 1e-12):
            raise ParameterError(f"2^k_max={2.0**k_max} exceeds the domain radius")
        return replace(self, k_min=k_min, k_max=k_max)


@dataclass(frozen=True)
class TLParams:
    """Exponents of K^alpha_{p,q} F^s_beta."""

    herz: HerzParams
    s: float
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ParameterError(f"beta must lie in (0, inf], got {self.beta}")

    @classmethod
    def make(cls, p, q, alpha, s, beta, k_min=None, k_max=None) -> "TLParams":
        return cls(HerzParams(p, q, alpha, k_min, k_max), s, beta)

    @property
    def p(self) -> float:
        return self.herz.p

    @property
    def q(self) -> float:
        return self.herz.q

    @property
    def alpha(self) -> float:
        return self.herz.alpha

    def sigma_p(self, n: int) -> float:
        return n * max(1.0 / self.p - 1.0, 0.0)

    def sigma_p_beta(self, n: int) -> float:
        return n * max(1.0 / self.p - 1.0, 1.0 / self.beta - 1.0, 0.0)

    def with_(self, **changes) -> "TLParams":
        herz_keys = {"p", "q", "alpha", "k_min", "k_max"}
        hz = replace(self.herz, **{k: v for k, v in changes.items() if k in herz_keys})
        rest = {k: v for k, v in changes.items() if k not in herz_keys}
        return replace(self, herz=hz, **rest)


def lq_norm(a: np.ndarray, q: float, axis: int = -1) -> np.ndarray:
    """(sum |a|^q)^(1/q) along ``axis``, sup for q = inf; scaled against overflow."""
    a = np.abs(a)
    m = np.max(a, axis=axis, keepdims=True)
    if q == INF:
        return np.squeeze(m, axis=axis)
    safe = np.where(m > 0, m, 1.0)
    s = np.sum((a / safe) ** q, axis=axis, keepdims=True) ** (1.0 / q)
    return np.squeeze(np.where(m > 0, m * s, 0.0), axis=axis)


@lru_cache(maxsize=32)
def _annulus_layout(grid: GridSpec, k_min: int, k_max: int):
    """Node permutation grouping cells by annulus, plus segment starts for reduceat."""
    r = grid.radius().ravel()
    with np.errstate(divide="ignore"):
        k = np.ceil(np.log2(r))
    k[r == 0] = k_min
    k = np.maximum(k, k_min).astype(int)
    keep = np.flatnonzero(k <= k_max)
    order = keep[np.argsort(k[keep], kind="stable")]
    ks = k[order]
    present, starts = np.unique(ks, return_index=True)
    return order, starts, present


def _annulus_lp(absvals: np.ndarray, grid: GridSpec, hp: HerzParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-annulus L^p norms for a stack ``(..., *grid.shape)``; returns (ks, norms[..., len(ks)])."""
    order, starts, present = _annulus_layout(grid, hp.k_min, hp.k_max)
    lead = absvals.shape[: absvals.ndim - grid.dim]
    flat = absvals.reshape(lead + (-1,))[..., order]
    p = hp.p
    m = np.max(flat, axis=-1, keepdims=True) if flat.size else np.zeros(lead + (1,))
    safe = np.where(m > 0, m, 1.0)
    sums = np.add.reduceat((flat / safe) ** p, starts, axis=-1)
    norms = safe * (sums * grid.cell_volume) ** (1.0 / p)
    norms = np.where(m > 0, norms, 0.0)
    return present, norms


def _herz_from_abs(absvals: np.ndarray, grid: GridSpec, hp: HerzParams) -> np.ndarray:
    ks, norms = _annulus_lp(absvals, grid, hp)
    weighted = norms * 2.0 ** (ks * hp.alpha)
    return lq_norm(weighted, hp.q, axis=-1)


def herz_norm(f: SampledField | np.ndarray, hp: HerzParams, grid: GridSpec | None = None) -> float:
    """Truncated K^alpha_{p,q} norm by midpoint quadrature over dyadic annuli."""
    if isinstance(f, SampledField):
        grid, vals = f.grid, f.samples
    else:
        vals = np.asarray(f)
        if grid is None:
            raise ParameterError("a raw array needs its grid")
    hp = hp.resolve(grid)
    return float(_herz_from_abs(np.abs(vals), grid, hp))


def _aggregate(blocks_abs: np.ndarray, s: float, beta: float, axis: int = 0) -> np.ndarray:
    shape = [1] * blocks_abs.ndim
    shape[axis] = blocks_abs.shape[axis]
    w = 2.0 ** (s * np.arange(blocks_abs.shape[axis])).reshape(shape)
    return lq_norm(w * blocks_abs, beta, axis=axis)


def ktl_norm(f: SampledField, tp: TLParams, sys: DyadicSystem) -> float:
    """K^alpha_{p,q} F^s_beta quasi-norm: Herz norm of the l_beta aggregate of 2^{js}|phi_j * f|."""
    sys.check_grid(f)
    hp = tp.herz.resolve(f.grid)
    agg = _aggregate(np.abs(lp_blocks(f, sys)), tp.s, tp.beta)
    return float(_herz_from_abs(agg, f.grid, hp))


def ktl_norms(values: np.ndarray, tp: TLParams, sys: DyadicSystem, chunk: int = 32) -> np.ndarray:
    """:func:`ktl_norm` for a stack of real sample arrays ``(m, *grid.shape)``."""
    grid = sys.grid
    hp = tp.herz.resolve(grid)
    out = np.empty(values.shape[0])
    for start in range(0, values.shape[0], chunk):
        spec = forward(values[start:start + chunk], grid)
        blocks = inverse(sys.multipliers[None] * spec[:, None], grid)
        agg = _aggregate(np.abs(blocks), tp.s, tp.beta, axis=1)
        out[start:start + chunk] = _herz_from_abs(agg, grid, hp)
    return out


def ktl_norm_peetre(f: SampledField, tp: TLParams, sys: DyadicSystem, pp: PeetreParams) -> float:
    """Same aggregation as :func:`ktl_norm` with Peetre maximal functions in place of |phi_j * f|."""
    sys.check_grid(f)
    n = f.grid.dim
    if not pp.admissible(n, tp.p, tp.beta):
        warnings.warn(
            f"Peetre exponent a={pp.a} <= n/min(p, beta)={n / min(tp.p, tp.beta):.4g}; "
            "norm equivalence is not guaranteed",
            stacklevel=2,
        )
    hp = tp.herz.resolve(f.grid)
    blocks = np.abs(lp_blocks(f, sys))
    maxed = np.stack([_peetre_sup(blocks[j], f.grid, 2.0**j, pp.a) for j in sys.levels])
    agg = _aggregate(maxed, tp.s, tp.beta)
    return float(_herz_from_abs(agg, f.grid, hp))


def norm_breakdown(f: SampledField, tp: TLParams, sys: DyadicSystem) -> list[dict]:
    """Per-(level, annulus) contributions ``2^{k alpha} || 2^{js} phi_j*f chi_k ||_p``."""
    sys.check_grid(f)
    hp = tp.herz.resolve(f.grid)
    blocks = np.abs(lp_blocks(f, sys))
    rows = []
    for j in sys.levels:
        ks, norms = _annulus_lp(2.0 ** (j * tp.s) * blocks[j], f.grid, hp)
        for k, v in zip(ks, norms):
            rows.append({"j": j, "k": int(k), "contribution": float(v * 2.0 ** (k * hp.alpha))})
    return rows


def export_breakdown_csv(f: SampledField, tp: TLParams, sys: DyadicSystem, path: str | Path) -> Path:
    path = Path(path)
    rows = norm_breakdown(f, tp, sys)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["j", "k", "contribution"])
        w.writeheader()
        for row in rows:
            w.writerow({**row, "contribution": repr(row["contribution"])})
    return path
