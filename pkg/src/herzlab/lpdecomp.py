"""Smooth dyadic resolution of unity, Littlewood-Paley blocks and Peetre maximal functions."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CompositionError, InputDomainError, ParameterError, ResolutionError
from .field import GridSpec, SampledField, inverse

__all__ = [
    "bump_profile",
    "DyadicSystem",
    "PeetreParams",
    "build_dyadic_system",
    "default_j_max",
    "lp_block",
    "lp_blocks",
    "peetre_maximal",
    "export_multipliers_csv",
]


def _g(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def bump_profile(r) -> np.ndarray:
    """C-infinity radial cutoff: 1 on |r| <= 1, 0 on |r| >= 3/2, monotone between."""
    r = np.abs(np.asarray(r, dtype=float))
    a = _g(1.5 - r)
    b = _g(r - 1.0)
    return a / (a + b)


@dataclass(frozen=True, eq=False)
class DyadicSystem:
    """Multipliers ``F phi_j``, j = 0..j_max, sampled on a grid's frequency lattice."""

    grid: GridSpec
    j_max: int
    multipliers: np.ndarray  # shape (j_max + 1, *grid.shape)

    @property
    def levels(self) -> range:
        return range(self.j_max + 1)

    def check_grid(self, f: SampledField) -> None:
        if f.grid != self.grid:
            raise CompositionError(f"field grid {f.grid} does not match dyadic system grid {self.grid}")


@dataclass(frozen=True)
class PeetreParams:
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ParameterError(f"Peetre exponent must be positive, got {self.a}")

    def admissible(self, n: int, p: float, beta: float) -> bool:
        """Whether a > n / min(p, beta), the norm-equivalence hypothesis."""
        return self.a > n / min(p, beta)


def default_j_max(grid: GridSpec) -> int:
    return int(np.floor(np.log2(grid.nyquist))) - 1


def build_dyadic_system(grid: GridSpec, j_max: int | None = None) -> DyadicSystem:
    """Dyadic partition ``F phi_0 = psi``, ``F phi_j = psi(2^-j .) - psi(2^{1-j} .)``."""
    if j_max is None:
        j_max = default_j_max(grid)
    if j_max < 0:
        raise ResolutionError(f"j_max must be non-negative, got {j_max}")
    if 2.0**j_max > grid.nyquist:
        raise ResolutionError(f"2^{j_max} exceeds the Nyquist frequency {grid.nyquist:.4g}")
    xi = grid.frequency_modulus()
    # cumulative profiles psi(xi / 2^j); differences telescope exactly
    cum = np.stack([bump_profile(xi / 2.0**j) for j in range(j_max + 1)])
    mult = np.empty_like(cum)
    mult[0] = cum[0]
    mult[1:] = cum[1:] - cum[:-1]
    mult.setflags(write=False)
    return DyadicSystem(grid, j_max, mult)


def lp_blocks(f: SampledField, sys: DyadicSystem) -> np.ndarray:
    """All blocks ``phi_j * f`` at once, shape ``(j_max + 1, *grid.shape)``.

    Real input gives real blocks (the multipliers are real and radial).
    """
    sys.check_grid(f)
    blocks = inverse(sys.multipliers * f.coefficients, f.grid)
    return blocks.real if f.is_real else blocks


def lp_block(f: SampledField, sys: DyadicSystem, j: int) -> SampledField:
    sys.check_grid(f)
    if not 0 <= j <= sys.j_max:
        raise InputDomainError(f"level {j} outside 0..{sys.j_max}")
    spec = f.coefficients * sys.multipliers[j]
    vals = inverse(spec, f.grid)
    if f.is_real:
        vals = vals.real
    return SampledField(f.grid, vals, spec)


def _peetre_sup(absblock: np.ndarray, grid: GridSpec, scale: float, a: float, chunk: int = 256) -> np.ndarray:
    """max_y |b(y)| / (1 + scale * d(x, y))^a over all grid nodes y (periodic d)."""
    N = grid.points_per_axis
    flat = absblock.ravel()
    out = np.empty_like(flat)
    if grid.dim == 1:
        i = np.arange(N)
        for start in range(0, N, chunk):
            xs = i[start:start + chunk]
            diff = np.abs(xs[:, None] - i[None, :])
            d = grid.spacing * np.minimum(diff, N - diff)
            w = (1.0 + scale * d) ** (-a)
            out[start:start + chunk] = np.max(w * flat[None, :], axis=1)
        return out.reshape(absblock.shape)
    ii, jj = np.divmod(np.arange(N * N), N)
    for start in range(0, N * N, chunk):
        xi, xj = ii[start:start + chunk], jj[start:start + chunk]
        di = np.abs(xi[:, None] - ii[None, :])
        dj = np.abs(xj[:, None] - jj[None, :])
        d = grid.spacing * np.sqrt(np.minimum(di, N - di) ** 2 + np.minimum(dj, N - dj) ** 2)
        w = (1.0 + scale * d) ** (-a)
        out[start:start + chunk] = np.max(w * flat[None, :], axis=1)
    return out.reshape(absblock.shape)


def peetre_maximal(f: SampledField, sys: DyadicSystem, j: int, pp: PeetreParams) -> SampledField:
    """Peetre maximal function of the level-``j`` block, sup taken over grid nodes.

    Cost is quadratic in the number of nodes.
    """
    block = lp_block(f, sys, j)
    return SampledField(f.grid, _peetre_sup(np.abs(block.samples), f.grid, 2.0**j, pp.a))


def export_multipliers_csv(sys: DyadicSystem, path: str | Path) -> Path:
    """One row per frequency node: |xi| followed by every level's multiplier value.

    For 2-D grids the rows run over the flattened frequency lattice.
    """
    path = Path(path)
    xi = sys.grid.frequency_modulus().ravel()
    order = np.argsort(xi, kind="stable")
    cols = sys.multipliers.reshape(sys.j_max + 1, -1)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi_abs"] + [f"phi_{j}" for j in sys.levels])
        for idx in order:
            w.writerow([repr(float(xi[idx]))] + [repr(float(c)) for c in cols[:, idx]])
    return path
