"""Nonlinearities of class Lip mu, composition operators, modulus integrals and paraproducts."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CapabilityError, CompositionError, InputDomainError, ParameterError, ResolutionError
from .field import SampledField
from .lpdecomp import DyadicSystem, lp_blocks

__all__ = [
    "LipFunction",
    "power_nonlinearity",
    "zero_nonlinearity",
    "linear_nonlinearity",
    "nonlinearity_by_name",
    "lip_norm",
    "compose",
    "modulus_integral",
    "Paraproduct",
    "paraproduct_separation",
    "paraproduct_split",
]

FD_STEP = 1e-5


def split_order(mu: float) -> tuple[int, float]:
    """The unique (L, nu) with mu = L + nu, L >= 0 integer, 0 < nu <= 1."""
    if not mu > 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    L = math.ceil(mu) - 1
    return L, mu - L


@dataclass(frozen=True)
class LipFunction:
    """Scalar nonlinearity G with regularity index mu = L + nu.

    ``derivatives[l]`` evaluates G^(l); missing orders fall back to central
    finite differences with step ``FD_STEP`` when ``fd_fallback`` is set. The
    fallback loses roughly ``eps / FD_STEP**l`` digits at order l.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    mu: float
    derivatives: tuple[Callable[[np.ndarray], np.ndarray], ...] = ()
    name: str = "custom"
    fd_fallback: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        split_order(self.mu)

    @property
    def L(self) -> int:
        return split_order(self.mu)[0]

    @property
    def nu(self) -> float:
        return split_order(self.mu)[1]

    def __call__(self, t):
        return self.evaluator(np.asarray(t, dtype=float))

    def derivative(self, order: int) -> Callable[[np.ndarray], np.ndarray]:
        if order == 0:
            return self.evaluator
        if order <= len(self.derivatives):
            return self.derivatives[order - 1]
        if not self.fd_fallback:
            raise CapabilityError(f"{self.name}: no evaluator for derivative of order {order}")
        lower = self.derivative(order - 1)
        return lambda t: (lower(np.asarray(t) + FD_STEP) - lower(np.asarray(t) - FD_STEP)) / (2 * FD_STEP)

    def vanishing_at_zero(self, tol: float = 1e-8) -> bool:
        zero = np.zeros(1)
        return all(abs(float(self.derivative(l)(zero)[0])) <= tol for l in range(self.L + 1))


def power_nonlinearity(mu: float, scale: float = 1.0) -> LipFunction:
    """G(t) = scale * t |t|^(mu - 1) with closed-form derivatives up to order L."""
    L, _ = split_order(mu)

    def make(l):
        c = scale * math.prod(mu - i for i in range(l))
        odd = (l % 2) == 0  # G^(l) is odd in t for even l

        def d(t):
            t = np.asarray(t, dtype=float)
            mag = np.abs(t) ** (mu - l)
            return c * (np.sign(t) * mag if odd else mag)

        return d

    derivs = tuple(make(l) for l in range(1, L + 1))
    return LipFunction(make(0), mu, derivs, name="power", params={"mu": mu, "scale": scale})


def zero_nonlinearity(mu: float = 1.0) -> LipFunction:
    z = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    L, _ = split_order(mu)
    return LipFunction(z, mu, (z,) * L, name="zero", params={"mu": mu})


def linear_nonlinearity(slope: float = 1.0) -> LipFunction:
    """G(t) = slope * t, which lies in Lip 1."""
    return LipFunction(lambda t: slope * np.asarray(t, dtype=float), 1.0, name="linear", params={"slope": slope})


def nonlinearity_by_name(name: str, mu: float = 2.0, scale: float = 1.0) -> LipFunction:
    if name == "power":
        return power_nonlinearity(mu, scale)
    if name == "zero":
        return zero_nonlinearity(mu)
    if name == "linear":
        return linear_nonlinearity(scale)
    raise ParameterError(f"unknown nonlinearity {name!r}; expected power, zero or linear")


def lip_norm(G: LipFunction, domain_bound: float = 10.0, samples: int = 20001, pair_samples: int = 2001) -> float:
    """Grid-search approximation of ||G||_{Lip mu} on [-domain_bound, domain_bound].

    Weighted sups sum_{l<L} sup |G^(l)(t)| / |t|^(mu-l) use ``samples`` points;
    the Hoelder-nu seminorm of G^(L) is maximised over all pairs of a
    ``pair_samples``-point subgrid.
    """
    L, nu = split_order(G.mu)
    t = np.linspace(-domain_bound, domain_bound, samples)
    t = t[t != 0]
    total = 0.0
    for l in range(L):
        total += float(np.max(np.abs(G.derivative(l)(t)) / np.abs(t) ** (G.mu - l)))
    ts = np.linspace(-domain_bound, domain_bound, pair_samples)
    d = np.asarray(G.derivative(L)(ts), dtype=float)
    num = np.abs(d[:, None] - d[None, :])
    den = np.abs(ts[:, None] - ts[None, :]) ** nu
    np.fill_diagonal(den, np.inf)
    total += float(np.max(num / den))
    return total


def compose(G: LipFunction, f: SampledField) -> SampledField:
    """Pointwise G(f(x)); a complex field is replaced by its real part with a warning."""
    vals = f.samples
    if np.iscomplexobj(vals):
        warnings.warn("compose: taking the real part of a complex field", stacklevel=2)
        vals = vals.real
    return SampledField(f.grid, np.asarray(G(vals), dtype=float))


def _ball_offsets(grid, radius: float) -> list[tuple[int, ...]]:
    h = grid.spacing
    m = int(math.floor(radius / h + 1e-12))
    rng = range(-m, m + 1)
    if grid.dim == 1:
        return [(i,) for i in rng if abs(i * h) <= radius * (1 + 1e-12)]
    return [(i, j) for i in rng for j in rng if math.hypot(i * h, j * h) <= radius * (1 + 1e-12)]


def modulus_integral(f: SampledField, k: int, mu: float) -> SampledField:
    """I_k^mu(f)(x) = integral over |z| <= 2^-k of |f(x+z) - f(x)|^mu dz (periodic shifts)."""
    grid = f.grid
    radius = 2.0**-k
    if radius < grid.spacing:
        raise ResolutionError(f"ball radius 2^-{k} is below the grid spacing {grid.spacing}")
    if radius > grid.halfwidth:
        raise ResolutionError(f"ball radius 2^-{k} exceeds the halfwidth {grid.halfwidth}")
    vals = f.samples
    axes = tuple(range(grid.dim))
    acc = np.zeros(grid.shape)
    for off in _ball_offsets(grid, radius):
        shifted = np.roll(vals, tuple(-o for o in off), axis=axes)
        acc += np.abs(shifted - vals) ** mu
    return SampledField(grid, acc * grid.cell_volume)


@dataclass(frozen=True, eq=False)
class Paraproduct:
    """High-low terms ``high_low[k]`` (Pi_{1,k}) and the remainder Pi_2 of a product.

    ``levels[k][j]`` holds the level-j summand of Pi_{1,k} for j = N..j_max.
    """

    N: int
    high_low: tuple[SampledField, ...]
    remainder: SampledField
    levels: tuple[dict, ...] = ()

    @property
    def parts(self) -> tuple[SampledField, ...]:
        return self.high_low + (self.remainder,)

    def total(self) -> SampledField:
        out = self.remainder
        for term in self.high_low:
            out = out + term
        return out


def paraproduct_separation(m: int) -> int:
    """Level separation N = ceil(1 + log2(3(m-1))) + 1 for an m-fold product."""
    return math.ceil(1 + math.log2(3 * (m - 1))) + 1


def paraproduct_split(fs: Sequence[SampledField], sys: DyadicSystem) -> Paraproduct:
    """Split prod_i f_i into m high-low paraproducts and the diagonal remainder.

    With Delta_j the level-j block and Q_j = sum_{k<=j} Delta_k,
    Pi_{1,k} = sum_{j>=N} (prod_{i != k} Q_{j-N} f_i) Delta_j f_k, and Pi_2
    collects, level by level, the tuples whose largest index is not
    separated from all the others by N.
    """
    m = len(fs)
    if m < 2:
        raise InputDomainError("a paraproduct needs at least two factors")
    grid = fs[0].grid
    for f in fs:
        if f.grid != grid or sys.grid != grid:
            raise CompositionError("paraproduct factors must share the dyadic system's grid")
    N = paraproduct_separation(m)
    J = sys.j_max
    deltas = [lp_blocks(f, sys) for f in fs]
    if not all(np.isrealobj(d) for d in deltas):
        deltas = [d.astype(complex) for d in deltas]
    Q = [np.cumsum(d, axis=0) for d in deltas]

    def q_at(i, j):
        return Q[i][j] if j >= 0 else np.zeros(grid.shape, dtype=Q[i].dtype)

    high = [np.zeros(grid.shape, dtype=Q[0].dtype) for _ in range(m)]
    level_terms = [dict() for _ in range(m)]
    rem = np.zeros(grid.shape, dtype=Q[0].dtype)
    for j in range(J + 1):
        # tuples whose largest index equals j
        top = np.prod([q_at(i, j) for i in range(m)], axis=0) - np.prod([q_at(i, j - 1) for i in range(m)], axis=0)
        if j >= N:
            for k in range(m):
                term = deltas[k][j] * np.prod([q_at(i, j - N) for i in range(m) if i != k], axis=0)
                high[k] += term
                level_terms[k][j] = term
                top = top - term
        rem += top
    return Paraproduct(
        N,
        tuple(SampledField(grid, h) for h in high),
        SampledField(grid, rem),
        tuple({j: SampledField(grid, t) for j, t in lt.items()} for lt in level_terms),
    )
