"""Heat semigroup, Duhamel quadrature and mild solutions of u_t = Lap u + G(u).

The mild formulation is u(t) = e^{t Lap} u0 + int_0^t e^{(t - tau) Lap} G(u(tau)) dtau.
The Duhamel integral is discretized by the composite trapezoid rule on a
uniform time grid; in frequency space the cumulative sums obey a first-order
linear recurrence per mode, evaluated with a log-depth prefix scan.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InputDomainError, ParameterError, StateError
from .field import GridSpec, SampledField, forward, inverse
from .herz import TLParams, ktl_norms
from .lpdecomp import DyadicSystem
from .nonlinear import LipFunction

__all__ = [
    "heat_propagate",
    "heat_symbol",
    "duhamel_term",
    "MildSolverConfig",
    "Trajectory",
    "solve_mild",
    "march_exponential",
    "BlowupMeasurement",
    "measure_blowup_time",
    "ExistenceBound",
    "existence_bound",
    "estimate_contraction_constant",
]

COMPLETED = "completed"
BLOWN_UP = "blown_up"
DIVERGED = "picard_diverged"


def heat_symbol(grid: GridSpec, t: float) -> np.ndarray:
    return np.exp(-t * grid.frequency_modulus() ** 2)


def heat_propagate(f: SampledField, t: float) -> SampledField:
    """e^{t Lap} f as the Fourier multiplier exp(-t |xi|^2)."""
    if not t >= 0:
        raise InputDomainError(f"heat_propagate needs t >= 0, got {t}")
    spec = f.coefficients * heat_symbol(f.grid, t)
    vals = inverse(spec, f.grid)
    return SampledField(f.grid, vals.real if f.is_real else vals, spec)


def duhamel_term(g_history: Sequence[tuple[float, SampledField]], t: float) -> SampledField:
    """Composite trapezoid approximation of int_0^t e^{(t - tau) Lap} g(tau) dtau.

    ``g_history`` is a time-ordered sequence of ``(tau, g(tau))`` pairs whose
    first time is 0 and whose last time is ``t``.
    """
    if len(g_history) == 0:
        raise StateError("empty history")
    taus = np.array([tau for tau, _ in g_history], dtype=float)
    scale = max(abs(t), 1.0)
    if abs(taus[0]) > 1e-12 * scale or abs(taus[-1] - t) > 1e-12 * scale:
        raise StateError(f"history covers [{taus[0]}, {taus[-1]}], need [0, {t}]")
    if np.any(np.diff(taus) <= 0):
        raise StateError("history times must be strictly increasing")
    grid = g_history[0][1].grid
    if len(taus) == 1:
        return SampledField.zeros(grid)
    w = np.zeros_like(taus)
    dt = np.diff(taus)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    xi2 = grid.frequency_modulus() ** 2
    acc = np.zeros(grid.shape, dtype=complex)
    for wi, (tau, g) in zip(w, g_history):
        acc += wi * np.exp(-(t - tau) * xi2) * g.coefficients
    vals = inverse(acc, grid)
    real = all(g.is_real for _, g in g_history)
    return SampledField(grid, vals.real if real else vals, acc)


def _trapezoid_scan(ghat: np.ndarray, E: np.ndarray, dt: float) -> np.ndarray:
    """D_0 = 0, D_{i+1} = E D_i + dt/2 (E g_i + g_{i+1}); returns all D_i."""
    x = 0.5 * dt * (E * ghat[:-1] + ghat[1:])
    d, Ep = 1, E
    while d < x.shape[0]:
        x[d:] = x[d:] + Ep * x[:-d]
        Ep = Ep * Ep
        d *= 2
    out = np.empty_like(ghat)
    out[0] = 0
    out[1:] = x
    return out


@dataclass(frozen=True)
class MildSolverConfig:
    """Time grid, Picard stopping rule and blow-up ceiling for :func:`solve_mild`.

    ``norm_params`` selects the monitored K^alpha_{p,q}F^s_beta norm; ``None``
    monitors the sup norm instead.
    """

    T: float
    steps: int = 256
    picard_tol: float = 1e-10
    picard_max: int = 200
    blowup_threshold: float = 1e6
    norm_params: TLParams | None = None

    def __post_init__(self):
        if not self.T > 0:
            raise ParameterError(f"horizon T must be positive, got {self.T}")
        if self.steps < 2:
            raise ParameterError(f"steps must be >= 2, got {self.steps}")
        if not 0 < self.picard_tol < 1:
            raise ParameterError(f"picard_tol must lie in (0, 1), got {self.picard_tol}")
        if self.picard_max < 1:
            raise ParameterError("picard_max must be >= 1")
        if not self.blowup_threshold > 0:
            raise ParameterError("blowup_threshold must be positive")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded solver states with their monitored norms.

    ``increments[j]`` is the space-time sup norm of u^{j+1} - u^j,
    ``iterate_sizes[j]`` that of u^{j+1}; ``contraction_ratios[j]`` is
    increments[j+1] / increments[j].
    """

    times: np.ndarray
    states: tuple[SampledField, ...]
    norm_trace: np.ndarray
    status: str
    status_time: float | None = None
    iterations: int = 0
    increments: tuple[float, ...] = ()
    iterate_sizes: tuple[float, ...] = ()
    contraction_ratios: tuple[float, ...] = ()
    initial_size: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def final(self) -> SampledField:
        return self.states[-1]

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", "norm", "sup_norm", "status"])
            for t, nv, st in zip(self.times, self.norm_trace, self.states):
                w.writerow([repr(float(t)), repr(float(nv)), repr(st.sup_norm()), self.status])
        return path


def _monitor(values: np.ndarray, cfg: MildSolverConfig, sys: DyadicSystem | None) -> np.ndarray:
    if values.shape[0] == 0:
        return np.zeros(0)
    if cfg.norm_params is None or sys is None:
        return np.max(np.abs(values.reshape(values.shape[0], -1)), axis=1)
    return ktl_norms(values, cfg.norm_params, sys)


def _finish(times, values, grid, cfg, sys, status, status_idx, **kw) -> Trajectory:
    if status_idx is not None:
        times, values = times[:status_idx], values[:status_idx]
    norms = _monitor(values, cfg, sys)
    status_time = None if status_idx is None else float(kw.pop("offending_time"))
    kw.pop("offending_time", None)
    if status == COMPLETED:
        over = np.flatnonzero(~(norms <= cfg.blowup_threshold))
        if over.size:
            status, status_time = BLOWN_UP, float(times[over[0]])
            times, values, norms = times[: over[0]], values[: over[0]], norms[: over[0]]
    states = tuple(SampledField(grid, v) for v in values)
    return Trajectory(np.asarray(times), states, np.asarray(norms), status, status_time, **kw)


def solve_mild(u0: SampledField, G: LipFunction, cfg: MildSolverConfig, sys: DyadicSystem | None = None) -> Trajectory:
    """Picard iteration u^{j+1} = e^{t Lap} u0 + F(u^j) on the whole time grid.

    Stops when the largest relative sup-norm change over the time grid is
    at most ``picard_tol``. An iterate that turns non-finite or exceeds the
    blow-up threshold ends the solve with status ``picard_diverged``, as does
    reaching ``picard_max`` without convergence.
    """
    if not u0.is_real:
        if np.max(np.abs(np.imag(u0.samples))) > 0:
            raise InputDomainError("solve_mild needs real initial data")
        u0 = u0.real()
    grid = u0.grid
    times = np.linspace(0.0, cfg.T, cfg.steps + 1)
    dt = times[1] - times[0]
    xi2 = grid.frequency_modulus() ** 2
    E = np.exp(-dt * xi2)
    extra = (slice(None),) + (None,) * grid.dim
    linear = inverse(u0.coefficients[None] * np.exp(-times[extra] * xi2[None]), grid).real

    u = linear
    incs: list[float] = []
    sizes: list[float] = []
    ratios: list[float] = []
    axes = tuple(range(1, grid.dim + 1))
    status, bad = DIVERGED, None
    offending = None
    it = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, cfg.picard_max + 1):
            g = G(u)
            ghat = forward(g, grid)
            duh = inverse(_trapezoid_scan(ghat, E, dt), grid).real
            new = linear + duh
            sup_t = np.max(np.abs(new), axis=axes)
            broken = ~(sup_t <= cfg.blowup_threshold)
            if broken.any():
                bad = int(np.flatnonzero(broken)[0])
                offending = times[bad]
                u = new
                break
            diff_t = np.max(np.abs(new - u), axis=axes)
            inc = float(np.max(diff_t))
            if incs and incs[-1] > 0:
                ratios.append(inc / incs[-1])
            incs.append(inc)
            sizes.append(float(np.max(sup_t)))
            rel = float(np.max(diff_t / np.maximum(sup_t, np.finfo(float).tiny)))
            u = new
            if rel <= cfg.picard_tol:
                status = COMPLETED
                break
        else:
            offending = times[-1]
    if status == DIVERGED and bad is None:
        bad = len(times)
    return _finish(
        times, u, grid, cfg, sys, status, None if status == COMPLETED else bad,
        offending_time=offending, iterations=it, increments=tuple(incs), iterate_sizes=tuple(sizes),
        contraction_ratios=tuple(ratios), initial_size=float(np.max(np.abs(linear))),
    )


def march_exponential(u0: SampledField, G: LipFunction, cfg: MildSolverConfig, sys: DyadicSystem | None = None) -> Trajectory:
    """Cross-check solver: u_{i+1} = e^{dt Lap}(u_i + dt G(u_i)), first order in dt."""
    grid = u0.grid
    times = np.linspace(0.0, cfg.T, cfg.steps + 1)
    dt = times[1] - times[0]
    E = heat_symbol(grid, dt)
    vals = np.empty((len(times),) + grid.shape)
    vals[0] = np.real(u0.samples)
    bad = None
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(cfg.steps):
            v = vals[i]
            nxt = inverse(E * forward(v + dt * G(v), grid), grid).real
            if not np.max(np.abs(nxt)) <= cfg.blowup_threshold:
                bad = i + 1
                break
            vals[i + 1] = nxt
    if bad is None:
        return _finish(times, vals, grid, cfg, sys, COMPLETED, None, offending_time=None, iterations=1)
    return _finish(times, vals, grid, cfg, sys, BLOWN_UP, bad, offending_time=times[bad], iterations=1)


@dataclass(frozen=True)
class BlowupMeasurement:
    T0: float
    upper: float
    solves: int


def measure_blowup_time(
    u0: SampledField,
    G: LipFunction,
    cfg: MildSolverConfig,
    sys: DyadicSystem | None = None,
    rel_tol: float = 1e-4,
) -> BlowupMeasurement | None:
    """Largest horizon T <= cfg.T on which :func:`solve_mild` completes, by bisection.

    Returns ``None`` when the solve on the full horizon already completes
    (no blow-up observed).
    """

    def ok(T):
        return solve_mild(u0, G, replace(cfg, T=T), sys).status == COMPLETED

    solves = 1
    if ok(cfg.T):
        return None
    lo, hi = 0.0, cfg.T
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        solves += 1
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return BlowupMeasurement(lo, hi, solves)


@dataclass(frozen=True)
class ExistenceBound:
    """Existence-time lower bound for initial data of size ``u0_norm``.

    ``T_bound`` is ``None`` when s <= s_bar (no bound).
    """

    mu: float
    s: float
    p: float
    q: float
    alpha: float
    n: int
    C: float
    u0_norm: float

    @property
    def s_bar(self) -> float:
        return self.n / self.p + self.alpha - 2.0 / (self.mu - 1.0)

    @property
    def theta_exist(self) -> float:
        return (self.s - self.s_bar) / 2.0

    @property
    def defined(self) -> bool:
        return self.s > self.s_bar

    @property
    def digamma(self) -> float | None:
        if not self.defined:
            return None
        gap = self.s - self.s_bar
        mu = self.mu
        return (1.0 / self.C) ** (2.0 / ((mu - 1) * gap)) * (mu ** (-1.0 / (mu - 1)) - mu ** (-mu / (mu - 1))) ** (2.0 / gap)

    @property
    def T_bound(self) -> float | None:
        if not self.defined:
            return None
        gap = self.s - self.s_bar
        mu = self.mu
        return (
            self.digamma
            * 2.0 ** (-2.0 / ((mu - 1) * gap))
            * (1.0 - 1.0 / mu) ** (mu - 1)
            * self.u0_norm ** (-2.0 / gap)
        )

    def to_dict(self) -> dict:
        return {
            "mu": self.mu, "s": self.s, "p": self.p, "q": self.q, "alpha": self.alpha, "n": self.n,
            "C": self.C, "u0_norm": self.u0_norm, "s_bar": self.s_bar, "theta": self.theta_exist,
            "digamma": self.digamma, "T_bound": self.T_bound,
        }


def existence_bound(mu: float, s: float, p: float, q: float, alpha: float, n: int, C: float = 1.0, u0_norm: float = 1.0) -> ExistenceBound:
    if not mu > 1:
        raise ParameterError(f"mu must exceed 1, got {mu}")
    if not C > 0:
        raise ParameterError(f"contraction constant must be positive, got {C}")
    if not u0_norm > 0:
        raise ParameterError("initial-data norm must be positive")
    return ExistenceBound(mu, s, p, q, alpha, n, C, u0_norm)


def estimate_contraction_constant(traj: Trajectory, T: float, mu: float, s: float, s_bar: float, floor: float = 1e-12) -> float:
    """Smallest C consistent with the measured Picard increments.

    Uses ||u^{j+1}-u^j|| <= C T^g ||u^j-u^{j-1}|| (||u^j||^{mu-1} + ||u^{j-1}||^{mu-1})
    with g = (mu-1)(s-s_bar)/2 and space-time sup norms; increments below
    ``floor`` times the iterate size are ignored (round-off).
    """
    g = (mu - 1) * (s - s_bar) / 2
    sizes = (traj.initial_size,) + traj.iterate_sizes
    best = 0.0
    for j in range(1, len(traj.increments)):
        prev, cur = traj.increments[j - 1], traj.increments[j]
        if prev <= floor * sizes[j] or cur <= floor * sizes[j + 1]:
            continue
        denom = T**g * (sizes[j] ** (mu - 1) + sizes[j - 1] ** (mu - 1))
        best = max(best, (cur / prev) / denom)
    if best == 0.0:
        raise StateError("not enough Picard increments above round-off to estimate C")
    return best
