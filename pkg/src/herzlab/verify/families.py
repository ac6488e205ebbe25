"""Test-function generators used by the verification checks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError
from ..field import GridSpec, SampledField
from ..lpdecomp import bump_profile

__all__ = [
    "gaussian",
    "dilated_bump",
    "modulated_bump",
    "random_band_weighted",
    "power_cusp",
    "radial_cusp",
    "FunctionFamily",
]


def gaussian(grid: GridSpec, width: float = 1.0, center: float = 0.0, amplitude: float = 1.0) -> SampledField:
    r2 = sum((c - center) ** 2 for c in grid.coordinates())
    return SampledField(grid, amplitude * np.exp(-r2 / (2.0 * width**2)))


def dilated_bump(grid: GridSpec, m: float, amplitude: float = 1.0) -> SampledField:
    """Gaussian bump exp(-|2^m x|^2 / 2)."""
    return gaussian(grid, 2.0**-m, amplitude=amplitude)


def modulated_bump(grid: GridSpec, width: float, frequency: float, amplitude: float = 1.0) -> SampledField:
    coords = grid.coordinates()
    r2 = sum(c**2 for c in coords)
    return SampledField(grid, amplitude * np.exp(-r2 / (2.0 * width**2)) * np.cos(frequency * coords[0]))


def _level_of(xi: np.ndarray) -> np.ndarray:
    """Sharp dyadic bin of each frequency: 0 for |xi| < 1, j for 2^{j-1} <= |xi| < 2^j."""
    lev = np.zeros(xi.shape, dtype=int)
    pos = xi >= 1.0
    lev[pos] = np.floor(np.log2(xi[pos])).astype(int) + 1
    return lev


def random_band_weighted(grid: GridSpec, s: float, seed: int, j_top: int | None = None, amplitude: float = 1.0) -> SampledField:
    """Real random field whose level-j content has RMS amplitude ``amplitude * 2^{-js}``.

    Modes in each sharp dyadic bin get equal moduli and seeded phases
    (antisymmetrised so the field is real). Bins above ``j_top`` and the
    Nyquist modes are left empty.
    """
    xi = grid.frequency_modulus()
    lev = _level_of(xi)
    if j_top is None:
        j_top = int(lev.max())
    rng = np.random.default_rng(seed)
    phi = rng.uniform(-np.pi, np.pi, grid.shape)
    flipped = phi
    for ax in range(grid.dim):
        flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
    phase = 0.5 * (phi - flipped)
    N = grid.points_per_axis
    k = np.fft.fftfreq(N, 1.0 / N)
    nyq = np.zeros(grid.shape, dtype=bool)
    for ax in range(grid.dim):
        shape = [1] * grid.dim
        shape[ax] = N
        nyq |= (k == -N // 2).reshape(shape)
    dft = np.zeros(grid.shape, dtype=complex)
    for j in range(j_top + 1):
        sel = (lev == j) & ~nyq
        count = int(sel.sum())
        if count == 0:
            continue
        dft[sel] = N**grid.dim * amplitude * 2.0 ** (-j * s) / np.sqrt(count) * np.exp(1j * phase[sel])
    vals = np.fft.ifftn(dft).real
    return SampledField(grid, vals)


def power_cusp(grid: GridSpec, kappa: float, cutoff_radius: float = 1.0, profile: str = "bump") -> SampledField:
    """f_kappa(x) = theta(x) |x|^kappa.

    ``profile="bump"`` takes theta = psi(|x| / cutoff_radius), compactly
    supported. ``profile="gaussian"`` takes theta = exp(-|x|^2 / (2 r^2)),
    whose slow transition keeps the smooth part of f_kappa out of the high
    levels; it is negligible at double precision once X >= 8.5 r.
    """
    r = grid.radius()
    if profile == "bump":
        theta = bump_profile(r / cutoff_radius)
    elif profile == "gaussian":
        theta = np.exp(-(r**2) / (2.0 * cutoff_radius**2))
    else:
        raise ParameterError(f"unknown cutoff profile {profile!r}")
    return SampledField(grid, theta * r**kappa)


def radial_cusp(grid: GridSpec, gamma: float, cutoff_radius: float = 1.0, core: float | None = None) -> SampledField:
    """theta(x) |x|^{-gamma}, regularised as max(|x|, core)^{-gamma} (core defaults to h/2)."""
    if core is None:
        core = 0.5 * grid.spacing
    r = np.maximum(grid.radius(), core)
    return SampledField(grid, bump_profile(grid.radius() / cutoff_radius) * r ** (-gamma))


GENERATORS = {
    "dilated_bumps": lambda grid, p: dilated_bump(grid, p["m"], p.get("amplitude", 1.0)),
    "modulated_bumps": lambda grid, p: modulated_bump(grid, p["width"], p["frequency"], p.get("amplitude", 1.0)),
    "random_band_weighted": lambda grid, p: random_band_weighted(grid, p["s"], p["seed"], p.get("j_top"), p.get("amplitude", 1.0)),
    "power_cusp": lambda grid, p: power_cusp(grid, p["kappa"], p.get("cutoff_radius", 1.0), p.get("profile", "bump")),
    "radial_cusp": lambda grid, p: radial_cusp(grid, p["gamma"], p.get("cutoff_radius", 1.0), p.get("core")),
}


@dataclass(frozen=True)
class FunctionFamily:
    """A named generator with one parameter dict per member."""

    generator: str
    members: tuple[dict, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ParameterError(f"unknown family generator {self.generator!r}")

    def __len__(self) -> int:
        return len(self.members)

    def fields(self, grid: GridSpec) -> list[SampledField]:
        out = []
        for params in self.members:
            f = GENERATORS[self.generator](grid, params)
            if not (f.is_real and np.all(np.isfinite(f.values))):
                raise ParameterError(f"{self.generator} produced a non-real or non-finite member")
            out.append(f)
        return out

    @classmethod
    def dilated(cls, m_values) -> "FunctionFamily":
        return cls("dilated_bumps", tuple({"m": float(m)} for m in m_values))

    @classmethod
    def random_band(cls, s: float, seeds, **extra) -> "FunctionFamily":
        return cls("random_band_weighted", tuple(dict(s=s, seed=int(sd), **extra) for sd in seeds))

    def to_dict(self) -> dict:
        return {"generator": self.generator, "members": list(self.members)}
