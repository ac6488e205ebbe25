"""Periodic grid functions on [-X, X)^n and their unitary Fourier transform.

Sample layout
-------------
Axis ``d`` carries the nodes ``x_i = -X + i*h`` with ``h = 2X/N`` and
``i = 0..N-1``, so the origin is the node ``i = N/2``. Spectra are stored in
numpy FFT order: index ``k`` along an axis corresponds to the angular
frequency ``(pi/X) * fftfreq(N, 1/N)[k]``.

The stored coefficient approximates the continuous transform
``(2 pi)^{-n/2} int f(x) exp(-i x.xi) dx`` by the Riemann sum over the
nodes, which makes discrete Parseval read
``sum |f|^2 h^n == sum |F f|^2 (pi/X)^n``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import CompositionError, InputDomainError, StateError

__all__ = [
    "GridSpec",
    "SampledField",
    "to_spectrum",
    "to_physical",
    "apply_multiplier",
    "resample",
    "save_field",
    "load_field",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on the cube [-halfwidth, halfwidth)^dim."""

    dim: int
    halfwidth: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InputDomainError(f"dim must be 1 or 2, got {self.dim}")
        if not (np.isfinite(self.halfwidth) and self.halfwidth > 0):
            raise InputDomainError(f"halfwidth must be positive, got {self.halfwidth}")
        N = self.points_per_axis
        if N < 16 or N & (N - 1):
            raise InputDomainError(f"points_per_axis must be a power of two >= 16, got {N}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.halfwidth / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def frequency_cell(self) -> float:
        """Measure of one frequency cell, (pi/X)^n."""
        return (np.pi / self.halfwidth) ** self.dim

    @property
    def nyquist(self) -> float:
        return np.pi * self.points_per_axis / (2.0 * self.halfwidth)

    def axis(self) -> np.ndarray:
        return -self.halfwidth + self.spacing * np.arange(self.points_per_axis)

    def frequency_axis(self) -> np.ndarray:
        N = self.points_per_axis
        return (np.pi / self.halfwidth) * np.fft.fftfreq(N, 1.0 / N)

    def coordinates(self) -> tuple[np.ndarray, ...]:
        ax = self.axis()
        return tuple(np.meshgrid(*([ax] * self.dim), indexing="ij"))

    def radius(self) -> np.ndarray:
        """|x| at every node."""
        return np.sqrt(sum(c**2 for c in self.coordinates()))

    def frequencies(self) -> tuple[np.ndarray, ...]:
        ax = self.frequency_axis()
        return tuple(np.meshgrid(*([ax] * self.dim), indexing="ij"))

    def frequency_modulus(self) -> np.ndarray:
        """|xi| on the frequency grid (FFT order)."""
        return np.sqrt(sum(k**2 for k in self.frequencies()))

    def _phase(self) -> np.ndarray:
        # exp(i X xi_k) = (-1)^k accounts for the first node sitting at -X.
        N = self.points_per_axis
        k = np.fft.fftfreq(N, 1.0 / N).astype(int)
        s1 = np.where(k % 2 == 0, 1.0, -1.0)
        if self.dim == 1:
            return s1
        return np.multiply.outer(s1, s1)

    @cached_property
    def _forward_scale(self) -> np.ndarray:
        return self._phase() * self.cell_volume * (2.0 * np.pi) ** (-self.dim / 2.0)

    def refine(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.dim, self.halfwidth, self.points_per_axis * factor)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "halfwidth": self.halfwidth, "points_per_axis": self.points_per_axis}


def _fftn(a: np.ndarray, dim: int) -> np.ndarray:
    return np.fft.fftn(a, axes=tuple(range(-dim, 0)))


def _ifftn(a: np.ndarray, dim: int) -> np.ndarray:
    return np.fft.ifftn(a, axes=tuple(range(-dim, 0)))


def forward(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Unitary-convention spectrum of a stack of sample arrays (trailing axes = grid)."""
    return _fftn(values, grid.dim) * grid._forward_scale


def inverse(spectrum: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Inverse of :func:`forward`."""
    return _ifftn(spectrum / grid._forward_scale, grid.dim)


@dataclass(frozen=True, eq=False)
class SampledField:
    """Samples of a function on a :class:`GridSpec`, optionally with its spectrum.

    Instances are immutable; every operation returns a new field. At least
    one of ``values`` / ``spectrum`` must be given.
    """

    grid: GridSpec
    values: np.ndarray | None = None
    spectrum: np.ndarray | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        if self.values is None and self.spectrum is None:
            raise StateError("a field needs values or a spectrum")
        for name in ("values", "spectrum"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr)
            if arr.shape != self.grid.shape:
                raise InputDomainError(f"{name} shape {arr.shape} does not match grid {self.grid.shape}")
            if not np.all(np.isfinite(arr)):
                raise InputDomainError(f"{name} contains non-finite entries")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> "SampledField":
        return cls(grid, np.asarray(func(*grid.coordinates()), dtype=float))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SampledField":
        return cls(grid, np.zeros(grid.shape))

    @property
    def is_real(self) -> bool:
        return self.values is not None and not np.iscomplexobj(self.values)

    @cached_property
    def samples(self) -> np.ndarray:
        """Physical values, computed from the spectrum when only that is stored."""
        if self.values is not None:
            return self.values
        return inverse(self.spectrum, self.grid)

    @cached_property
    def coefficients(self) -> np.ndarray:
        if self.spectrum is not None:
            return self.spectrum
        return forward(self.values, self.grid)

    def real(self) -> "SampledField":
        return SampledField(self.grid, np.real(self.samples).astype(float))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.grid.cell_volume))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def __add__(self, other: "SampledField") -> "SampledField":
        _same_grid(self, other)
        return SampledField(self.grid, self.samples + other.samples)

    def __sub__(self, other: "SampledField") -> "SampledField":
        _same_grid(self, other)
        return SampledField(self.grid, self.samples - other.samples)

    def __mul__(self, scalar) -> "SampledField":
        return SampledField(self.grid, self.samples * scalar)

    __rmul__ = __mul__


def _same_grid(*fields: SampledField) -> None:
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise CompositionError(f"grid mismatch: {g} vs {f.grid}")


def to_spectrum(f: SampledField) -> SampledField:
    """Return ``f`` with its spectrum populated."""
    if f.values is None:
        if f.spectrum is None:
            raise StateError("field has neither values nor spectrum")
        return f
    return SampledField(f.grid, f.values, forward(f.values, f.grid))


def to_physical(f: SampledField) -> SampledField:
    """Return ``f`` with values recomputed from its spectrum."""
    if f.spectrum is None:
        raise StateError("to_physical needs a populated spectrum")
    return SampledField(f.grid, inverse(f.spectrum, f.grid), f.spectrum)


def _is_even(m: np.ndarray, dim: int) -> bool:
    flipped = m
    for ax in range(dim):
        flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
    return bool(np.array_equal(flipped, m))


def apply_multiplier(f: SampledField, m) -> SampledField:
    """Multiply the spectrum of ``f`` by the symbol ``m`` and refresh the values.

    ``m`` is either an array on the frequency grid (FFT order) or a callable
    of the modulus ``|xi|``. Real input with a real, even symbol stays real.
    """
    grid = f.grid
    if callable(m):
        m = m(grid.frequency_modulus())
    m = np.broadcast_to(np.asarray(m), grid.shape)
    if not np.all(np.isfinite(m)):
        raise InputDomainError("multiplier is not finite on the frequency grid")
    spec = f.coefficients * m
    vals = inverse(spec, grid)
    if f.is_real and not np.iscomplexobj(m) and _is_even(m, grid.dim):
        vals = vals.real
    return SampledField(grid, vals, spec)


def resample(f: SampledField, points_per_axis: int) -> SampledField:
    """Trigonometric interpolation of ``f`` onto a grid with the same halfwidth.

    Shared frequencies keep their coefficients; new modes are zero. When
    coarsening, modes above the new Nyquist frequency are discarded.
    """
    old, new = f.grid, GridSpec(f.grid.dim, f.grid.halfwidth, points_per_axis)
    No, Nn = old.points_per_axis, new.points_per_axis
    if No == Nn:
        return SampledField(old, f.samples, f.coefficients)
    ko = np.fft.fftfreq(No, 1.0 / No).astype(int)
    kn = np.fft.fftfreq(Nn, 1.0 / Nn).astype(int)
    half = min(No, Nn) // 2
    src = np.flatnonzero(np.abs(ko) < half)
    dst = np.flatnonzero(np.abs(kn) < half)
    src = src[np.argsort(ko[src])]
    dst = dst[np.argsort(kn[dst])]
    spec_in = f.coefficients
    spec = np.zeros(new.shape, dtype=complex)
    # the shared +-half mode is split or merged so that real fields stay real
    if No < Nn:
        ny_o = int(np.flatnonzero(ko == -half)[0])
        ny_p, ny_m = int(np.flatnonzero(kn == half)[0]), int(np.flatnonzero(kn == -half)[0])
        pairs = [(src, dst, 1.0), ([ny_o], [ny_p], 0.5), ([ny_o], [ny_m], 0.5)]
    else:
        ny_n = int(np.flatnonzero(kn == -half)[0])
        ny_p, ny_m = int(np.flatnonzero(ko == half)[0]), int(np.flatnonzero(ko == -half)[0])
        pairs = [(src, dst, 1.0), ([ny_p], [ny_n], 1.0), ([ny_m], [ny_n], 1.0)]
    if old.dim == 1:
        for a, b, w in pairs:
            spec[np.asarray(b)] += w * spec_in[np.asarray(a)]
    else:
        for a0, b0, w0 in pairs:
            for a1, b1, w1 in pairs:
                spec[np.ix_(np.asarray(b0), np.asarray(b1))] += w0 * w1 * spec_in[np.ix_(np.asarray(a0), np.asarray(a1))]
    vals = inverse(spec, new)
    if f.is_real:
        vals = vals.real
    return SampledField(new, vals, spec)


def save_field(f: SampledField, stem: str | Path) -> tuple[Path, Path]:
    """Write ``<stem>.json`` (grid header) and ``<stem>.bin`` (raw samples).

    The binary file holds the physical samples in C order, little-endian
    float64 for real fields or complex128 (real, imag interleaved) otherwise.
    """
    stem = Path(stem)
    vals = f.samples
    dtype = "<f8" if not np.iscomplexobj(vals) else "<c16"
    header = dict(f.grid.to_dict(), dtype=dtype, order="C", first_node="-halfwidth")
    hpath, bpath = stem.with_suffix(".json"), stem.with_suffix(".bin")
    hpath.write_text(json.dumps(header, indent=2))
    np.ascontiguousarray(vals, dtype=dtype).tofile(bpath)
    return hpath, bpath


def load_field(stem: str | Path) -> SampledField:
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text())
    grid = GridSpec(int(header["dim"]), float(header["halfwidth"]), int(header["points_per_axis"]))
    vals = np.fromfile(stem.with_suffix(".bin"), dtype=header["dtype"]).reshape(grid.shape)
    if not np.iscomplexobj(vals):
        vals = vals.astype(float)
    return SampledField(grid, vals)
