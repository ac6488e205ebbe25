import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from herzlab.errors import CompositionError, InputDomainError, StateError
from herzlab.field import (
    GridSpec,
    SampledField,
    apply_multiplier,
    forward,
    inverse,
    load_field,
    resample,
    save_field,
    to_physical,
    to_spectrum,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def dft_oracle(values, grid):
    """Transform by an explicit double loop over nodes and frequencies (1-D)."""
    x = grid.axis()
    xi = grid.frequency_axis()
    kern = np.exp(-1j * np.outer(xi, x))
    return (2 * np.pi) ** -0.5 * grid.spacing * kern @ values


@pytest.mark.parametrize("bad", [0, 3, 8, 100])
def test_grid_rejects_bad_sizes(bad):
    with pytest.raises(InputDomainError):
        GridSpec(1, 1.0, bad)


def test_grid_rejects_bad_dim_and_width():
    with pytest.raises(InputDomainError):
        GridSpec(3, 1.0, 16)
    with pytest.raises(InputDomainError):
        GridSpec(1, -1.0, 16)


def test_grid_geometry():
    g = GridSpec(1, 4.0, 64)
    assert g.spacing == 0.125
    assert g.axis()[0] == -4.0
    assert g.axis()[32] == 0.0
    assert np.isclose(g.nyquist, np.pi * 64 / 8)
    assert g.refine().points_per_axis == 128


def test_forward_matches_explicit_sum(rng):
    g = GridSpec(1, 3.0, 32)
    v = rng.normal(size=32)
    np.testing.assert_allclose(forward(v, g), dft_oracle(v, g), atol=1e-12)


@given(arrays(float, 32, elements=finite))
def test_roundtrip_1d(v):
    g = GridSpec(1, 2.0, 32)
    np.testing.assert_allclose(inverse(forward(v, g), g).real, v, atol=1e-9 * (1 + np.abs(v).max()))


@given(arrays(float, (16, 16), elements=finite))
def test_parseval_2d(v):
    g = GridSpec(2, 1.5, 16)
    lhs = np.sum(v**2) * g.cell_volume
    rhs = np.sum(np.abs(forward(v, g)) ** 2) * g.frequency_cell
    assert np.isclose(lhs, rhs, rtol=1e-10, atol=1e-12)


def test_gaussian_transform_closed_form():
    g = GridSpec(1, 20.0, 1024)
    f = SampledField.from_function(g, lambda x: np.exp(-x**2 / 2))
    xi = g.frequency_axis()
    np.testing.assert_allclose(f.coefficients, np.exp(-xi**2 / 2), atol=1e-14)


def test_gaussian_transform_2d():
    g = GridSpec(2, 12.0, 128)
    f = SampledField.from_function(g, lambda x, y: np.exp(-(x**2 + y**2) / 2))
    np.testing.assert_allclose(f.coefficients, np.exp(-g.frequency_modulus() ** 2 / 2), atol=1e-13)


def test_field_requires_data_and_finiteness():
    g = GridSpec(1, 1.0, 16)
    with pytest.raises(StateError):
        SampledField(g)
    with pytest.raises(InputDomainError):
        SampledField(g, np.full(16, np.nan))
    with pytest.raises(InputDomainError):
        SampledField(g, np.zeros(8))


def test_field_is_immutable():
    g = GridSpec(1, 1.0, 16)
    f = SampledField(g, np.zeros(16))
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_spectrum_only_field_and_physical():
    g = GridSpec(1, 1.0, 16)
    f = SampledField(g, np.arange(16.0))
    spec_only = SampledField(g, spectrum=f.coefficients)
    np.testing.assert_allclose(spec_only.samples.real, f.values, atol=1e-12)
    np.testing.assert_allclose(to_physical(spec_only).samples.real, f.values, atol=1e-12)
    assert to_spectrum(f).spectrum is not None
    with pytest.raises(StateError):
        to_physical(f)


def test_arithmetic_and_grid_mismatch():
    g, h = GridSpec(1, 1.0, 16), GridSpec(1, 2.0, 16)
    a = SampledField(g, np.ones(16))
    assert np.all((a + a).values == 2)
    assert np.all((3 * a - a).values == 2)
    with pytest.raises(CompositionError):
        a + SampledField(h, np.ones(16))


def test_multiplier_realness_and_errors():
    g = GridSpec(1, 4.0, 64)
    f = SampledField.from_function(g, lambda x: np.exp(-x**2))
    out = apply_multiplier(f, lambda r: np.exp(-r**2))
    assert out.is_real
    odd = 1j * g.frequency_axis()
    assert not apply_multiplier(f, odd).is_real
    with pytest.raises(InputDomainError):
        apply_multiplier(f, np.full(64, np.inf))


def test_multiplier_derivative_of_sine():
    g = GridSpec(1, np.pi, 64)
    f = SampledField.from_function(g, np.sin)
    d = apply_multiplier(f, 1j * g.frequency_axis())
    np.testing.assert_allclose(d.samples.real, np.cos(g.axis()), atol=1e-12)


@given(st.integers(0, 2**31 - 1), st.sampled_from([1, 2]))
def test_resample_roundtrip_exact(seed, dim):
    N = 32 if dim == 1 else 16
    g = GridSpec(dim, 2.0, N)
    v = np.random.default_rng(seed).normal(size=g.shape)
    f = SampledField(g, v)
    back = resample(resample(f, 4 * N), N)
    np.testing.assert_allclose(back.values, v, atol=1e-12)
    assert resample(f, N).values is not None


def test_resample_interpolates_trig_polynomial():
    g = GridSpec(1, np.pi, 32)
    f = SampledField.from_function(g, lambda x: np.cos(3 * x) + np.sin(5 * x))
    fine = resample(f, 128)
    x = fine.grid.axis()
    np.testing.assert_allclose(fine.values, np.cos(3 * x) + np.sin(5 * x), atol=1e-12)


@pytest.mark.parametrize("complex_", [False, True])
def test_save_load_roundtrip(tmp_path, complex_):
    g = GridSpec(2, 1.0, 16)
    v = np.random.default_rng(0).normal(size=g.shape)
    if complex_:
        v = v + 1j * v[::-1]
    f = SampledField(g, v)
    save_field(f, tmp_path / "f")
    back = load_field(tmp_path / "f")
    assert back.grid == g
    np.testing.assert_array_equal(back.values, v)
