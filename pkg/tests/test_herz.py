import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from herzlab.errors import ParameterError
from herzlab.field import GridSpec, SampledField, inverse
from herzlab.herz import (
    HerzParams,
    TLParams,
    export_breakdown_csv,
    herz_norm,
    ktl_norm,
    ktl_norms,
    lq_norm,
    norm_breakdown,
)
from herzlab.lpdecomp import build_dyadic_system, bump_profile
from herzlab.verify.families import dilated_bump, random_band_weighted

INF = math.inf


def smooth_bump(r):
    return bump_profile(r) * np.cos(r) ** 2


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_herz_equals_lebesgue_1d(p):
    g = GridSpec(1, 8.0, 2048)
    f = SampledField(g, smooth_bump(g.radius()))
    exact = (2 * quad(lambda r: smooth_bump(r) ** p, 0, 1.5, limit=200, epsabs=1e-14)[0]) ** (1 / p)
    assert abs(herz_norm(f, HerzParams(p, p, 0.0)) - exact) / exact <= 1e-6


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_herz_equals_lebesgue_2d(p):
    g = GridSpec(2, 4.0, 256)
    f = SampledField(g, smooth_bump(g.radius()))
    exact = (2 * np.pi * quad(lambda r: r * smooth_bump(r) ** p, 0, 1.5, limit=200, epsabs=1e-14)[0]) ** (1 / p)
    assert abs(herz_norm(f, HerzParams(p, p, 0.0)) - exact) / exact <= 1e-6


def test_gaussian_l2_closed_form():
    g = GridSpec(1, 16.0, 2048)
    f = SampledField(g, np.exp(-g.axis() ** 2 / 2))
    assert np.isclose(herz_norm(f, HerzParams(2, 2, 0)), np.pi**0.25, rtol=1e-12)


def test_weighted_annuli_oracle():
    """Power weights: sum over k of 2^{k alpha p} int_{R_k} |f|^p, annulus by annulus."""
    g = GridSpec(1, 8.0, 4096)
    fx = lambda x: np.exp(-(x - 0.3) ** 2)  # noqa: E731
    f = SampledField(g, fx(g.axis()))
    p, q, alpha = 2.0, 1.0, 0.5
    hp = HerzParams(p, q, alpha).resolve(g)
    total = 0.0
    for k in range(hp.k_min, hp.k_max + 1):
        lo = 0.0 if k == hp.k_min else 2.0 ** (k - 1)
        hi = 2.0**k
        m = sum(quad(lambda x: fx(x) ** p, a, b, epsabs=1e-14)[0] for a, b in ((-hi, -lo), (lo, hi)))
        total += (2.0 ** (k * alpha) * m ** (1 / p)) ** q
    exact = total ** (1 / q)
    # sharp annuli cut smooth data; midpoint error is O(h)
    assert abs(herz_norm(f, hp) - exact) / exact <= 5e-3


def test_default_annulus_bounds():
    g = GridSpec(1, 8.0, 512)
    hp = HerzParams(2, 2, 0).resolve(g)
    assert hp.k_min == math.ceil(math.log2(g.spacing)) + 1
    assert hp.k_max == 3
    g2 = GridSpec(2, 8.0, 64)
    assert HerzParams(2, 2, 0).resolve(g2).k_max == math.floor(math.log2(8 * math.sqrt(2)))


@pytest.mark.parametrize(
    "kw",
    [dict(p=0, q=1, alpha=0), dict(p=2, q=0, alpha=0), dict(p=INF, q=1, alpha=0)],
)
def test_herz_param_errors(kw):
    with pytest.raises(ParameterError):
        HerzParams(**kw)


def test_herz_resolve_errors():
    g = GridSpec(1, 8.0, 512)
    with pytest.raises(ParameterError):
        HerzParams(2, 2, -0.6).resolve(g)
    with pytest.raises(ParameterError):
        HerzParams(2, 2, 0, k_min=-20).resolve(g)
    with pytest.raises(ParameterError):
        HerzParams(2, 2, 0, k_max=5).resolve(g)
    with pytest.raises(ParameterError):
        HerzParams(2, 2, 0, k_min=2, k_max=1).resolve(g)
    with pytest.raises(ParameterError):
        TLParams.make(2, 2, 0, 0, 0)


@given(st.integers(0, 1000), st.floats(0.5, 4), st.floats(0.5, 4))
def test_monotone_in_q(seed, q1, dq):
    g = GridSpec(1, 8.0, 256)
    f = SampledField(g, np.random.default_rng(seed).normal(size=256))
    a = herz_norm(f, HerzParams(2, q1, 0.2))
    b = herz_norm(f, HerzParams(2, q1 + dq, 0.2))
    assert b <= a * (1 + 1e-12)


@given(st.floats(-50, 50).filter(lambda x: abs(x) > 1e-3))
def test_ktl_homogeneity(lam):
    g = GridSpec(1, 8.0, 256)
    sys = build_dyadic_system(g)
    f = dilated_bump(g, 1.0)
    tp = TLParams.make(1.5, 3, 0.2, 0.7, 2)
    a = ktl_norm(f, tp, sys)
    assert np.isclose(ktl_norm(f * lam, tp, sys), abs(lam) * a, rtol=1e-12)


def test_zero_field(grid1, sys1):
    z = SampledField.zeros(grid1)
    assert ktl_norm(z, TLParams.make(2, 2, 0, 1, 2), sys1) == 0.0
    assert herz_norm(z, HerzParams(2, INF, 0)) == 0.0


@given(st.integers(0, 10**6))
def test_quasi_triangle(seed):
    g = GridSpec(1, 8.0, 256)
    sys = build_dyadic_system(g)
    rng = np.random.default_rng(seed)
    f, h = (SampledField(g, rng.normal(size=256)) for _ in range(2))
    for p, q, beta in [(2, 2, 2), (0.5, 1, 0.7), (1, 0.5, INF)]:
        tp = TLParams.make(p, q, 0.1, 0.3, beta)
        C = 2.0 ** (max(1 / min(p, q, beta, 1) - 1, 0) + 1)
        assert ktl_norm(f + h, tp, sys) <= C * (ktl_norm(f, tp, sys) + ktl_norm(h, tp, sys))


def test_large_exponent_limits(grid1, sys1):
    f = random_band_weighted(grid1, 0.5, 2)
    base = TLParams.make(2, 2, 0, 0.5, INF)
    a = ktl_norm(f, base, sys1)
    b = ktl_norm(f, base.with_(beta=2.0**10), sys1)
    assert abs(a - b) / a <= 0.05
    h_inf = herz_norm(f, HerzParams(2, INF, 0))
    h_big = herz_norm(f, HerzParams(2, 2.0**10, 0))
    assert abs(h_inf - h_big) / h_inf <= 0.05


def _direct_ktl(f, g, s, J):
    """phi_j * f by explicit discrete convolution, then l2 over j and L2 over annuli."""
    N = g.points_per_axis
    x = g.axis()
    xi = g.frequency_modulus()
    out = np.zeros(N)
    for j in range(J + 1):
        m = bump_profile(xi / 2.0**j) - (bump_profile(xi / 2.0 ** (j - 1)) if j else 0)
        kern = inverse(m, g).real * (2 * np.pi) ** -0.5
        idx = (np.arange(N)[:, None] - np.arange(N)[None, :] + N // 2) % N
        block = (kern[idx] * f.values[None, :]).sum(axis=1) * g.spacing
        out += (2.0 ** (j * s) * block) ** 2
    agg = np.sqrt(out)
    hp = HerzParams(2, 2, 0).resolve(g)
    total = 0.0
    r = np.abs(x)
    for k in range(hp.k_min, hp.k_max + 1):
        mask = (r <= 2.0**k) & ((r > 2.0 ** (k - 1)) | (k == hp.k_min))
        total += np.sum(agg[mask] ** 2) * g.spacing
    return np.sqrt(total)


def test_ktl_matches_direct_convolution():
    g = GridSpec(1, 8.0, 256)
    sys = build_dyadic_system(g)
    f = SampledField(g, np.exp(-g.axis() ** 2 / 2))
    a = ktl_norm(f, TLParams.make(2, 2, 0, 1.0, 2), sys)
    b = _direct_ktl(f, g, 1.0, sys.j_max)
    assert abs(a - b) / b <= 1e-8


def test_ktl_norms_matches_single(grid1, sys1):
    tp = TLParams.make(3, 1.5, 0.1, 0.4, INF)
    fields = [random_band_weighted(grid1, 0.3, s) for s in range(5)]
    stack = np.stack([f.values for f in fields])
    np.testing.assert_allclose(ktl_norms(stack, tp, sys1, chunk=2), [ktl_norm(f, tp, sys1) for f in fields], rtol=1e-12)


def test_breakdown_l2_identity(tmp_path, grid1, sys1):
    f = random_band_weighted(grid1, 0.5, 4)
    tp = TLParams.make(2, 2, 0, 0.5, 2)
    rows = norm_breakdown(f, tp, sys1)
    assert np.isclose(sum(r["contribution"] ** 2 for r in rows), ktl_norm(f, tp, sys1) ** 2, rtol=1e-12)
    path = export_breakdown_csv(f, tp, sys1, tmp_path / "b.csv")
    assert len(path.read_text().splitlines()) == len(rows) + 1


def test_lq_norm_overflow_safe():
    a = np.array([1e300, 1e300])
    assert np.isclose(lq_norm(a, 2.0), np.sqrt(2) * 1e300)
    assert lq_norm(np.zeros(3), 0.5) == 0.0
    assert lq_norm(np.array([1.0, -3.0]), INF) == 3.0


def test_2d_herz_rotation_invariance():
    g = GridSpec(2, 8.0, 128)
    x, y = g.coordinates()
    f = SampledField(g, np.exp(-(x**2 + 4 * y**2)))
    ft = SampledField(g, np.exp(-(4 * x**2 + y**2)))
    hp = HerzParams(1.5, 3, 0.4)
    assert np.isclose(herz_norm(f, hp), herz_norm(ft, hp), rtol=1e-12)
