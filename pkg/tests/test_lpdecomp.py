import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from herzlab.errors import CompositionError, InputDomainError, ParameterError, ResolutionError
from herzlab.field import GridSpec, SampledField, inverse
from herzlab.herz import TLParams, ktl_norm, ktl_norm_peetre
from herzlab.lpdecomp import (
    PeetreParams,
    build_dyadic_system,
    bump_profile,
    default_j_max,
    export_multipliers_csv,
    lp_block,
    lp_blocks,
    peetre_maximal,
)
from herzlab.verify.families import dilated_bump


def band_limited(grid, sys, seed):
    """Real random field whose spectrum vanishes beyond 2^j_max."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=grid.shape)
    spec = np.fft.fftn(v) * (grid.frequency_modulus() <= 2.0**sys.j_max)
    return SampledField(grid, np.fft.ifftn(spec).real)


@given(st.floats(-5, 5))
def test_bump_profile_range_and_symmetry(r):
    v = bump_profile(r)
    assert 0.0 <= v <= 1.0
    assert bump_profile(-r) == v
    if abs(r) <= 1:
        assert v == 1.0
    if abs(r) >= 1.5:
        assert v == 0.0


def test_bump_profile_monotone():
    r = np.linspace(0, 2, 2001)
    assert np.all(np.diff(bump_profile(r)) <= 0)


@pytest.mark.parametrize("dim,N", [(1, 4096), (2, 256)])
def test_partition_of_unity(dim, N):
    g = GridSpec(dim, 10.0, N)
    sys = build_dyadic_system(g)
    resolved = g.frequency_modulus() <= 2.0**sys.j_max
    err = np.max(np.abs(sys.multipliers.sum(axis=0)[resolved] - 1.0))
    assert err <= 1e-12


def test_multiplier_supports():
    g = GridSpec(1, 10.0, 4096)
    sys = build_dyadic_system(g)
    xi = g.frequency_modulus()
    for j in range(1, sys.j_max + 1):
        outside = (xi < 2.0 ** (j - 1) * (1 - 1e-12)) | (xi > 1.5 * 2.0**j * (1 + 1e-12))
        assert np.all(sys.multipliers[j][outside] == 0.0)
    assert np.all(sys.multipliers[0][xi > 1.5] == 0.0)


def test_default_j_max_and_resolution_error():
    g = GridSpec(1, np.pi, 256)  # Nyquist 128
    assert default_j_max(g) == 6
    build_dyadic_system(g, 7)
    with pytest.raises(ResolutionError):
        build_dyadic_system(g, 8)
    with pytest.raises(ResolutionError):
        build_dyadic_system(g, -1)


@pytest.mark.parametrize("dim,N,seed", [(1, 1024, 0), (1, 4096, 1), (2, 128, 2)])
def test_reconstruction(dim, N, seed):
    g = GridSpec(dim, 6.0, N)
    sys = build_dyadic_system(g)
    f = band_limited(g, sys, seed)
    rec = lp_blocks(f, sys).sum(axis=0)
    err = np.linalg.norm(rec - f.values) / np.linalg.norm(f.values)
    assert err <= 1e-10


def test_blocks_real_and_consistent(grid1, sys1):
    f = dilated_bump(grid1, 1.0)
    blocks = lp_blocks(f, sys1)
    assert np.isrealobj(blocks)
    np.testing.assert_allclose(lp_block(f, sys1, 3).values, blocks[3], atol=1e-14)
    with pytest.raises(InputDomainError):
        lp_block(f, sys1, sys1.j_max + 1)


def test_block_of_single_mode():
    g = GridSpec(1, np.pi, 256)
    sys = build_dyadic_system(g)
    f = SampledField.from_function(g, lambda x: np.cos(10 * x))
    blocks = lp_blocks(f, sys)
    # |xi| = 10 lies in the overlap of levels 3 and 4
    weights = [float(bump_profile(10 / 2**j) - bump_profile(10 / 2 ** (j - 1))) for j in (3, 4)]
    for j, w in zip((3, 4), weights):
        np.testing.assert_allclose(blocks[j], w * f.values, atol=1e-12)
    assert np.max(np.abs(blocks[[0, 1, 2, 5, 6]])) < 1e-12


def test_convolution_oracle():
    """phi_j * f by an explicit periodic convolution with the sampled kernel."""
    g = GridSpec(1, 4.0, 128)
    sys = build_dyadic_system(g)
    f = dilated_bump(g, 0.0)
    x = g.axis()
    h = g.spacing
    for j in (0, 2, 4):
        # kernel phi_j(x) = (2 pi)^{-1/2} inverse transform of F phi_j
        kern = inverse(sys.multipliers[j], g).real * (2 * np.pi) ** -0.5
        conv = np.array([np.sum(kern[(i - np.arange(128) + 64) % 128] * f.values) * h for i in range(128)])
        np.testing.assert_allclose(conv, lp_blocks(f, sys)[j], atol=1e-12)
    assert x[64] == 0.0


def test_grid_mismatch(sys1):
    other = GridSpec(1, 4.0, 512)
    with pytest.raises(CompositionError):
        lp_blocks(SampledField.zeros(other), sys1)


def test_peetre_dominates_block(grid1, sys1):
    f = dilated_bump(grid1, 1.0)
    pp = PeetreParams(2.0)
    for j in (0, 3, sys1.j_max):
        pm = peetre_maximal(f, sys1, j, pp)
        assert np.all(pm.values >= np.abs(lp_block(f, sys1, j).values) - 1e-15)


def test_peetre_2d_dominates(grid2, sys2):
    f = dilated_bump(grid2, 0.0)
    pm = peetre_maximal(f, sys2, 2, PeetreParams(3.0))
    assert np.all(pm.values >= np.abs(lp_block(f, sys2, 2).values) - 1e-15)


def test_peetre_params():
    with pytest.raises(ParameterError):
        PeetreParams(0.0)
    assert PeetreParams(1.1).admissible(1, 2.0, 2.0)
    assert not PeetreParams(0.4).admissible(1, 2.0, 2.0)


def test_peetre_norm_dominates_and_warns(grid1, sys1):
    tp = TLParams.make(2, 2, 0, 0.5, 2)
    f = dilated_bump(grid1, 0.5)
    assert ktl_norm_peetre(f, tp, sys1, PeetreParams(1.0)) >= ktl_norm(f, tp, sys1)
    with pytest.warns(UserWarning):
        ktl_norm_peetre(f, tp, sys1, PeetreParams(0.2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert ktl_norm_peetre(SampledField.zeros(grid1), tp, sys1, PeetreParams(1.0)) == 0.0


def test_peetre_ratio_stable_under_dilation():
    g = GridSpec(1, 16.0, 1024)
    sys = build_dyadic_system(g)
    tp = TLParams.make(2, 2, 0, 0.5, 2)
    pp = PeetreParams(1.0)
    ratios = [ktl_norm_peetre(dilated_bump(g, m), tp, sys, pp) / ktl_norm(dilated_bump(g, m), tp, sys) for m in range(-2, 3)]
    assert max(ratios) / min(ratios) <= 4


def test_export_multipliers_csv(tmp_path):
    g = GridSpec(1, 2.0, 32)
    sys = build_dyadic_system(g)
    path = export_multipliers_csv(sys, tmp_path / "m.csv")
    rows = path.read_text().splitlines()
    assert rows[0].startswith("xi_abs,phi_0")
    assert len(rows) == 33
