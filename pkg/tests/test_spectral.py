import math

import numpy as np
import pytest

from fracgs.errors import ConstraintViolation, GridMismatch
from fracgs.spectral import (
    Field,
    SpectralGrid,
    frac_laplacian,
    reflect,
    symmetry_defect,
    symmetrize,
)

from conftest import smooth_field
from oracles import frac_laplacian_1d, lp_norm_fsum


def test_grid_validation():
    with pytest.raises(ConstraintViolation):
        SpectralGrid(4, 64, 10.0)
    with pytest.raises(ConstraintViolation):
        SpectralGrid(1, 48, 10.0)  # not a power of two
    with pytest.raises(ConstraintViolation):
        SpectralGrid(1, 8, 10.0)
    with pytest.raises(ConstraintViolation):
        SpectralGrid(3, 256, 10.0)  # 3-D cap
    with pytest.raises(ConstraintViolation):
        SpectralGrid(2, 32, -1.0)


def test_multiplier_zero_mode_and_sign(grid1d):
    m = grid1d.multiplier(0.6)
    assert m[0] == 0.0
    assert np.all(m >= 0.0)
    assert np.count_nonzero(m == 0.0) == 1


def test_field_shape_mismatch(grid1d):
    with pytest.raises(GridMismatch):
        Field(np.zeros(17), grid1d)


def test_constant_annihilated(grid1d):
    u = Field(np.full(grid1d.shape(), 3.7), grid1d)
    out = frac_laplacian(u, 0.5)
    assert np.max(np.abs(out.values)) < 1e-12


@pytest.mark.parametrize("mode,s", [(1, 0.5), (3, 0.75), (7, 0.3)])
def test_single_mode_eigenfunction(grid1d, mode, s):
    k = math.pi * mode / grid1d.L  # integer mode of the box
    x = grid1d.axes[0]
    u = np.cos(k * x)
    out = frac_laplacian(Field(u, grid1d), s)
    assert np.allclose(out.values, k ** (2 * s) * u, rtol=1e-12, atol=1e-12)


def test_gaussian_matches_singular_integral_oracle():
    # N=1, s=1/2: spectral operator vs direct quadrature of the kernel form
    g = SpectralGrid(1, 2048, 30.0)
    x = g.axes[0]
    u = np.exp(-x * x)
    spec = frac_laplacian(Field(u, g), 0.5).values
    f = lambda t: math.exp(-t * t)
    idx = [1024, 1024 + 40, 1024 + 90, 1024 + 140]
    oracle = np.array([frac_laplacian_1d(f, x[i], 0.5) for i in idx])
    rel = np.max(np.abs(spec[idx] - oracle)) / np.max(np.abs(oracle))
    assert rel <= 1e-3


def test_lp_norm_homogeneity(grid1d, rng):
    u = smooth_field(grid1d, rng)
    base = grid1d.lp_norm(u, 3.0)
    assert grid1d.lp_norm(4.0 * u, 3.0) == pytest.approx(4.0 * base, rel=1e-14)


def test_lp_norm_against_compensated_sum(grid3d, rng):
    u = smooth_field(grid3d, rng)
    for q in (2.0, 3.0, 4.0):
        mine = grid3d.lp_norm(u, q)
        ref = lp_norm_fsum(u, q, grid3d.cell_volume)
        assert abs(mine - ref) / ref <= 1e-13


def test_parseval_l2(grid3d, rng):
    u = smooth_field(grid3d, rng)
    phys = grid3d.l2_sq(u)
    spec = grid3d.spectral_l2_sq(grid3d.fft(u))
    assert abs(phys - spec) / phys <= 1e-12


def test_self_adjoint(grid3d, rng):
    u = smooth_field(grid3d, rng)
    v = smooth_field(grid3d, rng, width=1.0)
    s = 0.75
    lhs = grid3d.inner(u, frac_laplacian(Field(v, grid3d), s).values)
    rhs = grid3d.inner(v, frac_laplacian(Field(u, grid3d), s).values)
    scale = abs(lhs) + abs(rhs)
    assert abs(lhs - rhs) / scale <= 1e-11


def test_seminorm_equals_operator_pairing(grid3d, rng):
    u = smooth_field(grid3d, rng)
    s = 0.6
    direct = grid3d.seminorm_sq(u, s)
    pairing = grid3d.inner(u, frac_laplacian(Field(u, grid3d), s).values)
    assert abs(direct - pairing) / direct <= 1e-10


def test_half_power_composes(grid1d, rng):
    u = smooth_field(grid1d, rng)
    s = 0.7
    once = frac_laplacian(Field(u, grid1d), s).values
    twice = frac_laplacian(frac_laplacian(Field(u, grid1d), s / 2), s / 2).values
    assert np.max(np.abs(once - twice)) / np.max(np.abs(once)) <= 1e-12


def test_box_resolution_convergence():
    # algebraically decaying profile: doubling n and L must shrink the
    # seminorm error with observed order >= 2
    s = 0.5

    def seminorm(n, L):
        g = SpectralGrid(1, n, L)
        x = g.axes[0]
        return g.seminorm_sq(1.0 / (1.0 + x * x), s)

    ref = seminorm(8192, 320.0)
    errs = [abs(seminorm(n, L) - ref) for n, L in [(512, 20.0), (1024, 40.0), (2048, 80.0)]]
    assert errs[0] > errs[1] > errs[2]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 2.0


def test_reflection_and_symmetrize(grid1d, rng):
    u = smooth_field(grid1d, rng)
    sym = symmetrize(u)
    assert symmetry_defect(sym) <= 1e-14
    assert np.allclose(sym, 0.5 * (u + reflect(u, 0)))
    # an even profile is exactly symmetric on the reflection-closed grid
    x = grid1d.axes[0]
    assert symmetry_defect(np.exp(-x * x)) == 0.0
