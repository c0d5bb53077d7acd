"""Periodic pseudospectral discretisation of the fractional Laplacian.

The operator (-Delta)^s is realised as the Fourier multiplier |xi|^(2s) on a
uniform periodic box [-L, L)^N.  All norms and integrals use the box's
trapezoidal quadrature (which on a periodic grid is a plain cell-volume
weighted sum), and D^s seminorms are evaluated on the spectral side via
Parseval.

The box truncation of R^N is a convergence parameter: profiles with algebraic
decay (the generic case for fractional-order problems) require L-sweeps to
quantify the truncation error; nothing here assumes it away.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import ConstraintViolation, GridMismatch, SymmetryLost

_fft_workers = 1


def set_fft_workers(k: int) -> None:
    """Set the number of worker threads used by the FFT backend."""
    global _fft_workers
    _fft_workers = max(1, int(k))


class SpectralGrid:
    """Uniform symmetric periodic grid with cached wavenumber tables.

    Points along each axis are x_j = -L + j * dx, dx = 2L/n, so the grid is
    symmetric under x -> -x (index reflection j -> (n - j) mod n).  Instances
    are immutable shared data; multiplier arrays are cached per exponent.
    """

    def __init__(self, N: int, n: int, L: float):
        if N not in (1, 2, 3):
            raise ConstraintViolation(f"dimension N in {{1,2,3}} fails (N={N})")
        if n < 16 or (n & (n - 1)) != 0:
            raise ConstraintViolation(f"n >= 16 and power of two fails (n={n})")
        if N == 3 and n > 128:
            raise ConstraintViolation(f"n <= 128 per axis at N=3 fails (n={n})")
        if not (L > 0):
            raise ConstraintViolation(f"L > 0 fails (L={L})")
        self.N = N
        self.n = n
        self.L = float(L)
        self.dx = 2.0 * self.L / n
        self.cell_volume = self.dx**N
        self.npoints = n**N
        ax = -self.L + self.dx * np.arange(n)
        self.axes = tuple(ax for _ in range(N))
        # per-axis angular wavenumbers; last axis in half-spectrum (rfft) layout
        self.wavenumbers = tuple(
            2.0 * np.pi * np.fft.fftfreq(n, d=self.dx) for _ in range(N)
        )
        kfull = [2.0 * np.pi * np.fft.fftfreq(n, d=self.dx) for _ in range(N - 1)]
        kfull.append(2.0 * np.pi * np.fft.rfftfreq(n, d=self.dx))
        mesh = np.meshgrid(*kfull, indexing="ij")
        self.k2 = sum(k * k for k in mesh)
        # Parseval weights for the half spectrum: conjugate modes count twice
        w = np.full(self.k2.shape, 2.0)
        w[..., 0] = 1.0
        if n % 2 == 0:
            w[..., -1] = 1.0
        self._parseval = w / self.npoints
        self._mult_cache: dict[float, np.ndarray] = {}

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Full N-d coordinate arrays (ij indexing)."""
        return np.meshgrid(*self.axes, indexing="ij")

    def radius(self) -> np.ndarray:
        """|x| over the full grid."""
        mesh = self.coordinates()
        return np.sqrt(sum(c * c for c in mesh))

    def multiplier(self, exponent: float) -> np.ndarray:
        """|xi|^(2*exponent) on the half-spectrum layout, zero mode exactly 0."""
        key = float(exponent)
        m = self._mult_cache.get(key)
        if m is None:
            with np.errstate(divide="ignore"):
                m = np.where(self.k2 > 0.0, self.k2**key, 0.0)
            m.flags.writeable = False
            self._mult_cache[key] = m
        return m

    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.N

    def compatible(self, other: "SpectralGrid") -> bool:
        return self is other or (
            self.N == other.N and self.n == other.n and self.L == other.L
        )

    def __repr__(self) -> str:
        return f"SpectralGrid(N={self.N}, n={self.n}, L={self.L})"

    # --- transforms -------------------------------------------------------

    def fft(self, values: np.ndarray) -> np.ndarray:
        return sfft.rfftn(values, workers=_fft_workers)

    def ifft(self, coeff: np.ndarray) -> np.ndarray:
        return sfft.irfftn(coeff, s=self.shape(), workers=_fft_workers)

    # --- quadrature and norms on raw arrays -------------------------------

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(values)) * self.cell_volume

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.sum(a * b)) * self.cell_volume

    def l2_sq(self, values: np.ndarray) -> float:
        return float(np.sum(values * values)) * self.cell_volume

    def lp_norm(self, values: np.ndarray, q: float) -> float:
        if q < 1:
            raise ConstraintViolation(f"q >= 1 fails (q={q})")
        return float(np.sum(np.abs(values) ** q) * self.cell_volume) ** (1.0 / q)

    def seminorm_sq(self, values: np.ndarray, s: float, coeff: np.ndarray | None = None) -> float:
        """D^s seminorm squared: sum over modes of |xi|^(2s) |u_hat|^2 (Parseval).

        Pass precomputed rfftn coefficients via `coeff` to reuse a transform.
        """
        if coeff is None:
            coeff = self.fft(values)
        m = self.multiplier(s)
        return float(np.sum(self._parseval * m * (coeff.real**2 + coeff.imag**2))) * self.cell_volume

    def spectral_l2_sq(self, coeff: np.ndarray) -> float:
        """L^2 norm squared evaluated from rfftn coefficients."""
        return float(np.sum(self._parseval * (coeff.real**2 + coeff.imag**2))) * self.cell_volume


@dataclass
class Field:
    """Real-valued grid function with quadrature accessors."""

    values: np.ndarray
    grid: SpectralGrid

    def __post_init__(self):
        if self.values.shape != self.grid.shape():
            raise GridMismatch(
                f"field shape {self.values.shape} != grid shape {self.grid.shape()}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ConstraintViolation("field entries must be finite")

    def l2_sq(self) -> float:
        return self.grid.l2_sq(self.values)

    def lp_norm(self, q: float) -> float:
        return self.grid.lp_norm(self.values, q)

    def ds_seminorm_sq(self, s: float) -> float:
        return self.grid.seminorm_sq(self.values, s)

    def integrate(self) -> float:
        return self.grid.integrate(self.values)


@dataclass
class FieldPair:
    """A pair (u, v) of fields on a common grid."""

    u: Field
    v: Field

    def __post_init__(self):
        if not self.u.grid.compatible(self.v.grid):
            raise GridMismatch("pair components live on different grids")

    @property
    def grid(self) -> SpectralGrid:
        return self.u.grid


def require_same_grid(*fields: Field) -> SpectralGrid:
    g = fields[0].grid
    for f in fields[1:]:
        if not g.compatible(f.grid):
            raise GridMismatch("fields live on different grids")
    return g


def frac_laplacian(u: Field, order: float) -> Field:
    """Apply (-Delta)^order via the Fourier multiplier |xi|^(2*order).

    The half-spectrum transform keeps the output structurally real; the zero
    mode is annihilated exactly (no regularisation).
    """
    g = u.grid
    out = g.ifft(g.multiplier(order) * g.fft(u.values))
    return Field(out, g)


def apply_multiplier(grid: SpectralGrid, values: np.ndarray, exponent: float) -> np.ndarray:
    """Raw-array version of frac_laplacian for solver inner loops."""
    return grid.ifft(grid.multiplier(exponent) * grid.fft(values))


def reflect(values: np.ndarray, axis: int) -> np.ndarray:
    """Grid image of x -> -x along one axis (index map j -> (n - j) mod n)."""
    return np.roll(np.flip(values, axis=axis), 1, axis=axis)


def symmetry_defect(values: np.ndarray) -> float:
    """Max relative deviation from evenness under all axis reflections."""
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return 0.0
    worst = 0.0
    for ax in range(values.ndim):
        worst = max(worst, float(np.max(np.abs(values - reflect(values, ax)))))
    return worst / scale

def assert_radial(values: np.ndarray, tol: float = 1e-12, what: str = "field") -> None:
    d = symmetry_defect(values)
    if d > tol:
        raise SymmetryLost(f"{what} left the even-symmetric class: defect {d:.3e} > {tol:.1e}")


def symmetrize(values: np.ndarray) -> np.ndarray:
    """Project onto the even-symmetric class (idempotent, removes roundoff drift)."""
    out = values
    for ax in range(values.ndim):
        out = 0.5 * (out + reflect(out, ax))
    return out
