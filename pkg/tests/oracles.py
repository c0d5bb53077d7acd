"""Independent oracles used to freeze expected values.

Everything here deliberately avoids the package's FFT evaluation paths:
the fractional Laplacian oracle integrates the singular-kernel definition
directly, the sharp-constant oracle reduces the extremal's Rayleigh quotient
to 1-D radial quadrature through the closed-form Bessel-K Fourier transform,
and the fibering oracle maximises over a dense scale ladder.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.special import kv


def kernel_constant(N: int, s: float) -> float:
    """Normalisation making the singular integral match the |xi|^(2s) symbol:
    2^(2s) pi^(-N/2) Gamma((N+2s)/2) / Gamma(2-s) * s(1-s)."""
    return (2.0 ** (2.0 * s) * math.pi ** (-N / 2.0)
            * math.gamma((N + 2.0 * s) / 2.0) / math.gamma(2.0 - s)
            * s * (1.0 - s))


def frac_laplacian_1d(u, x: float, s: float, cutoff: float = 60.0) -> float:
    """(-Delta)^s u(x) on the line by adaptive quadrature of
    C(1,s)/2 * int (2u(x) - u(x+y) - u(x-y)) / |y|^(1+2s) dy."""
    c = kernel_constant(1, s)

    def integrand(y):
        return (2.0 * u(x) - u(x + y) - u(x - y)) / y ** (1.0 + 2.0 * s)

    val, _ = quad(integrand, 0.0, cutoff, points=[1e-8, 1e-3, 1.0], limit=400)
    tail, _ = quad(integrand, cutoff, np.inf, limit=200)
    return c * (val + tail)


def bubble_ft(rho, N: int, s: float):
    """Closed-form Fourier transform of (1+|x|^2)^(-(N-2s)/2):
    (2pi)^(N/2) 2^(1-d)/Gamma(d) rho^(d-N/2) K_(N/2-d)(rho), d=(N-2s)/2."""
    d = (N - 2.0 * s) / 2.0
    return ((2.0 * math.pi) ** (N / 2.0) * 2.0 ** (1.0 - d) / math.gamma(d)
            * rho ** (d - N / 2.0) * kv(N / 2.0 - d, rho))


def sharp_critical_constant(N: int, s: float) -> float:
    """Rayleigh quotient of the extremal by 1-D radial quadrature on both
    sides of Parseval; independent of any grid."""
    two_star = 2.0 * N / (N - 2.0 * s)
    omega = 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)

    def num_integrand(rho):
        return rho ** (N - 1.0 + 2.0 * s) * bubble_ft(rho, N, s) ** 2

    num, _ = quad(num_integrand, 0.0, 40.0, points=[1e-6, 0.1, 1.0, 5.0], limit=400)
    num += quad(num_integrand, 40.0, np.inf, limit=200)[0]
    num *= omega / (2.0 * math.pi) ** N

    den, _ = quad(lambda r: r ** (N - 1.0) * (1.0 + r * r) ** (-N), 0.0, np.inf,
                  limit=200)
    den *= omega
    return num / den ** (2.0 / two_star)


def fibering_max_dense(quad_part: float, sub: float, crit: float, p: float,
                       two_star: float, n_pts: int = 20001) -> tuple[float, float]:
    """max over t > 0 of 1/2 t^2 A - t^(p+1)/(p+1) P - t^(2*)/2* Q by a dense
    log-ladder plus local parabolic refinement; returns (max value, argmax)."""
    t = np.logspace(-6, 4, n_pts)
    vals = (0.5 * t * t * quad_part - t ** (p + 1.0) / (p + 1.0) * sub
            - t ** two_star / two_star * crit)
    i = int(np.argmax(vals))
    lo = t[max(i - 1, 0)]
    hi = t[min(i + 1, n_pts - 1)]
    ts = np.linspace(lo, hi, 40001)
    vs = (0.5 * ts * ts * quad_part - ts ** (p + 1.0) / (p + 1.0) * sub
          - ts ** two_star / two_star * crit)
    j = int(np.argmax(vs))
    return float(vs[j]), float(ts[j])


def phi_root_dense(quad_part: float, sub: float, crit: float, p: float,
                   two_star: float) -> float:
    """Root of the fibering derivative by sign scan plus Brent refinement."""
    from scipy.optimize import brentq

    def phi(t):
        return quad_part - t ** (p - 1.0) * sub - t ** (two_star - 2.0) * crit

    lo, hi = 1e-8, 1.0
    while phi(hi) > 0.0:
        hi *= 2.0
    return brentq(phi, lo, hi, xtol=1e-14, rtol=1e-15)


def lp_norm_fsum(values: np.ndarray, q: float, cell_volume: float) -> float:
    """Compensated-summation L^q norm."""
    return (math.fsum(np.abs(values.ravel()) ** q) * cell_volume) ** (1.0 / q)
