"""Problem parameters and the energy/Nehari machinery of the coupled system.

The system on R^N is

    (-Delta)^s u + mu * u = |u|^(p-1) u + lambda * v,
    (-Delta)^s v + nu * v = |v|^(2s*-2) v + lambda * u,

with 0 < s < 1, N > 2s, 1 < p < 2* - 1, 2* = 2N/(N-2s) the critical exponent,
mu, nu > 0 and coupling 0 < lambda < sqrt(mu*nu).  Everything in this module
is a pure evaluation over fields: the coupled energy and its term breakdown,
the decoupled scalar/critical energies, and the fibering map

    phi(t) = |(u,v)|_D^2 + int(mu u^2 + nu v^2)
             - t^(p-1) int|u|^(p+1) - t^(2*-2) int|v|^(2*) - 2 lambda int(uv),

whose unique positive root projects a pair onto the Nehari manifold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, NonpositiveT, ZeroPair
from .spectral import Field, FieldPair, require_same_grid


@dataclass(frozen=True)
class ProblemParams:
    """Validated parameter tuple with derived exponents.

    two_star = 2N/(N-2s); alpha = N(1/(p+1) - 1/2*) lies in (0, s) and controls
    the interpolation exponents of the threshold constants.
    """

    N: int
    s: float
    p: float
    mu: float
    nu: float
    lam: float
    two_star: float
    alpha: float

    @property
    def threshold_exponent(self) -> float:
        """(p+1)/(p-1) - N/(2s): the power of mu in the scalar energy scaling."""
        return (self.p + 1.0) / (self.p - 1.0) - self.N / (2.0 * self.s)


def validate_params(N, s, p, mu, nu, lam) -> ProblemParams:
    """Check the model inequalities and populate derived exponents.

    Raises ConstraintViolation naming the violated inequality.
    """
    vals = [N, s, p, mu, nu, lam]
    if not all(np.isfinite(v) for v in vals):
        raise ConstraintViolation("all parameters finite fails")
    N = int(N)
    if N < 1:
        raise ConstraintViolation(f"N >= 1 fails (N={N})")
    if not (0.0 < s < 1.0):
        raise ConstraintViolation(f"0 < s < 1 fails (s={s})")
    if not (N > 2.0 * s):
        raise ConstraintViolation(f"N > 2s fails (N={N}, s={s})")
    two_star = 2.0 * N / (N - 2.0 * s)
    if not (p > 1.0):
        raise ConstraintViolation(f"p > 1 fails (p={p})")
    if not (p < two_star - 1.0):
        raise ConstraintViolation(f"p < 2*-1 fails (p={p}, 2*-1={two_star - 1.0})")
    if not (mu > 0.0):
        raise ConstraintViolation(f"mu > 0 fails (mu={mu})")
    if not (nu > 0.0):
        raise ConstraintViolation(f"nu > 0 fails (nu={nu})")
    root = math.sqrt(mu * nu)
    if not (0.0 < lam < root):
        raise ConstraintViolation(
            f"0 < lambda < sqrt(mu*nu) fails (lambda={lam}, sqrt(mu*nu)={root})"
        )
    alpha = N * (1.0 / (p + 1.0) - 1.0 / two_star)
    # alpha in (0, s) is implied by 1 < p < 2*-1; assert as a guard
    if not (0.0 < alpha < s):
        raise ConstraintViolation(f"0 < alpha < s fails (alpha={alpha})")
    return ProblemParams(N, float(s), float(p), float(mu), float(nu), float(lam),
                         two_star, alpha)


@dataclass
class EnergyBreakdown:
    """Term-by-term decomposition of the coupled energy."""

    kinetic_u: float
    kinetic_v: float
    mass_u: float
    mass_v: float
    pot_sub: float
    pot_crit: float
    coupling: float
    total: float


@dataclass
class NehariResidual:
    """Value of the fibering derivative phi at a given scale t."""

    value: float
    t: float


@dataclass
class PairQuadratures:
    """The five integrals that determine the fibering map of a pair.

    quad = |(u,v)|_D^2 + int(mu u^2 + nu v^2) - 2 lambda int(uv) is the
    (positive-definite) quadratic part; sub and crit are the two power terms.
    """

    dsq: float        # |(u,v)|_D^2
    mass: float       # int(mu u^2 + nu v^2)
    sub: float        # int |u|^(p+1)
    crit: float       # int |v|^(2*)
    cross: float      # int u v

    def quadratic(self, lam: float) -> float:
        return self.dsq + self.mass - 2.0 * lam * self.cross

    def phi(self, lam: float, t: float, p: float, two_star: float) -> float:
        return (self.quadratic(lam)
                - t ** (p - 1.0) * self.sub
                - t ** (two_star - 2.0) * self.crit)

    def energy_at(self, lam: float, t: float, p: float, two_star: float) -> float:
        return (0.5 * t * t * self.quadratic(lam)
                - t ** (p + 1.0) / (p + 1.0) * self.sub
                - t ** two_star / two_star * self.crit)


def pair_quadratures(params: ProblemParams, pair: FieldPair) -> PairQuadratures:
    g = require_same_grid(pair.u, pair.v)
    u, v = pair.u.values, pair.v.values
    dsq = g.seminorm_sq(u, params.s) + g.seminorm_sq(v, params.s)
    mass = params.mu * g.l2_sq(u) + params.nu * g.l2_sq(v)
    sub = g.integrate(np.abs(u) ** (params.p + 1.0))
    crit = g.integrate(np.abs(v) ** params.two_star)
    cross = g.inner(u, v)
    return PairQuadratures(dsq, mass, sub, crit, cross)


def energy_system(params: ProblemParams, pair: FieldPair) -> EnergyBreakdown:
    """Coupled energy split into its terms; `total` assembles them."""
    g = require_same_grid(pair.u, pair.v)
    u, v = pair.u.values, pair.v.values
    kin_u = 0.5 * g.seminorm_sq(u, params.s)
    kin_v = 0.5 * g.seminorm_sq(v, params.s)
    mass_u = 0.5 * params.mu * g.l2_sq(u)
    mass_v = 0.5 * params.nu * g.l2_sq(v)
    pot_sub = g.integrate(np.abs(u) ** (params.p + 1.0)) / (params.p + 1.0)
    pot_crit = g.integrate(np.abs(v) ** params.two_star) / params.two_star
    coupling = params.lam * g.inner(u, v)
    total = kin_u + kin_v + mass_u + mass_v - pot_sub - pot_crit - coupling
    return EnergyBreakdown(kin_u, kin_v, mass_u, mass_v, pot_sub, pot_crit,
                           coupling, total)


def energy_scalar(beta: float, gamma: float, p: float, s: float, u: Field) -> float:
    """Single-component energy 1/2|u|_Ds^2 + beta/2 |u|_2^2 - gamma/(p+1) |u|_(p+1)^(p+1)."""
    if not (beta > 0.0):
        raise ConstraintViolation(f"beta > 0 fails (beta={beta})")
    if not (gamma > 0.0):
        raise ConstraintViolation(f"gamma > 0 fails (gamma={gamma})")
    g = u.grid
    return (0.5 * g.seminorm_sq(u.values, s)
            + 0.5 * beta * g.l2_sq(u.values)
            - gamma / (p + 1.0) * g.integrate(np.abs(u.values) ** (p + 1.0)))


def energy_crit(v: Field, s: float, two_star: float) -> float:
    """Critical-component energy  1/2|v|_Ds^2 - 1/2* |v|_(2*)^(2*)."""
    g = v.grid
    return (0.5 * g.seminorm_sq(v.values, s)
            - g.integrate(np.abs(v.values) ** two_star) / two_star)


def nehari_residual(params: ProblemParams, pair: FieldPair, t: float) -> NehariResidual:
    """Evaluate phi(lambda, u, v, t); strictly decreasing in t once the
    quadratic part is divided out."""
    if not (t > 0.0):
        raise NonpositiveT(f"t > 0 fails (t={t})")
    q = pair_quadratures(params, pair)
    if q.dsq == 0.0 and q.mass == 0.0:
        raise ZeroPair("phi undefined for the zero pair")
    return NehariResidual(q.phi(params.lam, t, params.p, params.two_star), t)


def nehari_root_from_quadratures(params: ProblemParams, q: PairQuadratures,
                                 t_lo: float = 1e-8,
                                 max_bisect: int = 200) -> float:
    """Unique positive root of phi by bracketed bisection.

    The bracket top is doubled until phi changes sign; iteration stops after
    max_bisect halvings or when |phi| <= 1e-12 * quadratic part.
    """
    if q.sub <= 0.0 and q.crit <= 0.0:
        raise ZeroPair("no power terms: pair has no Nehari projection")
    quad = q.quadratic(params.lam)
    if quad <= 0.0:
        # impossible for lambda < sqrt(mu*nu) with nonzero pair; guard anyway
        raise ConstraintViolation("quadratic part nonpositive; pair invalid")
    p, ts, lam = params.p, params.two_star, params.lam
    tol = 1e-12 * quad

    # closed forms when only one power term is present
    if q.crit == 0.0:
        return (quad / q.sub) ** (1.0 / (p - 1.0))
    if q.sub == 0.0:
        return (quad / q.crit) ** (1.0 / (ts - 2.0))

    t_hi = max(t_lo * 2.0, 1.0)
    while q.phi(lam, t_hi, p, ts) > 0.0:
        t_hi *= 2.0
        if t_hi > 1e12:
            raise ConstraintViolation("failed to bracket the Nehari root")
    lo, hi = t_lo, t_hi
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        val = q.phi(lam, mid, p, ts)
        if abs(val) <= tol:
            return mid
        if val > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def nehari_root(params: ProblemParams, pair: FieldPair) -> float:
    return nehari_root_from_quadratures(params, pair_quadratures(params, pair))


def nehari_project(params: ProblemParams, pair: FieldPair) -> FieldPair:
    """Scale a nonzero pair onto the Nehari manifold: (t* u, t* v)."""
    t = nehari_root(params, pair)
    g = pair.grid
    return FieldPair(Field(t * pair.u.values, g), Field(t * pair.v.values, g))


def fibering_max_single_power(a: float, b: float, p: float) -> float:
    """max over t > 0 of  (1/2) t^2 a - t^(p+1)/(p+1) b  for a, b > 0.

    This is the fibering maximum of any one-power energy: a is the full
    quadratic form, b the power integral.
    """
    if a <= 0.0 or b <= 0.0:
        raise ConstraintViolation("fibering maximum needs positive a, b")
    ratio = (p + 1.0) / (p - 1.0)
    return (0.5 - 1.0 / (p + 1.0)) * a**ratio * b ** (-2.0 / (p - 1.0))


def fibering_max_critical(a: float, b: float, N: int, s: float) -> float:
    """max over t > 0 of (1/2) t^2 a - t^(2*)/2* b  =  (s/N) (a / b^(2/2*))^(N/2s)."""
    if a <= 0.0 or b <= 0.0:
        raise ConstraintViolation("fibering maximum needs positive a, b")
    two_star = 2.0 * N / (N - 2.0 * s)
    return (s / N) * (a / b ** (2.0 / two_star)) ** (N / (2.0 * s))
