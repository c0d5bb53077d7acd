"""Ground states of the single fractional equation (-Delta)^s u + beta u = gamma u^p.

The positive radial profile w is computed by a Petviashvili fixed-point
iteration: each step applies the resolvent of the linear part to the
nonlinearity and renormalises the amplitude with the stabilising exponent
p/(p-1), which makes the scheme contractive for single-power nonlinearities.
The converged profile is rescaled once so that the Nehari identity
<Lw, w> = <N(w), w> holds exactly, removing the residual normalisation bias.

From the beta = gamma = 1 solution the sharp subcritical embedding constant
is extracted two ways (Rayleigh quotient and energy inversion), which must
agree; their spread is the advertised uncertainty.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ConstraintViolation,
    InconsistentEstimate,
    NoConvergence,
    NonpositiveProfile,
)
from .spectral import Field, SpectralGrid, assert_radial, symmetrize


@dataclass
class ScalarGroundState:
    """Converged positive radial profile together with its diagnostics."""

    profile: Field
    beta: float
    gamma: float
    p: float
    s: float
    energy: float
    residual_norm: float      # L2 norm of (-Delta)^s w + beta w - gamma w^p
    residual_rel: float       # residual_norm / |w|_2
    iterations: int
    c_p1: float | None = None  # only populated for beta = gamma = 1


def _validate_scalar_params(N: int, s: float, p: float, beta: float, gamma: float) -> None:
    if not (0.0 < s < 1.0):
        raise ConstraintViolation(f"0 < s < 1 fails (s={s})")
    if not (beta > 0.0):
        raise ConstraintViolation(f"beta > 0 fails (beta={beta})")
    if not (gamma > 0.0):
        raise ConstraintViolation(f"gamma > 0 fails (gamma={gamma})")
    if not (p > 1.0):
        raise ConstraintViolation(f"p > 1 fails (p={p})")
    if N > 2.0 * s:
        two_star = 2.0 * N / (N - 2.0 * s)
        if not (p < two_star - 1.0):
            raise ConstraintViolation(f"p < 2*-1 fails (p={p}, 2*-1={two_star - 1.0})")
    # N <= 2s: every p > 1 is energy-subcritical, no upper restriction


def gaussian_seed(grid: SpectralGrid, amplitude: float = 1.0, width: float | None = None) -> np.ndarray:
    """Default positive radial seed: unit-amplitude Gaussian of width L/10."""
    if width is None:
        width = grid.L / 10.0
    r = grid.radius()
    return amplitude * np.exp(-(r * r) / (2.0 * width * width))


def solve_scalar(
    grid: SpectralGrid,
    beta: float,
    gamma: float,
    p: float,
    s: float,
    tol: float = 1e-10,
    max_iter: int = 2000,
    seed: np.ndarray | None = None,
) -> ScalarGroundState:
    """Petviashvili iteration for the positive radial ground state.

    Converged when the relative L2 update is <= tol and the relative equation
    residual is <= 10*tol.  Raises NonpositiveProfile if the iteration leaves
    the positive cone (a zero seed does immediately: zero is a fixed point,
    the scheme needs a nonzero positive seed), NoConvergence at max_iter.
    """
    _validate_scalar_params(grid.N, s, p, beta, gamma)
    u = gaussian_seed(grid) if seed is None else np.array(seed, dtype=float)
    if u.shape != grid.shape():
        raise ConstraintViolation("seed shape does not match grid")

    m = grid.multiplier(s)
    resolvent = 1.0 / (m + beta)
    theta = p / (p - 1.0)
    neg_cap = 1e-3  # negative-bulk fraction that aborts the run

    it = 0
    for it in range(1, max_iter + 1):
        coeff = grid.fft(u)
        lin = grid.seminorm_sq(u, s, coeff=coeff) + beta * grid.l2_sq(u)
        nl_field = gamma * np.abs(u) ** (p - 1.0) * u
        nl_pair = grid.inner(nl_field, u)
        if not np.isfinite(nl_pair) or nl_pair <= 0.0:
            raise NonpositiveProfile(
                "iteration left the positive cone (nonlinearity pairing <= 0); "
                "a nonzero positive seed is required"
            )
        stab = lin / nl_pair
        u_next = stab**theta * grid.ifft(resolvent * grid.fft(nl_field))

        umax = float(np.max(np.abs(u_next)))
        if umax == 0.0 or not np.isfinite(umax):
            raise NonpositiveProfile("iterate collapsed to zero")
        if float(np.min(u_next)) < -neg_cap * umax:
            raise NonpositiveProfile("iterate developed a negative bulk")

        assert_radial(u_next, 1e-12, what="scalar iterate")
        u_next = symmetrize(u_next)

        update = math.sqrt(grid.l2_sq(u_next - u) / max(grid.l2_sq(u), 1e-300))
        u = u_next
        if update <= tol:
            res_abs, res_rel = _residual(grid, u, beta, gamma, p, s)
            if res_rel <= 10.0 * tol:
                break
    else:
        raise NoConvergence(f"Petviashvili did not converge in {max_iter} iterations")

    # exact Nehari rescale: enforce <Lw,w> = <N(w),w>
    coeff = grid.fft(u)
    lin = grid.seminorm_sq(u, s, coeff=coeff) + beta * grid.l2_sq(u)
    nl_pair = gamma * grid.integrate(np.abs(u) ** (p + 1.0))
    u = (lin / nl_pair) ** (1.0 / (p - 1.0)) * u

    res_abs, res_rel = _residual(grid, u, beta, gamma, p, s)
    prof = Field(u, grid)
    energy = (0.5 * grid.seminorm_sq(u, s) + 0.5 * beta * grid.l2_sq(u)
              - gamma / (p + 1.0) * grid.integrate(np.abs(u) ** (p + 1.0)))

    c_p1 = None
    if beta == 1.0 and gamma == 1.0:
        c_p1 = embedding_constant_quotient(prof, s, p)
    return ScalarGroundState(prof, beta, gamma, p, s, energy, res_abs, res_rel,
                             it, c_p1)


def _residual(grid: SpectralGrid, u: np.ndarray, beta: float, gamma: float,
              p: float, s: float) -> tuple[float, float]:
    lap = grid.ifft(grid.multiplier(s) * grid.fft(u))
    r = lap + beta * u - gamma * np.abs(u) ** (p - 1.0) * u
    res_abs = math.sqrt(grid.l2_sq(r))
    res_rel = res_abs / math.sqrt(grid.l2_sq(u))
    return res_abs, res_rel


def embedding_constant_quotient(w: Field, s: float, p: float) -> float:
    """Rayleigh-quotient estimate |w|_{H^s}^2 / |w|_{p+1}^2 of the sharp
    subcritical constant (the ground state is its minimiser)."""
    g = w.grid
    num = g.seminorm_sq(w.values, s) + g.l2_sq(w.values)
    den = g.integrate(np.abs(w.values) ** (p + 1.0)) ** (2.0 / (p + 1.0))
    return num / den


@dataclass
class EmbeddingConstant:
    """Two independent estimates of the sharp subcritical constant."""

    quotient: float      # Rayleigh quotient of the computed ground state
    from_energy: float   # inversion of the ground-state energy identity
    value: float         # adopted value (the quotient)
    spread: float        # relative disagreement of the two estimates


def extract_c_p1(state: ScalarGroundState, rel_tol: float = 1e-3) -> EmbeddingConstant:
    """Extract the sharp subcritical constant from the beta = gamma = 1 state.

    Estimate (a) is the Rayleigh quotient; estimate (b) inverts the identity
    energy = (1/2 - 1/(p+1)) * C^((p+1)/(p-1)).  Raises InconsistentEstimate
    when they disagree by more than rel_tol.
    """
    if state.beta != 1.0 or state.gamma != 1.0:
        raise ConstraintViolation("embedding constant requires beta = gamma = 1")
    p = state.p
    quot = embedding_constant_quotient(state.profile, state.s, p)
    half_gap = 0.5 - 1.0 / (p + 1.0)
    from_energy = (state.energy / half_gap) ** ((p - 1.0) / (p + 1.0))
    spread = abs(quot - from_energy) / quot
    if spread > rel_tol:
        raise InconsistentEstimate(
            f"embedding-constant estimates disagree: quotient {quot:.8g} vs "
            f"energy-based {from_energy:.8g} (rel {spread:.2e} > {rel_tol:.1e})"
        )
    return EmbeddingConstant(quot, from_energy, quot, spread)


def scaled_energy(beta: float, gamma: float, base: float, p: float, N: int, s: float) -> float:
    """Ground-state energy at coefficients (beta, gamma) from the (1,1) energy.

    The profile rescaling w_(beta,gamma)(x) = beta^(1/(p-1)) gamma^(-1/(p-1))
    w(beta^(1/(2s)) x) gives energy gamma^(-2/(p-1)) beta^((p+1)/(p-1) - N/(2s))
    times the base value.
    """
    if not (base > 0.0):
        raise ConstraintViolation(f"base energy > 0 fails (base={base})")
    expo = (p + 1.0) / (p - 1.0) - N / (2.0 * s)
    return gamma ** (-2.0 / (p - 1.0)) * beta**expo * base


def export_profile(state: ScalarGroundState, path: str | Path) -> Path:
    """Write the profile as one line per gridpoint (coordinates, value) with a
    JSON side-car carrying parameters, energy and residual."""
    path = Path(path)
    g = state.profile.grid
    mesh = g.coordinates()
    cols = [c.ravel() for c in mesh] + [state.profile.values.ravel()]
    with path.open("w") as fh:
        for row in zip(*cols):
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
    meta = {
        "N": g.N, "n": g.n, "L": g.L,
        "beta": state.beta, "gamma": state.gamma, "p": state.p, "s": state.s,
        "energy": state.energy,
        "residual_norm": state.residual_norm,
        "residual_rel": state.residual_rel,
        "iterations": state.iterations,
        "c_p1": state.c_p1,
    }
    side = path.with_suffix(path.suffix + ".meta.json")
    side.write_text(json.dumps(meta, indent=2, sort_keys=True))
    return path
