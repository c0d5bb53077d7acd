"""Ground-state level of the coupled system by Nehari-constrained descent.

The level A = inf over the Nehari manifold of the coupled energy is estimated
by projected gradient descent: a plain L2 gradient step on the energy followed
by rescaling back onto the manifold (the fibering root).  Since the manifold
is a natural constraint, the full Euler-Lagrange residual of the system
vanishes at a constrained minimiser, so the gradient norm doubles as the
solution residual.

Existence/nonexistence verdicts compare the reached level against the critical
compactness ceiling (s/N) S_s^(N/2s) with a hard two-sided margin: descent can
certify a minimiser strictly below the ceiling, while nonexistence manifests
as every restart stalling at or above it (the minimising sequences escape
through unresolvable concentration scales, so the discrete levels stay pinned
at the discrete concentration floor).  Anything in between is reported as
inconclusive rather than classified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConstraintViolation,
    NoConvergence,
    NonMonotoneVerdicts,
    NotSuperThreshold,
    ScaleClash,
    ZeroPair,
)
from .model import (
    PairQuadratures,
    ProblemParams,
    nehari_project,
    nehari_root_from_quadratures,
    validate_params,
)
from .scalar import ScalarGroundState, solve_scalar
from .spectral import Field, FieldPair, SpectralGrid, assert_radial, symmetrize
from .thresholds import ThresholdReport, critical_level, threshold_report

VERDICT_EXISTS = "Exists"
VERDICT_NO_GROUND_STATE = "NoGroundState"
VERDICT_INCONCLUSIVE = "Inconclusive"

# Verdict margin delta: Exists needs level <= (1-2*delta)*ceiling, nonexistence
# needs every seed pinned at >= (1-delta)*ceiling (one-sided; stalls far above
# the ceiling are still evidence of nonexistence, the escape scale being
# unresolvable on any fixed grid).
VERDICT_DELTA = 0.02


@dataclass
class SeedResult:
    """Outcome of one descent restart."""

    seed_id: str
    energy: float
    residual: float
    iterations: int
    status: str  # "converged" | "stalled" | "maxiter"


@dataclass
class GroundStateRun:
    """Best candidate and classification for one parameter point."""

    params: ProblemParams
    pair: FieldPair
    a_level: float
    critical_level: float
    a0_bound: float | None
    verdict: str
    residual: float
    seed_id: str
    iterations: int
    seed_results: list[SeedResult] = field(default_factory=list)


@dataclass
class BubbleFamily:
    """Cutoff concentration profile with its three trial-energy integrals."""

    epsilon: float
    cutoff_radius: float
    v_eps: Field
    seminorm_sq: float   # |v_eps|_Ds^2
    mass_sq: float       # int v_eps^2
    crit_pow: float      # int |v_eps|^(2*)


def smooth_cutoff(r: np.ndarray, radius: float) -> np.ndarray:
    """C-infinity cutoff: 1 on |x| <= radius, 0 outside 2*radius."""
    t = r / radius
    out = np.zeros_like(t)
    out[t <= 1.0] = 1.0
    band = (t > 1.0) & (t < 2.0)
    tb = t[band]

    def bump(x):
        val = np.zeros_like(x)
        pos = x > 0.0
        val[pos] = np.exp(-1.0 / x[pos])
        return val

    up = bump(2.0 - tb)
    down = bump(tb - 1.0)
    out[band] = up / (up + down)
    return out


def bubble_profile(grid: SpectralGrid, s: float, epsilon: float, radius: float,
                   amplitude: float = 1.0) -> np.ndarray:
    """eta(x) * eps^(-(N-2s)/2) V(x/eps) with V(y) = amplitude*(1+|y|^2)^(-(N-2s)/2)."""
    r = grid.radius()
    expo = (grid.N - 2.0 * s) / 2.0
    core = epsilon**expo * (epsilon**2 + r * r) ** (-expo)  # = eps^(-expo) V(x/eps)
    return smooth_cutoff(r, radius) * amplitude * core


def build_bubble(grid: SpectralGrid, s: float, epsilon: float, radius: float,
                 s_s: float) -> BubbleFamily:
    """Cutoff extremal bubble normalised so the sharp-quotient extremal has
    |V|_(2*)^(2*) = S_s^(N/2s); reports the three estimate-block integrals."""
    if not (2.0 * radius < grid.L):
        raise ScaleClash(f"2r < L fails (r={radius}, L={grid.L})")
    if not (epsilon <= radius / 4.0):
        raise ScaleClash(f"eps <= r/4 fails (eps={epsilon}, r={radius})")
    N = grid.N
    two_star = 2.0 * N / (N - 2.0 * s)
    # int over R^N of (1+|y|^2)^(-N) dy
    unit_mass = math.pi ** (N / 2.0) * math.gamma(N / 2.0) / math.gamma(N)
    amp = (s_s ** (N / (2.0 * s)) / unit_mass) ** (1.0 / two_star)
    vals = bubble_profile(grid, s, epsilon, radius, amplitude=amp)
    f = Field(vals, grid)
    return BubbleFamily(
        epsilon=epsilon,
        cutoff_radius=radius,
        v_eps=f,
        seminorm_sq=grid.seminorm_sq(vals, s),
        mass_sq=grid.l2_sq(vals),
        crit_pow=grid.integrate(np.abs(vals) ** two_star),
    )


def ansatz_bound_a0(params: ProblemParams, report: ThresholdReport,
                    c_p1: float) -> float:
    """Upper bound for the ground-state level from the proportional ansatz
    (w_(beta,gamma), a * w_(beta,gamma)) at the optimal mixing ratio a.

    A0 = (1+a^2)^(N/2s) (mu + nu a^2 - 2 lambda a)^((p+1)/(p-1)-N/2s)
         * (1/2 - 1/(p+1)) * C^((p+1)/(p-1)).
    """
    if report.a_star is None:
        raise NotSuperThreshold("ansatz bound requires mu > mu0")
    a = report.a_star
    p = params.p
    expo = params.threshold_exponent
    base = params.mu + params.nu * a * a - 2.0 * params.lam * a
    if base <= 0.0:
        raise ConstraintViolation("ansatz quadratic coefficient nonpositive")
    return ((1.0 + a * a) ** (params.N / (2.0 * params.s)) * base**expo
            * (0.5 - 1.0 / (p + 1.0)) * c_p1 ** ((p + 1.0) / (p - 1.0)))


def ansatz_coefficients(params: ProblemParams, a_star: float) -> tuple[float, float]:
    """(beta, gamma) of the scalar equation solved by the ansatz profile."""
    a = a_star
    beta = (params.mu + params.nu * a * a - 2.0 * params.lam * a) / (1.0 + a * a)
    gamma = 1.0 / (1.0 + a * a)
    return beta, gamma


# --------------------------------------------------------------------------
# seeds


@dataclass
class Seed:
    seed_id: str
    u: np.ndarray
    v: np.ndarray


def build_seeds(
    params: ProblemParams,
    grid: SpectralGrid,
    rng: np.random.Generator,
    scalar_cache: dict | None = None,
    report: ThresholdReport | None = None,
    radius: float | None = None,
) -> list[Seed]:
    """Competitor families used as descent restarts.

    Covers the decoupled scalar route (w_mu, 0), two bubble scales (0, v_eps),
    the proportional ansatz at the optimal mixing ratio (super-threshold
    only), and one random positive radial pair.
    """
    if radius is None:
        radius = grid.L / 4.0
    r = grid.radius()
    seeds: list[Seed] = []
    zero = np.zeros(grid.shape())

    if report is not None and report.a_star is not None:
        beta, gamma = ansatz_coefficients(params, report.a_star)
        w_bg = _cached_scalar(grid, beta, gamma, params, scalar_cache)
        seeds.append(Seed("ansatz", w_bg.profile.values.copy(),
                          report.a_star * w_bg.profile.values))

    w_mu = _cached_scalar(grid, params.mu, 1.0, params, scalar_cache)
    seeds.append(Seed("scalar-u", w_mu.profile.values.copy(), zero.copy()))

    for div, tag in ((4.0, "bubble-r4"), (8.0, "bubble-r8")):
        eps = radius / div
        vals = bubble_profile(grid, params.s, eps, radius)
        seeds.append(Seed(tag, zero.copy(), vals))

    widths = grid.L / 12.0 + (grid.L / 5.0 - grid.L / 12.0) * rng.random(2)
    amps = 0.5 + rng.random(2)
    seeds.append(Seed(
        "random-radial",
        amps[0] * np.exp(-(r * r) / (2.0 * widths[0] ** 2)),
        amps[1] * np.exp(-(r * r) / (2.0 * widths[1] ** 2)),
    ))
    return seeds


def _cached_scalar(grid: SpectralGrid, beta: float, gamma: float,
                   params: ProblemParams, cache: dict | None) -> ScalarGroundState:
    key = (grid.N, grid.n, grid.L, round(beta, 14), round(gamma, 14), params.p, params.s)
    if cache is not None and key in cache:
        return cache[key]
    st = solve_scalar(grid, beta, gamma, params.p, params.s, tol=1e-10, max_iter=3000)
    if cache is not None:
        cache[key] = st
    return st


# --------------------------------------------------------------------------
# projected gradient flow


class _FlowState:
    """Iterate (u, v) kept on the Nehari manifold with cached transforms."""

    __slots__ = ("u", "v", "uh", "vh", "dsq", "mass", "sub", "crit", "cross", "energy")

    def __init__(self, grid, params, u, v):
        self.assign(grid, params, u, v)

    def assign(self, grid, params, u, v):
        self.u, self.v = u, v
        self.uh, self.vh = grid.fft(u), grid.fft(v)
        self.dsq = (grid.seminorm_sq(u, params.s, coeff=self.uh)
                    + grid.seminorm_sq(v, params.s, coeff=self.vh))
        self.mass = params.mu * grid.l2_sq(u) + params.nu * grid.l2_sq(v)
        self.sub = grid.integrate(np.abs(u) ** (params.p + 1.0))
        self.crit = grid.integrate(np.abs(v) ** params.two_star)
        self.cross = grid.inner(u, v)

    def quadratures(self) -> PairQuadratures:
        return PairQuadratures(self.dsq, self.mass, self.sub, self.crit, self.cross)

    def rescale(self, params, t: float):
        self.u = t * self.u
        self.v = t * self.v
        self.uh = t * self.uh
        self.vh = t * self.vh
        t2 = t * t
        self.dsq *= t2
        self.mass *= t2
        self.cross *= t2
        self.sub *= t ** (params.p + 1.0)
        self.crit *= t**params.two_star

    def set_energy(self, params):
        self.energy = self.quadratures().energy_at(params.lam, 1.0, params.p,
                                                   params.two_star)


def _project_state(grid, params, st: _FlowState) -> None:
    t = nehari_root_from_quadratures(params, st.quadratures())
    st.rescale(params, t)
    st.set_energy(params)


def nehari_flow(
    grid: SpectralGrid,
    params: ProblemParams,
    u0: np.ndarray,
    v0: np.ndarray,
    max_steps: int = 6000,
    grad_tol: float = 5e-7,
    stall_tol: float = 1e-11,
    stall_window: int = 100,
    modulus_every: int = 50,
) -> tuple[np.ndarray, np.ndarray, float, float, int, str]:
    """Projected-gradient descent of the coupled energy on the Nehari manifold.

    Returns (u, v, energy, residual, steps, status) with status one of
    "converged" (residual <= grad_tol), "stalled" (no further descent), or
    "maxiter".
    """
    if not (np.any(u0) or np.any(v0)):
        raise ZeroPair("flow needs a nonzero seed pair")
    m = grid.multiplier(params.s)
    p, ts, lam, mu, nu = params.p, params.two_star, params.lam, params.mu, params.nu
    dV = grid.cell_volume

    st = _FlowState(grid, params, np.array(u0, dtype=float), np.array(v0, dtype=float))
    _project_state(grid, params, st)

    m_max = float(np.max(m))
    eta_safe = 1.0 / (m_max + max(mu, nu))
    eta_floor = eta_safe * 1e-10
    history: list[float] = [st.energy]
    residual = math.inf
    status = "maxiter"
    steps = 0
    prev_u = prev_v = prev_gu = prev_gv = None

    for steps in range(1, max_steps + 1):
        grad_u = grid.ifft(m * st.uh) + mu * st.u - np.abs(st.u) ** (p - 1.0) * st.u - lam * st.v
        grad_v = grid.ifft(m * st.vh) + nu * st.v - np.abs(st.v) ** (ts - 2.0) * st.v - lam * st.u
        residual = math.sqrt(dV * (float(np.sum(grad_u * grad_u))
                                   + float(np.sum(grad_v * grad_v))))
        if residual <= grad_tol:
            status = "converged"
            break

        # explicit-step stability bound for the stiffest (Nyquist) modes; without
        # it, energy-only acceptance lets roundoff noise grow at high wavenumbers
        curv = (m_max + max(mu, nu) + lam
                + p * float(np.max(np.abs(st.u))) ** (p - 1.0)
                + (ts - 1.0) * float(np.max(np.abs(st.v))) ** (ts - 2.0))
        eta = 1.9 / curv
        # Barzilai-Borwein trial step from the last accepted move; backtracking
        # below keeps the descent monotone
        if prev_u is not None:
            su = st.u - prev_u
            sv = st.v - prev_v
            yu = grad_u - prev_gu
            yv = grad_v - prev_gv
            sy = float(np.sum(su * yu)) + float(np.sum(sv * yv))
            yy = float(np.sum(yu * yu)) + float(np.sum(yv * yv))
            if sy > 0.0 and yy > 0.0:
                eta = min(sy / yy, 200.0 / curv)
        prev_u, prev_v = st.u, st.v
        prev_gu, prev_gv = grad_u, grad_v

        accepted = False
        while eta >= eta_floor:
            u_new = st.u - eta * grad_u
            v_new = st.v - eta * grad_v
            trial = _FlowState(grid, params, u_new, v_new)
            if trial.sub <= 0.0 and trial.crit <= 0.0:
                eta *= 0.5
                continue
            _project_state(grid, params, trial)
            if trial.energy < st.energy:
                st = trial
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            status = "stalled"
            break

        if steps % modulus_every == 0:
            assert_radial(st.u, 1e-12, what="flow iterate u")
            assert_radial(st.v, 1e-12, what="flow iterate v")
            st.assign(grid, params, symmetrize(np.abs(st.u)), symmetrize(np.abs(st.v)))
            _project_state(grid, params, st)
            prev_u = None  # modulus step breaks the BB secant pair

        history.append(st.energy)
        if len(history) > stall_window:
            drop = history[-stall_window - 1] - history[-1]
            if drop < stall_tol * max(abs(history[-1]), 1.0):
                status = "stalled"
                break

    return st.u, st.v, st.energy, residual, steps, status


# --------------------------------------------------------------------------
# runs and verdicts


def minimize_on_nehari(
    params: ProblemParams,
    grid: SpectralGrid,
    seeds: list[Seed],
    flow_steps: int = 6000,
    tol: float = 5e-7,
    s_s: float | None = None,
    report: ThresholdReport | None = None,
    c_p1: float | None = None,
    residual_tol: float = 1e-6,
    stop_when_certified: bool = False,
) -> GroundStateRun:
    """Run the descent from every seed and classify the parameter point.

    Exists is declared only for a level certified below (1-2*delta) times the
    critical ceiling with a small Euler-Lagrange residual; NoGroundState only
    when every restart (at least five) stays pinned at or above (1-delta)
    times the ceiling and the coupling sits below the closed-form threshold.
    `stop_when_certified` allows scan probes to return after the first
    Exists-certifying seed.
    """
    if not seeds:
        raise ConstraintViolation("at least one seed pair is required")
    if s_s is None:
        raise ConstraintViolation("critical constant s_s is required for verdicts")
    ceiling = critical_level(s_s, params.N, params.s)

    a0 = None
    if report is not None and report.a_star is not None and c_p1 is not None:
        a0 = ansatz_bound_a0(params, report, c_p1)

    results: list[SeedResult] = []
    best: tuple[float, np.ndarray, np.ndarray, float, str, int] | None = None
    for seed in seeds:
        u, v, energy, residual, steps, status = nehari_flow(
            grid, params, seed.u, seed.v, max_steps=flow_steps, grad_tol=tol)
        results.append(SeedResult(seed.seed_id, energy, residual, steps, status))
        if best is None or energy < best[0]:
            best = (energy, u, v, residual, seed.seed_id, steps)
        if (stop_when_certified and energy <= (1.0 - 2.0 * VERDICT_DELTA) * ceiling
                and residual <= residual_tol):
            break

    assert best is not None
    a_level, u, v, residual, seed_id, steps = best
    pair = FieldPair(Field(u, grid), Field(v, grid))

    lambda_tilde = report.lambda_tilde if report is not None else None
    verdict = classify_level(a_level, residual, ceiling, results, params,
                             lambda_tilde, residual_tol)
    return GroundStateRun(params, pair, a_level, ceiling, a0, verdict, residual,
                          seed_id, steps, results)


def classify_level(
    a_level: float,
    residual: float,
    ceiling: float,
    results: list[SeedResult],
    params: ProblemParams,
    lambda_tilde: float | None,
    residual_tol: float = 1e-6,
) -> str:
    delta = VERDICT_DELTA
    if a_level <= (1.0 - 2.0 * delta) * ceiling and residual <= residual_tol:
        return VERDICT_EXISTS
    all_pinned = all(r.energy >= (1.0 - delta) * ceiling for r in results)
    below_tilde = lambda_tilde is not None and params.lam < lambda_tilde
    if all_pinned and below_tilde and len(results) >= 5:
        return VERDICT_NO_GROUND_STATE
    return VERDICT_INCONCLUSIVE


# --------------------------------------------------------------------------
# scans


@dataclass
class BoundaryEstimate:
    """Empirical coupling boundary for one mu row."""

    mu: float
    lam_lo: float          # largest probe not certified as Exists
    lam_hi: float          # smallest probe certified as Exists
    boundary: float        # midpoint estimate
    bracket_lo: float      # sqrt((mu-mu0) nu), the closed-form lower bound
    bracket_hi: float      # lambda_tilde, the closed-form upper bound


def check_row_monotone(lams: list[float], verdicts: list[str]) -> None:
    """Exists may not precede NoGroundState as lambda grows (the level is
    non-increasing in lambda); Inconclusive is compatible with both sides."""
    order = np.argsort(lams)
    seen_exists = False
    for i in order:
        if verdicts[i] == VERDICT_EXISTS:
            seen_exists = True
        elif verdicts[i] == VERDICT_NO_GROUND_STATE and seen_exists:
            raise NonMonotoneVerdicts(
                "NoGroundState at larger lambda than an Exists verdict")


def dichotomy_scan(
    mu_grid: list[float],
    nu: float,
    lambda_fractions: list[float],
    grid: SpectralGrid,
    N: int,
    s: float,
    p: float,
    s_s: float,
    c_p1: float,
    mu0: float,
    rng_seed: int = 0,
    flow_steps: int = 4000,
    bisect_steps: int = 4,
    scalar_cache: dict | None = None,
) -> tuple[list[GroundStateRun], list[BoundaryEstimate]]:
    """Classify a (mu, lambda) grid and bisect the empirical coupling boundary.

    lambda_fractions are fractions of sqrt(mu*nu) (the admissible coupling
    range scales with mu); the boundary bisection runs per mu row between the
    largest non-Exists and smallest Exists probes.
    """
    if not mu_grid or not lambda_fractions:
        raise ConstraintViolation("scan grids must be nonempty")
    if scalar_cache is None:
        scalar_cache = {}

    runs: list[GroundStateRun] = []
    boundaries: list[BoundaryEstimate] = []
    for mu in mu_grid:
        rep = threshold_report(mu, nu, N, s, p, s_s, c_p1)
        lams = [f * math.sqrt(mu * nu) for f in lambda_fractions]
        row_runs: list[GroundStateRun] = []
        for lam in lams:
            row_runs.append(_scan_point(mu, nu, lam, grid, N, s, p, s_s, c_p1,
                                        rep, rng_seed, flow_steps, scalar_cache))
        runs.extend(row_runs)
        check_row_monotone(lams, [r.verdict for r in row_runs])

        if rep.a_star is not None:
            est = _bisect_boundary(mu, nu, lams, row_runs, grid, N, s, p, s_s,
                                   c_p1, rep, rng_seed, flow_steps, bisect_steps,
                                   scalar_cache)
            if est is not None:
                boundaries.append(est)
    return runs, boundaries


def _scan_point(mu, nu, lam, grid, N, s, p, s_s, c_p1, rep, rng_seed,
                flow_steps, scalar_cache) -> GroundStateRun:
    params = validate_params(N, s, p, mu, nu, lam)
    rng = np.random.default_rng(rng_seed)
    seeds = build_seeds(params, grid, rng, scalar_cache=scalar_cache, report=rep)
    return minimize_on_nehari(params, grid, seeds, flow_steps=flow_steps,
                              s_s=s_s, report=rep, c_p1=c_p1,
                              stop_when_certified=True)


def _bisect_boundary(mu, nu, lams, row_runs, grid, N, s, p, s_s, c_p1, rep,
                     rng_seed, flow_steps, bisect_steps, scalar_cache):
    exists_lams = [l for l, r in zip(lams, row_runs) if r.verdict == VERDICT_EXISTS]
    other_lams = [l for l, r in zip(lams, row_runs) if r.verdict != VERDICT_EXISTS]
    if not exists_lams or not other_lams:
        return None
    hi = min(exists_lams)
    lo = max(l for l in other_lams if l < hi) if any(l < hi for l in other_lams) else None
    if lo is None:
        return None
    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        run = _scan_point(mu, nu, mid, grid, N, s, p, s_s, c_p1, rep, rng_seed,
                          flow_steps, scalar_cache)
        if run.verdict == VERDICT_EXISTS:
            hi = mid
        else:
            lo = mid
    return BoundaryEstimate(mu, lo, hi, 0.5 * (lo + hi),
                            math.sqrt(max(mu - rep.mu0, 0.0) * nu),
                            rep.lambda_tilde)
