"""Configuration, orchestration and machine-readable outputs.

Runs are described by a flat key-value INI file (section [run]) plus a few
command-line overrides, and write diff-able artifacts: CSV tables at full
double precision (17 significant digits) and a JSON manifest echoing every
parameter that affects a number in any output.  All randomness sits behind a
single 64-bit seed recorded in the manifest; identical configs produce
byte-identical CSVs.

Tasks
-----
scalar      ground-state profile of (-Delta)^s u + beta u = gamma u^p
constants   sharp constants S_s (extrapolated), C_(p+1) (two estimates), C0
thresholds  mu0 with error bar, mu0_bar, lambda_tilde/a*, bracket bounds
system      one Nehari-descent run with verdict at (mu, nu, lambda)
scan        (mu, lambda) verdict grid + empirical coupling boundary per mu
bubble      cutoff-extremal estimate table over eps in {r/4, r/8, r/16}

Exit codes: 0 ok, 2 config error, 3 solver failure, 4 io failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ConstraintViolation, FracgsError, IoFailure
from .model import validate_params
from .scalar import export_profile, extract_c_p1, solve_scalar
from .spectral import SpectralGrid, set_fft_workers
from .system import build_bubble, build_seeds, dichotomy_scan, minimize_on_nehari
from .thresholds import (
    SharpConstants,
    c0_lower_bound,
    compute_s_s,
    critical_level,
    threshold_report,
)

TASKS = ("scalar", "constants", "thresholds", "system", "scan", "bubble")

_SS_CAP = {1: 4096, 2: 1024, 3: 128}


@dataclass
class RunConfig:
    """Resolved run configuration; every field lands in the manifest."""

    task: str
    N: int = 3
    s: float = 0.75
    p: float = 2.0
    mu: float = 0.25
    nu: float = 1.0
    lam: float = 0.3
    beta: float = 1.0
    gamma: float = 1.0
    grid_n: int = 64
    grid_L: float = 20.0
    tol: float = 1e-10
    max_iter: int = 2000
    flow_steps: int = 4000
    bisect_steps: int = 4
    seed: int = 12345
    threads: int = 1
    out: str = "fracgs-out"
    mu_values: list[float] = field(default_factory=list)
    lambda_fractions: list[float] = field(default_factory=list)
    bubble_r: float = 0.0          # 0 -> grid_L / 4
    ss_n: int = 0                  # 0 -> min(2*grid_n, per-dimension cap)
    ss_L: float = 0.0              # 0 -> grid_L
    cp1_n: int = 0                 # 0 -> grid_n
    cp1_L: float = 0.0             # 0 -> 0.6*grid_L

    def resolve(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"unknown task '{self.task}' (choose from {TASKS})")
        if self.bubble_r == 0.0:
            self.bubble_r = self.grid_L / 4.0
        if self.ss_n == 0:
            self.ss_n = min(2 * self.grid_n, _SS_CAP[self.N])
        if self.ss_L == 0.0:
            self.ss_L = self.grid_L
        if self.cp1_n == 0:
            self.cp1_n = self.grid_n
        if self.cp1_L == 0.0:
            self.cp1_L = 0.6 * self.grid_L
        if self.task == "scan" and (not self.mu_values or not self.lambda_fractions):
            raise ConfigError("scan requires mu_values and lambda_fractions")


_FLOAT_KEYS = {"s", "p", "mu", "nu", "lam", "beta", "gamma", "grid_L", "tol",
               "bubble_r", "ss_L", "cp1_L"}
_INT_KEYS = {"N", "grid_n", "max_iter", "flow_steps", "bisect_steps", "seed",
             "threads", "ss_n", "cp1_n"}
_LIST_KEYS = {"mu_values", "lambda_fractions"}
_ALIASES = {"lambda": "lam", "l": "grid_L", "n": "grid_n"}


def parse_config(path: str | None, overrides: dict) -> RunConfig:
    """Read the [run] section of an INI file and apply CLI overrides."""
    raw: dict = {}
    if path is not None:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            read = cp.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"config parse failed: {exc}") from exc
        if not read:
            raise ConfigError(f"config file not found: {path}")
        if "run" not in cp:
            raise ConfigError("config must contain a [run] section")
        raw.update(dict(cp["run"]))
    raw.update({k: v for k, v in overrides.items() if v is not None})

    if "task" not in raw:
        raise ConfigError("missing required key: task")
    cfg = RunConfig(task=str(raw.pop("task")))
    for key, value in raw.items():
        key = _ALIASES.get(key, key)
        if not hasattr(cfg, key):
            raise ConfigError(f"unknown config key: {key}")
        try:
            if key in _FLOAT_KEYS:
                setattr(cfg, key, float(value))
            elif key in _INT_KEYS:
                setattr(cfg, key, int(value))
            elif key in _LIST_KEYS:
                if isinstance(value, str):
                    value = [float(x) for x in value.replace(",", " ").split()]
                setattr(cfg, key, [float(x) for x in value])
            else:
                setattr(cfg, key, value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    cfg.resolve()
    return cfg


# --------------------------------------------------------------------------
# artifact writers


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    if x is None:
        return ""
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    try:
        with path.open("w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(x) for x in row) + "\n")
    except OSError as exc:
        raise IoFailure(f"failed to write {path}: {exc}") from exc


def write_json(path: Path, payload: dict) -> None:
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise IoFailure(f"failed to write {path}: {exc}") from exc


def write_manifest(outdir: Path, cfg: RunConfig, wall_time: float, extra: dict) -> None:
    payload = {
        "config": dataclasses.asdict(cfg),
        "version": __version__,
        "wall_time_s": wall_time,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    payload.update(extra)
    write_json(outdir / "manifest.json", payload)


# --------------------------------------------------------------------------
# shared computations


def compute_constants(cfg: RunConfig) -> SharpConstants:
    """Sharp constants on the configured grids (S_s extrapolation grid and the
    embedding-constant grid are recorded in provenance)."""
    ss_grid = SpectralGrid(cfg.N, cfg.ss_n, cfg.ss_L)
    ss = compute_s_s(ss_grid, cfg.s)
    cp1_grid = SpectralGrid(cfg.N, cfg.cp1_n, cfg.cp1_L)
    state = solve_scalar(cp1_grid, 1.0, 1.0, cfg.p, cfg.s,
                         tol=cfg.tol, max_iter=cfg.max_iter)
    emb = extract_c_p1(state)
    c0 = c0_lower_bound(cfg.N, cfg.s, cfg.p, ss.value)
    method = {
        "ss_grid": {"N": cfg.N, "n": cfg.ss_n, "L": cfg.ss_L},
        "ss_spread": ss.spread,
        "ss_extrapolants": [[list(k), v] for k, v in ss.extrapolants],
        "cp1_grid": {"N": cfg.N, "n": cfg.cp1_n, "L": cfg.cp1_L},
        "cp1_quotient": emb.quotient,
        "cp1_from_energy": emb.from_energy,
        "cp1_spread": emb.spread,
        "scalar_iterations": state.iterations,
        "scalar_residual_rel": state.residual_rel,
    }
    return SharpConstants(ss.value, emb.value, c0, method)


# --------------------------------------------------------------------------
# tasks


def task_scalar(cfg: RunConfig, outdir: Path) -> None:
    grid = SpectralGrid(cfg.N, cfg.grid_n, cfg.grid_L)
    state = solve_scalar(grid, cfg.beta, cfg.gamma, cfg.p, cfg.s,
                         tol=cfg.tol, max_iter=cfg.max_iter)
    export_profile(state, outdir / "profile.txt")
    write_csv(outdir / "scalar.csv",
              ["N", "s", "p", "beta", "gamma", "n", "L", "energy",
               "residual_norm", "residual_rel", "iterations", "c_p1"],
              [[cfg.N, cfg.s, cfg.p, cfg.beta, cfg.gamma, cfg.grid_n, cfg.grid_L,
                state.energy, state.residual_norm, state.residual_rel,
                state.iterations, state.c_p1]])


def task_constants(cfg: RunConfig, outdir: Path) -> SharpConstants:
    consts = compute_constants(cfg)
    write_csv(outdir / "constants.csv",
              ["N", "s", "p", "s_s", "s_s_spread", "c_p1", "c_p1_spread", "c0",
               "critical_level"],
              [[cfg.N, cfg.s, cfg.p, consts.s_s, consts.method["ss_spread"],
                consts.c_p1, consts.method["cp1_spread"], consts.c0,
                critical_level(consts.s_s, cfg.N, cfg.s)]])
    write_json(outdir / "constants.json",
               {"s_s": consts.s_s, "c_p1": consts.c_p1, "c0": consts.c0,
                "method": consts.method})
    return consts


def task_thresholds(cfg: RunConfig, outdir: Path) -> None:
    consts = task_constants(cfg, outdir)
    rep = threshold_report(cfg.mu, cfg.nu, cfg.N, cfg.s, cfg.p,
                           consts.s_s, consts.c_p1,
                           consts.method["ss_spread"], consts.method["cp1_spread"])
    write_json(outdir / "threshold_report.json", rep.flat())
    flat = rep.flat()
    cols = list(flat.keys())
    write_csv(outdir / "thresholds.csv", cols, [[flat[c] for c in cols]])


def task_system(cfg: RunConfig, outdir: Path) -> None:
    params = validate_params(cfg.N, cfg.s, cfg.p, cfg.mu, cfg.nu, cfg.lam)
    grid = SpectralGrid(cfg.N, cfg.grid_n, cfg.grid_L)
    consts = compute_constants(cfg)
    rep = threshold_report(cfg.mu, cfg.nu, cfg.N, cfg.s, cfg.p,
                           consts.s_s, consts.c_p1)
    rng = np.random.default_rng(cfg.seed)
    seeds = build_seeds(params, grid, rng, scalar_cache={}, report=rep,
                        radius=cfg.bubble_r)
    run = minimize_on_nehari(params, grid, seeds, flow_steps=cfg.flow_steps,
                             s_s=consts.s_s, report=rep, c_p1=consts.c_p1)
    header = ["mu", "nu", "lambda", "a_level", "critical_level", "a0_bound",
              "verdict", "residual", "best_seed", "iterations",
              "lambda_tilde", "bound_lo", "bound_hi"]
    lo, hi = rep.bounds if rep.bounds is not None else (None, None)
    write_csv(outdir / "run.csv", header,
              [[cfg.mu, cfg.nu, cfg.lam, run.a_level, run.critical_level,
                run.a0_bound, run.verdict, run.residual, run.seed_id,
                run.iterations, rep.lambda_tilde, lo, hi]])
    write_json(outdir / "run.json", {
        "params": dataclasses.asdict(params),
        "a_level": run.a_level,
        "critical_level": run.critical_level,
        "a0_bound": run.a0_bound,
        "verdict": run.verdict,
        "residual": run.residual,
        "best_seed": run.seed_id,
        "iterations": run.iterations,
        "seeds": [dataclasses.asdict(r) for r in run.seed_results],
    })


def task_scan(cfg: RunConfig, outdir: Path) -> None:
    grid = SpectralGrid(cfg.N, cfg.grid_n, cfg.grid_L)
    consts = compute_constants(cfg)
    rep0 = threshold_report(max(cfg.mu_values), cfg.nu, cfg.N, cfg.s, cfg.p,
                            consts.s_s, consts.c_p1)
    runs, boundaries = dichotomy_scan(
        cfg.mu_values, cfg.nu, cfg.lambda_fractions, grid, cfg.N, cfg.s, cfg.p,
        consts.s_s, consts.c_p1, rep0.mu0, rng_seed=cfg.seed,
        flow_steps=cfg.flow_steps, bisect_steps=cfg.bisect_steps)
    header = ["mu", "nu", "lambda", "a_level", "critical_level", "a0_bound",
              "verdict", "residual", "best_seed", "iterations"]
    rows = [[r.params.mu, r.params.nu, r.params.lam, r.a_level,
             r.critical_level, r.a0_bound, r.verdict, r.residual, r.seed_id,
             r.iterations] for r in runs]
    write_csv(outdir / "scan.csv", header, rows)
    write_csv(outdir / "boundary.csv",
              ["mu", "lam_lo", "lam_hi", "boundary", "bracket_lo", "bracket_hi"],
              [[b.mu, b.lam_lo, b.lam_hi, b.boundary, b.bracket_lo, b.bracket_hi]
               for b in boundaries])


def task_bubble(cfg: RunConfig, outdir: Path) -> None:
    grid = SpectralGrid(cfg.N, cfg.grid_n, cfg.grid_L)
    ss_grid = SpectralGrid(cfg.N, cfg.ss_n, cfg.ss_L)
    ss = compute_s_s(ss_grid, cfg.s)
    level_pow = ss.value ** (cfg.N / (2.0 * cfg.s))
    rows = []
    for div in (4.0, 8.0, 16.0):
        fam = build_bubble(grid, cfg.s, cfg.bubble_r / div, cfg.bubble_r, ss.value)
        rows.append([fam.epsilon, fam.cutoff_radius, fam.seminorm_sq,
                     fam.mass_sq, fam.crit_pow, level_pow,
                     fam.seminorm_sq - level_pow])
    write_csv(outdir / "bubble.csv",
              ["eps", "r", "seminorm_sq", "mass_sq", "crit_pow", "s_s_pow",
               "excess_seminorm"],
              rows)


def run(cfg: RunConfig) -> Path:
    """Execute a resolved config; returns the output directory."""
    outdir = Path(cfg.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create output dir {outdir}: {exc}") from exc
    set_fft_workers(cfg.threads)
    t0 = time.perf_counter()
    dispatch = {
        "scalar": task_scalar,
        "constants": task_constants,
        "thresholds": task_thresholds,
        "system": task_system,
        "scan": task_scan,
        "bubble": task_bubble,
    }
    dispatch[cfg.task](cfg, outdir)
    write_manifest(outdir, cfg, time.perf_counter() - t0, {})
    return outdir


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="fracgs",
        description="Ground states and thresholds of the coupled "
                    "critical/subcritical fractional Laplacian system")
    ap.add_argument("--config", help="INI file with a [run] section")
    ap.add_argument("--task", choices=TASKS, help="task override")
    ap.add_argument("--out", help="output directory override")
    ap.add_argument("--threads", type=int, help="FFT worker threads")
    ap.add_argument("--seed", type=int, help="64-bit RNG seed override")
    args = ap.parse_args(argv)

    overrides = {"task": args.task, "out": args.out, "threads": args.threads,
                 "seed": args.seed}
    try:
        cfg = parse_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        outdir = run(cfg)
    except (ConfigError, ConstraintViolation) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IoFailure as exc:
        print(f"io failure: {exc}", file=sys.stderr)
        return 4
    except FracgsError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(f"wrote artifacts to {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
