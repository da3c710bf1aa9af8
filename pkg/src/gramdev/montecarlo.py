"""Monte Carlo verification of the two concentration claims.

Claim 1: |z' D z| <= 4 eps K^2 ||z||^2 for a fixed z, failure probability
decaying like exp(-c min(eps, eps^2) N).  Claim 2: the same for ||D|| with an
extra n log 9 union-bound term.  Trial tau at grid value N is a pure function
of (master_seed, N, tau), so failure counts are independent of execution
order and thread count.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm as _norm_dist

from .deviation import deviation_matrix, quad_form, spectral_norm
from .families import FamilySpec, sample_ensemble
from .seeds import derive_seed

__all__ = [
    "InsufficientData",
    "ExperimentConfig",
    "MCEstimate",
    "DecayFit",
    "wilson_interval",
    "mc_failure",
    "fit_decay",
    "union_bound_gap",
    "write_estimates_csv",
    "write_estimates_json",
    "write_union_gap_csv",
]

CLAIM_QUAD = "quad_form"
CLAIM_SPEC = "spec_norm"

# stream tags so ensemble draws and z draws never collide
_TAG_ENSEMBLE = 0
_TAG_Z = 1


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    family: FamilySpec
    N_grid: tuple
    eps: float
    trials: int
    master_seed: int
    claim: str = CLAIM_QUAD
    z_fixed: np.ndarray | None = None  # fixed unit-direction z; None = random per trial
    k_value: float | None = None       # override of the family K used in thresholds

    def __post_init__(self):
        if self.claim not in (CLAIM_QUAD, CLAIM_SPEC):
            raise ValueError(f"unknown claim {self.claim!r}")
        if self.trials < 100:
            raise ValueError("trials must be >= 100")
        grid = tuple(int(N) for N in self.N_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])) or not grid:
            raise ValueError("N_grid must be nonempty and strictly increasing")
        object.__setattr__(self, "N_grid", grid)
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.z_fixed is not None:
            z = np.asarray(self.z_fixed, dtype=float)
            if z.shape != (self.family.dim,):
                raise ValueError("z_fixed must have length family.dim")
            if not np.linalg.norm(z) > 0:
                raise ValueError("z_fixed must be nonzero")
            object.__setattr__(self, "z_fixed", z)

    @property
    def K(self) -> float:
        return self.k_value if self.k_value is not None else self.family.k_bound


@dataclass(frozen=True)
class MCEstimate:
    failures: int
    trials: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    threshold: float
    N: int

    def width(self) -> float:
        return self.ci_hi - self.ci_lo


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    c_hat: float
    points_used: int


def wilson_interval(failures: int, trials: int, confidence: float = 0.95) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= failures <= trials:
        raise ValueError("failures must lie in [0, trials]")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    z = float(_norm_dist.ppf((1.0 + confidence) / 2.0))
    p = failures / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # rounding can push the endpoints past the point estimate at 0 or n failures
    return min(p, max(0.0, center - half)), max(p, min(1.0, center + half))


def _round_N(family: FamilySpec, N: int) -> int:
    """Smallest valid ensemble size >= N for the family."""
    q = family.q
    return N if N % q == 0 else N + (q - N % q)


def trial_statistic(config: ExperimentConfig, N: int, tau: int) -> float:
    """The deterministic per-trial event statistic."""
    seed = derive_seed(config.master_seed, _TAG_ENSEMBLE, N, tau)
    ens = sample_ensemble(config.family, _round_N(config.family, N), seed)
    D = deviation_matrix(ens)
    if config.claim == CLAIM_SPEC:
        return spectral_norm(D)
    z = _trial_z(config, N, tau)
    return abs(quad_form(D, z))


def _trial_z(config: ExperimentConfig, N: int, tau: int) -> np.ndarray:
    if config.z_fixed is not None:
        return config.z_fixed
    zrng = np.random.default_rng(derive_seed(config.master_seed, _TAG_Z, N, tau))
    z = zrng.standard_normal(config.family.dim)
    return z / np.linalg.norm(z)


def threshold_for(config: ExperimentConfig) -> float:
    """4 eps K^2, times ||z||^2 for the fixed-vector claim."""
    thr = 4.0 * config.eps * config.K**2
    if config.claim == CLAIM_QUAD and config.z_fixed is not None:
        thr *= float(np.dot(config.z_fixed, config.z_fixed))
    return thr


def mc_failure(config: ExperimentConfig, threads: int = 1) -> list:
    """One MCEstimate per N in the grid; failure = statistic > threshold."""
    thr = threshold_for(config)
    out = []
    for N in config.N_grid:
        taus = range(config.trials)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                stats = list(pool.map(lambda t: trial_statistic(config, N, t), taus))
        else:
            stats = [trial_statistic(config, N, t) for t in taus]
        failures = int(sum(1 for s in stats if s > thr))
        lo, hi = wilson_interval(failures, config.trials)
        out.append(MCEstimate(
            failures=failures,
            trials=config.trials,
            p_hat=failures / config.trials,
            ci_lo=lo,
            ci_hi=hi,
            threshold=thr,
            N=N,
        ))
    return out


def fit_decay(estimates, eps: float) -> DecayFit:
    """OLS of ln(p_hat) on N over estimates with 0 < p_hat < 1;
    c_hat = -slope / min(eps, eps^2)."""
    usable = [e for e in estimates if 0.0 < e.p_hat < 1.0]
    if len(usable) < 3:
        raise InsufficientData(f"need >= 3 estimates with 0 < p_hat < 1, got {len(usable)}")
    x = np.array([e.N for e in usable], dtype=float)
    y = np.log([e.p_hat for e in usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        c_hat=float(-slope / min(eps, eps * eps)),
        points_used=len(usable),
    )


def union_bound_gap(family_for_dim, n_grid, eps: float, trials: int, master_seed: int,
                    N_fixed: int = 64, N_start: int = 4, N_max: int = 4096,
                    p_target: float = 0.01, threads: int = 1) -> list:
    """Compare the fixed-vector and spectral-norm claims across dimensions.

    family_for_dim: callable n -> FamilySpec.  Both claims run on the same
    derived trial seeds, hence on identical ensembles, so the spectral event
    dominates the fixed-vector event trial by trial.  Per n, reports failure
    probabilities at N_fixed and the smallest N on a doubling grid with
    p_hat <= p_target (saturated flag when the grid runs out).
    """
    rows = []
    for n in n_grid:
        family = family_for_dim(n)
        ests = {}
        for claim in (CLAIM_QUAD, CLAIM_SPEC):
            cfg = ExperimentConfig(family=family, N_grid=(N_fixed,), eps=eps,
                                   trials=trials, master_seed=master_seed, claim=claim)
            ests[claim] = mc_failure(cfg, threads=threads)[0]

        stars = {}
        for claim in (CLAIM_QUAD, CLAIM_SPEC):
            N = N_start
            star, saturated = None, False
            while True:
                cfg = ExperimentConfig(family=family, N_grid=(N,), eps=eps,
                                       trials=trials, master_seed=master_seed, claim=claim)
                est = mc_failure(cfg, threads=threads)[0]
                if est.p_hat <= p_target:
                    star = N
                    break
                if N >= N_max:
                    saturated = True
                    star = N
                    break
                N *= 2
            stars[claim] = (star, saturated)

        rows.append({
            "n": int(n),
            "p_quad": ests[CLAIM_QUAD].p_hat,
            "p_spec": ests[CLAIM_SPEC].p_hat,
            "ci_width_quad": ests[CLAIM_QUAD].width(),
            "ci_width_spec": ests[CLAIM_SPEC].width(),
            "N_fixed": int(N_fixed),
            "N_star_quad": stars[CLAIM_QUAD][0],
            "N_star_spec": stars[CLAIM_SPEC][0],
            "saturated_quad": stars[CLAIM_QUAD][1],
            "saturated_spec": stars[CLAIM_SPEC][1],
        })
    return rows


# -- serialization ----------------------------------------------------------

_CSV_FIELDS = ["claim", "family", "n", "N", "eps", "trials", "failures", "p_hat",
               "ci_lo", "ci_hi", "threshold", "c_hat", "r_squared", "seed"]


def _fmt(v) -> str:
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("non-finite value in output")
        return format(v, ".17g")
    return str(v)


def estimate_rows(config: ExperimentConfig, estimates, fit: DecayFit | None = None) -> list:
    c_hat = fit.c_hat if fit else float("nan")
    r2 = fit.r_squared if fit else float("nan")
    rows = []
    for e in estimates:
        rows.append({
            "claim": config.claim,
            "family": config.family.descriptor(),
            "n": config.family.dim,
            "N": e.N,
            "eps": config.eps,
            "trials": e.trials,
            "failures": e.failures,
            "p_hat": e.p_hat,
            "ci_lo": e.ci_lo,
            "ci_hi": e.ci_hi,
            "threshold": e.threshold,
            "c_hat": c_hat if fit else "",
            "r_squared": r2 if fit else "",
            "seed": config.master_seed,
        })
    return rows


def write_estimates_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=_CSV_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) if not isinstance(v, str) else v for k, v in r.items()})


def write_estimates_json(path, rows) -> None:
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=2)
        fh.write("\n")


_UNION_FIELDS = ["n", "p_quad", "p_spec", "ci_width_quad", "ci_width_spec", "N_fixed",
                 "N_star_quad", "N_star_spec", "saturated_quad", "saturated_spec"]


def write_union_gap_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=_UNION_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) if isinstance(v, float) else v for k, v in r.items()})
