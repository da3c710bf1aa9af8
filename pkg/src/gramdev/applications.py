"""Sample-complexity experiments for the pooled-measurement example.

Quantities measured:
  b_k     = |(1/m) sum_i (a_i' x_k)^2 - ||x_k||^2|, a_i ~ N(0, I)
  b_tilde = ||(1/(mq)) sum_{k,i} a_{i,k} a_{i,k}' f_k^2 - mean(f^2) I||

The scalar subtrahend in b_tilde is read as that scalar times the identity
(E[a a' f^2] = f^2 I).  Sweeps locate the minimal m at which the per-vector
or pooled deviation events hold with target probability; pooling averages
over all mq rows at once, which is exactly where the non-identical second
moment matrices appear.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .deviation import deviation_matrix, spectral_norm, symmetric_eigenvalues
from .families import FamilySpec, sample_ensemble
from .montecarlo import wilson_interval
from .seeds import derive_seed

__all__ = [
    "PooledSpec",
    "SweepResult",
    "compute_bk",
    "compute_btilde",
    "bilinear_bound_check",
    "sweep_min_m",
    "pooled_vs_naive",
    "write_sweep_csv",
    "REGIMES",
]

REGIME_QUAD = "per_vector_quad"
REGIME_SPEC = "per_vector_spec"
REGIME_POOLED = "pooled_spec"
REGIMES = (REGIME_QUAD, REGIME_SPEC, REGIME_POOLED)

_TAG_ROWS = 10
_TAG_X = 11
_TAG_BILINEAR = 12


@dataclass(frozen=True)
class PooledSpec:
    n: int
    q: int
    m: int
    scales: np.ndarray
    seed: int
    x_vectors: np.ndarray | None = None  # q x n; default random unit vectors

    def __post_init__(self):
        if self.q < 1 or self.m < 1 or self.n < 1:
            raise ValueError("n, q, m must all be >= 1")
        f = np.asarray(self.scales, dtype=float)
        if f.shape != (self.q,):
            raise ValueError("scales must have length q")
        object.__setattr__(self, "scales", f)
        if self.q > self.n**2:
            warnings.warn(f"q={self.q} exceeds n^2={self.n ** 2}; the log q <= 2 log n "
                          "simplification no longer applies", stacklevel=2)
        if self.x_vectors is not None:
            x = np.asarray(self.x_vectors, dtype=float)
            if x.shape != (self.q, self.n):
                raise ValueError("x_vectors must be q x n")
            object.__setattr__(self, "x_vectors", x)


@dataclass(frozen=True)
class SweepResult:
    regime: str
    n: int
    q: int
    grid: tuple
    successes: tuple
    trials: int
    success_prob: tuple
    m_star: int | None  # None = saturated (target never reached on the grid)
    eps_target: float
    delta: float
    seed: int

    @property
    def saturated(self) -> bool:
        return self.m_star is None


def compute_bk(x, m: int, seed: int = 0) -> float:
    """|(1/m) sum_i (a_i' x)^2 - ||x||^2| over m fresh standard Gaussian rows."""
    x = np.asarray(x, dtype=float)
    if m < 1:
        raise ValueError("m must be >= 1")
    xnorm2 = float(x @ x)
    if xnorm2 == 0.0:
        return 0.0
    ens = sample_ensemble(FamilySpec.standard_gaussian(x.size), m, seed)
    proj = ens.rows @ x
    return abs(float(np.mean(proj**2)) - xnorm2)


def compute_btilde(spec: PooledSpec) -> float:
    """Spectral norm of the pooled deviation; reduces to the plain deviation
    matrix of the scale-grouped family over N = m q rows."""
    family = FamilySpec.scaled_gaussian(spec.n, spec.scales)
    ens = sample_ensemble(family, spec.m * spec.q, spec.seed)
    return spectral_norm(deviation_matrix(ens))


def pooled_vs_naive(spec: PooledSpec) -> dict:
    """b_tilde and its per-group triangle-inequality upper bound
    (1/q) sum_k ||(1/m) sum_i a a' - I|| f_k^2 on the same rows."""
    base = sample_ensemble(FamilySpec.standard_gaussian(spec.n), spec.m * spec.q, spec.seed)
    f2 = spec.scales**2
    pooled = np.zeros((spec.n, spec.n))
    bound = 0.0
    for k in range(spec.q):
        blk = base.rows[k * spec.m : (k + 1) * spec.m]
        gram = (blk.T @ blk) / spec.m
        dev_k = (gram + gram.T) / 2.0 - np.eye(spec.n)
        pooled += f2[k] * dev_k
        bound += f2[k] * spectral_norm(dev_k)
    pooled /= spec.q
    bound /= spec.q
    return {"btilde": spectral_norm(pooled), "naive_bound": bound}


def bilinear_bound_check(family: FamilySpec, z1, z2, N: int, eps: float,
                         trials: int, seed: int = 0) -> dict:
    """Failure rates of |z1' D z2| against the two candidate thresholds
    4 eps^2 K^2 (||z1||^2 + ||z2||^2) as printed and 4 eps K^2 (...) by
    analogy with the quadratic claim; both are reported, no intent guessed."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if not (np.linalg.norm(z1) > 0 and np.linalg.norm(z2) > 0):
        raise ValueError("z1 and z2 must be nonzero")
    K = family.k_bound
    sumsq = float(z1 @ z1 + z2 @ z2)
    thr_eps_sq = 4.0 * eps * eps * K * K * sumsq
    thr_eps = 4.0 * eps * K * K * sumsq
    fail_sq = fail_lin = 0
    q = family.q
    N_eff = N if N % q == 0 else N + (q - N % q)
    for tau in range(trials):
        ens = sample_ensemble(family, N_eff, derive_seed(seed, _TAG_BILINEAR, tau))
        d = deviation_matrix(ens).d
        stat = abs(float(z1 @ d @ z2))
        fail_sq += stat > thr_eps_sq
        fail_lin += stat > thr_eps
    return {
        "p_fail_eps": fail_lin / trials,
        "p_fail_eps_sq": fail_sq / trials,
        "threshold_eps": thr_eps,
        "threshold_eps_sq": thr_eps_sq,
    }


def default_x_vectors(n: int, q: int, seed: int) -> np.ndarray:
    """q random unit vectors, shared across the m grid of a sweep."""
    rng = np.random.default_rng(derive_seed(seed, _TAG_X))
    x = rng.standard_normal((q, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _trial_success(regime: str, n: int, q: int, m: int, tau: int, eps_target: float,
                   x_vectors: np.ndarray, scales: np.ndarray, seed: int) -> bool:
    rows_seed = derive_seed(seed, _TAG_ROWS, m, tau)
    base = sample_ensemble(FamilySpec.standard_gaussian(n), m * q, rows_seed)
    if regime == REGIME_POOLED:
        f2 = scales**2
        pooled = np.zeros((n, n))
        for k in range(q):
            blk = base.rows[k * m : (k + 1) * m]
            gram = (blk.T @ blk) / m
            pooled += f2[k] * ((gram + gram.T) / 2.0 - np.eye(n))
        pooled /= q
        return spectral_norm(pooled) <= eps_target * float(f2.max())
    for k in range(q):
        blk = base.rows[k * m : (k + 1) * m]
        if regime == REGIME_QUAD:
            xk = x_vectors[k]
            bk = abs(float(np.mean((blk @ xk) ** 2)) - float(xk @ xk))
            if bk > eps_target * float(xk @ xk):
                return False
        else:
            gram = (blk.T @ blk) / m
            dev = (gram + gram.T) / 2.0 - np.eye(n)
            eig = symmetric_eigenvalues(dev)
            if max(abs(eig[0]), abs(eig[-1])) > eps_target:
                return False
    return True


def sweep_min_m(regime: str, n: int, q: int, eps_target: float, delta: float,
                m_grid, trials: int, seed: int = 0,
                scales: np.ndarray | None = None,
                x_vectors: np.ndarray | None = None) -> SweepResult:
    """Success probability per m and the minimal grid m reaching 1 - delta."""
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    grid = tuple(int(m) for m in m_grid)
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("m_grid must be nonempty and strictly increasing")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if trials < 200:
        raise ValueError("trials must be >= 200")
    scales = np.ones(q) if scales is None else np.asarray(scales, dtype=float)
    if scales.shape != (q,):
        raise ValueError("scales must have length q")
    if x_vectors is None:
        x_vectors = default_x_vectors(n, q, seed)

    successes = []
    probs = []
    m_star = None
    for m in grid:
        cnt = sum(
            _trial_success(regime, n, q, m, tau, eps_target, x_vectors, scales, seed)
            for tau in range(trials)
        )
        successes.append(int(cnt))
        prob = cnt / trials
        probs.append(prob)
        if m_star is None and prob >= 1.0 - delta:
            m_star = m
    return SweepResult(
        regime=regime, n=n, q=q, grid=grid, successes=tuple(successes),
        trials=trials, success_prob=tuple(probs), m_star=m_star,
        eps_target=eps_target, delta=delta, seed=seed,
    )


_SWEEP_FIELDS = ["regime", "n", "q", "m", "eps_target", "delta", "trials",
                 "successes", "success_prob", "m_star", "seed"]


def write_sweep_csv(path, results) -> None:
    """One row per (sweep, m) cell; m_star empty when saturated."""
    if isinstance(results, SweepResult):
        results = [results]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=_SWEEP_FIELDS)
        w.writeheader()
        for r in results:
            for m, cnt, prob in zip(r.grid, r.successes, r.success_prob):
                w.writerow({
                    "regime": r.regime, "n": r.n, "q": r.q, "m": m,
                    "eps_target": format(r.eps_target, ".17g"),
                    "delta": format(r.delta, ".17g"),
                    "trials": r.trials, "successes": cnt,
                    "success_prob": format(prob, ".17g"),
                    "m_star": "" if r.m_star is None else r.m_star,
                    "seed": r.seed,
                })
