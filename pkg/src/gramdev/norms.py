"""Moment-growth estimators for the phi_2 (sub-Gaussian) and phi_1
(sub-exponential) norms of scalar random variables.

The phi_alpha norm of x is sup over integer p >= 1 of
p^{-1/alpha} (E|x|^p)^{1/p}; the supremum is truncated at p_max (default 16,
beyond which empirical moments at 1e6 samples are noise dominated).  High
moments are accumulated in log space, exp(p log|x|), so p = 16 on heavy draws
cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .families import FamilySpec, sample_ensemble

__all__ = [
    "NumericFailure",
    "NormEstimate",
    "subgaussian_norm_scalar",
    "subexponential_norm_scalar",
    "gaussian_abs_moment",
    "gaussian_phi2_oracle",
    "verify_square_subexp",
]

DEFAULT_P_MAX = 16


class NumericFailure(RuntimeError):
    """A non-finite value appeared where a finite one is required."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class NormEstimate:
    value: float
    p_max: int
    samples: int
    per_p_values: np.ndarray
    stderr: float

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "p_max": self.p_max,
            "samples": self.samples,
            "per_p_values": [float(v) for v in self.per_p_values],
            "stderr": self.stderr,
        }


def _moment_norm(draws: np.ndarray, alpha: int, p_max: int) -> NormEstimate:
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    draws = np.asarray(draws, dtype=float).ravel()
    if not np.isfinite(draws).all():
        idx = int(np.flatnonzero(~np.isfinite(draws))[0])
        raise NumericFailure(f"non-finite draw at index {idx}", index=idx)
    nsamp = draws.size

    absd = np.abs(draws)
    with np.errstate(divide="ignore"):
        logs = np.log(absd)  # -inf at zeros is fine under logsumexp

    per_p = np.empty(p_max)
    stderr_at = np.empty(p_max)
    log_n = math.log(nsamp)
    for p in range(1, p_max + 1):
        log_mp = logsumexp(p * logs) - log_n           # log E_hat |x|^p
        log_m2p = logsumexp(2 * p * logs) - log_n      # log E_hat |x|^{2p}
        if log_mp == -np.inf:
            per_p[p - 1] = 0.0
            stderr_at[p - 1] = 0.0
            continue
        val = math.exp(log_mp / p - math.log(p) / alpha)
        per_p[p - 1] = val
        # delta method: d val / d m_p = val / (p m_p); var(m_p) = (m_2p - m_p^2)/n
        ratio = math.exp(min(2.0 * log_mp - log_m2p, 0.0))
        log_var = log_m2p + math.log1p(-ratio) if ratio < 1.0 else -np.inf
        log_sd = 0.5 * (log_var - log_n)
        stderr_at[p - 1] = val / p * math.exp(log_sd - log_mp)

    best = int(np.argmax(per_p))
    return NormEstimate(
        value=float(per_p[best]),
        p_max=p_max,
        samples=nsamp,
        per_p_values=per_p,
        stderr=float(stderr_at[best]),
    )


def _draw(sampler, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.asarray(sampler(samples, rng), dtype=float)


def subgaussian_norm_scalar(sampler, p_max: int = DEFAULT_P_MAX,
                            samples: int = 10**6, seed: int = 0) -> NormEstimate:
    """Empirical phi_2 norm of a scalar sampler(n, rng) -> array of draws."""
    if samples < 10**3:
        raise ValueError("samples must be >= 1000")
    return _moment_norm(_draw(sampler, samples, seed), alpha=2, p_max=p_max)


def subexponential_norm_scalar(sampler, p_max: int = DEFAULT_P_MAX,
                               samples: int = 10**6, seed: int = 0) -> NormEstimate:
    """Empirical phi_1 norm of a scalar sampler(n, rng) -> array of draws."""
    if samples < 10**3:
        raise ValueError("samples must be >= 1000")
    return _moment_norm(_draw(sampler, samples, seed), alpha=1, p_max=p_max)


# -- closed-form Gaussian oracle ------------------------------------------

def gaussian_abs_moment(p: int) -> float:
    """E|g|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi) for standard normal g."""
    return math.exp(0.5 * p * math.log(2.0) + gammaln((p + 1) / 2.0) - 0.5 * math.log(math.pi))


def gaussian_phi2_oracle(p_max: int = DEFAULT_P_MAX) -> float:
    """max over p <= p_max of p^{-1/2} (E|g|^p)^{1/p}, from closed-form moments."""
    vals = [
        math.exp((0.5 * p * math.log(2.0) + gammaln((p + 1) / 2.0) - 0.5 * math.log(math.pi)) / p
                 - 0.5 * math.log(p))
        for p in range(1, p_max + 1)
    ]
    return max(vals)


# -- square/product relationship check ------------------------------------

def verify_square_subexp(family: FamilySpec, z, p_max: int = DEFAULT_P_MAX,
                         samples: int = 10**5, seed: int = 0,
                         tolerance: float = 0.15) -> dict:
    """Check that (w'z)^2 centered is sub-exponential with norm <= 4 K^2 ||z||^2.

    Estimates the phi_2 norm of w'z and the phi_1 norm of its centered square
    on the same draws; ratio_ok uses the estimated phi_2 value, so the check
    is self-contained rather than relying on the family's analytic bound.
    """
    z = np.asarray(z, dtype=float)
    znorm = float(np.linalg.norm(z))
    if znorm == 0.0:
        raise ValueError("z must be nonzero")
    nsamp = samples
    if family.kind == "scaled_gaussian":
        nsamp = samples - samples % family.q + family.q
    ens = sample_ensemble(family, nsamp, seed)
    proj = ens.rows @ z
    # analytic E(w'z)^2 from the averaged second moment diagonal
    e2 = float(np.sum(family.second_moment_diag * z * z))
    phi2 = _moment_norm(proj, alpha=2, p_max=p_max).value
    phi1 = _moment_norm(proj**2 - e2, alpha=1, p_max=p_max).value
    return {
        "phi2_of_wz": phi2,
        "phi1_of_sq": phi1,
        "ratio_ok": bool(phi1 <= 4.0 * phi2**2 * (1.0 + tolerance)),
    }
