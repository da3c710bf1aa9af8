"""Deviation matrix of an ensemble and its spectral machinery.

D = (1/N) W'W - (1/N) sum_j E[w_j w_j'], symmetrized after accumulation.
Exact extreme eigenvalues come from a cyclic Jacobi solver for n <= 64
(cross-checked against LAPACK in the tests) and numpy's eigvalsh above that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .families import FamilySpec, RowEnsemble, mean_second_moment
from .norms import NumericFailure

__all__ = [
    "DeviationMatrix",
    "SpectralSummary",
    "deviation_matrix",
    "quad_form",
    "bilinear_form",
    "spectral_norm",
    "symmetric_eigenvalues",
    "jacobi_eigenvalues",
    "weyl_bounds",
    "spectral_summary",
    "singular_value_interval",
    "eps_for_5_39",
]

JACOBI_MAX_DIM = 64


@dataclass(frozen=True)
class DeviationMatrix:
    d: np.ndarray
    source_N: int
    source_family: FamilySpec


@dataclass(frozen=True)
class SpectralSummary:
    spec_norm_D: float
    lam_min_gram: float
    lam_max_gram: float
    sigma_min_W: float
    sigma_max_W: float

    def to_json_dict(self) -> dict:
        return {
            "spec_norm_D": self.spec_norm_D,
            "lam_min_gram": self.lam_min_gram,
            "lam_max_gram": self.lam_max_gram,
            "sigma_min_W": self.sigma_min_W,
            "sigma_max_W": self.sigma_max_W,
        }


def deviation_matrix(ensemble: RowEnsemble) -> DeviationMatrix:
    W = ensemble.rows
    gram = (W.T @ W) / ensemble.N
    d = gram - mean_second_moment(ensemble)
    d = (d + d.T) / 2.0
    return DeviationMatrix(d=d, source_N=ensemble.N, source_family=ensemble.family)


def _coerce(D) -> np.ndarray:
    return D.d if isinstance(D, DeviationMatrix) else np.asarray(D, dtype=float)


def quad_form(D, z) -> float:
    """z' D z with a compensated final reduction."""
    d = _coerce(D)
    z = np.asarray(z, dtype=float)
    if z.shape != (d.shape[0],):
        raise ValueError(f"z has shape {z.shape}, expected ({d.shape[0]},)")
    return math.fsum((d @ z) * z)


def bilinear_form(D, z1, z2) -> float:
    """z1' D z2; symmetric in its arguments for symmetric D."""
    d = _coerce(D)
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if z1.shape != (d.shape[0],) or z2.shape != (d.shape[0],):
        raise ValueError("vector length must match matrix dimension")
    return math.fsum((d @ z2) * z1)


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 64) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Stops when the off-diagonal Frobenius norm drops below tol times the
    matrix Frobenius norm (absolute tol for a zero matrix).
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if n == 1:
        return a[0, :1].copy()
    scale = max(float(np.linalg.norm(a)), 1.0)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a[offdiag]))
        if off <= tol * scale:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
    off = float(np.linalg.norm(a[offdiag]))
    if off > tol * scale * 10.0:
        raise NumericFailure("Jacobi sweep limit reached without convergence")
    return np.sort(np.diag(a))


def symmetric_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues; Jacobi at desk scale, LAPACK beyond it."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] <= JACOBI_MAX_DIM:
        return jacobi_eigenvalues(a)
    return np.linalg.eigvalsh(a)


def spectral_norm(D) -> float:
    """Largest absolute eigenvalue of the symmetric matrix (exact solve)."""
    eig = symmetric_eigenvalues(_coerce(D))
    return float(max(abs(eig[0]), abs(eig[-1])))


def weyl_bounds(ensemble: RowEnsemble, eps: float) -> dict:
    """Check the eigenvalue corollary: extreme empirical Gram eigenvalues stay
    within 4 eps K^2 of the analytic ones.  Margins are the remaining slack."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    W = ensemble.rows
    gram = (W.T @ W) / ensemble.N
    emp = symmetric_eigenvalues((gram + gram.T) / 2.0)
    expected_diag = np.diag(mean_second_moment(ensemble))
    lam_max_exp = float(expected_diag.max())
    lam_min_exp = float(expected_diag.min())
    thr = 4.0 * eps * ensemble.family.k_bound**2
    margin_max = lam_max_exp + thr - float(emp[-1])
    margin_min = float(emp[0]) - (lam_min_exp - thr)
    return {
        "lam_max_ok": bool(margin_max >= 0.0),
        "lam_min_ok": bool(margin_min >= 0.0),
        "margin_max": margin_max,
        "margin_min": margin_min,
        "lam_max_emp": float(emp[-1]),
        "lam_min_emp": float(emp[0]),
        "lam_max_exp": lam_max_exp,
        "lam_min_exp": lam_min_exp,
    }


def spectral_summary(ensemble: RowEnsemble) -> SpectralSummary:
    W = ensemble.rows
    gram = (W.T @ W) / ensemble.N
    gram = (gram + gram.T) / 2.0
    emp = symmetric_eigenvalues(gram)
    dev = spectral_norm(deviation_matrix(ensemble))
    lam_min = float(emp[0])
    lam_max = float(emp[-1])
    return SpectralSummary(
        spec_norm_D=dev,
        lam_min_gram=lam_min,
        lam_max_gram=lam_max,
        sigma_min_W=math.sqrt(max(0.0, ensemble.N * lam_min)),
        sigma_max_W=math.sqrt(max(0.0, ensemble.N * lam_max)),
    )


def singular_value_interval(N: int, n: int, t: float, C_K: float) -> dict:
    """[sqrt(N) - (C_K sqrt(n) + t), sqrt(N) + (C_K sqrt(n) + t)], raw lower
    bound kept alongside its clamp at zero."""
    if N < 1 or n < 1:
        raise ValueError("N and n must be >= 1")
    if t < 0 or C_K <= 0:
        raise ValueError("t must be >= 0 and C_K > 0")
    half = C_K * math.sqrt(n) + t
    lo = math.sqrt(N) - half
    return {
        "lo_raw": lo,
        "lo_clamped": max(0.0, lo),
        "hi": math.sqrt(N) + half,
    }


def eps_for_5_39(N: int, n: int, t: float, K: float, c_hat: float) -> float:
    """The eps that maps the spectral-norm claim back to additive singular
    value bounds: (log 9) sqrt(n) / (sqrt(2) c_hat sqrt(N)) + t / (4 K^2 sqrt(N))."""
    if min(N, n) < 1 or t < 0 or K <= 0 or c_hat <= 0:
        raise ValueError("N, n >= 1; t >= 0; K, c_hat > 0 required")
    return (math.log(9.0) * math.sqrt(n) / (math.sqrt(2.0) * c_hat * math.sqrt(N))
            + t / (4.0 * K**2 * math.sqrt(N)))
