"""Acceptance suite: one test per primary criterion, at the stated sizes.

Each test prints a single PASS/FAIL line (visible with -s; the -v status
column carries the same verdict).  Heavier shared artifacts are module- or
session-scoped fixtures so the suite stays within desk-scale runtime.
"""

import math

import numpy as np
import pytest

from gramdev.applications import (PooledSpec, REGIME_POOLED, REGIME_QUAD,
                                  REGIME_SPEC, pooled_vs_naive, sweep_min_m)
from gramdev.deviation import deviation_matrix, spectral_norm, symmetric_eigenvalues
from gramdev.families import FamilySpec, sample_ensemble
from gramdev.montecarlo import (CLAIM_QUAD, ExperimentConfig, InsufficientData,
                                estimate_rows, fit_decay, mc_failure,
                                union_bound_gap)
from gramdev.nets import max_net_quad, verify_covering
from gramdev.norms import gaussian_phi2_oracle, subgaussian_norm_scalar


def _verdict(name: str, ok: bool) -> None:
    print(f"{'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


def test_net_certification(net6):
    # cardinality <= 9^6, pairwise separation > 1/4, probed gap <= 1/4 (1e5 probes)
    card_ok = net6.cardinality <= 9**6
    P = net6.points
    max_dot = -1.0
    for lo in range(0, len(P), 2048):
        g = P[lo : lo + 2048] @ P.T
        np.fill_diagonal(g[:, lo : lo + 2048], -1.0)
        max_dot = max(max_dot, float(g.max()))
    sep = math.sqrt(max(0.0, 2.0 - 2.0 * max_dot))
    gap = verify_covering(net6, 100_000, seed=2024)
    _verdict(
        f"net certification: |N|={net6.cardinality} <= 9^6, sep={sep:.4f} > 0.25, "
        f"gap={gap:.4f} <= 0.25",
        card_ok and sep > 0.25 and gap <= 0.25,
    )


def test_net_norm_sandwich(net10):
    # 100 random symmetric 10x10: ||A|| in [max_net |x'Ax|, 2 max_net |x'Ax|]
    rng = np.random.default_rng(7)
    violations = 0
    for _ in range(100):
        m = rng.normal(size=(10, 10))
        A = (m + m.T) / 2.0
        exact = float(np.abs(np.linalg.eigvalsh(A)).max())
        lo = max_net_quad(A, net10)
        if not (lo <= exact <= 2.0 * lo):
            violations += 1
    _verdict(f"net-norm sandwich: {violations}/100 violations", violations == 0)


def test_gaussian_phi2_oracle():
    est = subgaussian_norm_scalar(lambda size, rng: rng.standard_normal(size),
                                  p_max=16, samples=10**6, seed=0)
    oracle = gaussian_phi2_oracle(16)
    err = abs(est.value - oracle)
    _verdict(
        f"gaussian phi2 oracle: |{est.value:.4f} - {oracle:.4f}| = {err:.4f} <= 0.02",
        err <= 0.02,
    )


def _run_decay(eps: float):
    cfg = ExperimentConfig(family=FamilySpec.standard_gaussian(8),
                           N_grid=(25, 50, 100, 200, 400), eps=eps,
                           trials=10_000, master_seed=2024, claim=CLAIM_QUAD)
    return cfg, mc_failure(cfg)


def test_claim1_decay():
    """Stated criterion: QuadForm decay fit at eps=0.5, n=8, 1e4 trials.

    This experiment cannot produce a fit at the stated sizes.  For a
    standard Gaussian ensemble and a unit z, the statistic z'Dz is exactly
    a centered chi-square mean, chi2_N / N - 1, and the threshold
    4*eps*K^2 = 1.27 (K^2 = 2/pi) sits more than 4.5 standard deviations
    out already at N=25 (exact tail 2.8e-4, and < 1e-6 for N >= 50).  At
    1e4 trials the expected failure counts over the grid are about
    [3, 0, 0, 0, 0]: at most one grid point has a nonzero p_hat, and a
    slope needs three.  The test runs the experiment as stated and reports
    the observed counts; see the decay test at eps=0.1 below for the same
    property at an epsilon where the tail is observable.
    """
    cfg, ests = _run_decay(eps=0.5)
    counts = [e.failures for e in ests]
    try:
        fit = fit_decay(ests, eps=cfg.eps)
    except InsufficientData as exc:
        _verdict(
            f"claim-1 decay (eps=0.5): no fit possible -- failures per N "
            f"{dict(zip(cfg.N_grid, counts))} at threshold "
            f"{ests[0].threshold:.3f} ({exc})",
            False,
        )
        return
    _verdict(
        f"claim-1 decay (eps=0.5): slope={fit.slope:.5f} < 0, "
        f"r2={fit.r_squared:.3f} >= 0.9, c_hat={fit.c_hat:.4f} > 0",
        fit.slope < 0 and fit.r_squared >= 0.9 and fit.c_hat > 0,
    )


def test_claim1_decay_observable_eps():
    """Supplementary (not a stated criterion): the same decay property at
    eps=0.1, where the exact chi-square tails over the N grid run from
    0.36 down to 4e-4 and the fit is well posed at 1e4 trials."""
    cfg, ests = _run_decay(eps=0.1)
    fit = fit_decay(ests, eps=cfg.eps)
    _verdict(
        f"claim-1 decay (eps=0.1, supplementary): slope={fit.slope:.5f} < 0, "
        f"r2={fit.r_squared:.3f} >= 0.9, c_hat={fit.c_hat:.4f} > 0",
        fit.slope < 0 and fit.r_squared >= 0.9 and fit.c_hat > 0,
    )


def test_union_bound_gap():
    rows = union_bound_gap(FamilySpec.standard_gaussian, n_grid=(4, 8, 16),
                           eps=0.5, trials=2000, master_seed=99)
    stars_spec = [r["N_star_spec"] for r in rows]
    stars_quad = [r["N_star_quad"] for r in rows]
    spec_increasing = all(b > a for a, b in zip(stars_spec, stars_spec[1:]))
    quad_stable = max(stars_quad) <= 2 * min(stars_quad)
    prob_gap = all(
        r["p_spec"] >= r["p_quad"] - 2 * max(r["ci_width_quad"], r["ci_width_spec"])
        for r in rows
    )
    _verdict(
        f"union-bound gap: N*_spec={stars_spec} increasing, N*_quad={stars_quad} "
        f"within 2x, p_spec >= p_quad - 2ci everywhere",
        spec_increasing and quad_stable and prob_gap,
    )


def test_weyl_determinism():
    # |lambda_emp - lambda_exp| <= ||D|| for both extremes, 500 mixed ensembles.
    # Weyl's inequality is deterministic; the 1e-12 slack is float roundoff only.
    rng = np.random.default_rng(11)
    violations = 0
    for k in range(500):
        n = int(rng.integers(2, 13))
        kind = k % 3
        if kind == 0:
            fam = FamilySpec.standard_gaussian(n)
        elif kind == 1:
            fam = FamilySpec.anisotropic_gaussian(rng.uniform(0.25, 4.0, size=n))
        else:
            fam = FamilySpec.rademacher(n)
        N = int(rng.integers(8, 200))
        ens = sample_ensemble(fam, N, seed=k)
        dev = spectral_norm(deviation_matrix(ens))
        gram = ens.rows.T @ ens.rows / N
        emp = symmetric_eigenvalues((gram + gram.T) / 2.0)
        exp = np.sort(fam.second_moment_diag)
        if abs(emp[-1] - exp[-1]) > dev + 1e-12 or abs(emp[0] - exp[0]) > dev + 1e-12:
            violations += 1
    _verdict(f"weyl determinism: {violations}/500 violations", violations == 0)


_M_GRID = (2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)


@pytest.fixture(scope="module")
def pooled_sweeps():
    common = dict(eps_target=0.5, delta=0.05, m_grid=_M_GRID, trials=200, seed=5)
    return {
        ("pooled", 1): sweep_min_m(REGIME_POOLED, 16, 1, **common),
        ("pooled", 16): sweep_min_m(REGIME_POOLED, 16, 16, **common),
        ("quad", 16): sweep_min_m(REGIME_QUAD, 16, 16, **common),
        ("spec", 16): sweep_min_m(REGIME_SPEC, 16, 16, **common),
    }


def test_pooled_scaling(pooled_sweeps):
    m1 = pooled_sweeps[("pooled", 1)].m_star
    m16 = pooled_sweeps[("pooled", 16)].m_star
    ok = m1 is not None and m16 is not None
    if ok:
        # one grid step of slack on the doubling grid
        ok = m16 <= 2 * (m1 / 4)
    _verdict(f"pooled scaling: m*(q=16)={m16} <= m*(q=1)/4 + one step (m*(q=1)={m1})", ok)


def test_log_vs_linear_gap(pooled_sweeps):
    mq = pooled_sweeps[("quad", 16)].m_star
    ms = pooled_sweeps[("spec", 16)].m_star
    ok = mq is not None and ms is not None and mq <= ms / 2
    _verdict(f"log-vs-linear gap: m*(quad)={mq} <= m*(spec)/2 (m*(spec)={ms})", ok)


def test_pooled_vs_naive_domination():
    rng = np.random.default_rng(3)
    violations = 0
    for seed in range(1000):
        f = rng.uniform(0.2, 2.0, size=4)
        out = pooled_vs_naive(PooledSpec(n=8, q=4, m=32, scales=f, seed=seed))
        if out["btilde"] > out["naive_bound"]:
            violations += 1
    _verdict(f"pooled-vs-naive domination: {violations}/1000 violations",
             violations == 0)


def test_thread_determinism():
    cfg = ExperimentConfig(family=FamilySpec.standard_gaussian(6),
                           N_grid=(16, 32, 64), eps=0.5, trials=400,
                           master_seed=17, claim=CLAIM_QUAD)
    one = mc_failure(cfg, threads=1)
    eight = mc_failure(cfg, threads=8)
    same_counts = [e.failures for e in one] == [e.failures for e in eight]
    same_rows = estimate_rows(cfg, one) == estimate_rows(cfg, eight)
    _verdict("determinism: threads=1 and threads=8 produce identical counts and rows",
             same_counts and same_rows)
