"""How many rows per group do the three deviation regimes need?

Setting: q groups of m standard Gaussian rows each, group k scaled by f_k.
Three events, from weakest to strongest:

  per_vector_quad   every group satisfies |(1/m) sum (a'x_k)^2 - ||x_k||^2|
                    <= eps ||x_k||^2 for its own fixed vector x_k
  per_vector_spec   every group's full deviation matrix has norm <= eps
  pooled_spec       the f^2-weighted average over all q groups has norm
                    <= eps max f^2

The quadratic event needs only logarithmically many rows, the per-group
spectral event needs m ~ n, and pooling divides that by q because all mq
rows average together.  The sweep locates the smallest grid m where each
event holds in at least 1 - delta of trials.
"""

import numpy as np

from gramdev.applications import REGIMES, sweep_min_m

n, q = 12, 8
grid = (2, 4, 8, 16, 32, 64, 128, 256)

print(f"n = {n}, q = {q}, eps = 0.5, delta = 0.1, trials = 200")
print(f"{'regime':>16} {'m*':>5}  success probability per m {grid}")
for regime in REGIMES:
    res = sweep_min_m(regime, n, q, eps_target=0.5, delta=0.1,
                      m_grid=grid, trials=200, seed=0)
    star = "-" if res.m_star is None else str(res.m_star)
    probs = " ".join(f"{p:.2f}" for p in res.success_prob)
    print(f"{regime:>16} {star:>5}  {probs}")

print("\npooling effect at fixed total row budget:")
for qq in (1, 4, 16):
    res = sweep_min_m("pooled_spec", n, qq, eps_target=0.5, delta=0.1,
                      m_grid=grid, trials=200, seed=0)
    print(f"  q = {qq:>2}: m* = {res.m_star}  (total rows {qq} * m*)")
