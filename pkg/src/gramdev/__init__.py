"""Empirical laboratory for concentration of sums of sub-Gaussian outer products.

Modules:
    families      row distributions and seeded ensemble sampling
    norms         moment-growth phi_1 / phi_2 norm estimators
    nets          epsilon-nets on the unit sphere and the net spectral bound
    deviation     deviation matrix, exact spectra, eigenvalue corollaries
    montecarlo    failure probabilities, decay fits, union-bound gap
    applications  pooled-measurement sample-complexity experiments
    cli           batch front end (``python -m gramdev.cli``)
"""

__version__ = "0.1.0"
