"""Shared fixtures: expensive nets are built once and cached on disk."""

from pathlib import Path

import numpy as np
import pytest

from gramdev.nets import EpsilonNet, build_net

_CACHE = Path(__file__).parent / "_cache"


def _cached_net(n: int, eps: float, seed: int, max_points=None) -> EpsilonNet:
    tag = f"net_n{n}_eps{eps}_seed{seed}_cap{max_points}"
    path = _CACHE / f"{tag}.npz"
    if path.is_file():
        blob = np.load(path)
        return EpsilonNet(
            eps=float(blob["eps"]),
            dim=int(blob["dim"]),
            points=blob["points"],
            construction_seed=int(blob["seed"]),
            saturation_rejections=int(blob["sat"]),
        )
    net = build_net(n, eps, seed=seed, max_points=max_points)
    _CACHE.mkdir(exist_ok=True)
    np.savez(path, eps=net.eps, dim=net.dim, points=net.points,
             seed=net.construction_seed, sat=net.saturation_rejections)
    return net


@pytest.fixture(scope="session")
def net6():
    """Saturated quarter-net on the sphere in R^6 (the certification net)."""
    return _cached_net(6, 0.25, seed=0)


@pytest.fixture(scope="session")
def net10():
    """Partial quarter-net in R^10 for the sandwich check; capped because a
    saturated packing at n=10 has millions of points."""
    return _cached_net(10, 0.25, seed=0, max_points=20000)
