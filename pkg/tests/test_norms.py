import math

import numpy as np
import pytest

from gramdev.families import FamilySpec
from gramdev.norms import (NumericFailure, gaussian_abs_moment,
                           gaussian_phi2_oracle, subexponential_norm_scalar,
                           subgaussian_norm_scalar, verify_square_subexp)

# Hand-computed absolute moments of a standard normal:
#   E|g|   = sqrt(2/pi)
#   E g^2  = 1
#   E|g|^3 = 2 sqrt(2/pi)
#   E g^4  = 3
#   E|g|^5 = 8 sqrt(2/pi)
#   E g^6  = 15
_HAND_MOMENTS = {
    1: math.sqrt(2.0 / math.pi),
    2: 1.0,
    3: 2.0 * math.sqrt(2.0 / math.pi),
    4: 3.0,
    5: 8.0 * math.sqrt(2.0 / math.pi),
    6: 15.0,
    16: 2027025.0,  # (16-1)!!
}


def test_gaussian_abs_moment_closed_forms():
    for p, want in _HAND_MOMENTS.items():
        assert gaussian_abs_moment(p) == pytest.approx(want, rel=1e-12)


def test_phi2_oracle_decreases_in_p():
    # per-p values p^{-1/2} (E|g|^p)^{1/p}, frozen independently:
    #   p=1: 0.79788456,  p=2: 0.70710678,  p=4: 0.65803701,  p=16: 0.61961041
    # (p=16 from (15!!)^{1/16} / 4 = 2027025^{1/16} / 4)
    assert gaussian_abs_moment(1) == pytest.approx(0.7978845608028654)
    assert (gaussian_abs_moment(4) ** 0.25) / 2.0 == pytest.approx(3.0 ** 0.25 / 2.0)
    assert (gaussian_abs_moment(16) ** (1 / 16)) / 4.0 == pytest.approx(
        2027025.0 ** (1 / 16) / 4.0, rel=1e-10)
    # hence the oracle max sits at p = 1 regardless of the cap
    for p_max in (1, 2, 8, 16, 32):
        assert gaussian_phi2_oracle(p_max) == pytest.approx(math.sqrt(2.0 / math.pi))


def test_subgaussian_estimate_matches_oracle():
    est = subgaussian_norm_scalar(lambda size, rng: rng.standard_normal(size),
                                  samples=200_000, seed=5)
    assert est.value == pytest.approx(gaussian_phi2_oracle(16), abs=0.01)
    assert est.stderr > 0
    assert est.per_p_values.shape == (16,)
    # the empirical per-p curve is decreasing like the analytic one
    assert est.per_p_values[0] > est.per_p_values[-1]


def test_rademacher_norm_is_one():
    # |x| = 1 surely, so p^{-1/2} (E|x|^p)^{1/p} = p^{-1/2}, maximal at p = 1
    est = subgaussian_norm_scalar(
        lambda size, rng: rng.integers(0, 2, size) * 2.0 - 1.0,
        samples=10_000, seed=1)
    assert est.value == 1.0
    assert np.allclose(est.per_p_values, 1.0 / np.sqrt(np.arange(1, 17)))


def test_homogeneity():
    # scaling the variable scales every empirical moment ratio linearly
    base = subgaussian_norm_scalar(lambda size, rng: rng.standard_normal(size),
                                   samples=20_000, seed=3)
    scaled = subgaussian_norm_scalar(lambda size, rng: 2.5 * rng.standard_normal(size),
                                     samples=20_000, seed=3)
    assert scaled.value == pytest.approx(2.5 * base.value, rel=1e-12)
    assert np.allclose(scaled.per_p_values, 2.5 * base.per_p_values, rtol=1e-12)


def test_subexponential_of_square():
    # g^2 is sub-exponential; its phi_1 norm estimate should be finite and
    # close to the analytic sup, which again sits at p = 1 (E g^2 = 1)
    est = subexponential_norm_scalar(lambda size, rng: rng.standard_normal(size) ** 2,
                                     samples=100_000, seed=7)
    assert 0.9 < est.value < 1.3


def test_square_subexp_relation():
    out = verify_square_subexp(FamilySpec.standard_gaussian(6),
                               np.eye(6)[0], samples=50_000, seed=2)
    assert out["ratio_ok"]
    assert out["phi2_of_wz"] == pytest.approx(math.sqrt(2.0 / math.pi), abs=0.02)


def test_nonfinite_draws_rejected():
    def bad(size, rng):
        x = rng.standard_normal(size)
        x[123] = np.inf
        return x

    with pytest.raises(NumericFailure) as err:
        subgaussian_norm_scalar(bad, samples=5_000, seed=0)
    assert err.value.index == 123


def test_argument_validation():
    sampler = lambda size, rng: rng.standard_normal(size)
    with pytest.raises(ValueError):
        subgaussian_norm_scalar(sampler, samples=10)
    with pytest.raises(ValueError):
        subgaussian_norm_scalar(sampler, p_max=0, samples=2_000)


def test_estimate_json_dict():
    est = subgaussian_norm_scalar(lambda size, rng: rng.standard_normal(size),
                                  samples=2_000, seed=9)
    d = est.to_json_dict()
    assert d["value"] == est.value
    assert d["samples"] == 2_000
    assert len(d["per_p_values"]) == est.p_max
