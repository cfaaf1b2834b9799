import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from ibt import InvalidParameterError
from ibt.stable import StableParams, cdf, char_fn, ks_distance, sample, tail_to_scale
from ibt.stable import _cdf_one


def test_parameter_validation():
    for bad in ({"p": 1.0}, {"p": 2.3}, {"a": 0.0}, {"a": -1.0}, {"b": 1.5}):
        kw = {"p": 1.5, "a": 1.0, "b": 0.0, **bad}
        with pytest.raises(InvalidParameterError):
            StableParams(**kw)


def test_p2_is_gaussian():
    params = StableParams(2.0, 0.7, 0.0)
    rng = np.random.default_rng(1)
    z = sample(params, 200000, rng)
    var = z.var()
    se = math.sqrt(2.0 / z.size) * 2 * 0.7
    assert abs(var - 1.4) < 3 * se
    x = np.linspace(-3, 3, 13)
    assert np.allclose(cdf(params, x), special.ndtr(x / math.sqrt(1.4)), atol=1e-12)


def test_cdf_grid_matches_scalar_quadrature():
    params = StableParams(1.5, 0.8, 0.4)
    for x in (-3.0, -0.7, 0.0, 0.4, 2.5, 8.0):
        assert cdf(params, x) == pytest.approx(_cdf_one(params, x), abs=2e-6)


def test_cdf_matches_scipy():
    levy = stats.levy_stable
    levy.parameterization = "S1"
    for p, a, b in [(1.5, 1.0, 0.0), (1.5, 0.62666, 0.5), (1.2, 0.9, -0.8)]:
        params = StableParams(p, a, b)
        scale = a ** (1.0 / p)
        x = np.array([-4.0, -1.0, 0.0, 0.5, 2.0, 5.0])
        ref = levy.cdf(x, p, b, loc=0.0, scale=scale)
        assert np.max(np.abs(cdf(params, x) - ref)) < 2e-5


def test_sampler_against_cdf():
    params = StableParams(1.5, 0.6, 0.3)
    rng = np.random.default_rng(9)
    z = sample(params, 100000, rng)
    assert ks_distance(z, params) < 0.02


def test_sampler_deterministic():
    params = StableParams(1.7, 1.0, -0.2)
    z1 = sample(params, 1000, np.random.default_rng(42))
    z2 = sample(params, 1000, np.random.default_rng(42))
    assert np.array_equal(z1, z2)


@settings(max_examples=30, deadline=None)
@given(p=st.floats(1.05, 1.95), a=st.floats(0.1, 3.0), b=st.floats(-1.0, 1.0))
def test_cf_modulus_and_symmetry(p, a, b):
    params = StableParams(p, a, b)
    t = np.array([0.3, 1.0, 2.7])
    v = char_fn(params, t)
    assert np.allclose(np.abs(v), np.exp(-a * t**p), rtol=1e-12)
    assert np.allclose(char_fn(params, -t), np.conj(v), rtol=1e-12)


def test_tail_to_scale_pareto_oracle():
    # symmetric Pareto(1.5) sums: tails c+ = c- = 1/2, so St(1.5, a, 0)
    p = 1.5
    params = tail_to_scale(p, 0.5, 0.5)
    rng = np.random.default_rng(123)
    n, m, chunk = 1000, 20000, 2000
    s = np.empty(m)
    for j in range(0, m, chunk):
        u = rng.uniform(size=(chunk, n))
        signs = np.where(rng.uniform(size=(chunk, n)) < 0.5, -1.0, 1.0)
        x = signs * u ** (-1.0 / p)  # |X| Pareto with P(|X|>t)=t^-1.5, t>=1
        s[j:j + chunk] = x.sum(axis=1) / n ** (1.0 / p)  # symmetric, mean 0
    assert ks_distance(s, params) < 0.02


def test_skewed_tail_weights():
    # b reproduces the one-sided tail weight formula
    params = tail_to_scale(1.5, 1.0, 0.0)
    assert params.b == 1.0
    big = 60.0 * params.a ** (1 / 1.5)
    upper = 1.0 - cdf(params, big)
    assert upper == pytest.approx(1.0 * big ** -1.5, rel=1e-3)
    lower = cdf(params, -big)
    assert lower < 1e-6
