import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equidist.errors import DomainError
from equidist.functions import (
    LpNormSpec,
    lp_directional_derivative,
    lp_eval,
    lp_norm_values,
    lp_second_partial,
)

exponents = st.floats(1.05, 8.0)
positive = st.floats(0.01, 100.0)


def test_spec_rejects_boundary_exponents():
    for p in (1.0, math.inf, 0.5):
        with pytest.raises(ValueError):
            LpNormSpec(p, 2)
    assert LpNormSpec.from_json({"p": 2.0, "n": 3}) == LpNormSpec(2.0, 3)


def test_lp_eval_examples():
    assert lp_eval(LpNormSpec(2, 2), (3, 4)) == pytest.approx(5.0, rel=1e-15)
    assert lp_eval(LpNormSpec(3.7, 4), (0, 0, 0, 0)) == 0
    assert lp_eval(LpNormSpec(3, 2), (1, 1)) == pytest.approx(2 ** (1 / 3), rel=1e-14)
    assert lp_eval(LpNormSpec(3, 2), (1, 1)) == pytest.approx(1.259921, abs=5e-7)


def test_integer_norms_are_snapped():
    pts = np.array([[3, 4], [5, 12], [3, 0], [0, -7], [6, 8]])
    assert np.array_equal(lp_norm_values(pts, 2), [5.0, 13.0, 3.0, 7.0, 10.0])
    assert lp_norm_values(np.array([[3, 0], [0, 0]]), 3).tolist() == [3.0, 0.0]
    assert lp_norm_values(np.array([[3, -4]]), 1).tolist() == [7.0]


def test_directional_derivative_examples():
    spec = LpNormSpec(2, 2)
    # coordinate indices are 0-based
    assert lp_directional_derivative(spec, (3, 4), 0) == pytest.approx(0.6, rel=1e-15)
    u = np.array([1.0, 1.0]) / math.sqrt(2)
    assert lp_directional_derivative(spec, u, 0) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    for p in (1.5, 2.0, 3.0, 7.5):
        s = LpNormSpec(p, 3)
        e = np.array([0.0, 2.5, 0.0])
        e[[0, 2]] = 1e-300  # stay inside the open orthant
        assert lp_directional_derivative(s, e, 1) == pytest.approx(1.0, rel=1e-12)


def test_domain_error_outside_open_orthant():
    spec = LpNormSpec(2.5, 2)
    with pytest.raises(DomainError):
        lp_directional_derivative(spec, (0.0, 1.0), 0)
    with pytest.raises(DomainError):
        lp_directional_derivative(spec, (-1.0, 1.0), 0)


@given(exponents, st.lists(positive, min_size=2, max_size=4), st.floats(0.1, 50.0))
def test_derivative_is_zero_homogeneous(p, x, s):
    spec = LpNormSpec(p, len(x))
    x = np.array(x)
    for j in range(len(x)):
        a = lp_directional_derivative(spec, x, j)
        b = lp_directional_derivative(spec, s * x, j)
        assert b == pytest.approx(a, rel=1e-12)


@given(exponents, st.lists(positive, min_size=2, max_size=4), st.floats(0.1, 50.0))
def test_norm_is_one_homogeneous(p, x, s):
    spec = LpNormSpec(p, len(x))
    assert lp_eval(spec, s * np.array(x)) == pytest.approx(s * lp_eval(spec, x), rel=1e-12)


@given(exponents, st.lists(st.floats(0.5, 5.0), min_size=2, max_size=3))
@settings(max_examples=50)
def test_derivative_matches_finite_differences(p, x):
    spec = LpNormSpec(p, len(x))
    x = np.array(x)
    h = 1e-6
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = h
        fd = (lp_eval(spec, x + e) - lp_eval(spec, x - e)) / (2 * h)
        assert lp_directional_derivative(spec, x, j) == pytest.approx(fd, rel=1e-6, abs=1e-8)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_second_derivative_decays_along_rays(p):
    spec = LpNormSpec(p, 2)
    a = np.array([0.6, 0.8])
    ts = np.array([10.0, 100.0, 1000.0, 10000.0])
    h = 1e-2
    fd = []
    for t in ts:
        x = t * a
        e = np.array([h * t, 0.0])
        fd.append((lp_eval(spec, x + e) - 2 * lp_eval(spec, x) + lp_eval(spec, x - e)) / (h * t) ** 2)
    fd = np.array(fd)
    # O(1/t): t * f'' stays constant along the ray
    assert np.allclose(fd * ts, fd[0] * ts[0], rtol=1e-3)
    assert np.allclose(fd, lp_second_partial(spec, ts[:, None] * a, 0), rtol=1e-3)


def test_second_partial_bound_for_euclidean_norm():
    spec = LpNormSpec(2, 2)
    rng = np.random.default_rng(1)
    x = rng.uniform(0, 1000, size=(500, 2))
    second = lp_second_partial(spec, x, 0)
    assert np.all(second <= 1 / np.linalg.norm(x, axis=1) + 1e-15)
