import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equidist.discrepancy import (
    G_k,
    G_k_sup,
    ModOneSequence,
    erdos_turan_bound,
    escape_step,
    extreme_discrepancy,
    in_A,
    poly_sequence,
    weyl_sum,
)
from equidist.errors import EmptySequence, GridBudgetExceeded
from equidist.experiments import a_set_shrinkage
from oracles import brute_force

SQRT2 = math.sqrt(2)
PHI = (1 + math.sqrt(5)) / 2


@st.composite
def grid_sequences(draw):
    M = draw(st.sampled_from([2, 3, 7, 16, 97, 1000, 65536]))
    N = draw(st.integers(1, 200))
    return M, draw(st.lists(st.integers(0, M - 1), min_size=N, max_size=N))


@given(grid_sequences())
@settings(max_examples=150, deadline=None)
def test_fast_path_matches_oracle(data):
    M, ks = data
    ext, star = brute_force(ks, M)
    rep = extreme_discrepancy([Fraction(k, M) for k in ks])
    assert rep.extreme == ext and rep.star == star
    flt = extreme_discrepancy(np.array(ks) / M)
    assert flt.extreme == pytest.approx(float(ext), abs=1e-12)
    assert flt.star == pytest.approx(float(star), abs=1e-12)


@given(grid_sequences())
@settings(max_examples=100, deadline=None)
def test_report_invariants(data):
    M, ks = data
    rep = extreme_discrepancy([Fraction(k, M) for k in ks])
    mult = max(np.unique(ks, return_counts=True)[1])
    assert 0 <= rep.star <= rep.extreme <= 1
    assert rep.extreme >= Fraction(int(mult), len(ks))


def test_examples():
    rep = extreme_discrepancy([0.5])
    assert (rep.extreme, rep.star, rep.N) == (1.0, 0.5, 1)
    rep = extreme_discrepancy([Fraction(k, 4) for k in range(4)])
    assert rep.extreme == Fraction(1, 4)
    N = 40
    rep = extreme_discrepancy([Fraction(2 * k + 1, 2 * N) for k in range(N)])
    assert rep.star == Fraction(1, 2 * N)
    assert rep.extreme == brute_force([2 * k + 1 for k in range(N)], 2 * N)[0] == Fraction(1, N)


def test_sequence_validation():
    with pytest.raises(ValueError):
        ModOneSequence([0.2, 1.0])
    with pytest.raises(ValueError):
        ModOneSequence([Fraction(-1, 3)])
    with pytest.raises(EmptySequence):
        extreme_discrepancy([])
    assert np.all(ModOneSequence.from_reals([-0.25, 3.5]).values == [0.75, 0.5])


def test_weyl_sum_examples():
    assert weyl_sum([0, 0.5, 0, 0.5], 1) == pytest.approx(0, abs=1e-15)
    assert weyl_sum([0.3] * 10, 7) == pytest.approx(1.0)
    seq = ModOneSequence.from_reals(np.arange(1, 10_001) * PHI)
    assert weyl_sum(seq, 1) <= 1e-2
    with pytest.raises(ValueError):
        weyl_sum([0.1], 0)


@given(st.lists(st.floats(0, 0.999), min_size=1, max_size=50), st.floats(0, 0.999), st.integers(-9, 9).filter(bool))
def test_weyl_sum_phase_invariance(xs, c, h):
    a = weyl_sum(xs, h)
    b = weyl_sum(ModOneSequence.from_reals(np.array(xs) + c), h)
    assert b == pytest.approx(a, abs=1e-12)


def test_weyl_sum_exact_sequences():
    seq = [Fraction(k, 3) for k in range(3)]
    assert weyl_sum(seq, 1) == pytest.approx(0, abs=1e-15)
    assert weyl_sum(seq, 3) == pytest.approx(1.0)


def test_erdos_turan_examples():
    assert erdos_turan_bound([0.25] * 20, 10) >= 1
    N = 200
    eq = np.arange(N) / N
    bound = erdos_turan_bound(eq, N)
    assert bound == pytest.approx(3 * (1 / N + 1 / N), abs=1e-9)  # all W_h vanish except h = N
    assert extreme_discrepancy(eq).extreme == pytest.approx(1 / N)


@given(st.lists(st.floats(0, 0.999), min_size=1, max_size=500), st.integers(1, 64))
@settings(max_examples=100, deadline=None)
def test_erdos_turan_dominates(xs, K):
    assert erdos_turan_bound(xs, K) >= extreme_discrepancy(xs).extreme - 1e-12


def test_G_k_examples():
    for c in (0.0, 0.3):
        for k in (1, 5, 17):
            assert G_k(0.0, 1, [c], k) == 1.0
    assert G_k(0.5, 1, [0.0], 2) == extreme_discrepancy([0.5, 0.0]).extreme == 0.5
    assert G_k(SQRT2 - 1, 2, [0.0, 0.0], 1000) <= 0.05
    assert np.allclose(poly_sequence(0.5, [0.25], 4), [0.75, 0.25, 0.75, 0.25])


def test_G_k_sup_examples():
    assert G_k_sup(0.0, 1, 10, 16).value == 1.0
    expected = max(extreme_discrepancy(np.mod([0.5 + b, 1.0 + b], 1.0)).extreme for b in np.arange(64) / 64)
    assert G_k_sup(0.5, 1, 2, 64).value == pytest.approx(expected)
    with pytest.raises(GridBudgetExceeded):
        G_k_sup(0.3, 3, 5, grid=256)


@given(st.floats(0, 0.999), st.integers(5, 60))
@settings(max_examples=30, deadline=None)
def test_grid_refinement_never_lowers_sup(a, k):
    # grid 16 is a subset of grid 32
    assert G_k_sup(a, 1, k, 16).value <= G_k_sup(a, 1, k, 32).value + 1e-15


def test_in_A_examples():
    assert in_A(SQRT2 - 1, 1, 50, 0.5) is False
    assert in_A(0.37, 1, 30, 1.5) is False
    assert in_A(0.0, 1, 100, 0.5) is True  # constant sequences never escape


@given(st.floats(0, 0.999), st.floats(0.05, 0.9), st.integers(1, 40))
@settings(max_examples=200, deadline=None)
def test_in_A_monotone_in_N(a, eps, N):
    if in_A(a, 1, N + 1, eps, grid=16):
        assert in_A(a, 1, N, eps, grid=16)


def test_escape_step_independent_of_horizon():
    k = escape_step(SQRT2 - 1, 1, 0.2, 200)
    assert k is not None
    assert escape_step(SQRT2 - 1, 1, 0.2, k) == k
    assert escape_step(SQRT2 - 1, 1, 0.2, k - 1) is None


def test_a_set_fraction_near_one_at_N1():
    rep = a_set_shrinkage(1, 0.99, [1, 2], sample_count=64, seed=1, grid=16)
    assert rep.metrics["fractions"][0] == 1.0


@pytest.mark.xfail(strict=True, reason="degree-2 grid sups decay like k**-0.5; fraction is ~0.9 at N=200")
def test_a_set_shrinkage_degree_two_by_200():
    # grid 16 is a subset of the default grid, so this fraction is a lower bound
    rep = a_set_shrinkage(2, 0.1, [50, 100, 200], sample_count=32, seed=0, grid=16, refine=False)
    assert rep.metrics["fractions"][-1] <= 0.05
