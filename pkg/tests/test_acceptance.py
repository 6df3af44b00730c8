"""Acceptance suite: one test per criterion, each printing a single verdict line.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
written straight to the terminal even when output capture is on.
"""

import json
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from equidist import lattice
from equidist.cli import main as cli_main
from equidist.discrepancy import extreme_discrepancy, in_A
from equidist.exact import ExactScalar, sqrt2
from equidist.experiments import (
    a_set_shrinkage,
    taylor_fiber_check,
    verify_lp_norm,
    verify_poly_equidist,
    verify_weyl_1d,
)
from equidist.functions import (
    LpNormSpec,
    Polynomial,
    exact_determinant,
    exponents_of_degree,
    find_irrational_direction,
    leading_directional_value,
    lp_partial,
    monomial_basis_search,
    monomial_vector,
)
from equidist.measures import AC_LIKE, DIRAC_LIKE, classify, pushforward_mod1
from oracles import brute_force, brute_force_direction

S2 = sqrt2()
x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)


@pytest.fixture
def verdict(capsys):
    def emit(cid, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {cid}: {'PASS' if ok else 'FAIL'} | {detail}")
        assert ok, f"criterion {cid}: {detail}"
    return emit


def test_c01_discrepancy_oracle_equivalence(verdict):
    rng = random.Random(20240601)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(500):
        M = rng.choice([2, 5, 17, 128, 1000, 2**20])
        N = rng.randint(1, 200)
        ks = [rng.randrange(M) for _ in range(N)]
        ks += [rng.choice(ks) for _ in range(rng.randint(0, N // 4))][: 200 - N]  # force repeats
        fast = extreme_discrepancy([Fraction(k, M) for k in ks])
        ext, star = brute_force(ks, M)
        mismatches += (fast.extreme != ext) or (fast.star != star)
    elapsed = time.perf_counter() - start
    verdict("1", mismatches == 0 and elapsed < 60,
            f"500 sequences, {mismatches} mismatches vs O(N^2) oracle, {elapsed:.1f}s")


def test_c02_weyl_1d(verdict):
    start = time.perf_counter()
    irr = verify_weyl_1d(S2, 2, 100_000)
    half = verify_weyl_1d(Fraction(1, 2), 1, 100_000)
    elapsed = time.perf_counter() - start
    ok = irr.trend.final <= 0.02 and min(half.trend.discrepancies) >= 0.4
    verdict("2", ok, f"sqrt2*n^2 final {irr.trend.final:.4f} (<= 0.02); "
                     f"n/2 min {min(half.trend.discrepancies):.3f} (>= 0.4); {elapsed:.1f}s")


def test_c03_polynomial_two_variables(verdict):
    start = time.perf_counter()
    rep = verify_poly_equidist(S2 * x * y + y, [50, 100, 200])
    elapsed = time.perf_counter() - start
    d = rep.trend.discrepancies
    v = tuple(rep.trace["direction"])
    value = leading_directional_value(S2 * x * y + y, v)
    ok = (rep.trend.non_increasing(0.0) and rep.trend.final <= 0.02 and rep.trace["kind"] == "direction"
          and value == S2.scale(2) and not value.is_rational and elapsed < 60)
    verdict("3", ok, f"trend {[round(t, 4) for t in d]}, v={v}, leading value {value}, {elapsed:.1f}s")


def test_c04_rational_control(verdict):
    F = Polynomial.constant(1, Fraction(1, 2)) * Polynomial.variable(1, 0) ** 2
    pts = lattice.ball_points(1, 200)
    exact = {F.evaluate(tuple(p)).rational % 1 for p in pts}
    fast = set(F.mod1_values(pts).tolist())
    ok = exact == {Fraction(0), Fraction(1, 2)} and fast == {0.0, 0.5}
    verdict("4", ok, f"observed values {sorted(map(str, exact))} over {len(pts)} points")


def test_c05a_l2_norm_at_300(verdict):
    start = time.perf_counter()
    rep = verify_lp_norm(2, 2, [75, 150, 300])
    elapsed = time.perf_counter() - start
    ok = rep.trend.final <= 0.02 and rep.trend.counts[-1] == 282_697 and elapsed < 120
    verdict("5a", ok, f"l2 over {rep.trend.counts[-1]} points: extreme {rep.trend.final:.4f} "
                      f"(target <= 0.02), trend {[round(t, 4) for t in rep.trend.discrepancies]}, {elapsed:.1f}s")


def test_c05b_l3_norm_at_300(verdict):
    start = time.perf_counter()
    rep = verify_lp_norm(3, 2, [75, 150, 300])
    elapsed = time.perf_counter() - start
    ok = rep.trend.final <= 0.03 and elapsed < 120
    verdict("5b", ok, f"l3 over {rep.trend.counts[-1]} points: extreme {rep.trend.final:.4f} "
                      f"(target <= 0.03), trend {[round(t, 4) for t in rep.trend.discrepancies]}, {elapsed:.1f}s")


def test_c05c_l1_control(verdict):
    pts = lattice.ball_points(2, 300)
    values = np.sum(np.abs(pts), axis=1)
    rep = verify_lp_norm(1, 2, [75, 150, 300])
    ok = bool(np.all(values == np.round(values))) and rep.trend.discrepancies == [1.0, 1.0, 1.0] and not rep.passed
    verdict("5c", ok, f"l1 values all integral; discrepancy trend {rep.trend.discrepancies}")


def test_c06_a_sets(verdict):
    rng = random.Random(6)
    start = time.perf_counter()
    violations = 0
    for _ in range(200):
        a, eps, N = rng.random(), rng.uniform(0.05, 0.9), rng.randint(1, 60)
        if in_A(a, 1, N + 1, eps) and not in_A(a, 1, N, eps):
            violations += 1
    rep = a_set_shrinkage(1, 0.1, [25, 50, 100, 200], sample_count=512, seed=0, grid=64)
    elapsed = time.perf_counter() - start
    fr = rep.metrics["fractions"]
    ok = violations == 0 and all(b <= a for a, b in zip(fr, fr[1:])) and fr[-1] <= 0.05 and elapsed < 300
    verdict("6", ok, f"monotonicity violations {violations}/200; fractions {fr} at N=25..200; {elapsed:.1f}s")


def test_c07_constructive_direction_search(verdict):
    dets = {}
    for n, d in [(2, 2), (2, 3), (3, 2)]:
        vs = monomial_basis_search(n, d)
        dets[(n, d)] = exact_determinant([monomial_vector(v, d) for v in vs])
    rng = random.Random(7)
    mismatches = 0
    for _ in range(50):
        n = rng.randint(1, 3)
        deg = rng.randint(1, 3)
        terms = {}
        for e in rng.sample(exponents_of_degree(n, deg), k=min(2, len(exponents_of_degree(n, deg)))):
            terms[e] = ExactScalar.of(Fraction(rng.randint(-4, 4), rng.randint(1, 5)))
        top = rng.choice(exponents_of_degree(n, deg))
        terms[top] = ExactScalar.of(Fraction(rng.randint(-3, 3), 2)) + S2.scale(Fraction(rng.choice([1, -1, 2, 3]), rng.randint(1, 4)))
        if deg > 1:
            terms[rng.choice(exponents_of_degree(n, deg - 1))] = S2.scale(rng.randint(1, 3))
        F = Polynomial(n, terms)
        v = find_irrational_direction(F)
        mismatches += (v != brute_force_direction(F)) or leading_directional_value(F, v).is_rational
    ok = all(isinstance(det, Fraction) and det != 0 for det in dets.values()) and mismatches == 0
    verdict("7", ok, f"determinants {{{', '.join(f'{k}: {v}' for k, v in dets.items())}}}; "
                     f"{mismatches} direction mismatches on 50 polynomials")


def test_c08_taylor_fibers(verdict):
    spec = LpNormSpec(2, 2)
    full = lattice.SphericalCap.full(2)
    r1 = taylor_fiber_check(spec, full, 0, 1000, 10, count=256, seed=0)
    r2 = taylor_fiber_check(spec, full, 0, 2000, 10, count=256, seed=0)
    e1, e2 = r1.metrics["max_error"], r2.metrics["max_error"]
    ratio = e2 / e1
    ok = e1 <= 50 / 1000 and 0.4 <= ratio <= 0.6
    verdict("8", ok, f"max error {e1:.6f} at T=1000 (<= 0.05), {e2:.6f} at T=2000, ratio {ratio:.3f}")


def test_c09_projection_convergence(verdict):
    tvs = {}
    for name, cap in [("quarter", lattice.SphericalCap.positive_quadrant()), ("full", lattice.SphericalCap.full(2))]:
        counts = lattice.cap_angle_histogram(lattice.ConeRegion(cap, 2000), 64)
        p = counts / counts.sum()
        tvs[name] = 0.5 * float(np.sum(np.abs(p - 1 / 64)))
    ok = all(v <= 0.02 for v in tvs.values())
    verdict("9", ok, "64-bin angular TV at T=2000: " + ", ".join(f"{k} {v:.5f}" for k, v in tvs.items()))


def test_c10_measure_classification(verdict):
    samples = lattice.sample_orthant(2, 100_000, seed=0)
    const = classify(pushforward_mod1(lambda s: np.full(len(s), math.sqrt(2)), samples))
    labels = {p: classify(pushforward_mod1(lambda s, p=p: lp_partial(s, p, 0), samples)) for p in (1.5, 2.0, 3.0)}
    ok = const == DIRAC_LIKE and all(v == AC_LIKE for v in labels.values())
    verdict("10", ok, f"constant -> {const}; l^p derivative -> {labels}")


def test_c11_determinism(verdict, tmp_path):
    F = tmp_path / "F.json"
    F.write_text(json.dumps((S2 * x * y + y).to_json()))
    runs = {
        "poly": ["experiment", "poly", "--spec", str(F), "--radii", "25,50,100"],
        "lp": ["experiment", "lp", "--p", "3", "--n", "2", "--radii", "25,50", "--samples", "20000", "--seed", "11"],
        "pushforward": ["pushforward", "--p", "1.5", "--samples", "20000", "--seed", "11"],
        "taylor": ["experiment", "taylor", "--T", "500", "--N0", "8", "--count", "64", "--seed", "11"],
    }
    bad = []
    for name, argv in runs.items():
        blobs = []
        for workers in ("1", "1", "2", "4"):
            out = tmp_path / f"{name}-{len(blobs)}.json"
            cli_main(argv + ["--workers", workers, "--out", str(out)])
            blobs.append(out.read_bytes())
        if len(set(blobs)) != 1:
            bad.append(name)
    verdict("11", not bad, f"byte-identical across repeats and 1/2/4 threads: "
                           f"{'all' if not bad else 'differs for ' + ', '.join(bad)}")
