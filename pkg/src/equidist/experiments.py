"""Desk-scale equidistribution experiments with pass/fail verdicts.

Every experiment returns an :class:`ExperimentReport` whose ``to_json`` is a
pure function of the inputs (and seed): lattice work is split into chunks,
optionally evaluated on a thread pool, and always merged in chunk order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import lattice
from .config import THRESHOLDS
from .discrepancy import ModOneSequence, escape_step, extreme_discrepancy
from .errors import DomainError, NoLatticePointsBeyondT
from .exact import ExactScalar
from .functions import (
    LpNormSpec,
    Polynomial,
    directional_derivative,
    lp_norm_values,
    lp_partial,
    lp_second_partial,
    reduce_mod1,
    reduction_trace,
    residue_decompose,
    split_by_residue,
)
from .measures import AC_LIKE, classify, distance_to_uniform, pushforward_mod1

SCHEMA = 1


def map_ordered(fn: Callable, items: Iterable, workers: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a thread pool; order is preserved."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _mod1(x: np.ndarray) -> np.ndarray:
    out = np.mod(x, 1.0)
    out[out >= 1.0] = 0.0
    return out


@dataclass
class EquidistributionTrend:
    radii: list
    discrepancies: list
    counts: list

    def __post_init__(self):
        if not len(self.radii) == len(self.discrepancies) == len(self.counts):
            raise ValueError("trend lists must have equal length")

    @property
    def final(self) -> float:
        return self.discrepancies[-1]

    def non_increasing(self, slack: float = 0.0) -> bool:
        d = self.discrepancies
        return all(b <= a + slack for a, b in zip(d, d[1:]))

    def to_json(self) -> dict:
        return {
            "radii": list(self.radii),
            "discrepancies": [float(x) for x in self.discrepancies],
            "counts": [int(c) for c in self.counts],
        }


@dataclass
class ExperimentReport:
    experiment: str
    params: dict
    passed: bool
    trend: EquidistributionTrend | None = None
    hypothesis: dict = field(default_factory=dict)
    trace: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA,
            "thresholds_version": THRESHOLDS["version"],
            "experiment": self.experiment,
            "params": self.params,
            "pass": bool(self.passed),
            "hypothesis": self.hypothesis,
            "trace": self.trace,
        }
        if self.trend is not None:
            out["trend"] = self.trend.to_json()
        if self.metrics:
            out["metrics"] = self.metrics
        return out


def _trend_from_values(values: np.ndarray, sq_norms: np.ndarray, radii: Sequence[float]) -> EquidistributionTrend:
    discs, counts = [], []
    for R in radii:
        mask = sq_norms <= lattice.floor_square(R)
        counts.append(int(mask.sum()))
        discs.append(extreme_discrepancy(ModOneSequence(values[mask])).extreme)
    return EquidistributionTrend(list(radii), discs, counts)


def _check_ladder(radii: Sequence[float]) -> list:
    radii = list(radii)
    if not radii:
        raise ValueError("need at least one radius")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    return radii


# -- one-dimensional Weyl sequences ---------------------------------------------------


def dyadic_ladder(N: int, rungs: int = 5) -> list[int]:
    out = sorted({max(1, N >> s) for s in range(rungs)})
    return out


def verify_weyl_1d(a, d: int, N: int, threshold: float | None = None, rungs: int = 5) -> ExperimentReport:
    """Discrepancy of ``{a n^d mod 1}_{n <= N'}`` along a dyadic ladder of ``N'``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    a = ExactScalar.of(a)
    threshold = THRESHOLDS["weyl1d"] if threshold is None else threshold
    F = Polynomial.monomial((d,), a)
    values = F.mod1_values(np.arange(1, N + 1, dtype=np.int64)[:, None])
    ladder = dyadic_ladder(N, rungs)
    discs = [extreme_discrepancy(ModOneSequence(values[:m])).extreme for m in ladder]
    trend = EquidistributionTrend(ladder, discs, ladder)
    passed = trend.final <= threshold and trend.non_increasing(THRESHOLDS["trend_slack"])
    return ExperimentReport(
        "weyl1d",
        {"a": a.to_json(), "d": d, "N": N, "threshold": threshold},
        passed,
        trend,
        hypothesis={"a_is_irrational": not a.is_rational},
        trace={"a": str(a)},
    )


# -- polynomials on lattice balls -------------------------------------------------------


def lattice_mod1_values(fn: Callable[[np.ndarray], np.ndarray], n: int, R: float, cap=None,
                        workers: int = 1, budget: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``fn`` (values mod 1) and squared norms over ``Z^n`` in the ball, or cone if ``cap`` is given."""
    if cap is None:
        chunks = list(lattice.iter_ball_chunks(n, R, budget=budget))
    else:
        chunks = list(lattice.iter_cone_chunks(lattice.ConeRegion(cap, R), budget=budget))
    parts = map_ordered(fn, chunks, workers)
    if not chunks:
        return np.empty(0), np.empty(0, dtype=np.int64)
    values = np.concatenate(parts)
    sq = np.concatenate([np.sum(c * c, axis=1) for c in chunks])
    return values, sq


def verify_poly_equidist(F: Polynomial, radii: Sequence[float], threshold: float | None = None,
                         cap=None, workers: int = 1, budget: int | None = None) -> ExperimentReport:
    """Discrepancy trend of ``F mod 1`` over lattice balls (or cones) of growing radius."""
    radii = _check_ladder(radii)
    threshold = THRESHOLDS["poly"] if threshold is None else threshold
    tree = reduction_trace(F)
    values, sq = lattice_mod1_values(F.mod1_values, F.dimension, radii[-1], cap, workers, budget)
    trend = _trend_from_values(values, sq, radii)
    passed = trend.final <= threshold and trend.non_increasing(THRESHOLDS["trend_slack"])
    return ExperimentReport(
        "poly",
        {"polynomial": F.to_json(), "radii": radii, "threshold": threshold,
         "cap": None if cap is None else {"center": list(cap.center), "angle": cap.angle}},
        passed,
        trend,
        hypothesis={
            "irrational_nonconstant_coefficient": F.has_irrational_nonconstant_coefficient(),
            "certified": tree.certified,
        },
        trace=tree.to_json(),
    )


def residue_class_values(F: Polynomial, q: int, points: np.ndarray) -> dict[tuple[int, ...], np.ndarray]:
    """``F mod 1`` on each residue class of ``points``, computed from ``F(q v + r)`` reduced mod 1."""
    out = {}
    for r, v in split_by_residue(points, q).items():
        G = reduce_mod1(residue_decompose(F, q, r))
        out[r] = G.mod1_values(v) if len(v) else np.empty(0)
    return out


# -- l^p norms ----------------------------------------------------------------------------


def lp_hypothesis_gate(p: float, n: int, samples: int = 100_000, seed: int = 0, bins: int = 64,
                       j: int = 0) -> dict:
    """Classify the pushforward of ``d/dx_j ||.||_p`` mod 1 under the orthant cap measure."""
    pts = lattice.sample_orthant(n, samples, seed)
    m = pushforward_mod1(lambda s: lp_partial(s, p, j), pts, bins)
    label = classify(m)
    return {
        "classification": label,
        "holds": label == AC_LIKE and 1 < p < math.inf,
        "distance_to_uniform": distance_to_uniform(m).to_json(),
        "max_bin_density": float(m.probabilities().max() * m.B),
        "samples": samples,
        "bins": bins,
        "direction": j,
    }


def _orthant_norms(p: float) -> Callable[[np.ndarray], np.ndarray]:
    def fn(chunk: np.ndarray) -> np.ndarray:
        return _mod1(lp_norm_values(np.abs(chunk), p))
    return fn


def verify_lp_norm(p: float, n: int, radii: Sequence[float], threshold: float | None = None,
                   samples: int = 100_000, seed: int = 0, bins: int = 64, workers: int = 1,
                   budget: int | None = None) -> ExperimentReport:
    """Discrepancy trend of ``||x||_p mod 1`` over ``Z^n`` in Euclidean balls.

    The norm is sign-symmetric, so values are computed on the closed positive
    orthant and replicated by their orbit size; the resulting multiset is the
    one of the full ball.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    radii = _check_ladder(radii)
    if threshold is None:
        threshold = THRESHOLDS["lp_p3"] if p == 3 else THRESHOLDS["lp"]
    if p > 1:
        LpNormSpec(p, n)
    gate = lp_hypothesis_gate(p, n, samples, seed, bins)

    norm_fn = _orthant_norms(p)

    def orthant(chunk: np.ndarray) -> np.ndarray:
        return chunk[np.all(chunk >= 0, axis=1)]

    def fn(chunk):
        c = orthant(chunk)
        mult = 2 ** np.count_nonzero(c, axis=1)
        return np.repeat(norm_fn(c), mult), np.repeat(np.sum(c * c, axis=1), mult)

    chunks = list(lattice.iter_ball_chunks(n, radii[-1], budget=budget))
    parts = map_ordered(fn, chunks, workers)
    values = np.concatenate([v for v, _ in parts])
    sq = np.concatenate([s for _, s in parts])
    trend = _trend_from_values(values, sq, radii)
    passed = trend.final <= threshold and trend.non_increasing(THRESHOLDS["trend_slack"])
    return ExperimentReport(
        "lp",
        {"p": p, "n": n, "radii": radii, "threshold": threshold, "seed": seed, "samples": samples, "bins": bins},
        passed,
        trend,
        hypothesis=gate,
        trace={"direction": [1] + [0] * (n - 1), "derivative_order": 1},
    )


# -- Taylor fibers --------------------------------------------------------------------------


@dataclass
class FiberProbe:
    base: tuple[int, ...]
    direction: tuple[int, ...]
    length: int
    values: list
    taylor: list
    max_error: float
    epsilon: float

    def to_json(self) -> dict:
        return {
            "base": list(self.base),
            "direction": list(self.direction),
            "length": self.length,
            "max_error": self.max_error,
            "epsilon": self.epsilon,
        }


def _lp_probe(spec: LpNormSpec, p: np.ndarray, j: int, N0: int) -> FiberProbe:
    x = p.astype(float)
    steps = np.zeros((N0, spec.dimension))
    steps[:, j] = np.arange(1, N0 + 1)
    fiber = lp_norm_values(p[None, :] + steps.astype(np.int64), spec.p)
    f0 = float(lp_norm_values(p[None, :], spec.p)[0])
    slope = float(lp_partial(x[None, :], spec.p, j)[0])
    model = f0 + slope * np.arange(1, N0 + 1)
    seg = np.repeat(x[None, :], 8 * N0 + 1, axis=0)
    seg[:, j] += np.linspace(0.0, N0, 8 * N0 + 1)
    eps = float(np.max(np.abs(lp_second_partial(spec, seg, j))))
    direction = tuple(int(k == j) for k in range(spec.dimension))
    return FiberProbe(tuple(int(c) for c in p), direction, N0, fiber.tolist(), [f0, slope],
                      float(np.max(np.abs(fiber - model))), eps)


def _poly_probe(F: Polynomial, p: np.ndarray, v: Sequence[int], N0: int) -> FiberProbe:
    base = [int(c) for c in p]
    d = max(F.degree, 0)
    coeffs = [F.evaluate(base)]
    for m in range(1, d + 1):
        coeffs.append(directional_derivative(F, v, m).evaluate(base).scale(Fraction(1, math.factorial(m))))
    errs = []
    values = []
    for k in range(1, N0 + 1):
        exact = F.evaluate([b + k * vi for b, vi in zip(base, v)])
        model = coeffs[0]
        for m in range(1, d + 1):
            model = model + coeffs[m] * (k**m)
        errs.append(abs(float(exact - model)))
        values.append(float(exact))
    # the (d+1)-th derivative of a degree-d polynomial vanishes identically
    return FiberProbe(tuple(base), tuple(v), N0, values, [float(c) for c in coeffs], max(errs), 0.0)


def taylor_fiber_check(f, cap: lattice.SphericalCap, v, T: float, N0: int, count: int = 256,
                       seed: int = 0, budget: int | None = None) -> ExperimentReport:
    """Compare ``f(p + k v)`` with its Taylor model at ``p`` for ``k = 1..N0``.

    Base points are lattice points of the closed cone with ``T <= |p| <= T + 1``.
    ``f`` is an :class:`LpNormSpec` (first-order model, ``v`` a coordinate
    index) or a :class:`Polynomial` (model of full degree, ``v`` an integer
    vector).  The verdict compares the worst error with the Lagrange bound
    ``eps * N0**(d+1) / (d+1)!`` where ``eps`` bounds the next derivative on
    the probed segments.
    """
    if N0 < 1:
        raise ValueError("N0 must be >= 1")
    n = cap.dimension
    pts = lattice.shell_points(n, T, T + 1, budget=budget)
    pts = pts[cap.contains(pts)]
    if isinstance(f, LpNormSpec):
        # sign symmetry: fibers stay inside the closed positive orthant
        pts = pts[np.all(pts >= 0, axis=1)]
    if len(pts) == 0:
        raise NoLatticePointsBeyondT(f"no cone lattice points with norm in [{T}, {T + 1}]")
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(len(pts), size=min(count, len(pts)), replace=False))
    if isinstance(f, LpNormSpec):
        j = int(v)
        if not 0 <= j < n:
            raise DomainError(f"direction index {j} out of range")
        probes = [_lp_probe(f, pts[i], j, N0) for i in pick]
        order = 1
        direction = [int(k == j) for k in range(n)]
    elif isinstance(f, Polynomial):
        probes = [_poly_probe(f, pts[i], tuple(v), N0) for i in pick]
        order = max(f.degree, 0)
        direction = list(v)
    else:
        raise TypeError("f must be an LpNormSpec or a Polynomial")
    max_error = max(pr.max_error for pr in probes)
    eps = max(pr.epsilon for pr in probes)
    bound = eps * N0 ** (order + 1) / math.factorial(order + 1)
    worst = max(probes, key=lambda pr: pr.max_error)
    return ExperimentReport(
        "taylor",
        {"T": T, "N0": N0, "count": len(probes), "seed": seed, "direction": direction,
         "cap": {"center": list(cap.center), "angle": cap.angle}},
        max_error <= bound,
        metrics={"max_error": max_error, "epsilon": eps, "bound": bound, "order": order,
                 "worst_probe": worst.to_json()},
    )


# -- the sets A^d(N, eps) ------------------------------------------------------------------


def a_set_shrinkage(d: int, eps: float, N_ladder: Sequence[int], sample_count: int = 512, seed: int = 0,
                    grid: int = 64, refine: bool = True, workers: int = 1) -> ExperimentReport:
    """Fraction of uniformly sampled ``a`` that stay in ``A^d(N, eps)`` for each ``N``."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    ladder = sorted(int(N) for N in N_ladder)
    rng = np.random.default_rng(seed)
    a_values = rng.random(sample_count)
    steps = map_ordered(lambda a: escape_step(float(a), d, eps, ladder[-1], grid, refine), a_values, workers)
    escape = np.array([math.inf if s is None else s for s in steps])
    fractions = [float(np.mean(escape > N)) for N in ladder]
    non_inc = all(b <= a for a, b in zip(fractions, fractions[1:]))
    limit = THRESHOLDS["a_set_fraction"]
    return ExperimentReport(
        "a-set",
        {"d": d, "eps": eps, "N": ladder, "samples": sample_count, "seed": seed, "grid": grid, "refine": refine},
        non_inc and fractions[-1] <= limit,
        metrics={"fractions": fractions, "fraction_limit": limit,
                 "escape_steps": [None if math.isinf(e) else int(e) for e in escape]},
    )
