"""Integer points in balls and spherical cones, projection, and cap sampling.

Enumeration order is lexicographic over the integer bounding box.  Large
regions are produced in chunks split along the first coordinate; chunks are
disjoint and always consumed in ascending order, so any chunk-parallel
computation merges back into the same stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from scipy.special import betainc, gammaln

from .config import default_budget
from .errors import CardinalityOverflow, RejectionBudgetExceeded, ZeroVector

CAP_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SphericalCap:
    """Points of the unit sphere within angle ``angle`` of ``center``."""

    center: tuple[float, ...]
    angle: float

    def __post_init__(self):
        c = tuple(float(x) for x in self.center)
        object.__setattr__(self, "center", c)
        if abs(math.sqrt(sum(x * x for x in c)) - 1.0) > 1e-12:
            raise ValueError("cap center must be a unit vector")
        if not 0 < self.angle <= math.pi:
            raise ValueError("cap angle must lie in (0, pi]")

    @classmethod
    def around(cls, direction: Sequence[float], angle: float) -> "SphericalCap":
        """Cap centred on ``direction`` (normalised here)."""
        d = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(d)
        if norm == 0:
            raise ZeroVector("cap direction must be nonzero")
        return cls(tuple(d / norm), angle)

    @classmethod
    def full(cls, n: int) -> "SphericalCap":
        return cls((1.0,) + (0.0,) * (n - 1), math.pi)

    @classmethod
    def positive_quadrant(cls) -> "SphericalCap":
        return cls.around((1.0, 1.0), math.pi / 4)

    @property
    def dimension(self) -> int:
        return len(self.center)

    def contains(self, points) -> np.ndarray:
        """Closed membership test for (not necessarily unit) nonzero vectors."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        norms = np.linalg.norm(x, axis=1)
        dots = x @ np.asarray(self.center)
        return (norms > 0) & (dots >= (math.cos(self.angle) - CAP_TOLERANCE) * norms)

    def area_fraction(self) -> float:
        """Normalised surface measure of the cap inside the unit sphere."""
        n = self.dimension
        if self.angle >= math.pi:
            return 1.0
        if n == 1:
            return 0.5
        a, b = (n - 1) / 2, 0.5
        if self.angle <= math.pi / 2:
            return 0.5 * betainc(a, b, math.sin(self.angle) ** 2)
        return 1.0 - 0.5 * betainc(a, b, math.sin(math.pi - self.angle) ** 2)


@dataclass(frozen=True)
class ConeRegion:
    """``[0, T] * cap`` with the origin removed."""

    cap: SphericalCap
    T: float

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("T must be positive")

    def contains(self, points) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        r2 = floor_square(self.T)
        sq = np.sum(np.atleast_2d(np.asarray(points, dtype=np.int64)) ** 2, axis=1)
        return (sq <= r2) & self.cap.contains(x)


def floor_square(r) -> int:
    """``floor(r**2)`` computed exactly, so ``sum x_i**2 <= R**2`` is an integer test."""
    return math.floor(Fraction(r) ** 2)


def estimated_ball_count(n: int, R: float) -> float:
    """Upper bound on ``#(Z^n within radius R)``: volume of the ball of radius ``R + sqrt(n)/2``."""
    r = R + math.sqrt(n) / 2
    return math.exp(n / 2 * math.log(math.pi) - gammaln(n / 2 + 1) + n * math.log(r))


def _check_budget(n: int, R: float, budget: int | None, r_min: float = 0.0) -> None:
    budget = default_budget() if budget is None else budget
    est = estimated_ball_count(n, R)
    # lower bound on the excluded inner ball: volume of radius r_min - sqrt(n)/2
    inner = r_min - math.sqrt(n)
    if inner > 0:
        est -= estimated_ball_count(n, inner)
    if est > budget:
        raise CardinalityOverflow(f"about {est:.3g} lattice points exceed the budget of {budget}")


def _shell_rows(n: int, hi: int, lo: int = 0) -> np.ndarray:
    """Lexicographically ordered integer points with ``lo <= |x|^2 <= hi``."""
    if hi < 0:
        return np.empty((0, n), dtype=np.int64)
    r = math.isqrt(hi)
    if n == 1:
        xs = np.arange(-r, r + 1, dtype=np.int64)
        return xs[xs * xs >= lo][:, None]
    blocks = []
    for x in range(-r, r + 1):
        sub = _shell_rows(n - 1, hi - x * x, max(lo - x * x, 0))
        if len(sub):
            blocks.append(np.column_stack([np.full(len(sub), x, dtype=np.int64), sub]))
    if not blocks:
        return np.empty((0, n), dtype=np.int64)
    return np.vstack(blocks)


def iter_ball_chunks(n: int, R: float, rows: int = 64, r_min: float = 0.0, budget: int | None = None) -> Iterator[np.ndarray]:
    """Chunks of ``{x : r_min <= |x| <= R}`` split by ranges of the first coordinate."""
    if R < 0:
        raise ValueError("radius must be non-negative")
    _check_budget(n, R, budget, r_min)
    hi = floor_square(R)
    lo = math.ceil(Fraction(r_min) ** 2) if r_min > 0 else 0
    r = math.isqrt(hi)
    for start in range(-r, r + 1, rows):
        blocks = []
        for x in range(start, min(start + rows, r + 1)):
            if n == 1:
                if x * x >= lo:
                    blocks.append(np.array([[x]], dtype=np.int64))
                continue
            sub = _shell_rows(n - 1, hi - x * x, max(lo - x * x, 0))
            if len(sub):
                blocks.append(np.column_stack([np.full(len(sub), x, dtype=np.int64), sub]))
        if blocks:
            yield np.vstack(blocks)


def ball_points(n: int, R: float, budget: int | None = None) -> np.ndarray:
    """All ``x`` in ``Z^n`` with ``|x|_2 <= R`` as an ``(m, n)`` array, in lexicographic order."""
    chunks = list(iter_ball_chunks(n, R, budget=budget))
    return np.vstack(chunks) if chunks else np.empty((0, n), dtype=np.int64)


def shell_points(n: int, r_min: float, r_max: float, budget: int | None = None) -> np.ndarray:
    chunks = list(iter_ball_chunks(n, r_max, r_min=r_min, budget=budget))
    return np.vstack(chunks) if chunks else np.empty((0, n), dtype=np.int64)


def enumerate_ball(n: int, R: float, budget: int | None = None) -> Iterator[tuple[int, ...]]:
    """Stream every ``x`` in ``Z^n`` with ``|x|_2 <= R`` once, lexicographically."""
    for chunk in iter_ball_chunks(n, R, budget=budget):
        for row in chunk:
            yield tuple(int(v) for v in row)


def iter_cone_chunks(region: ConeRegion, rows: int = 64, budget: int | None = None) -> Iterator[np.ndarray]:
    n = region.cap.dimension
    for chunk in iter_ball_chunks(n, region.T, rows=rows, budget=budget):
        keep = region.cap.contains(chunk)
        if keep.any():
            yield chunk[keep]


def cone_points(region: ConeRegion, budget: int | None = None) -> np.ndarray:
    chunks = list(iter_cone_chunks(region, budget=budget))
    return np.vstack(chunks) if chunks else np.empty((0, region.cap.dimension), dtype=np.int64)


def enumerate_cone(region: ConeRegion, budget: int | None = None) -> Iterator[tuple[int, ...]]:
    """Stream the nonzero integer points of ``[0, T] * cap`` (closed cap), lexicographically."""
    for chunk in iter_cone_chunks(region, budget=budget):
        for row in chunk:
            yield tuple(int(v) for v in row)


def project(x) -> np.ndarray:
    """``x / |x|_2`` for a single vector or row-wise for an array."""
    x = np.asarray(x, dtype=float)
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise ZeroVector("cannot project the zero vector to the sphere")
    return x / norms


def sample_cap(cap: SphericalCap, count: int, seed: int = 0, max_draws: int | None = None) -> np.ndarray:
    """``count`` points drawn from normalised surface measure on ``cap``.

    Isotropic Gaussian directions are rejected outside the cap.  The batch
    schedule depends only on ``count`` and the cap, so the output is a pure
    function of the seed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    n = cap.dimension
    frac = cap.area_fraction()
    max_draws = max_draws if max_draws is not None else 4000 * count
    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    have = draws = 0
    while have < count:
        need = count - have
        batch = min(int(math.ceil(1.2 * need / frac)) + 16, 1 << 20)
        if draws + batch > max_draws:
            raise RejectionBudgetExceeded(
                f"cap covers {frac:.2e} of the sphere; {max_draws} draws are not enough"
            )
        draws += batch
        z = rng.standard_normal((batch, n))
        norms = np.linalg.norm(z, axis=1)
        z = z[norms > 0] / norms[norms > 0, None]
        z = z[z @ np.asarray(cap.center) >= math.cos(cap.angle)]
        kept.append(z[:need])
        have += len(kept[-1])
    return np.vstack(kept)


def sample_orthant(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Uniform points on the unit sphere intersected with the open positive orthant."""
    rng = np.random.default_rng(seed)
    z = np.abs(rng.standard_normal((count, n)))
    z[z == 0] = np.finfo(float).tiny
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def cap_angle_histogram(region: ConeRegion, bins: int, rows: int = 256, budget: int | None = None) -> np.ndarray:
    """Counts of projected cone lattice points by angle across a planar cap.

    The cap's arc ``[phi_c - angle, phi_c + angle]`` is cut into ``bins``
    equal pieces; arc-uniform measure puts ``1/bins`` in each.
    """
    cap = region.cap
    if cap.dimension != 2:
        raise ValueError("angular histograms are defined for n = 2")
    phi_c = math.atan2(cap.center[1], cap.center[0])
    counts = np.zeros(bins, dtype=np.int64)
    for chunk in iter_cone_chunks(region, rows=rows, budget=budget):
        psi = np.arctan2(chunk[:, 1], chunk[:, 0]) - phi_c
        psi = (psi + math.pi) % (2 * math.pi) - math.pi
        idx = np.floor((psi + cap.angle) / (2 * cap.angle) * bins).astype(np.int64)
        counts += np.bincount(np.clip(idx, 0, bins - 1), minlength=bins)
    return counts
