"""The l^p norm as a degree-1 homogeneous function, with its coordinate derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, DomainError


@dataclass(frozen=True)
class LpNormSpec:
    p: float
    dimension: int

    def __post_init__(self):
        if not (1 < self.p < math.inf):
            raise ValueError(f"p must lie strictly between 1 and infinity, got {self.p}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    @classmethod
    def from_json(cls, doc) -> "LpNormSpec":
        return cls(float(doc["p"]), int(doc["n"]))

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.dimension}


def _as_points(spec: LpNormSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.dimension:
        raise DimensionMismatch(f"expected vectors of length {spec.dimension}")
    return x


def lp_eval(spec: LpNormSpec, x) -> float | np.ndarray:
    x = _as_points(spec, x)
    return np.sum(np.abs(x) ** spec.p, axis=-1) ** (1.0 / spec.p)


def lp_norm_values(points, p: float) -> np.ndarray:
    """``||x||_p`` for every row of an integer point array, any ``p >= 1``.

    For integral ``p`` the power sum is formed exactly and exact integer norms
    are snapped, so that e.g. ``||(3, 0)||_3`` is exactly 3.
    """
    pts = np.asarray(points)
    if p == 1:
        return np.sum(np.abs(pts), axis=1).astype(float)
    if float(p).is_integer() and np.issubdtype(pts.dtype, np.integer):
        k = int(p)
        sums = np.sum(np.abs(pts).astype(object) ** k, axis=1)
        roots = np.array([float(s) ** (1.0 / k) for s in sums])
        nearest = np.rint(roots)
        exact = np.array([int(r) ** k == int(s) for r, s in zip(nearest, sums)], dtype=bool)
        return np.where(exact, nearest, roots)
    return np.sum(np.abs(pts.astype(float)) ** p, axis=1) ** (1.0 / p)


def lp_partial(x: np.ndarray, p: float, j: int) -> np.ndarray:
    """``x_j**(p-1) * (sum x_i**p)**(1/p - 1)`` row-wise; no domain checks."""
    s = np.sum(x**p, axis=-1)
    return x[..., j] ** (p - 1) * s ** (1.0 / p - 1.0)


def lp_directional_derivative(spec: LpNormSpec, x, j: int) -> float | np.ndarray:
    """Partial derivative of the l^p norm in coordinate ``j`` (0-based).

    Defined on the open positive orthant; the result is invariant under
    ``x -> s*x`` for ``s > 0``.
    """
    x = _as_points(spec, x)
    if not 0 <= j < spec.dimension:
        raise IndexError(f"coordinate {j} out of range for dimension {spec.dimension}")
    if np.any(x <= 0):
        raise DomainError("all coordinates must be strictly positive")
    return lp_partial(x, spec.p, j)


def lp_second_partial(spec: LpNormSpec, x, j: int) -> float | np.ndarray:
    """``d^2/dx_j^2 ||x||_p`` on the closed positive orthant (infinite where it blows up)."""
    x = _as_points(spec, x)
    if np.any(x < 0):
        raise DomainError("coordinates must be non-negative")
    p = spec.p
    s = np.sum(x**p, axis=-1)
    xj = x[..., j]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (p - 1) * xj ** (p - 2) * s ** (1.0 / p - 2.0) * (s - xj**p)
    return np.where(np.isnan(out), np.inf, out)
