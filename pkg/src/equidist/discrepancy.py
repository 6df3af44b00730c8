"""Discrepancy of finite sequences mod 1, Weyl sums and Erdos-Turan bounds.

Extreme discrepancy is taken over *closed* intervals ``[a, b]`` inside
``[0, 1]``, so a degenerate interval ``[x, x]`` counts the multiplicity of
``x``; a single point therefore has extreme discrepancy 1.

For sorted points ``x_0 <= ... <= x_{N-1}`` the supremum splits into

* excess ``max_{i<=j} (j - i + 1)/N - (x_j - x_i)`` (closed intervals between points), and
* deficit ``1/N + max_{i<j} e_j - e_i`` with ``e_k = y_k - k/N`` over the
  points padded by ``y = 0`` in front and ``y = 1`` behind (open gaps).

Both are prefix-minimum scans, so the whole computation is ``O(N log N)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import EmptySequence, GridBudgetExceeded

DEFAULT_GRID_BUDGET = 1 << 20


@dataclass(frozen=True)
class ModOneSequence:
    """Finite sequence of values in ``[0, 1)``.

    ``values`` is either a float array or, for exact work, a tuple of
    :class:`~fractions.Fraction`.
    """

    values: object

    def __post_init__(self):
        vals = self.values
        if isinstance(vals, np.ndarray) or not any(isinstance(v, Fraction) for v in vals):
            arr = np.asarray(vals, dtype=float).ravel()
            if np.any((arr < 0) | (arr >= 1)) or np.any(np.isnan(arr)):
                raise ValueError("sequence values must lie in [0, 1)")
            object.__setattr__(self, "values", arr)
        else:
            vals = tuple(Fraction(v) for v in vals)
            if any(v < 0 or v >= 1 for v in vals):
                raise ValueError("sequence values must lie in [0, 1)")
            object.__setattr__(self, "values", vals)

    @classmethod
    def from_reals(cls, x) -> "ModOneSequence":
        """Reduce arbitrary reals mod 1."""
        arr = np.mod(np.asarray(x, dtype=float), 1.0)
        arr[arr >= 1.0] = 0.0
        return cls(arr)

    @property
    def exact(self) -> bool:
        return not isinstance(self.values, np.ndarray)

    @property
    def N(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def prefix(self, k: int) -> "ModOneSequence":
        return ModOneSequence(self.values[:k])


@dataclass(frozen=True)
class DiscrepancyReport:
    extreme: float
    star: float
    N: int

    def to_json(self) -> dict:
        return {"extreme": float(self.extreme), "star": float(self.star), "N": self.N}


def _exact_discrepancy(xs: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    xs = sorted(xs)
    n = len(xs)
    inv = Fraction(1, n)
    excess = Fraction(0)
    best_start = None
    star = Fraction(0)
    for j, x in enumerate(xs):
        start = j * inv - x
        best_start = start if best_start is None else min(best_start, start)
        excess = max(excess, (j + 1) * inv - x - best_start)
        star = max(star, (j + 1) * inv - x, x - j * inv)
    padded = [Fraction(0)] + xs + [Fraction(1)]
    low = None
    deficit = Fraction(0)
    for k, y in enumerate(padded):
        e = y - k * inv
        if low is not None:
            deficit = max(deficit, e - low + inv)
        low = e if low is None else min(low, e)
    return max(excess, deficit), star


def _float_discrepancy_rows(xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Extreme and star discrepancy of every row of a 2-D array (rows need not be sorted)."""
    xs = np.sort(xs, axis=1)
    m, n = xs.shape
    j = np.arange(n)
    end = (j + 1) / n - xs
    start = j / n - xs
    excess = np.max(end - np.minimum.accumulate(start, axis=1), axis=1)
    star = np.maximum(np.max(end, axis=1), np.max(xs - j / n, axis=1))
    padded = np.concatenate([np.zeros((m, 1)), xs, np.ones((m, 1))], axis=1)
    e = padded - np.arange(n + 2) / n
    deficit = np.max(e[:, 1:] - np.minimum.accumulate(e[:, :-1], axis=1), axis=1) + 1.0 / n
    return np.maximum(excess, deficit), star


def extreme_discrepancy(seq: ModOneSequence | Sequence) -> DiscrepancyReport:
    """Extreme (closed-interval) and star discrepancy of a finite sequence.

    Exact sequences (of Fractions) are handled in exact arithmetic and the
    report carries Fractions.
    """
    if not isinstance(seq, ModOneSequence):
        seq = ModOneSequence(seq)
    if seq.N == 0:
        raise EmptySequence("discrepancy of an empty sequence is undefined")
    if seq.exact:
        ext, star = _exact_discrepancy(seq.values)
        return DiscrepancyReport(ext, star, seq.N)
    ext, star = _float_discrepancy_rows(seq.values[None, :])
    return DiscrepancyReport(float(ext[0]), float(star[0]), seq.N)


def discrepancy_rows(values: np.ndarray) -> np.ndarray:
    """Extreme discrepancy of each row of a ``(m, k)`` array of values in ``[0, 1)``."""
    return _float_discrepancy_rows(np.asarray(values, dtype=float))[0]


def weyl_sum(seq: ModOneSequence | Sequence, h: int) -> float:
    """``|(1/N) sum_n exp(2 pi i h x_n)|``."""
    if h == 0 or int(h) != h:
        raise ValueError("h must be a nonzero integer")
    if not isinstance(seq, ModOneSequence):
        seq = ModOneSequence(seq)
    if seq.N == 0:
        raise EmptySequence("Weyl sum of an empty sequence is undefined")
    if seq.exact:
        # reduce h*x mod 1 exactly before going to floating point
        x = np.array([float((int(h) * v) % 1) for v in seq.values])
        h = 1
    else:
        x = seq.values
    return float(min(1.0, abs(np.mean(np.exp(2j * np.pi * h * x)))))


ERDOS_TURAN_CONSTANT = 3.0


def erdos_turan_bound(seq: ModOneSequence | Sequence, K: int) -> float:
    """``3 * (1/K + sum_{h=1..K} |W_h| / h)``, an upper bound on the extreme discrepancy."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if not isinstance(seq, ModOneSequence):
        seq = ModOneSequence(seq)
    if seq.N == 0:
        raise EmptySequence("empty sequence")
    if seq.exact:
        x = np.array([float(v) for v in seq.values])
    else:
        x = seq.values
    hs = np.arange(1, K + 1)
    # chunk over h so memory stays at O(N * 256)
    total = 0.0
    for lo in range(0, K, 256):
        block = hs[lo : lo + 256]
        sums = np.abs(np.exp(2j * np.pi * np.outer(block, x)).mean(axis=1))
        total += float(np.sum(np.minimum(sums, 1.0) / block))
    return ERDOS_TURAN_CONSTANT * (1.0 / K + total)


# -- the A^d(N, eps) machinery ----------------------------------------------------


def poly_sequence(a: float, b: Sequence[float], k: int) -> np.ndarray:
    """``a*n**d + b_1 n**(d-1) + ... + b_d`` mod 1 for ``n = 1..k`` (``d = len(b)``)."""
    return _poly_rows(a, np.asarray([b], dtype=float), k)[0]


def _poly_rows(a: float, coeffs: np.ndarray, k: int) -> np.ndarray:
    """One row per coefficient vector; powers of ``n`` are reduced before scaling."""
    d = coeffs.shape[1]
    n = np.arange(1, k + 1, dtype=np.int64)
    vals = np.broadcast_to(np.mod(a * (n**d).astype(float), 1.0), (len(coeffs), k)).copy()
    for i in range(d):
        power = (n ** (d - 1 - i)).astype(float)
        vals += np.outer(coeffs[:, i], power)
    vals = np.mod(vals, 1.0)
    vals[vals >= 1.0] = 0.0
    return vals


def G_k(a: float, d: int, b: Sequence[float], k: int) -> float:
    """Extreme discrepancy of ``{a n^d + P_b(n) mod 1}_{n=1..k}``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(b) != d:
        raise ValueError(f"expected {d} lower-order coefficients, got {len(b)}")
    return float(discrepancy_rows(poly_sequence(a, b, k)[None, :])[0])


def coefficient_grid(d: int, grid: int, budget: int = DEFAULT_GRID_BUDGET) -> np.ndarray:
    if grid < 2:
        raise ValueError("grid must be >= 2")
    if grid**d > budget:
        raise GridBudgetExceeded(f"grid {grid}^{d} = {grid ** d} exceeds budget {budget}")
    axis = np.arange(grid) / grid
    return np.array(list(itertools.product(axis, repeat=d)), dtype=float)


@dataclass(frozen=True)
class GridSup:
    value: float
    grid: int

    def __float__(self):
        return self.value


def G_k_sup(a: float, d: int, k: int, grid: int = 64, budget: int = DEFAULT_GRID_BUDGET) -> GridSup:
    """Max of ``G_k`` over the coefficient grid ``{0, 1/g, ..., (g-1)/g}^d``.

    This only approximates the supremum over all lower-order polynomials
    from below; the result records the grid so callers can refine.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rows = _poly_rows(a, coefficient_grid(d, grid, budget), k)
    return GridSup(float(np.max(discrepancy_rows(rows))), grid)


def escape_step(a: float, d: int, eps: float, N: int, grid: int = 64, refine: bool = True,
                budget: int = DEFAULT_GRID_BUDGET) -> int | None:
    """Smallest ``k <= N`` with grid-sup ``G_k(a) <= eps``, or None.

    With ``refine`` a candidate ``k`` is re-checked on the doubled grid and
    only accepted if it still stays at or below ``eps`` there.  The decision
    for each ``k`` does not depend on ``N``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    coarse = _poly_rows(a, coefficient_grid(d, grid, budget), N)
    fine = None
    for k in range(1, N + 1):
        if np.max(discrepancy_rows(coarse[:, :k])) > eps:
            continue
        if refine:
            if fine is None:
                fine = _poly_rows(a, coefficient_grid(d, 2 * grid, budget), N)
            if np.max(discrepancy_rows(fine[:, :k])) > eps:
                continue
        return k
    return None


def in_A(a: float, d: int, N: int, eps: float, grid: int = 64, refine: bool = True) -> bool:
    """Approximate membership of ``a`` in ``A^d(N, eps)``.

    True iff the grid sup of ``G_k(a)`` exceeds ``eps`` for every ``k = 1..N``.
    """
    return escape_step(a, d, eps, N, grid, refine) is None
