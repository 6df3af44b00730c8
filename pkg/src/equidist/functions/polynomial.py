"""Multivariate polynomials with exact coefficients.

Exponent tuples (multi-indices) map to :class:`~equidist.exact.ExactScalar`
coefficients.  Besides evaluation this module provides the constructive side
of the irrational-direction argument: exact directional derivatives, the
search for an integer direction whose top-order derivative is irrational, a
search for directions whose monomial evaluation vectors form a basis, and the
residue-class substitution ``G(v) = F(qv + r)`` used when every top-degree
coefficient is rational.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from ..errors import AllTopCoefficientsRational, DimensionMismatch
from ..exact import ZERO, ExactScalar, GeneratorSet

MultiIndex = tuple[int, ...]


def total_degree(exponents: MultiIndex) -> int:
    return sum(exponents)


def exponents_of_degree(n: int, d: int) -> list[MultiIndex]:
    """All multi-indices of length ``n`` and total degree ``d``, lexicographically descending."""
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        out.extend((first,) + rest for rest in exponents_of_degree(n - 1, d - first))
    return out


def _monomial(x: Sequence[int], exponents: MultiIndex):
    out = 1
    for xi, e in zip(x, exponents):
        if e:
            out *= xi**e
    return out


@dataclass(frozen=True, eq=True)
class Polynomial:
    """``F(x) = sum_l alpha_l * x**l`` over ``dimension`` variables."""

    dimension: int
    terms: Mapping[MultiIndex, ExactScalar]

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        clean: dict[MultiIndex, ExactScalar] = {}
        for exp, coef in self.terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.dimension:
                raise DimensionMismatch(f"multi-index {exp} has length != {self.dimension}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            coef = ExactScalar.of(coef)
            total = clean.get(exp, ZERO) + coef
            if total.is_zero:
                clean.pop(exp, None)
            else:
                clean[exp] = total
        object.__setattr__(self, "terms", dict(sorted(clean.items(), reverse=True)))

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, value) -> "Polynomial":
        return cls(n, {(0,) * n: ExactScalar.of(value)})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        exp = [0] * n
        exp[i] = 1
        return cls(n, {tuple(exp): ExactScalar.of(1)})

    @classmethod
    def monomial(cls, exponents: Sequence[int], coef=1) -> "Polynomial":
        return cls(len(exponents), {tuple(exponents): ExactScalar.of(coef)})

    @classmethod
    def from_json(cls, doc: Mapping, generators: GeneratorSet | None = None) -> "Polynomial":
        """Parse ``{"n": 2, "generators": {...}, "terms": [{"exp": [1, 1], "coef": {...}}]}``."""
        if generators is None:
            generators = GeneratorSet.from_json(doc.get("generators"))
        try:
            n = int(doc["n"])
            raw_terms = doc["terms"]
        except KeyError as exc:
            raise ValueError(f"polynomial spec is missing field {exc.args[0]!r}") from None
        terms: dict[MultiIndex, ExactScalar] = {}
        for i, t in enumerate(raw_terms):
            try:
                exp = tuple(t["exp"])
                coef = ExactScalar.from_json(t["coef"], generators)
            except KeyError as exc:
                raise ValueError(f"terms[{i}] is missing field {exc.args[0]!r}") from None
            except (TypeError, ValueError) as exc:
                raise ValueError(f"terms[{i}]: {exc}") from None
            if len(exp) != n:
                raise DimensionMismatch(f"terms[{i}].exp has length {len(exp)}, expected {n}")
            terms[exp] = terms.get(exp, ZERO) + coef
        return cls(n, terms)

    def to_json(self) -> dict:
        gens: dict[str, str] = {}
        for c in self.terms.values():
            gens.update({name: g.approx for name, g in c.generators.items()})
        return {
            "n": self.dimension,
            "generators": dict(sorted(gens.items())),
            "terms": [{"exp": list(e), "coef": c.to_json()} for e, c in self.terms.items()],
        }

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((total_degree(e) for e in self.terms), default=-1)

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial(self.dimension, {e: c for e, c in self.terms.items() if total_degree(e) == d})

    def top_part(self) -> "Polynomial":
        return self.homogeneous_part(self.degree)

    def constant_term(self) -> ExactScalar:
        return self.terms.get((0,) * self.dimension, ZERO)

    def has_irrational_nonconstant_coefficient(self) -> bool:
        return any(not c.is_rational for e, c in self.terms.items() if total_degree(e) > 0)

    def generators(self) -> dict:
        out = {}
        for c in self.terms.values():
            out.update(c.generators)
        return out

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if other.dimension != self.dimension:
            raise DimensionMismatch(f"dimensions {self.dimension} and {other.dimension} differ")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.dimension, other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, ZERO) + c
        return Polynomial(self.dimension, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dimension, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.dimension, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        terms: dict[MultiIndex, ExactScalar] = {}
        for (e1, c1), (e2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            e = tuple(a + b for a, b in zip(e1, e2))
            terms[e] = terms.get(e, ZERO) + c1 * c2
        return Polynomial(self.dimension, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial.constant(self.dimension, 1)
        for _ in range(k):
            out = out * self
        return out

    # -- evaluation --------------------------------------------------------

    def _check_point(self, x: Sequence) -> None:
        if len(x) != self.dimension:
            raise DimensionMismatch(f"point of length {len(x)} for a {self.dimension}-variable polynomial")

    def evaluate(self, x: Sequence[int]) -> ExactScalar:
        """Exact value at an integer (or rational) point."""
        self._check_point(x)
        x = [Fraction(v) for v in x]
        total = ZERO
        for e, c in self.terms.items():
            total = total + c * _monomial(x, e)
        return total

    def evaluate_float(self, x) -> np.ndarray:
        """Floating-point value at one point or an ``(m, n)`` array of points."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[1] != self.dimension:
            raise DimensionMismatch(f"points have {pts.shape[1]} columns, expected {self.dimension}")
        out = np.zeros(len(pts))
        for e, c in self.terms.items():
            out += float(c) * np.prod(pts ** np.asarray(e, dtype=float), axis=1)
        return out[0] if single else out

    def _integer_weights(self) -> tuple[list[MultiIndex], list[int], int]:
        """Exponents, integer weights ``W_l`` and modulus ``Q`` with ``F(x) ~= sum W_l x^l / Q``."""
        if not self.terms:
            return [], [], 1
        digits = min((g.precision for g in self.generators().values()), default=0)
        den = math.lcm(*(d for c in self.terms.values() for d in c.denominators()))
        exps, weights = [], []
        for e, c in self.terms.items():
            w = c.rational.numerator * (den // c.rational.denominator) * 10**digits
            for g, coef in c.irrational:
                w += coef.numerator * (den // coef.denominator) * g.scaled(digits)
            exps.append(e)
            weights.append(w)
        return exps, weights, den * 10**digits

    def mod1_values(self, points) -> np.ndarray:
        """Fractional parts ``F(x) mod 1`` for every row of an integer point array.

        The reduction is done in exact integer arithmetic (generators enter
        through their decimal approximations), then converted to float.
        """
        pts = np.asarray(points, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise DimensionMismatch(f"expected an (m, {self.dimension}) integer array")
        exps, weights, modulus = self._integer_weights()
        if not exps:
            return np.zeros(len(pts))
        cols = [pts[:, i].astype(object) for i in range(self.dimension)]
        acc = np.zeros(len(pts), dtype=object)
        for e, w in zip(exps, weights):
            mono = np.ones(len(pts), dtype=object)
            for col, k in zip(cols, e):
                if k:
                    mono = mono * col**k
            acc = acc + mono * w
        out = np.fromiter(((int(v) % modulus) / modulus for v in acc), dtype=float, count=len(pts))
        return np.minimum(out, math.nextafter(1.0, 0.0))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = "xyzw" if self.dimension <= 4 else None
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(
                (names[i] if names else f"x{i + 1}") + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(e)
                if k
            )
            coef = str(c)
            if not mono:
                parts.append(coef)
            elif coef == "1":
                parts.append(mono)
            else:
                parts.append(f"({coef})*{mono}")
        return " + ".join(parts)


def evaluate_mod1(F: Polynomial, x: Sequence[int]) -> float:
    F._check_point(x)
    return float(F.mod1_values(np.asarray([x], dtype=np.int64))[0])


def _derivative_along(F: Polynomial, v: Sequence[int]) -> Polynomial:
    terms: dict[MultiIndex, ExactScalar] = {}
    for e, c in F.terms.items():
        for i, (k, vi) in enumerate(zip(e, v)):
            if k and vi:
                e2 = e[:i] + (k - 1,) + e[i + 1 :]
                terms[e2] = terms.get(e2, ZERO) + c * (k * vi)
    return Polynomial(F.dimension, terms)


def directional_derivative(F: Polynomial, v: Sequence[int], k: int) -> Polynomial:
    """Exact ``k``-th derivative of ``F`` along the integer direction ``v``."""
    if k < 1:
        raise ValueError("order must be >= 1")
    if len(v) != F.dimension:
        raise DimensionMismatch(f"direction of length {len(v)} for dimension {F.dimension}")
    out = F
    for _ in range(k):
        out = _derivative_along(out, v)
    return out


def leading_directional_value(F: Polynomial, v: Sequence[int]) -> ExactScalar:
    """``d! * F_d(v)``: the constant ``d``-th derivative of ``F`` along ``v``."""
    d = F.degree
    if d < 1:
        raise ValueError("polynomial must be nonconstant")
    if len(v) != F.dimension:
        raise DimensionMismatch(f"direction of length {len(v)} for dimension {F.dimension}")
    total = ZERO
    for e, c in F.homogeneous_part(d).terms.items():
        total = total + c * _monomial(v, e)
    return total * math.factorial(d)


def _integer_order(m: int) -> tuple[int, bool]:
    return abs(m), m < 0


def shell(n: int, radius: int) -> list[tuple[int, ...]]:
    """Integer vectors with sup-norm exactly ``radius``.

    Coordinates are compared in the order 0, 1, -1, 2, -2, ... and vectors
    lexicographically under that order, so a direction is always visited
    before its negative.
    """
    if radius == 0:
        return [(0,) * n]
    values = sorted(range(-radius, radius + 1), key=_integer_order)
    return [v for v in itertools.product(values, repeat=n) if max(abs(c) for c in v) == radius]


def iter_directions(n: int, max_radius: int | None = None) -> Iterator[tuple[int, ...]]:
    """Nonzero integer directions, shell by shell."""
    r = 1
    while max_radius is None or r <= max_radius:
        yield from shell(n, r)
        r += 1


def monomial_vector(v: Sequence[int], d: int) -> list[int]:
    """Entries ``prod m_i**l_i`` over all ``|l| = d`` (ordered as :func:`exponents_of_degree`)."""
    return [_monomial(v, e) for e in exponents_of_degree(len(v), d)]


@dataclass(frozen=True)
class MonomialEvaluationVector:
    direction: tuple[int, ...]
    entries: tuple[int, ...]

    @classmethod
    def of(cls, v: Sequence[int], d: int) -> "MonomialEvaluationVector":
        return cls(tuple(v), tuple(monomial_vector(v, d)))


def _reduce_against(basis: list[tuple[int, list[Fraction]]], row: list[Fraction]) -> list[Fraction]:
    row = list(row)
    for pivot, b in basis:
        if row[pivot]:
            f = row[pivot] / b[pivot]
            row = [x - f * y for x, y in zip(row, b)]
    return row


def exact_rank(rows: Sequence[Sequence]) -> int:
    basis: list[tuple[int, list[Fraction]]] = []
    for r in rows:
        red = _reduce_against(basis, [Fraction(x) for x in r])
        pivot = next((i for i, x in enumerate(red) if x), None)
        if pivot is not None:
            basis.append((pivot, red))
    return len(basis)


def exact_determinant(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def monomial_basis_search(n: int, d: int) -> list[tuple[int, ...]]:
    """Directions ``v_1..v_k`` whose degree-``d`` monomial vectors are linearly independent.

    Directions are scanned in :func:`iter_directions` order and kept greedily
    whenever they raise the rank; ``k`` is the number of degree-``d``
    monomials in ``n`` variables.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    k = math.comb(n + d - 1, d)
    chosen: list[tuple[int, ...]] = []
    basis: list[tuple[int, list[Fraction]]] = []
    for v in iter_directions(n):
        red = _reduce_against(basis, [Fraction(x) for x in monomial_vector(v, d)])
        pivot = next((i for i, x in enumerate(red) if x), None)
        if pivot is None:
            continue
        basis.append((pivot, red))
        chosen.append(v)
        if len(chosen) == k:
            return chosen
    raise AssertionError("unreachable: directions span the monomial space")


def find_irrational_direction(F: Polynomial) -> tuple[int, ...]:
    """First integer direction ``v`` with irrational ``d! * F_d(v)``.

    Raises :class:`AllTopCoefficientsRational` when every top-degree
    coefficient is rational, in which case no such direction exists.
    """
    d = F.degree
    if d < 1:
        raise ValueError("polynomial must be nonconstant")
    if all(c.is_rational for c in F.top_part().terms.values()):
        raise AllTopCoefficientsRational(f"all degree-{d} coefficients of {F} are rational")
    # A basis of monomial vectors exists inside this shell, and an irrational
    # top part cannot be rational on all of them.
    bound = max(max(abs(c) for c in v) for v in monomial_basis_search(F.dimension, d))
    for v in iter_directions(F.dimension, bound):
        if not leading_directional_value(F, v).is_rational:
            return v
    raise AssertionError("generator independence contract violated")


def reduce_mod1(F: Polynomial) -> Polynomial:
    """Drop integer parts of rational coefficient components.

    On integer points this leaves ``F mod 1`` unchanged.
    """
    terms = {}
    for e, c in F.terms.items():
        r = c.rational - math.floor(c.rational)
        terms[e] = ExactScalar(r, c.irrational)
    return Polynomial(F.dimension, terms)


def residue_decompose(F: Polynomial, q: int, r: Sequence[int]) -> Polynomial:
    """Exact expansion of ``G(v) = F(q*v + r)``."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if len(r) != F.dimension:
        raise DimensionMismatch(f"residue of length {len(r)} for dimension {F.dimension}")
    n = F.dimension
    # (q*v_i + r_i)**k expanded once per (i, k)
    cache: dict[tuple[int, int], dict[int, int]] = {}

    def factor(i: int, k: int) -> dict[int, int]:
        if (i, k) not in cache:
            cache[i, k] = {j: math.comb(k, j) * q**j * r[i] ** (k - j) for j in range(k + 1)}
        return cache[i, k]

    terms: dict[MultiIndex, ExactScalar] = {}
    for e, c in F.terms.items():
        expansions = [factor(i, k).items() for i, k in enumerate(e)]
        for combo in itertools.product(*expansions):
            weight = 1
            for _, w in combo:
                weight *= w
            if weight:
                exp = tuple(j for j, _ in combo)
                terms[exp] = terms.get(exp, ZERO) + c * weight
    return Polynomial(n, terms)


def top_denominator_lcm(F: Polynomial) -> int:
    return math.lcm(*(c.rational.denominator for c in F.top_part().terms.values()))
