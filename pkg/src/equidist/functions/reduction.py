"""Reduction of a polynomial to irrational-direction certificates.

If some top-degree coefficient is irrational, an integer direction with an
irrational constant top-order derivative certifies the polynomial directly.
Otherwise the lcm ``q`` of the top-degree denominators splits the lattice into
``q**n`` residue classes ``x = q*v + r``; on each class the substituted
polynomial has integer top-degree coefficients, which vanish mod 1, so the
degree drops and the reduction recurses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import AllTopCoefficientsRational, CardinalityOverflow
from ..exact import ExactScalar
from .polynomial import (
    Polynomial,
    find_irrational_direction,
    leading_directional_value,
    reduce_mod1,
    residue_decompose,
    top_denominator_lcm,
)

MAX_RESIDUE_NODES = 100_000


@dataclass
class DirectionCertificate:
    polynomial: Polynomial
    direction: tuple[int, ...]
    value: ExactScalar

    @property
    def certified(self) -> bool:
        return not self.value.is_rational

    def to_json(self) -> dict:
        return {
            "kind": "direction",
            "polynomial": str(self.polynomial),
            "direction": list(self.direction),
            "degree": self.polynomial.degree,
            "value": self.value.to_json(),
            "value_is_rational": self.value.is_rational,
        }


@dataclass
class ConstantLeaf:
    """A residue class on which ``F mod 1`` is constant."""

    value: ExactScalar

    certified = False

    def to_json(self) -> dict:
        return {"kind": "constant", "value": self.value.to_json(), "frac": self.value.frac()}


@dataclass
class ResidueSplit:
    polynomial: Polynomial
    q: int
    children: list[tuple[tuple[int, ...], object]] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return all(child.certified for _, child in self.children)

    def to_json(self) -> dict:
        return {
            "kind": "residue",
            "polynomial": str(self.polynomial),
            "q": self.q,
            "children": [{"r": list(r), "node": child.to_json()} for r, child in self.children],
        }


def reduction_trace(F: Polynomial, max_nodes: int = MAX_RESIDUE_NODES):
    """Build the certificate tree for ``F``.

    The tree's ``certified`` flag is true exactly when every leaf is an
    irrational direction; a constant leaf means some residue class of the
    lattice maps to a single point mod 1.
    """
    budget = [max_nodes]

    def visit(G: Polynomial):
        budget[0] -= 1
        if budget[0] < 0:
            raise CardinalityOverflow(f"residue recursion exceeded {max_nodes} nodes")
        if G.is_constant:
            return ConstantLeaf(G.constant_term())
        try:
            v = find_irrational_direction(G)
        except AllTopCoefficientsRational:
            pass
        else:
            return DirectionCertificate(G, v, leading_directional_value(G, v))
        q = top_denominator_lcm(G)
        node = ResidueSplit(G, q)
        for r in itertools.product(range(q), repeat=G.dimension):
            child = reduce_mod1(residue_decompose(G, q, r))
            node.children.append((r, visit(child)))
        return node

    return visit(F)


def split_by_residue(points: np.ndarray, q: int) -> dict[tuple[int, ...], np.ndarray]:
    """Group integer points by ``x mod q`` and return the reduced ``v = (x - r) / q``."""
    pts = np.asarray(points, dtype=np.int64)
    res = np.mod(pts, q)
    out = {}
    for r in itertools.product(range(q), repeat=pts.shape[1]):
        mask = np.all(res == np.asarray(r), axis=1)
        out[r] = (pts[mask] - np.asarray(r)) // q
    return out
