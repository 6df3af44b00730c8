"""Binned measures on the circle R/Z and their distance to the uniform measure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_BINS = 64
DIRAC_THRESHOLD = 0.9
# Max bin density (relative to uniform) still called absolutely continuous.
# Must admit integrable endpoint singularities such as the arcsine law, whose
# top bin at B = 64 carries (2/pi)*sqrt(2B) ~ 7.2 times the uniform mass.
DENSITY_CAP = 16.0

DIRAC_LIKE = "dirac_like"
AC_LIKE = "ac_like"
OTHER = "other"


@dataclass(frozen=True)
class EmpiricalCircleMeasure:
    bins: np.ndarray
    total: int

    def __post_init__(self):
        b = np.asarray(self.bins, dtype=np.int64)
        if b.ndim != 1 or len(b) < 2:
            raise ValueError("need at least two bins")
        if np.any(b < 0):
            raise ValueError("bin counts must be non-negative")
        if int(b.sum()) != self.total:
            raise ValueError("bin counts must sum to total")
        object.__setattr__(self, "bins", b)

    @classmethod
    def from_values(cls, values, B: int = DEFAULT_BINS) -> "EmpiricalCircleMeasure":
        """Histogram of ``values mod 1`` over ``B`` equal bins."""
        v = np.mod(np.asarray(values, dtype=float), 1.0)
        v[v >= 1.0] = 0.0  # tiny negatives round up to 1.0, which is 0 on the circle
        idx = np.clip(np.floor(v * B).astype(np.int64), 0, B - 1)
        counts = np.bincount(idx, minlength=B)
        return cls(counts, int(counts.sum()))

    @classmethod
    def from_json(cls, doc) -> "EmpiricalCircleMeasure":
        return cls(np.asarray(doc["bins"], dtype=np.int64), int(doc["total"]))

    def to_json(self) -> dict:
        return {"bins": [int(c) for c in self.bins], "total": self.total}

    @property
    def B(self) -> int:
        return len(self.bins)

    def probabilities(self) -> np.ndarray:
        return self.bins / self.total

    def __add__(self, other: "EmpiricalCircleMeasure") -> "EmpiricalCircleMeasure":
        if other.B != self.B:
            raise ValueError("cannot merge histograms with different bin counts")
        return EmpiricalCircleMeasure(self.bins + other.bins, self.total + other.total)

    def rotate(self, shift: int) -> "EmpiricalCircleMeasure":
        return EmpiricalCircleMeasure(np.roll(self.bins, shift), self.total)


def pushforward_mod1(g: Callable[[np.ndarray], np.ndarray], samples, B: int = DEFAULT_BINS) -> EmpiricalCircleMeasure:
    """Histogram of ``g(s) mod 1`` over the sample points ``s``.

    ``g`` is applied to the whole ``(m, n)`` sample array and must return
    ``m`` values.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if len(samples) == 0:
        raise ValueError("samples must be nonempty")
    values = np.asarray(g(samples), dtype=float)
    if values.shape != (len(samples),):
        raise ValueError("g must return one value per sample")
    return EmpiricalCircleMeasure.from_values(values, B)


@dataclass(frozen=True)
class UniformDistances:
    tv: float
    ks: float
    disc: float

    def to_json(self) -> dict:
        return {"tv": self.tv, "ks": self.ks, "disc": self.disc}


def distance_to_uniform(m: EmpiricalCircleMeasure) -> UniformDistances:
    """Total variation, Kolmogorov-Smirnov, and bin-aligned interval discrepancy.

    All three compare against Lebesgue measure discretised to the same bins.
    """
    if m.total < 1:
        raise ValueError("empty histogram")
    p = m.probabilities()
    tv = 0.5 * float(np.sum(np.abs(p - 1.0 / m.B)))
    e = np.concatenate([[0.0], np.cumsum(p)]) - np.arange(m.B + 1) / m.B
    ks = float(np.max(np.abs(e)))
    disc = float(np.max(e) - np.min(e))
    return UniformDistances(min(tv, 1.0), min(ks, 1.0), min(disc, 1.0))


def classify(m: EmpiricalCircleMeasure, dirac_threshold: float = DIRAC_THRESHOLD,
             density_cap: float = DENSITY_CAP) -> str:
    """Heuristic gate: ``dirac_like``, ``ac_like`` or ``other``.

    A histogram cannot decide absolute continuity; this only flags whether
    one bin swallows the mass or no bin is much denser than uniform.
    """
    if m.total < m.B:
        raise ValueError("need at least one sample per bin to classify")
    p = m.probabilities()
    if p.max() >= dirac_threshold:
        return DIRAC_LIKE
    if p.max() * m.B <= density_cap:
        return AC_LIKE
    return OTHER


def histogram_svg(m: EmpiricalCircleMeasure, width: int = 640, height: int = 240) -> str:
    """Static SVG bar chart of the bin masses, with the uniform level dashed."""
    p = m.probabilities()
    top = max(float(p.max()), 1.0 / m.B) * 1.1
    bw = width / m.B
    bars = []
    for i, v in enumerate(p):
        h = v / top * height
        bars.append(
            f'<rect x="{i * bw:.3f}" y="{height - h:.3f}" width="{bw * 0.9:.3f}" '
            f'height="{h:.3f}" fill="#4a72b0"/>'
        )
    uy = height - (1.0 / m.B) / top * height
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        + "\n".join(bars)
        + f'\n<line x1="0" y1="{uy:.3f}" x2="{width}" y2="{uy:.3f}" stroke="#c33" stroke-dasharray="4 3"/>\n'
        + "</svg>\n"
    )
