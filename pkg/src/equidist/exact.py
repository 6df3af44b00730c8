"""Exact scalars: rational affine combinations of declared irrational generators.

A scalar is ``r + c_1*g_1 + ... + c_k*g_k`` with rational ``r, c_i`` and named
generators ``g_i`` that the user declares irrational and (together with 1)
linearly independent over Q.  Under that contract a scalar is rational exactly
when every generator coefficient vanishes, which makes irrationality of
polynomial coefficients decidable.

Each generator carries a decimal approximation (at least 50 fractional digits)
used only when a scalar has to be reduced mod 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Context, Decimal, InvalidOperation, localcontext
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

import mpmath

from .config import DEFAULT_PRECISION
from .errors import GeneratorSetMismatch, PrecisionExhausted

MIN_GENERATOR_DIGITS = 50

_KNOWN_CONSTANTS = {
    "sqrt2": lambda: mpmath.sqrt(2),
    "sqrt3": lambda: mpmath.sqrt(3),
    "sqrt5": lambda: mpmath.sqrt(5),
    "sqrt7": lambda: mpmath.sqrt(7),
    "phi": lambda: (1 + mpmath.sqrt(5)) / 2,
    "pi": lambda: mpmath.pi,
    "e": lambda: mpmath.e,
}


def known_constant_digits(name: str, digits: int) -> str:
    """Decimal string of a built-in constant rounded to ``digits`` places."""
    with mpmath.workdps(digits + 30):
        scaled = int(mpmath.nint(_KNOWN_CONSTANTS[name]() * mpmath.mpf(10) ** digits))
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def _fractional_digits(text: str) -> int:
    mantissa = text.strip().lower().split("e")[0]
    if "." not in mantissa:
        return 0
    return len(mantissa.split(".", 1)[1])


@dataclass(frozen=True)
class IrrationalGenerator:
    """A named real number declared irrational by the user.

    ``approx`` is a decimal string; its number of fractional digits is the
    precision the generator can support when scalars are reduced mod 1.
    """

    name: str
    approx: str
    declared_irrational: bool = field(default=True, init=False, compare=False)

    def __post_init__(self):
        if not self.name.isidentifier():
            raise ValueError(f"generator name {self.name!r} is not an identifier")
        try:
            value = Decimal(self.approx)
        except InvalidOperation:
            raise ValueError(f"generator {self.name}: {self.approx!r} is not a decimal") from None
        if not value.is_finite():
            raise ValueError(f"generator {self.name}: approximation must be finite")
        if "e" in self.approx.lower():
            raise ValueError(f"generator {self.name}: use positional decimal notation")
        if self.precision < MIN_GENERATOR_DIGITS:
            raise ValueError(
                f"generator {self.name}: needs >= {MIN_GENERATOR_DIGITS} fractional digits, "
                f"got {self.precision}"
            )
        if self.name in _KNOWN_CONSTANTS:
            truth = Decimal(known_constant_digits(self.name, self.precision + 5))
            with localcontext() as ctx:
                ctx.prec = self.precision + 40
                if abs(truth - value) > Decimal(10) ** (-self.precision):
                    raise ValueError(
                        f"generator {self.name}: approximation disagrees with the "
                        f"named constant within {self.precision} digits"
                    )

    @classmethod
    def known(cls, name: str, digits: int = DEFAULT_PRECISION) -> "IrrationalGenerator":
        if name not in _KNOWN_CONSTANTS:
            raise KeyError(f"unknown constant {name!r}; known: {sorted(_KNOWN_CONSTANTS)}")
        return cls(name, known_constant_digits(name, digits))

    @property
    def precision(self) -> int:
        return _fractional_digits(self.approx)

    def scaled(self, digits: int) -> int:
        """``round(approx * 10**digits)`` as an exact integer."""
        with localcontext() as ctx:
            ctx.prec = len(self.approx) + digits + 10
            return int(Decimal(self.approx).scaleb(digits).to_integral_value(ROUND_HALF_EVEN))

    def scalar(self) -> "ExactScalar":
        return ExactScalar(Fraction(0), ((self, Fraction(1)),))

    def __float__(self) -> float:
        return float(Decimal(self.approx))


class GeneratorSet(Mapping[str, IrrationalGenerator]):
    """Named generators available to a polynomial or scalar document.

    Names not declared explicitly fall back to the built-in constants
    (sqrt2, sqrt3, sqrt5, sqrt7, phi, pi, e) at the set's precision.
    """

    def __init__(self, generators: Iterable[IrrationalGenerator] = (), precision: int = DEFAULT_PRECISION):
        self._gens: dict[str, IrrationalGenerator] = {}
        self.precision = precision
        for g in generators:
            if g.name in self._gens and self._gens[g.name] != g:
                raise GeneratorSetMismatch(f"generator {g.name!r} declared twice")
            self._gens[g.name] = g

    @classmethod
    def from_json(cls, doc: Mapping[str, str] | None, precision: int = DEFAULT_PRECISION) -> "GeneratorSet":
        doc = doc or {}
        return cls((IrrationalGenerator(name, str(value)) for name, value in doc.items()), precision)

    def to_json(self) -> dict[str, str]:
        return {name: g.approx for name, g in sorted(self._gens.items())}

    def resolve(self, name: str) -> IrrationalGenerator:
        if name not in self._gens:
            self._gens[name] = IrrationalGenerator.known(name, self.precision)
        return self._gens[name]

    def __getitem__(self, name: str) -> IrrationalGenerator:
        return self.resolve(name)

    def __iter__(self):
        return iter(self._gens)

    def __len__(self):
        return len(self._gens)


def _fixed_point(n: int, digits: int) -> Decimal:
    """``n / 10**digits`` as an exact Decimal (no context rounding)."""
    return Decimal(n).scaleb(-digits, Context(prec=len(str(abs(n))) + 2))


def _as_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, (int, Rational)):
        return Fraction(q)
    if isinstance(q, str):
        return Fraction(q)
    raise TypeError(f"expected an exact rational, got {type(q).__name__}")


@dataclass(frozen=True)
class ExactScalar:
    """``rational + sum(coef * generator)`` in canonical form.

    Canonical form: generator terms sorted by name, no zero coefficients, no
    generator name repeated.  Construct through :meth:`of` / :meth:`combine`
    or arithmetic rather than by hand.
    """

    rational: Fraction = Fraction(0)
    irrational: tuple[tuple[IrrationalGenerator, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rational", _as_fraction(self.rational))
        merged: dict[str, tuple[IrrationalGenerator, Fraction]] = {}
        for gen, coef in self.irrational:
            coef = _as_fraction(coef)
            if gen.name in merged:
                other, acc = merged[gen.name]
                if other != gen:
                    raise GeneratorSetMismatch(
                        f"generator {gen.name!r} has two different approximations"
                    )
                merged[gen.name] = (gen, acc + coef)
            else:
                merged[gen.name] = (gen, coef)
        canon = tuple(sorted(((g, c) for g, c in merged.values() if c != 0), key=lambda t: t[0].name))
        object.__setattr__(self, "irrational", canon)

    @classmethod
    def of(cls, value) -> "ExactScalar":
        """Coerce an int, Fraction, rational string, generator or scalar."""
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, IrrationalGenerator):
            return value.scalar()
        return cls(_as_fraction(value))

    @classmethod
    def combine(cls, rational, parts: Mapping[IrrationalGenerator, object] | Iterable = ()) -> "ExactScalar":
        items = parts.items() if isinstance(parts, Mapping) else parts
        return cls(_as_fraction(rational), tuple((g, _as_fraction(c)) for g, c in items))

    # -- inspection -------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return not self.irrational

    @property
    def is_zero(self) -> bool:
        return self.rational == 0 and not self.irrational

    @property
    def generators(self) -> dict[str, IrrationalGenerator]:
        return {g.name: g for g, _ in self.irrational}

    def coefficient(self, name: str) -> Fraction:
        for g, c in self.irrational:
            if g.name == name:
                return c
        return Fraction(0)

    def denominators(self) -> list[int]:
        return [self.rational.denominator] + [c.denominator for _, c in self.irrational]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        try:
            other = ExactScalar.of(other)
        except TypeError:
            return NotImplemented
        return ExactScalar(self.rational + other.rational, self.irrational + other.irrational)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        try:
            other = ExactScalar.of(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q) -> "ExactScalar":
        q = _as_fraction(q)
        return ExactScalar(self.rational * q, tuple((g, c * q) for g, c in self.irrational))

    def __mul__(self, other):
        if isinstance(other, ExactScalar):
            if other.is_rational:
                return self.scale(other.rational)
            if self.is_rational:
                return other.scale(self.rational)
            raise TypeError("products of two irrational scalars are not supported")
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    # -- approximation ----------------------------------------------------

    def available_digits(self) -> float:
        """Decimal places that :meth:`mod_one_approx` can certify."""
        if self.is_rational:
            return math.inf
        weight = sum(abs(c) for _, c in self.irrational)
        base = min(g.precision for g, _ in self.irrational)
        slack = math.ceil(math.log10(weight)) if weight > 1 else 0
        return base - slack

    def _scaled(self, digits: int) -> tuple[int, int]:
        """``(M, Q)`` with ``M / Q`` approximating the value using ``digits`` places per generator."""
        den = math.lcm(*self.denominators())
        num = self.rational.numerator * (den // self.rational.denominator) * 10**digits
        for g, c in self.irrational:
            num += c.numerator * (den // c.denominator) * g.scaled(digits)
        return num, den * 10**digits

    def _check_digits(self, digits: int) -> int:
        if digits < 0:
            raise ValueError("digits must be non-negative")
        if digits > self.available_digits():
            raise PrecisionExhausted(
                f"requested {digits} digits, generators support {self.available_digits()}"
            )
        if self.is_rational:
            return digits
        return min(g.precision for g, _ in self.irrational)

    def to_decimal(self, digits: int = 30) -> Decimal:
        """Value truncated (floor) to ``digits`` decimal places."""
        work = self._check_digits(digits)
        m, q = self._scaled(work)
        return _fixed_point(m * 10**digits // q, digits)

    def floor_part(self, digits: int = 30) -> int:
        work = self._check_digits(digits)
        m, q = self._scaled(work)
        return m // q

    def mod_one_approx(self, digits: int = 30) -> Decimal:
        """Fractional part in [0, 1), truncated to ``digits`` decimal places."""
        work = self._check_digits(digits)
        m, q = self._scaled(work)
        return _fixed_point((m % q) * 10**digits // q, digits)

    def frac(self) -> float:
        """Fractional part as a float (all available generator digits used)."""
        if self.is_rational:
            return float(self.rational - math.floor(self.rational))
        m, q = self._scaled(min(g.precision for g, _ in self.irrational))
        return clamp_unit((m % q) / q)

    def __float__(self) -> float:
        if self.is_rational:
            return float(self.rational)
        m, q = self._scaled(min(g.precision for g, _ in self.irrational))
        return m / q

    # -- presentation -----------------------------------------------------

    def __str__(self) -> str:
        parts = []
        if self.rational != 0 or not self.irrational:
            parts.append(str(self.rational))
        for g, c in self.irrational:
            parts.append(g.name if c == 1 else f"{c}*{g.name}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {
            "rat": f"{self.rational.numerator}/{self.rational.denominator}",
            "irr": {g.name: f"{c.numerator}/{c.denominator}" for g, c in self.irrational},
        }

    @classmethod
    def from_json(cls, doc, generators: GeneratorSet | None = None) -> "ExactScalar":
        """Parse ``{"rat": "p/q", "irr": {"sqrt2": "p/q"}}`` (or a bare number/string)."""
        if not isinstance(doc, Mapping):
            return cls.of(doc if not isinstance(doc, float) else str(doc))
        generators = generators if generators is not None else GeneratorSet()
        unknown = set(doc) - {"rat", "irr"}
        if unknown:
            raise ValueError(f"unexpected scalar fields {sorted(unknown)}")
        rat = Fraction(str(doc.get("rat", "0")))
        irr = doc.get("irr", {}) or {}
        return cls.combine(rat, [(generators.resolve(name), Fraction(str(c))) for name, c in irr.items()])


ZERO = ExactScalar()
ONE = ExactScalar(Fraction(1))


def clamp_unit(x: float) -> float:
    """Map a float that rounded up to 1.0 back into [0, 1)."""
    return x if x < 1.0 else math.nextafter(1.0, 0.0)


def sqrt2(digits: int = DEFAULT_PRECISION) -> ExactScalar:
    return IrrationalGenerator.known("sqrt2", digits).scalar()
