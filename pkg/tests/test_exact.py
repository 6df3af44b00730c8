from decimal import Decimal, localcontext
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from equidist.errors import GeneratorSetMismatch, PrecisionExhausted
from equidist.exact import (
    ExactScalar,
    GeneratorSet,
    IrrationalGenerator,
    ONE,
    ZERO,
    sqrt2,
)

S2 = sqrt2()
half = ExactScalar.of(Fraction(1, 2))

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)


def test_add_cancels_to_rational():
    s = (half + S2) + (half - S2)
    assert s == ONE
    assert s.is_rational


def test_add_identity_and_componentwise():
    assert ZERO + S2 == S2
    a = ExactScalar.of(Fraction(1, 3)) + S2
    b = ExactScalar.of(Fraction(1, 6)) + S2.scale(2)
    s = a + b
    assert s.rational == Fraction(1, 2)
    assert s.coefficient("sqrt2") == 3


def test_scale_examples():
    assert S2.scale(0) == ZERO
    assert S2.scale(0).irrational == ()
    s = (half + S2).scale(2)
    assert s.rational == 1 and s.coefficient("sqrt2") == 2
    assert S2.scale(Fraction(3, 4)).coefficient("sqrt2") == Fraction(3, 4)


def test_mod_one_approx_examples():
    assert ExactScalar.of(Fraction(7, 2)).mod_one_approx(10) == Decimal("0.5")
    assert str(S2.mod_one_approx(10)) == "0.4142135623"
    assert str(S2.scale(2).mod_one_approx(10)) == "0.8284271247"


def test_mod_one_approx_cross_checked_by_squaring():
    v = S2.mod_one_approx(40)
    with mpmath.workdps(60):
        x = mpmath.mpf(1) + mpmath.mpf(str(v))
        assert abs(x * x - 2) < mpmath.mpf(10) ** -38


def test_precision_exhausted():
    g = IrrationalGenerator.known("sqrt2", 55)
    with pytest.raises(PrecisionExhausted):
        g.scalar().mod_one_approx(200)


def test_generator_needs_fifty_digits():
    with pytest.raises(ValueError):
        IrrationalGenerator("sqrt2", "1.41421356")


def test_generator_must_match_named_constant():
    bad = "1.4142135623730950488016887242096980785696718753769480731766797381" + "9" * 5
    bad = bad[:30] + "0" + bad[31:]
    with pytest.raises(ValueError):
        IrrationalGenerator("sqrt2", bad)


def test_mismatched_generators_rejected():
    g1 = IrrationalGenerator.known("sqrt2", 60)
    g2 = IrrationalGenerator.known("sqrt2", 70)
    with pytest.raises(GeneratorSetMismatch):
        _ = g1.scalar() + g2.scalar()
    with pytest.raises(GeneratorSetMismatch):
        GeneratorSet([g1, g2])


def test_irrational_product_unsupported():
    with pytest.raises(TypeError):
        _ = S2 * S2
    assert (S2 * ExactScalar.of(3)).coefficient("sqrt2") == 3


def test_json_roundtrip():
    x = ExactScalar.of(Fraction(-5, 7)) + S2.scale(Fraction(2, 9))
    doc = x.to_json()
    assert doc == {"rat": "-5/7", "irr": {"sqrt2": "2/9"}}
    assert ExactScalar.from_json(doc) == x


@given(rationals, rationals, rationals, rationals)
def test_rationality_certificate(r1, c1, r2, c2):
    # is_rational is exactly "every generator coefficient vanishes"
    pi = IrrationalGenerator.known("pi").scalar()
    x = ExactScalar.of(r1) + S2.scale(c1) + pi.scale(c2)
    y = x - ExactScalar.of(r2) - S2.scale(c1)
    assert y.is_rational == (c2 == 0)
    assert all(c != 0 for _, c in y.irrational)


@given(rationals, rationals, st.integers(5, 40))
def test_floor_plus_frac_reconstructs(r, c, digits):
    x = ExactScalar.of(r) + S2.scale(c)
    whole = x.floor_part(digits)
    frac = x.mod_one_approx(digits)
    assert Decimal(0) <= frac < Decimal(1)
    with localcontext() as ctx:
        ctx.prec = 100
        err = abs((Decimal(whole) + frac) - x.to_decimal(digits + 5))
        assert err <= Decimal(10) ** (-digits + 1)
