import random
from fractions import Fraction

import pytest

from imapk.errors import (
    DivisionByZero,
    InvalidNumberField,
    MixedFieldContexts,
)
from imapk.scalar import NumberField, rational, scalar_from_text


def test_rational_arithmetic():
    assert rational(1, 3) + rational(1, 6) == rational(1, 2)
    assert rational(2, 4) == rational(1, 2)
    assert (rational(3) * rational(1, 3)).as_fraction() == 1


def test_sqrt2_defining_relation(sqrt2_field):
    a = sqrt2_field.alpha()
    assert a * a == rational(2)


def test_golden_inverse_identity(golden_field):
    a = golden_field.alpha()
    # (phi - 1) * phi = 1, i.e. phi - 1 is 1/phi
    assert (a - 1) * a == rational(1)
    assert 1 / a == a - 1


def test_compare_algebraic_with_rational(sqrt2_field):
    a = sqrt2_field.alpha()
    assert a.compare(Fraction(3, 2)) < 0
    assert a.compare(Fraction(7, 5)) > 0
    assert a.compare(a) == 0


def test_compare_total_order_consistency(golden_field):
    rng = random.Random(11)
    a = golden_field.alpha()
    samples = [
        rational(rng.randint(-4, 4), rng.randint(1, 5)) + rational(rng.randint(-2, 2)) * a
        for _ in range(12)
    ]
    for x in samples:
        for y in samples:
            c = x.compare(y)
            z = rational(rng.randint(-3, 3), rng.randint(1, 4))
            if c < 0:
                assert (x + z).compare(y + z) < 0
                pos = rational(rng.randint(1, 5))
                assert (x * pos).compare(y * pos) < 0
            elif c == 0:
                assert x == y


def test_field_axioms_by_comparison(golden_field):
    rng = random.Random(5)
    a = golden_field.alpha()
    vals = [
        rational(rng.randint(-3, 3), rng.randint(1, 4)) + rational(rng.randint(-2, 2)) * a
        for _ in range(6)
    ]
    for x in vals:
        for y in vals:
            for z in vals:
                assert ((x + y) + z).compare(x + (y + z)) == 0
                assert (x * (y + z)).compare(x * y + x * z) == 0


def test_division(sqrt2_field):
    a = sqrt2_field.alpha()
    assert (a / a) == rational(1)
    assert ((a + 1) * (a - 1)) == rational(1)  # a^2 - 1 = 1
    with pytest.raises(DivisionByZero):
        rational(1) / rational(0)
    with pytest.raises(DivisionByZero):
        a / (a - a)


def test_mixed_contexts_rejected(sqrt2_field, golden_field):
    with pytest.raises(MixedFieldContexts):
        sqrt2_field.alpha() + golden_field.alpha()


def test_rationals_embed(golden_field):
    a = golden_field.alpha()
    lifted = a - a + rational(5, 7)
    assert lifted.is_rational and lifted.as_fraction() == Fraction(5, 7)
    assert hash(lifted) == hash(rational(5, 7))


def test_floor(golden_field, sqrt2_field):
    phi = golden_field.alpha()
    assert phi.floor() == 1
    assert (phi * phi).floor() == 2
    assert sqrt2_field.alpha().floor() == 1
    assert rational(-7, 2).floor() == -4


def test_text_round_trip(sqrt2_field):
    a = sqrt2_field.alpha() + rational(1, 3)
    assert scalar_from_text(a.text()) == a
    assert scalar_from_text("17/4") == rational(17, 4)
    assert scalar_from_text("-3") == rational(-3)


def test_field_validation():
    with pytest.raises(InvalidNumberField):
        NumberField([1, -2, 1], (0, 2))  # (x-1)^2 not squarefree
    with pytest.raises(InvalidNumberField):
        NumberField([-1, 0, 1], (0, 2))  # rational roots
    with pytest.raises(InvalidNumberField):
        NumberField([-2, 0, 1], (-2, 2))  # two roots isolated
    with pytest.raises(InvalidNumberField):
        NumberField([-2, 1], (1, 3))  # degree 1
    with pytest.raises(InvalidNumberField):
        NumberField([-2] + [0] * 8 + [1], (1, 2))  # degree 9 over the cap
    # degree cap is configurable
    NumberField([-2] + [0] * 8 + [1], (1, 2), degree_cap=9)


def test_cubic_field_arithmetic():
    field = NumberField([-2, -2, 0, 1], (Fraction(17, 10), Fraction(9, 5)))
    c = field.alpha()
    assert c * c * c == 2 * c + 2
    assert c * c.inverse() == rational(1)
    assert c.compare(Fraction(9, 5)) < 0


def test_refinement_never_equates_distinct(sqrt2_field):
    a = sqrt2_field.alpha()
    close = rational(1414213562373095049, 10**18)
    assert a.compare(close) != 0
