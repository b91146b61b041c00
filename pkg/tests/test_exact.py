from fractions import Fraction
import math

import pytest
from hypothesis import given, strategies as st

from rkocp.exact import MixedRadicands, QuadNum, as_quad, square_free_part, to_float

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=40)
radicands = st.sampled_from([0, 2, 3, 5, 6, 15])


def quads(d):
    return st.builds(lambda a, b: QuadNum(a, b, d), fracs, fracs)


@pytest.mark.parametrize("n, expected", [(12, (2, 3)), (15, (1, 15)), (1, (1, 1)), (50, (5, 2)), (36, (6, 1))])
def test_square_free_part(n, expected):
    assert square_free_part(n) == expected


def test_sqrt_squares_back():
    for n in (2, 3, 5, 6, 15, 12, 45):
        r = QuadNum.sqrt(n)
        assert r * r == n
    assert QuadNum.sqrt(12) == 2 * QuadNum.sqrt(3)
    assert QuadNum.sqrt(16).is_rational()


def test_components_and_normal_form():
    x = QuadNum(Fraction(1, 2), Fraction(-3, 4), 6)
    assert (x.a, x.b, x.d) == (Fraction(1, 2), Fraction(-3, 4), 6)
    assert QuadNum(3, 0, 5).d == 0
    assert QuadNum(1, 2, 1) == 3


def test_mixed_radicands_raise():
    with pytest.raises(MixedRadicands):
        QuadNum.sqrt(2) + QuadNum.sqrt(3)


@pytest.mark.parametrize("text, a, b, d", [
    ("(16-sqrt6)/36", Fraction(16, 36), Fraction(-1, 36), 6),
    ("sqrt{15}/24", 0, Fraction(1, 24), 15),
    ("-sqrt(5)/12", 0, Fraction(-1, 12), 5),
    ("(10-7sqrt5)/60", Fraction(1, 6), Fraction(-7, 60), 5),
    ("5/36-sqrt{15}/30", Fraction(5, 36), Fraction(-1, 30), 15),
    ("1/4", Fraction(1, 4), 0, 0),
])
def test_parse(text, a, b, d):
    x = QuadNum.parse(text)
    assert (x.a, x.b, x.d) == (a, b, d)
    assert QuadNum.parse(str(x)) == x


def test_canonical_printing():
    assert str(QuadNum.parse("(16-sqrt6)/36")) == "(16-sqrt{6})/36"
    assert str(QuadNum.parse("sqrt15/24")) == "sqrt{15}/24"
    assert str(QuadNum(Fraction(3, 7))) == "3/7"


@given(radicands.flatmap(lambda d: st.tuples(quads(d), quads(d), quads(d))))
def test_field_axioms(xyz):
    x, y, z = xyz
    assert x + y == y + x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    if x:
        assert x * x.inverse() == 1
        assert (y / x) * x == y


@given(radicands.flatmap(quads))
def test_float_and_sign_agree(x):
    f = float(x)
    ref = float(x.a) + float(x.b) * math.sqrt(x.d)
    assert f == pytest.approx(ref, rel=1e-12, abs=1e-12)
    if abs(ref) > 1e-9:
        assert x.sign() == (1 if ref > 0 else -1)


@given(radicands.flatmap(quads))
def test_round_trip_text(x):
    assert QuadNum.parse(str(x)) == x


def test_to_float_avoids_cancellation():
    # 665857 - 470832 sqrt 2 = 1/(665857 + 470832 sqrt 2), roughly 7.5e-7
    x = QuadNum(665857, -470832, 2)
    assert x * x.conjugate() == 1
    assert to_float(x) == pytest.approx(1 / (665857 + 470832 * 2 ** 0.5), rel=1e-14)


def test_rational_hash_matches_fraction():
    assert hash(QuadNum(Fraction(2, 3))) == hash(Fraction(2, 3))
    assert as_quad("1/2") == Fraction(1, 2)
