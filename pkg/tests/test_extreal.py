"""Convention-table arithmetic: every tag pair is pinned."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from condind import NEG_INF, POS_INF, ZERO, ext, ext_add, ext_mul, ext_sub

FIN = ext(Fraction(3, 2))
TAGS = (NEG_INF, ext(-2), ZERO, FIN, POS_INF)

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=12
)
extreals = st.one_of(
    st.just(POS_INF), st.just(NEG_INF), rationals.map(ext)
)


def test_sub_convention_table():
    assert ext_sub(POS_INF, POS_INF) == ZERO
    assert ext_sub(NEG_INF, NEG_INF) == ZERO
    assert ext_sub(POS_INF, NEG_INF) == POS_INF
    assert ext_sub(NEG_INF, POS_INF) == NEG_INF
    assert ext_sub(FIN, POS_INF) == NEG_INF
    assert ext_sub(FIN, NEG_INF) == POS_INF
    assert ext_sub(POS_INF, FIN) == POS_INF
    assert ext_sub(NEG_INF, FIN) == NEG_INF
    assert ext_sub(ext(Fraction(3, 2)), ext(Fraction(1, 2))) == ext(1)


def test_add_convention_table():
    assert ext_add(ext(Fraction(3, 2)), ext(Fraction(1, 2))) == ext(2)
    assert ext_add(FIN, POS_INF) == POS_INF
    assert ext_add(FIN, NEG_INF) == NEG_INF
    assert ext_add(POS_INF, POS_INF) == POS_INF
    assert ext_add(NEG_INF, NEG_INF) == NEG_INF
    assert ext_add(POS_INF, NEG_INF) == ZERO
    assert ext_add(NEG_INF, POS_INF) == ZERO


def test_mul_convention_table():
    assert ext_mul(ZERO, POS_INF) == ZERO
    assert ext_mul(ZERO, NEG_INF) == ZERO
    assert ext_mul(POS_INF, ZERO) == ZERO
    assert ext_mul(FIN, POS_INF) == POS_INF
    assert ext_mul(ext(-2), POS_INF) == NEG_INF
    assert ext_mul(ext(-2), NEG_INF) == POS_INF
    assert ext_mul(POS_INF, POS_INF) == POS_INF
    assert ext_mul(POS_INF, NEG_INF) == NEG_INF
    assert ext_mul(NEG_INF, NEG_INF) == POS_INF
    assert ext_mul(ext(Fraction(1, 2)), ext(Fraction(1, 3))) == ext(Fraction(1, 6))


def test_sub_is_add_of_negation_everywhere():
    for a in TAGS:
        for b in TAGS:
            assert ext_sub(a, b) == ext_add(a, -b)


@given(a=extreals, b=extreals)
def test_add_commutative(a, b):
    assert a + b == b + a


@given(a=extreals, b=extreals)
def test_mul_commutative(a, b):
    assert a * b == b * a


@given(a=extreals)
def test_identities(a):
    assert a + ZERO == a
    assert a * ext(1) == a


@given(alpha=rationals, a=extreals, b=extreals)
def test_distributes_over_difference_for_finite_scalars(alpha, a, b):
    s = ext(alpha)
    assert s * (a - b) == s * a - s * b


def test_distributes_exhaustive_tag_lattice():
    for s in (ext(-3), ext(Fraction(-1, 2)), ZERO, ext(Fraction(2, 7)), ext(5)):
        for a in TAGS:
            for b in TAGS:
                assert s * (a - b) == s * a - s * b


@given(a=extreals, b=extreals, c=extreals, d=extreals)
def test_addition_monotone(a, b, c, d):
    # x1 <= x2 and y1 <= y2 imply x1+y1 <= x2+y2 under the conventions
    x1, x2 = (a, b) if a <= b else (b, a)
    y1, y2 = (c, d) if c <= d else (d, c)
    assert x1 + y1 <= x2 + y2


@given(a=extreals, b=extreals)
def test_negation_distributes_over_sum(a, b):
    assert -(a + b) == (-a) + (-b)


def test_total_order():
    assert NEG_INF < ext(-1000) < ZERO < ext(1000) < POS_INF
    assert not POS_INF < POS_INF
    assert POS_INF <= POS_INF
    assert sorted([POS_INF, ZERO, NEG_INF, FIN]) == [NEG_INF, ZERO, FIN, POS_INF]


def test_parsing_and_rendering():
    assert ext("inf").is_pos_inf
    assert ext("-inf").is_neg_inf
    assert ext("3/4") == ext(Fraction(3, 4))
    assert ext("0.25") == ext(Fraction(1, 4))
    assert ext("-1.5") == ext(Fraction(-3, 2))
    assert str(ext(Fraction(3, 1))) == "3"
    assert str(ext(Fraction(-3, 4))) == "-3/4"
    assert str(POS_INF) == "inf"
    assert str(NEG_INF) == "-inf"


@given(a=extreals)
def test_string_round_trip(a):
    assert ext(str(a)) == a


def test_pos_neg_parts():
    assert ext(-3).pos_part() == ZERO
    assert ext(-3).neg_part() == ext(3)
    assert POS_INF.pos_part() == POS_INF
    assert POS_INF.neg_part() == ZERO
    assert NEG_INF.neg_part() == POS_INF
    x = ext(Fraction(5, 2))
    assert x.pos_part() - x.neg_part() == x


def test_immutability_and_hash():
    a = ext(1)
    with pytest.raises(AttributeError):
        a.kind = 2
    assert len({ext(1), ext("1"), ext(Fraction(2, 2))}) == 1
