from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qchar.qcore import (INFINITY, FactoredSum, LaurentPoly3, PochError, Q, Series2, SubstitutionError,
                         Z1, Z2, expand, mono, normalize_poch_ratios, poch, poch_signed,
                         rational_identity, substitute, to_laurent3)

WIN = (0, 8)

# bases with nonnegative z-degree so that expansion in (+,+) orientation is valid
base_st = st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 2)).filter(
    lambda t: t != (0, 0, 0)).map(lambda t: mono(*t))
factor_st = st.builds(poch, base_st, st.integers(0, 3), st.sampled_from((1, -1)))
term_st = st.builds(FactoredSum.term, st.integers(-3, 3),
                    st.builds(mono, st.integers(0, 2), st.integers(0, 2), st.integers(0, 3)),
                    st.lists(factor_st, max_size=3))
fs_st = st.lists(term_st, max_size=3).map(lambda ts: sum(ts, FactoredSum()))

laurent_st = st.dictionaries(st.tuples(*[st.integers(-2, 2)] * 3), st.integers(-4, 4),
                             max_size=5).map(LaurentPoly3)


def ex(x, zmax=4):
    return expand(x, (1, 1), zmax, WIN)


@settings(max_examples=60, deadline=None)
@given(fs_st, fs_st)
def test_expand_additive(a, b):
    assert ex(a + b).equals(ex(a) + ex(b))


@settings(max_examples=60, deadline=None)
@given(fs_st, fs_st)
def test_expand_multiplicative(a, b):
    assert ex(a * b).equals(ex(a) * ex(b))


@settings(max_examples=60, deadline=None)
@given(fs_st)
def test_self_difference_vanishes(a):
    assert not (a - a)
    assert ex(a - a).is_zero()


@settings(max_examples=60, deadline=None)
@given(fs_st, fs_st, fs_st)
def test_fs_ring_laws(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert ex(a * (b + c)).equals(ex(a * b + a * c))


@settings(max_examples=80, deadline=None)
@given(laurent_st, laurent_st, laurent_st)
def test_laurent_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()
    assert a * LaurentPoly3.one() == a


@settings(max_examples=40, deadline=None)
@given(base_st, st.integers(0, 4), st.integers(0, 4))
def test_poch_split(a, n, m):
    lhs = FactoredSum.term(1, mono(), [poch(a, n + m)])
    rhs = FactoredSum.term(1, mono(), [poch(a, n), poch(mono(a.m1, a.m2, a.e + n), m)])
    assert rational_identity(lhs, rhs)[0]


def test_q2_two_factorisations():
    a = FactoredSum.term(1, mono(), [poch(Q(1), 2)])
    b = FactoredSum.term(1, mono(), [poch(Q(1), 1), poch(Q(2), 1)])
    assert ex(a).equals(ex(b))
    assert to_laurent3(a) == LaurentPoly3({(0, 0, 0): 1, (0, 0, 1): -1, (0, 0, 2): -1, (0, 0, 3): 1})


def test_to_laurent3_examples():
    assert to_laurent3(FactoredSum.one()) == LaurentPoly3.one()
    assert to_laurent3(FactoredSum.term(1, mono(), [poch(Q(1), 1)])) == LaurentPoly3({(0, 0, 0): 1, (0, 0, 1): -1})
    x = FactoredSum.term(1, mono(), [poch(mono(-1, 0, 1), 1), poch(mono(1, 0, 1), 1)])
    assert to_laurent3(x) == LaurentPoly3({(0, 0, 0): 1, (-1, 0, 1): -1, (1, 0, 1): -1, (0, 0, 2): 1})


def test_inverse_q_poch_is_partition_series():
    s = ex(FactoredSum.term(1, mono(), [poch(Q(1), INFINITY, -1)]), 0)
    partitions = [1, 1, 2, 3, 5, 7, 11, 15, 22]
    assert [s.get(0, 0, e) for e in range(9)] == partitions


def test_geometric_in_z():
    s = ex(FactoredSum.term(1, mono(), [poch(Z1(), 1, -1)]))
    assert s.items() == [((m, 0, 0), 1) for m in range(5)]


def test_poch_signed_negative_length():
    f = poch_signed(Z1(), -2)
    assert f == poch(mono(1, 0, -2), 2, -1)
    assert poch_signed(Z1(), 3) == poch(Z1(), 3)


def test_poch_errors():
    with pytest.raises(PochError):
        poch(Q(0), INFINITY)
    with pytest.raises(PochError):
        poch(Z1(), -1)
    with pytest.raises(PochError):
        poch(Z1(), 1, 2)


def test_substitution_divergence():
    x = FactoredSum.term(1, mono(), [poch(Z1(1), INFINITY)])
    with pytest.raises(SubstitutionError):
        substitute(x, mono(0, 0, -1), Z2())


def test_substitute_q_shift():
    # f(z1) = 1/(1 - z1); f(q z1) has z1^m q^m coefficients
    x = FactoredSum.term(1, mono(), [poch(Z1(), 1, -1)])
    s = ex(substitute(x, Z1(1), Z2()))
    assert s.items() == [((m, 0, m), 1) for m in range(5)]


def test_normalize_ratio():
    x = FactoredSum.term(1, mono(), [poch(Z1(), INFINITY), poch(Z1(2), INFINITY, -1)])
    assert normalize_poch_ratios(x) == FactoredSum.term(1, mono(), [poch(Z1(), 2)])


def test_rational_identity_residual():
    x = Z1()
    lhs = FactoredSum.term(1, mono(), [poch(x, 1, -1)]) - FactoredSum.one()
    rhs = FactoredSum.term(1, x, [poch(x, 1, -1)])
    ok, res = rational_identity(lhs, rhs)
    assert ok and res.is_zero()
    ok, res = rational_identity(lhs, FactoredSum.one())
    assert not ok and not res.is_zero()


def test_series_window_and_json():
    s = Series2((1, 1), 2, (0, 3), {(0, 0, 0): 1, (1, 1, 3): Fraction(1, 2), (3, 0, 0): 5, (0, 0, 4): 1})
    assert s.items() == [((0, 0, 0), 1), ((1, 1, 3), Fraction(1, 2))]
    assert s.to_json() == Series2((1, 1), 2, (0, 3), dict(s.items())).to_json()
    t = s - Series2((1, 1), 2, (0, 3), {(0, 0, 0): 1})
    assert s.first_difference(t)[:3] == (0, 0, 0)
