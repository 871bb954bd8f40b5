import pytest

from qchar import sl2
from qchar.qcore import FactoredSum, Z1, expand, mono, poch

QW = (0, 10)


def parts_count(allowed, nmax):
    """Number of partitions of each n <= nmax into parts from `allowed`."""
    c = [1] + [0] * nmax
    for p in allowed:
        for n in range(p, nmax + 1):
            c[n] += c[n - p]
    return c


def z_collapsed(s, nmax):
    out = [0] * (nmax + 1)
    for (m1, m2, e), c in s.items():
        if e <= nmax:
            out[e] += c
    return out


def test_level_one_vacuum_is_rogers_ramanujan():
    # at z = 1 the level one vacuum subspace counts partitions into parts 1 or 4 mod 5
    nmax = 12
    s = sl2.enumerate_sl2(1, 0, nmax, 6)
    rr = parts_count([p for p in range(1, nmax + 1) if p % 5 in (1, 4)], nmax)
    assert z_collapsed(s, nmax) == rr


@pytest.mark.parametrize("k,l", [(k, l) for k in range(4) for l in range(k + 1)])
def test_three_backends_agree(k, l):
    a = sl2.chi_sl2(k, l, 6, QW, "enumerate")
    assert a.equals(sl2.chi_sl2(k, l, 6, QW, "fermionic"))
    assert a.equals(sl2.chi_sl2(k, l, 6, QW, "bosonic"))


def test_constant_term_and_z_coefficient():
    s = sl2.chi_sl2(2, 0, 4, QW, "fermionic")
    assert s.get(0, 0, 0) == 1
    for l in (1, 2):
        s = sl2.chi_sl2(2, l, 4, QW, "fermionic")
        assert [s.get(1, 0, e) for e in range(11)] == [1] * 11
    s = sl2.chi_sl2(2, 0, 4, QW, "fermionic")
    assert s.get(1, 0, 0) == 0 and s.get(1, 0, 1) == 1


@pytest.mark.parametrize("k,l", [(1, 1), (2, 1), (2, 2)])
@pytest.mark.parametrize("backend", sl2.BACKENDS)
def test_recursion(k, l, backend):
    assert sl2.verify_rec_sl2(k, l, 6, QW, backend)


def test_fiber_examples():
    assert sl2.fiber_sum(1, 1, (0,), 6).items() == [((0, 0, 0), 1)]
    assert sl2.verify_fiber_sums(1, 1, (1,), 8)
    assert sl2.verify_fiber_sums(2, 2, (0, 1), 8)


def test_phi_map():
    assert sl2.phi_map((1, 1), 2) == (0, 1)
    assert sl2.phi_map((1, 0, 1), 2) == (2, 0)
    with pytest.raises(ValueError):
        sl2.phi_map((2, 1), 2)


@pytest.mark.parametrize("n", range(4))
@pytest.mark.parametrize("eps", (0, 1))
def test_extremal(n, eps):
    k, l = 3, 1
    w = sl2.extremal_point(k, l, n, eps)
    assert sl2.is_admissible(w, k, l)
    assert (sl2.seq_weight(w), sl2.seq_degree(w)) == sl2.extremal_monomial(k, l, n, eps)


def test_gnk():
    assert sl2.gnk_closed(0, 3) == FactoredSum.one()
    for n in range(4):
        assert sl2.verify_gnk_recursion(n, 3)
        assert sl2.verify_qbinomial(n)
    assert sl2.gnk_direct(2, 2, 4, QW).equals(sl2.gnk_closed_series(2, 2, 4, QW))


def test_splitting_first_sum_is_product():
    s = sl2.splitting_sum_i(0, 0, 4, QW)
    closed = expand(FactoredSum.term(1, mono(), [poch(Z1(), 1, -1)]), sl2.ORIENT, 4, QW)
    # n + eps = 0 gives 1/(z)_inf, whose z^1 part is 1/(1-q)
    assert [s.get(1, 0, e) for e in range(5)] == [1] * 5
    assert s.get(0, 0, 0) == closed.get(0, 0, 0)
    assert sl2.verify_splitting_sums(0, 1, 2, 4, QW)


def test_bad_params():
    with pytest.raises(ValueError):
        sl2.Sl2Params(1, 2)
    with pytest.raises(ValueError):
        sl2.chi_sl2(1, 1, 4, QW, "nope")


def test_level_one_low_degrees():
    s = sl2.enumerate_sl2(1, 0, 4, 6)
    assert s.items() == [((0, 0, 0), 1), ((1, 0, 1), 1), ((1, 0, 2), 1), ((1, 0, 3), 1),
                         ((1, 0, 4), 1), ((2, 0, 4), 1)]
    assert sl2.enumerate_sl2(0, 0, 5).items() == [((0, 0, 0), 1)]
