import pytest

from qchar import toda
from qchar.qcore import FactoredSum, Q, expand, mono, poch, rational_identity

QW = (0, 10)


def test_I_small_cases():
    assert toda.I_dd(0, 0) == FactoredSum.one()
    hand = FactoredSum.term(1, mono(), [poch(Q(1), 1, -1), poch(mono(-1, 0, 1), 1, -1)])
    assert rational_identity(toda.I_dd(1, 0), hand)[0]
    assert toda.I_dd(-1, 2) == FactoredSum()


@pytest.mark.parametrize("d", [(0, 1), (1, 2), (3, 1)])
def test_I_symmetry(d):
    assert toda.verify_I_symmetry(*d)


def test_J_cancels_first_factors():
    j = toda.J(0, 0)
    hand = FactoredSum.term(1, mono(), [poch(mono(1, 0, 1), float("inf"), -1),
                                        poch(mono(0, 1, 1), float("inf"), -1),
                                        poch(mono(1, 1, 1), float("inf"), -1)])
    assert expand(j, (1, 1), 4, QW).equals(expand(hand, (1, 1), 4, QW))


@pytest.mark.parametrize("d", [(1, 0), (0, 1), (2, 2), (3, 1)])
def test_toda_recursion(d):
    assert toda.verify_toda(*d)


@pytest.mark.parametrize("d", [(1, 1), (2, 1), (2, 3)])
def test_Irec(d):
    assert toda.verify_Irec(*d)


def test_I_fermionic_depth_two_by_hand():
    # I_{1,0} = 1/((1-q)(1-q/z1)) expanded in 1/z1
    s = toda.I_fermionic(1, 0, 2, (0, 4))
    assert s.get(0, 0, 0) == 1 and s.get(-1, 0, 1) == 1 and s.get(-1, 0, 2) == 1 and s.get(-2, 0, 2) == 1


@pytest.mark.parametrize("d", [(1, 1), (2, 1), (0, 3)])
def test_I_fermionic(d):
    assert toda.I_fermionic(*d, 4, QW).equals(toda.I_expanded(*d, 4, QW))


def test_I_sum():
    assert toda.I_ddn(0, 0, 0) == FactoredSum.one()
    for d in ((1, 1), (2, 1), (2, 2)):
        assert toda.verify_I_sum(*d)


def test_gt_coefficients():
    assert toda.gt_coeffs(2, 0, 0)["a"] is None
    c = toda.gt_coeffs(0, 0, 0)["c"]
    assert c.coeff == 1 and not c.factors
    with pytest.raises(ValueError):
        toda.gt_coeffs(1, 1, 2)


@pytest.mark.parametrize("d", [(0, 0, 0), (1, 0, 0), (2, 2, 1), (3, 2, 2)])
def test_terms_and_bar_invariance(d):
    assert toda.verify_terms(*d)
    assert toda.verify_c_invariance(*d)


def test_numeric_relations_low_precision():
    reps = toda.verify_gt_representation(D=2, samples=1, precision=40)
    assert reps and all(r["pass"] for r in reps)


def test_whittaker_low_precision():
    reps = toda.verify_whittaker(D=2, samples=1, precision=40)
    assert {r["check"] for r in reps} == {"whittaker", "dual-whittaker", "pairing"}
    assert all(r["pass"] for r in reps)


def test_whittaker_unflipped_r_sign_fails():
    reps = toda.verify_whittaker(D=2, samples=1, precision=40, literal_r=True)
    assert not all(r["pass"] for r in reps)
