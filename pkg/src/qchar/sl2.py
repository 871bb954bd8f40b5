"""Principal subspaces of affine sl2: enumeration, fermionic and bosonic forms."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

from .qcore import (
    INFINITY, ONE, FactoredSum, Q, Series2, Z1, expand, mono, poch, rational_identity, substitute,
)

ORIENT = (1, 1)


@dataclass(frozen=True)
class Sl2Params:
    k: int
    l: int

    def __post_init__(self):
        if not 0 <= self.l <= self.k:
            raise ValueError(f"need 0 <= l <= k, got k={self.k}, l={self.l}")


def _qpoch(n: int, exponent: int = -1):
    return poch(Q(1), n, exponent)


# ---------------------------------------------------------------------------
# enumeration oracle
# ---------------------------------------------------------------------------

def admissible_sl2(k: int, l: int, dmax: int, mmax: int = None) -> Iterator[Tuple[int, ...]]:
    """Sequences in P^k_l with degree sum j*a_j <= dmax (and weight <= mmax)."""
    if mmax is None:
        mmax = l + dmax

    def rec(j, prev, deg_left, w_left, acc):
        if j > 0 and j > deg_left:
            # any further nonzero entry would cost at least j
            yield tuple(_trim(acc))
            return
        bound = min(l if j == 0 else k - prev, w_left)
        if j:
            bound = min(bound, deg_left // j)
        for v in range(bound + 1):
            yield from rec(j + 1, v, deg_left - j * v, w_left - v, acc + [v])

    yield from rec(0, 0, dmax, mmax, [])


def seq_weight(a: Sequence[int]) -> int:
    return sum(a)


def seq_degree(a: Sequence[int]) -> int:
    return sum(j * x for j, x in enumerate(a))


def is_admissible(a: Sequence[int], k: int, l: int) -> bool:
    if any(x < 0 for x in a):
        return False
    if a and a[0] > l:
        return False
    return all(a[j] + a[j + 1] <= k for j in range(len(a) - 1))


def enumerate_sl2(k: int, l: int, dmax: int, zmax: int = None) -> Series2:
    """chi^k_l truncated to q-degree <= dmax, by listing the monomial basis."""
    Sl2Params(k, l)
    if zmax is None:
        zmax = l + dmax
    acc: Dict = {}
    for a in admissible_sl2(k, l, dmax, zmax):
        key = (seq_weight(a), 0, seq_degree(a))
        acc[key] = acc.get(key, 0) + 1
    return Series2(ORIENT, zmax, (0, dmax), acc)


# ---------------------------------------------------------------------------
# fermionic and bosonic closed forms
# ---------------------------------------------------------------------------

def ff_exponent(m: Sequence[int], l: int) -> int:
    k = len(m)
    quad = sum(min(i, j) * m[i - 1] * m[j - 1] for i in range(1, k + 1) for j in range(1, k + 1))
    return quad - sum(min(i, l) * m[i - 1] for i in range(1, k + 1))


def ff_term(m: Sequence[int], l: int) -> FactoredSum:
    """The summand of the fermionic sum labelled by (m_1, ..., m_k)."""
    zdeg = sum(i * x for i, x in enumerate(m, 1))
    return FactoredSum.term(1, mono(zdeg, 0, ff_exponent(m, l)), [_qpoch(x) for x in m])


def m_vectors(k: int, zmax: int) -> Iterator[Tuple[int, ...]]:
    """All (m_1..m_k) >= 0 with sum i*m_i <= zmax."""
    def rec(i, left, acc):
        if i > k:
            yield tuple(acc)
            return
        for x in range(left // i + 1):
            yield from rec(i + 1, left - i * x, acc + [x])
    yield from rec(1, zmax, [])


def fermionic_sl2_fs(k: int, l: int, zmax: int) -> FactoredSum:
    if k == 0:
        return FactoredSum.one()
    return FactoredSum([t for m in m_vectors(k, zmax) for t in ff_term(m, l)])


def fermionic_sl2(k: int, l: int, zmax: int, qwindow) -> Series2:
    Sl2Params(k, l)
    return expand(fermionic_sl2_fs(k, l, zmax), ORIENT, zmax, qwindow)


def bf_terms(k: int, l: int, n: int) -> FactoredSum:
    """The two n-th summands of the bosonic sum."""
    first = FactoredSum.term(1, mono(n * k, 0, n * n * k - n * l), [
        poch(Z1(2 * n), INFINITY, -1), _qpoch(n), poch(mono(-1, 0, 1 - 2 * n), n, -1)])
    second = FactoredSum.term(1, mono(n * k + l, 0, n * n * k + n * l), [
        poch(Z1(2 * n + 1), INFINITY, -1), _qpoch(n), poch(mono(-1, 0, -2 * n), n + 1, -1)])
    return first + second


def bosonic_sl2_fs(k: int, l: int, zmax: int) -> FactoredSum:
    if k == 0:
        return FactoredSum.one()
    # the n-th summands have oriented z-degree >= n, so n <= zmax suffices
    out = FactoredSum()
    for n in range(zmax + 1):
        out = out + bf_terms(k, l, n)
    return out


def bosonic_sl2(k: int, l: int, zmax: int, qwindow) -> Series2:
    Sl2Params(k, l)
    return expand(bosonic_sl2_fs(k, l, zmax), ORIENT, zmax, qwindow)


BACKENDS = ("enumerate", "fermionic", "bosonic")


def chi_sl2(k: int, l: int, zmax: int, qwindow, backend: str = "fermionic") -> Series2:
    if backend == "enumerate":
        if qwindow[0] > 0:
            raise ValueError("the enumerator needs qlo <= 0")
        return enumerate_sl2(k, l, qwindow[1], zmax).restrict(zmax, qwindow)
    if backend == "fermionic":
        return fermionic_sl2(k, l, zmax, qwindow)
    if backend == "bosonic":
        return bosonic_sl2(k, l, zmax, qwindow)
    raise ValueError(f"unknown backend {backend!r}")


def q_shift_z(s: Series2, s1: int, s2: int = 0) -> Series2:
    """f(z1, z2) -> f(q^s1 z1, q^s2 z2) for a q-power series (no terms below qlo); s1, s2 >= 0."""
    if s1 < 0 or s2 < 0:
        raise ValueError("only nonnegative shifts keep the window exact")
    acc = {(a, b, e + s1 * a + s2 * b): c for (a, b, e), c in s.terms.items()}
    return Series2(s.orientation, s.zmax, s.qwindow, acc)


def z_power(s: Series2, a: int, b: int = 0) -> Series2:
    acc = {(m1 + a, m2 + b, e): c for (m1, m2, e), c in s.terms.items()}
    return Series2(s.orientation, s.zmax, s.qwindow, acc)


def verify_rec_sl2(k: int, l: int, zmax: int, qwindow, backend: str = "fermionic") -> bool:
    """chi_l(z) = chi_{l-1}(z) + z^l chi_{k-l}(qz) on the window."""
    if l < 1:
        raise ValueError("the recursion needs l >= 1")
    lhs = chi_sl2(k, l, zmax, qwindow, backend)
    prev = chi_sl2(k, l - 1, zmax, qwindow, backend)
    if backend == "enumerate":
        other = q_shift_z(chi_sl2(k, k - l, zmax, qwindow, backend), 1)
    else:
        fs = fermionic_sl2_fs if backend == "fermionic" else bosonic_sl2_fs
        other = expand(substitute(fs(k, k - l, zmax), Z1(1), mono(0, 1, 0)), ORIENT, zmax, qwindow)
    rhs = prev + z_power(other, l)
    return lhs.equals(rhs)


# ---------------------------------------------------------------------------
# the map Phi^k and its fibres
# ---------------------------------------------------------------------------

def _trim(a: Sequence[int]) -> List[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def phi_map(a: Sequence[int], k: int) -> Tuple[int, ...]:
    """Phi^k(a) for a in P^k_k; the first window with a_i + a_{i+1} = k is removed."""
    a = _trim(a)
    if not is_admissible(a, k, k):
        raise ValueError(f"{tuple(a)} is not in P^{k}_{k}")
    out = [0] * k
    kk = k
    while kk > 0:
        ext = a + [0]
        i = next((i for i in range(len(a)) if ext[i] + ext[i + 1] == kk), None)
        if i is None:
            kk -= 1
            continue
        a = _trim(a[:i] + a[i + 2:])
        out[kk - 1] += 1
    return tuple(out)


def fiber_sum(k: int, l: int, mvec: Sequence[int], dmax: int) -> Series2:
    zmax = sum(i * x for i, x in enumerate(mvec, 1))
    acc: Dict = {}
    for a in admissible_sl2(k, l, dmax, zmax):
        if phi_map(a, k) == tuple(mvec):
            key = (seq_weight(a), 0, seq_degree(a))
            acc[key] = acc.get(key, 0) + 1
    return Series2(ORIENT, zmax, (0, dmax), acc)


def verify_fiber_sums(k: int, l: int, mvec: Sequence[int], dmax: int) -> bool:
    zmax = sum(i * x for i, x in enumerate(mvec, 1))
    lhs = fiber_sum(k, l, mvec, dmax)
    rhs = expand(ff_term(mvec, l), ORIENT, zmax, (0, dmax))
    return lhs.equals(rhs)


def extremal_point(k: int, l: int, n: int, eps: int) -> Tuple[int, ...]:
    """w_{2n+eps} = (l, k-l, l, k-l, ...) with 2n entries, plus a trailing l if eps = 1."""
    w = [l if j % 2 == 0 else k - l for j in range(2 * n)]
    if eps:
        w.append(l)
    return tuple(w)


def extremal_monomial(k: int, l: int, n: int, eps: int) -> Tuple[int, int]:
    """(z-exponent, q-exponent) predicted for w_{2n+eps}."""
    if eps == 0:
        return n * k, n * n * k - n * l
    return n * k + l, n * n * k + n * l


# ---------------------------------------------------------------------------
# g_{n,k} and its recursion
# ---------------------------------------------------------------------------

def gnk_closed(n: int, k: int) -> FactoredSum:
    return FactoredSum.term(1, mono(n * k, 0, n * n * k), [_qpoch(n), poch(mono(-1, 0, 1 - 2 * n), n, -1)])


def verify_gnk_recursion(n: int, k: int) -> bool:
    rhs = FactoredSum()
    for i in range(n + 1):
        inner = substitute(gnk_closed(n - i, k - 1), Z1(2 * i), mono(0, 1, 0))
        rhs = rhs + inner.scale(mono(i * k, 0, i * i * k)).with_factors([_qpoch(i)])
    ok, _ = rational_identity(gnk_closed(n, k), rhs)
    return ok


def verify_qbinomial(n: int) -> bool:
    lhs = FactoredSum()
    for i in range(n + 1):
        e2 = i * (i + 1) - 2 * i * n  # twice the q-exponent
        lhs = lhs + FactoredSum.term((-1) ** i, mono(0, 0, e2 // 2), [
            _qpoch(n, 1), _qpoch(i), _qpoch(n - i), poch(Z1(n), i, 1)])
    ok, _ = rational_identity(lhs, FactoredSum.monomial(mono(n, 0, n * n)))
    return ok


GNK_ORIENT = (-1, 1)


def gnk_direct(n: int, k: int, zmax: int, qwindow) -> Series2:
    """z^{-nk} g_{n,k}(z) from its defining sum, as a series in 1/z.

    A unit sitting at j lowers the exponent of z^{-nk} g by j, so only
    j <= zmax can reach the window (equivalently j <= nk - zlo before the shift).
    """
    jmax = zmax
    acc: Dict = {}
    for occ in _compositions(n, jmax + 1):
        zexp = sum((k - i) * x for i, x in occ.items()) - n * k
        if -zexp > zmax:
            continue
        qexp = sum(x * y * min(k - i, k - j) for i, x in occ.items() for j, y in occ.items())
        fs = FactoredSum.term(1, mono(zexp, 0, qexp), [_qpoch(x) for x in occ.values()])
        s = expand(fs, GNK_ORIENT, zmax, qwindow)
        for key, c in s.terms.items():
            acc[key] = acc.get(key, 0) + c
    return Series2(GNK_ORIENT, zmax, qwindow, acc)


def _compositions(n: int, slots: int) -> Iterator[Dict[int, int]]:
    """Ways to place n units into positions 0..slots-1, as sparse dicts."""
    def rec(start, left, acc):
        if left == 0:
            yield dict(acc)
            return
        for pos in range(start, slots):
            for x in range(1, left + 1):
                acc[pos] = x
                yield from rec(pos + 1, left - x, acc)
                del acc[pos]
    yield from rec(0, n, {})


def gnk_closed_series(n: int, k: int, zmax: int, qwindow) -> Series2:
    return expand(gnk_closed(n, k).scale(mono(-n * k, 0, 0)), GNK_ORIENT, zmax, qwindow)


# ---------------------------------------------------------------------------
# the three splitting sums
# ---------------------------------------------------------------------------

def splitting_sum_i(n: int, eps: int, zmax: int, qwindow) -> Series2:
    shift = 2 * (n + eps) - 1
    fs = FactoredSum()
    for m in m_vectors(zmax, zmax):
        zdeg = sum(i * x for i, x in enumerate(m, 1))
        quad = sum(min(i, j) * m[i - 1] * m[j - 1] for i in range(1, len(m) + 1) for j in range(1, len(m) + 1))
        fs = fs + FactoredSum.term(1, mono(zdeg, 0, quad + shift * zdeg), [_qpoch(x) for x in m])
    return expand(fs, ORIENT, zmax, qwindow)


def verify_splitting_sums(n: int, eps: int, l: int, zmax: int, qwindow) -> bool:
    closed_i = FactoredSum.term(1, ONE, [poch(Z1(2 * (n + eps)), INFINITY, -1)])
    if not splitting_sum_i(n, eps, zmax, qwindow).equals(expand(closed_i, ORIENT, zmax, qwindow)):
        return False
    if eps == 0:
        return True  # the sum (ii) runs over a single point and equals 1
    # first part: sum over i >= 0 of q^{(l-i)(2n+1)-(l-i)} z^{l-i} / (q)_1, as a series in 1/z (times z^-l)
    part1 = {}
    for i in range(zmax + 1):
        part1[(-i, 0, (l - i) * 2 * n)] = 1
    s1 = expand(FactoredSum.term(1, ONE, [_qpoch(1)]) * _as_fs(part1), (-1, 1), zmax, qwindow)
    c1 = FactoredSum.term(1, mono(0, 0, 2 * n * l), [_qpoch(1), poch(mono(-1, 0, -2 * n), 1, -1)])
    if not s1.equals(expand(c1, (-1, 1), zmax, qwindow)):
        return False
    # second part: sum over i >= 1 of q^{(l+i)(2n+1)-l} z^{l+i} / (q)_1, times z^-l
    part2 = {}
    for i in range(1, zmax + 1):
        part2[(i, 0, (l + i) * (2 * n + 1) - l)] = 1
    s2 = expand(FactoredSum.term(1, ONE, [_qpoch(1)]) * _as_fs(part2), ORIENT, zmax, qwindow)
    c2 = FactoredSum.term(1, mono(1, 0, 2 * n * l + 2 * n + 1), [_qpoch(1), poch(Z1(2 * n + 1), 1, -1)])
    if not s2.equals(expand(c2, ORIENT, zmax, qwindow)):
        return False
    total = FactoredSum.term(1, mono(l, 0, 2 * n * l), [
        poch(mono(-1, 0, -2 * n), 1, -1), poch(Z1(2 * n + 1), 1, -1)])
    ok, _ = rational_identity(c1.scale(mono(l, 0, 0)) + c2.scale(mono(l, 0, 0)), total)
    return ok


def _as_fs(d: Dict) -> FactoredSum:
    return FactoredSum([t for k, c in d.items() for t in FactoredSum.monomial(mono(*k), c)])
