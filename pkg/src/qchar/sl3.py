"""Characters of principal subspaces of affine sl3.

Covers the small principal subspaces X^k_{l1,l2}, the bosonic series chi_B,
phi_B and psi_B, their recursions and boundary conditions, the fermionic
formula, and the six-term formulas for k1 = k2.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .qcore import (
    IDENTITY_IMAGES, INFINITY, ONE, FactoredSum, FactoredTerm, QCoreError, Q, Series2, Z1, Z2,
    ZqMonomial, compose_images, expand, fs_min_degree, fs_mul, fs_sum, map_elem_form, min_degree, mono,
    normalize_poch_ratios, poch, poch_signed, rational_identity, substitute, substitute_monomial,
    term_elem_form, PochFactor,
    cleared_numerator,
)
from .toda import Jbar, J

ORIENT = (1, 1)


class TruncationError(QCoreError):
    pass


# ---------------------------------------------------------------------------
# parameters and regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModuleParams:
    k1: int
    k2: int
    l1: int
    l2: int
    l3: int

    def shifted(self, **kw) -> "ModuleParams":
        d = dict(k1=self.k1, k2=self.k2, l1=self.l1, l2=self.l2, l3=self.l3)
        d.update(kw)
        return ModuleParams(**d)


def _box(p: ModuleParams) -> bool:
    return 0 <= p.l1 <= p.k1 and 0 <= p.l2 <= p.k2


def in_P_U(p: ModuleParams) -> bool:
    return _box(p) and 0 <= p.l3 <= min(p.l1, p.l2)


def in_P_V(p: ModuleParams) -> bool:
    return _box(p) and p.l1 <= p.l3 <= min(p.l1 + p.l2, p.k1)


def _excess(p: ModuleParams) -> int:
    return p.l1 + p.l2 - p.l3


def in_R_U(p: ModuleParams) -> bool:
    return in_P_U(p) and p.k1 <= _excess(p) <= p.k2


def in_R_V(p: ModuleParams) -> bool:
    return in_P_V(p) and 0 <= _excess(p) <= p.k2 - p.k1


def in_Rbar_U(p: ModuleParams) -> bool:
    return in_P_U(p) and 0 <= _excess(p) <= p.k2


def in_Rtilde_U(p: ModuleParams) -> bool:
    return in_P_U(p) and p.k1 - 1 <= _excess(p) <= p.k2


REGIONS = {
    "P_U": in_P_U, "P_V": in_P_V, "R_U": in_R_U, "R_V": in_R_V,
    "Rbar_U": in_Rbar_U, "Rtilde_U": in_Rtilde_U,
}


def sweep_params(k1: int, k2: int, lo: int = -1, hi: Optional[int] = None) -> Iterator[ModuleParams]:
    hi = max(k1, k2) + 1 if hi is None else hi
    for l1 in range(lo, hi + 1):
        for l2 in range(lo, hi + 1):
            for l3 in range(lo, 2 * hi + 1):
                yield ModuleParams(k1, k2, l1, l2, l3)


def verify_region_inclusions(kmax: int = 4) -> bool:
    for k2 in range(kmax + 1):
        for k1 in range(k2 + 1):
            for p in sweep_params(k1, k2):
                chain = [in_R_U(p), in_Rtilde_U(p), in_Rbar_U(p), in_P_U(p)]
                if any(a and not b for a, b in zip(chain, chain[1:])):
                    return False
                if in_R_V(p) and not in_P_V(p):
                    return False
    return True


# ---------------------------------------------------------------------------
# the monomial basis of X^k_{l1,l2}
# ---------------------------------------------------------------------------

def admissible_X(k: int, l1: int, l2: int, zmax: int, qmax: int) -> Iterator[Tuple[int, ...]]:
    """Sequences (a_0, a_1, ...) of the X basis with z-degree <= zmax, q-degree <= qmax.

    a_{2t} stands for e21[-t] (weight z1 q^t), a_{2t+1} for e31[-t] (weight z1 z2 q^t).
    """
    last = 2 * qmax + 1

    def rec(j, p2, p1, zleft, qleft, acc):
        if j > last:
            yield tuple(acc)
            return
        zc = 1 if j % 2 == 0 else 2
        qc = j // 2
        bound = k - p2 - p1
        if j == 0:
            bound = min(bound, l1)
        elif j == 1:
            bound = min(bound, l1 + l2 - p1)
        bound = min(bound, zleft // zc)
        if qc:
            bound = min(bound, qleft // qc)
        for v in range(max(bound, -1) + 1):
            yield from rec(j + 1, p1, v, zleft - zc * v, qleft - qc * v, acc + [v])

    if l1 < 0 or l2 < 0 or l1 + l2 > k:
        return
    yield from rec(0, 0, 0, zmax, qmax, [])


def enumerate_X(k: int, l1: int, l2: int, zmax: int, qwindow=(0, 10)) -> Series2:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if l1 < 0 or l2 < 0 or l1 + l2 > k:
        if l1 == -1 or l2 == -1:
            return Series2(ORIENT, zmax, qwindow)
        raise ValueError(f"need 0 <= l1, l2 and l1 + l2 <= k, got k={k}, l1={l1}, l2={l2}")
    acc: Dict = {}
    for a in admissible_X(k, l1, l2, zmax, max(qwindow[1], 0)):
        m1 = sum(a)
        m2 = sum(a[1::2])
        e = sum((j // 2) * x for j, x in enumerate(a))
        acc[(m1, m2, e)] = acc.get((m1, m2, e), 0) + 1
    return Series2(ORIENT, zmax, qwindow, acc)


# ---------------------------------------------------------------------------
# the tables p, a, d and chi_B
# ---------------------------------------------------------------------------

def Q2(m: int, n: int) -> int:
    return m * m + n * n - m * n


def p_table(k: int, l1: int, l2: int, m: int, n: int, s: int) -> ZqMonomial:
    e1, e2 = [(0, 0), (l1, 0), (l1 + l2, l2), (l1 + l2, l1 + l2), (l1, l1 + l2), (0, l2)][s]
    return mono(k * m + e1, k * n + e2, 0)


def a_table(k: int, l1: int, l2: int, m: int, n: int, s: int) -> int:
    lin = [
        -m * l1 - n * l2,
        (m - n) * l1 - n * l2,
        (m - n) * l1 + m * l2,
        n * l1 + m * l2,
        n * l1 + (n - m) * l2,
        -m * l1 + (n - m) * l2,
    ][s]
    return k * Q2(m, n) + lin


def d_table(m: int, n: int, s: int) -> List[Tuple[ZqMonomial, object]]:
    """The Pochhammer factors (base, length) whose product is d(m, n, s)."""
    z1 = lambda e: mono(1, 0, e)
    z1i = lambda e: mono(-1, 0, e)
    z12 = lambda e: mono(1, 1, e)
    z12i = lambda e: mono(-1, -1, e)
    z2 = lambda e: mono(0, 1, e)
    z2i = lambda e: mono(0, -1, e)
    inf = INFINITY
    qn = (Q(1), n)
    qmn = (Q(1), m - n) if s < 4 else (Q(1), m - n - 1)
    if s == 0:
        rest = [(z1(2 * m - n), inf), (z1i(-2 * m + n + 1), m - n), (z12(m + n), inf),
                (z12i(-m - n + 1), n), (z2(2 * n - m), m - n), (z2i(-2 * n + m + 1), n)]
    elif s == 1:
        rest = [(z1(2 * m - n + 1), inf), (z1i(-2 * m + n), m - n + 1), (z12(m + n), inf),
                (z12i(-m - n + 1), n), (z2(2 * n - m), m - n), (z2i(-2 * n + m + 1), n)]
    elif s == 2:
        rest = [(z1(2 * m - n + 1), inf), (z1i(-2 * m + n), m - n), (z12(m + n + 1), inf),
                (z12i(-m - n), n + 1), (z2(2 * n - m), m - n + 1), (z2i(-2 * n + m + 1), n)]
    elif s == 3:
        rest = [(z1(2 * m - n + 1), inf), (z1i(-2 * m + n), m - n), (z12(m + n + 1), inf),
                (z12i(-m - n), n + 1), (z2(2 * n - m + 1), m - n), (z2i(-2 * n + m), n + 1)]
    elif s == 4:
        rest = [(z1(2 * m - n), inf), (z1i(-2 * m + n + 1), m - n), (z12(m + n + 1), inf),
                (z12i(-m - n), n + 1), (z2(2 * n - m + 1), m - n), (z2i(-2 * n + m), n + 1)]
    elif s == 5:
        rest = [(z1(2 * m - n), inf), (z1i(-2 * m + n + 1), m - n), (z12(m + n), inf),
                (z12i(-m - n + 1), n), (z2(2 * n - m + 1), m - n), (z2i(-2 * n + m), n + 1)]
    else:
        raise ValueError(f"s must be in 0..5, got {s}")
    return [qn, qmn] + rest


def d_factors(m: int, n: int, s: int, exponent: int = -1):
    return [poch_signed(b, L, exponent) for b, L in d_table(m, n, s)]


def chi_term(k: int, l1: int, l2: int, m: int, n: int, s: int) -> FactoredSum:
    """The (m, n, s) summand of chi_B with table parameters (l1, l2)."""
    if s >= 4 and m == n:
        # 1/(q)_{-1} = (1)_1 = 0
        return FactoredSum.zero()
    mon = p_table(k, l1, l2, m, n, s) * Q(a_table(k, l1, l2, m, n, s))
    return FactoredSum.term(1, mon, d_factors(m, n, s))


def _term_degree(x: FactoredSum, orientation) -> Optional[int]:
    vals = [d for d in (min_degree(t, orientation) for t in x.terms) if d is not None]
    return min(vals) if vals else None


def _chi_degree(k, l1, l2, m, n, s, images, orientation):
    t = chi_term(k, l1, l2, m, n, s)
    return _term_degree(substitute(t, *images), orientation)


@lru_cache(maxsize=None)
def _chi_slopes(k, l1, l2, images, orientation):
    """Affine fit D(m, n, s) = c + alpha m + beta n of the minimal z-degree."""
    out = []
    for s in range(6):
        m0 = 1 if s >= 4 else 0
        D = lambda m, n: _chi_degree(k, l1, l2, m, n, s, images, orientation)
        c0 = D(m0, 0)
        alpha = D(m0 + 1, 0) - c0
        beta = D(m0 + 1, 1) - c0 - alpha
        for (m, n) in [(m0 + 3, 1), (m0 + 4, 3), (m0 + 2, 2)]:
            if D(m, n) != c0 + alpha * (m - m0) + beta * n:
                raise TruncationError(f"minimal degree of chi_B terms is not affine (s={s})")
        sigma = alpha + min(0, beta)
        if sigma <= 0:
            raise TruncationError(f"chi_B terms do not grow in z-degree under {images} (s={s})")
        out.append((m0, c0, sigma))
    return tuple(out)


def chi_min_degree(k, l1, l2, images=IDENTITY_IMAGES, orientation=ORIENT) -> int:
    """Lower bound for the z-degree of every term of substituted chi_B."""
    return min(c0 for _, c0, _ in _chi_slopes(k, l1, l2, tuple(images), tuple(orientation)))


@lru_cache(maxsize=None)
def chi_B_tables(k: int, l1: int, l2: int, budget: int, images=IDENTITY_IMAGES,
                 orientation=ORIENT) -> FactoredSum:
    """Substituted chi_B (tables at (l1, l2)) keeping terms of z-degree <= budget."""
    images, orientation = tuple(images), tuple(orientation)
    slopes = _chi_slopes(k, l1, l2, images, orientation)
    mstop = 0
    for m0, c0, sigma in slopes:
        if budget >= c0:
            mstop = max(mstop, m0 + (budget - c0) // sigma + 1)
    terms = []
    for m in range(mstop):
        for n in range(m + 1):
            for s in range(6):
                t = substitute(chi_term(k, l1, l2, m, n, s), *images)
                d = _term_degree(t, orientation)
                if d is not None and d <= budget:
                    terms.extend(t.terms)
    return FactoredSum(terms)


def chi_B(k: int, A: int, B: int, budget: int, images=IDENTITY_IMAGES) -> FactoredSum:
    """(chi_B)^k_{A,B}: the definition is written with subscripts (l1, l1 + l2)."""
    return chi_B_tables(k, A, B - A, budget, tuple(images))


def chi_series(k: int, l1: int, l2: int, zmax: int, qwindow=(0, 10)) -> Series2:
    """Bosonic character of X^k_{l1,l2}, i.e. chi_B with tables at (l1, l2)."""
    return expand(chi_B_tables(k, l1, l2, zmax), ORIENT, zmax, qwindow)


def verify_sr(k: int, l1: int, l2: int, zmax: int, qwindow=(0, 10), backend: str = "bosonic",
              literal: bool = False) -> bool:
    """Check the basis recursion for chi_{l1,l2}.

    Splitting off a_0 = l1 gives
        chi_{l1,l2} = chi_{l1-1,l2+1} + z1^{l1} chi_{l2,k-l1-l2}(z1 z2, q/z2).
    literal=True checks chi_{l1-1,l2} + z1^{l1} chi_{l2,k-l1-l2}(z1, q z2) instead,
    which does not hold.
    """
    if literal:
        dl2, images, keymap = 0, (Z1(), mono(0, 1, 1)), lambda a, b, e: (a + l1, b, e + b)
    else:
        dl2, images, keymap = 1, (mono(1, 1, 0), mono(0, -1, 1)), lambda a, b, e: (a + l1, a - b, e + b)
    if backend == "enumerator":
        lhs = enumerate_X(k, l1, l2, zmax, qwindow)
        r1 = enumerate_X(k, l1 - 1, l2 + dl2, zmax, qwindow)
        inner = enumerate_X(k, l2, k - l1 - l2, 2 * zmax, (0, qwindow[1]))
        acc: Dict = {}
        for key, c in inner.items():
            key = keymap(*key)
            acc[key] = acc.get(key, 0) + c
        return lhs.equals(r1 + Series2(ORIENT, zmax, qwindow, acc))
    if backend != "bosonic":
        raise ValueError(f"unknown backend {backend!r}")
    lhs = chi_B_tables(k, l1, l2, zmax)
    r1 = chi_B_tables(k, l1 - 1, l2 + dl2, zmax) if l1 > 0 else FactoredSum()
    r2 = chi_B_tables(k, l2, k - l1 - l2, zmax - l1, images).scale(mono(l1, 0, 0))
    return expand(lhs - r1 - r2, ORIENT, zmax, qwindow).is_zero()


# ---------------------------------------------------------------------------
# phi_B and psi_B
# ---------------------------------------------------------------------------

CHI_READINGS = ("definition", "direct")


def chi_tables_for(A: int, B: int, reading: str = "definition") -> Tuple[int, int]:
    """Table parameters of (chi_B)_{A,B}."""
    if reading == "definition":
        return A, B - A
    if reading == "direct":
        return A, B
    raise ValueError(f"unknown chi_B reading {reading!r}")


def _prefactors(k2: int, l2: int, i: int) -> Tuple[FactoredSum, FactoredSum]:
    p1 = FactoredSum.term(1, mono(0, i * k2, i * i * k2 - i * l2), [
        poch(Q(1), i, -1), poch(mono(0, 1, 2 * i), INFINITY, -1),
        poch(mono(0, -1, -2 * i + 1), i, -1)])
    p2 = FactoredSum.term(1, mono(0, i * k2 + l2, i * i * k2 + i * l2), [
        poch(Q(1), i, -1), poch(mono(0, 1, 2 * i + 1), INFINITY, -1),
        poch(mono(0, -1, -2 * i), i + 1, -1)])
    return p1, p2


def _inner_images(kind: str, i: int):
    if kind == "phi":
        return (mono(1, 1, i - 1), mono(0, -1, -2 * i + 1)), (mono(1, 0, -i - 1), mono(0, 1, 2 * i + 1))
    return (mono(1, 0, -i), mono(0, 1, 2 * i)), (mono(1, 1, i), mono(0, -1, -2 * i))


def _B_series_fs(kind: str, p: ModuleParams, zmax: int, images=IDENTITY_IMAGES,
                 buffer: int = 2, reading: str = "definition") -> FactoredSum:
    if p.k2 < 1:
        raise ValueError("k2 >= 1 is required for the outer sum")
    A, B = (p.l3, p.l1) if kind == "phi" else (p.l1, p.l3)
    t1, t2 = chi_tables_for(A, B, reading)
    images = tuple(images)

    def summands(i):
        for pre, inner in zip(_prefactors(p.k2, p.l2, i), _inner_images(kind, i)):
            pre = substitute(pre, *images)
            full = compose_images(inner, images)
            pdeg = _term_degree(pre, ORIENT)
            if pdeg is not None:
                yield pre, full, pdeg, pdeg + chi_min_degree(p.k1, t1, t2, full)

    # the i-th summand starts at degree about i*k2 above the i = 0 one
    low0 = min(lower for *_, lower in summands(0))
    imax = max(zmax, 0) + buffer + max(0, -low0)
    terms = []
    for i in range(imax + 1):
        for pre, full, pdeg, lower in summands(i):
            if i == imax:
                if lower <= zmax:
                    raise TruncationError(f"outer sum needs more than {imax} terms; raise the buffer")
                continue
            if lower > zmax:
                continue
            inner_fs = chi_B_tables(p.k1, t1, t2, zmax - pdeg, full)
            terms.extend((pre * inner_fs).terms)
    return FactoredSum(terms)


def phi_B_fs(p: ModuleParams, zmax: int, images=IDENTITY_IMAGES, buffer: int = 2,
             reading: str = "definition") -> FactoredSum:
    return _B_series_fs("phi", p, zmax, images, buffer, reading)


def psi_B_fs(p: ModuleParams, zmax: int, images=IDENTITY_IMAGES, buffer: int = 2,
             reading: str = "definition") -> FactoredSum:
    return _B_series_fs("psi", p, zmax, images, buffer, reading)


def phi_B(p: ModuleParams, zmax: int, qwindow=(0, 8), buffer: int = 2, reading: str = "definition") -> Series2:
    return expand(phi_B_fs(p, zmax, IDENTITY_IMAGES, buffer, reading), ORIENT, zmax, qwindow)


def psi_B(p: ModuleParams, zmax: int, qwindow=(0, 8), buffer: int = 2, reading: str = "definition") -> Series2:
    return expand(psi_B_fs(p, zmax, IDENTITY_IMAGES, buffer, reading), ORIENT, zmax, qwindow)


def phi_char_fs(p: ModuleParams, zmax: int, images=IDENTITY_IMAGES, reading: str = "definition") -> FactoredSum:
    """phi with the conventions for out-of-range indices: negative means zero,
    l3 above min(l1, l2) is clamped to min(l1, l2).

    phi_B is the character only on Rtilde_U. On the face l3 = min(l1, l2) outside
    it the fermionic sum is used instead.
    """
    if min(p.l1, p.l2, p.l3) < 0:
        return FactoredSum.zero()
    if p.l3 > min(p.l1, p.l2):
        p = p.shifted(l3=min(p.l1, p.l2))
    if not in_Rtilde_U(p) and p.l3 == min(p.l1, p.l2) and in_P_U(p):
        return substitute(fermionic_F_fs(p.k1, p.k2, p.l1, p.l2, zmax), *images)
    return phi_B_fs(p, zmax, images, reading=reading)


def phi_source(p: ModuleParams) -> str:
    """Which formula phi_char_fs uses at p."""
    if min(p.l1, p.l2, p.l3) < 0:
        return "zero"
    if p.l3 > min(p.l1, p.l2):
        p = p.shifted(l3=min(p.l1, p.l2))
    if in_Rtilde_U(p):
        return "bosonic"
    if p.l3 == min(p.l1, p.l2) and in_P_U(p):
        return "fermionic"
    return "unsupported"


def psi_char_fs(p: ModuleParams, zmax: int, images=IDENTITY_IMAGES, reading: str = "definition") -> FactoredSum:
    """psi with the same conventions; l3 above l1 + l2 is clamped to l1 + l2."""
    if min(p.l1, p.l2, p.l3) < 0:
        return FactoredSum.zero()
    if p.l3 > p.l1 + p.l2:
        p = p.shifted(l3=p.l1 + p.l2)
    return psi_B_fs(p, zmax, images, reading=reading)


# ---------------------------------------------------------------------------
# the recursions a-d and their clamped character versions
# ---------------------------------------------------------------------------

SES_KINDS = ("a", "b", "c", "d")
SHIFT_A = (mono(1, 0, -1), mono(0, 1, 1))   # (z1/q, q z2)
SHIFT_B = (Z1(), mono(0, 1, 1))             # (z1, q z2)
SHIFT_D = (mono(1, 0, 1), Z2())             # (q z1, z2)


def ses_terms(kind: str, p: ModuleParams, clamped: bool = False):
    """Terms of recursion `kind` as (name, params, images, z-scale, budget drop):
    the left side first, then the two right-hand terms."""
    k1, k2, l1, l2, l3 = p.k1, p.k2, p.l1, p.l2, p.l3
    P = ModuleParams
    if kind == "a":
        l3r = min(l3, l2 - 1) if clamped else l3
        return [("phi", p, IDENTITY_IMAGES, ONE, 0),
                ("phi", P(k1, k2, l1, l2 - 1, l3r), IDENTITY_IMAGES, ONE, 0),
                ("psi", P(k1, k2, l3, k2 - l2, l1), SHIFT_A, mono(0, l2, 0), l2)]
    if kind == "b":
        l3r = min(l3, l1 + l2 - 1) if clamped else l3
        return [("psi", p, IDENTITY_IMAGES, ONE, 0),
                ("psi", P(k1, k2, l1, l2 - 1, l3r), IDENTITY_IMAGES, ONE, 0),
                ("phi", P(k1, k2, l3, k2 - l2, l1), SHIFT_B, mono(0, l2, 0), l2)]
    if kind == "c":
        l3r = min(k1 - l3, l1 + l2 - 2 * l3) if clamped else k1 - l3
        return [("phi", p, IDENTITY_IMAGES, ONE, 0),
                ("phi", P(k1, k2, l1, l2, l3 - 1), IDENTITY_IMAGES, ONE, 0),
                ("psi", P(k1, k2, l1 - l3, l2 - l3, l3r), IDENTITY_IMAGES, mono(l3, l3, -l3), 2 * l3)]
    if kind == "d":
        l3r = min(l3, l1 + l2 - 1) if clamped else l3
        return [("psi", p, IDENTITY_IMAGES, ONE, 0),
                ("psi", P(k1, k2, l1 - 1, l2, l3r), IDENTITY_IMAGES, ONE, 0),
                ("phi", P(k1, k2, k1 - l1, l1 + l2, l3 - l1), SHIFT_D, mono(l1, 0, 0), l1)]
    raise ValueError(f"unknown recursion {kind!r}")


def ses_sides(kind: str, p: ModuleParams, zmax: int, clamped: bool = False,
              reading: str = "definition") -> Tuple[FactoredSum, FactoredSum]:
    """Both sides of recursion `kind`; clamped=True gives the character-level form."""
    if clamped:
        fns = {"phi": phi_char_fs, "psi": psi_char_fs}
    else:
        fns = {"phi": phi_B_fs, "psi": psi_B_fs}
    vals = [fns[name](q, zmax - drop, images, reading=reading).scale(scale)
            for name, q, images, scale, drop in ses_terms(kind, p, clamped)]
    return vals[0], vals[1] + vals[2]


def ses_sources(kind: str, p: ModuleParams) -> List[str]:
    """Formula used for each term of the character-level recursion."""
    out = []
    for name, q, _, _, _ in ses_terms(kind, p, True):
        if name == "phi":
            out.append(phi_source(q))
        elif min(q.l1, q.l2, q.l3) < 0:
            out.append("zero")
        else:
            q = q.shifted(l3=min(q.l3, q.l1 + q.l2))
            out.append("bosonic" if in_R_V(q) else "unsupported")
    return out


def ses_region(kind: str, p: ModuleParams) -> bool:
    """Where the character-level recursion is asserted."""
    if kind == "a":
        return in_R_U(p)
    if kind in ("b", "d"):
        return in_R_V(p)
    if kind == "c":
        return in_Rbar_U(p) and (_excess(p) != p.k2 or p.l3 == 0)
    raise ValueError(kind)


def verify_SES(kind: str, p: ModuleParams, zmax: int, qwindow=(0, 8), clamped: bool = False,
               reading: str = "definition") -> bool:
    lhs, rhs = ses_sides(kind, p, zmax, clamped, reading)
    return expand(lhs, ORIENT, zmax, qwindow).equals(expand(rhs, ORIENT, zmax, qwindow))


def random_ses_params(count: int, seed: int = 0, lo: int = -1, hi: int = 3) -> List[ModuleParams]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        k2 = rng.randint(1, 3)
        k1 = rng.randint(0, 3)
        out.append(ModuleParams(k1, k2, *(rng.randint(lo, hi) for _ in range(3))))
    return out


# ---------------------------------------------------------------------------
# fermionic formula at l3 = min(l1, l2)
# ---------------------------------------------------------------------------

def _weighted_vectors(k: int, budget: int) -> Iterator[Tuple[int, ...]]:
    """(m_1, ..., m_k) >= 0 with sum i m_i <= budget."""
    def rec(i, left, acc):
        if i > k:
            yield tuple(acc)
            return
        for v in range(left // i + 1):
            yield from rec(i + 1, left - i * v, acc + [v])
    yield from rec(1, budget, [])


def fermionic_F_fs(k1: int, k2: int, l1: int, l2: int, zmax: int) -> FactoredSum:
    """Fermionic sum for phi^{k1,k2}_{l1,l2,min(l1,l2)}; m_i carries z1^i, n_i carries z2^i."""
    if k1 < 0 or k2 < 0:
        raise ValueError("levels must be nonnegative")
    terms = []
    for m in _weighted_vectors(k1, zmax):
        wm = sum((i + 1) * x for i, x in enumerate(m))
        for n in _weighted_vectors(k2, zmax - wm):
            wn = sum((i + 1) * x for i, x in enumerate(n))
            e = sum(min(i, j) * m[i - 1] * m[j - 1] for i in range(1, k1 + 1) for j in range(1, k1 + 1))
            e += sum(min(i, j) * n[i - 1] * n[j - 1] for i in range(1, k2 + 1) for j in range(1, k2 + 1))
            e -= sum(min(i, j) * m[i - 1] * n[j - 1] for i in range(1, k1 + 1) for j in range(1, k2 + 1))
            e -= sum(min(l1, i) * m[i - 1] for i in range(1, k1 + 1))
            e -= sum(min(l2, i) * n[i - 1] for i in range(1, k2 + 1))
            facs = [poch(Q(1), x, -1) for x in m + n if x]
            terms.extend(FactoredSum.term(1, mono(wm, wn, e), facs).terms)
    return FactoredSum(terms)


def fermionic_F(k1: int, k2: int, l1: int, l2: int, zmax: int, qwindow=(0, 8)) -> Series2:
    return expand(fermionic_F_fs(k1, k2, l1, l2, zmax), ORIENT, zmax, qwindow)


# ---------------------------------------------------------------------------
# boundary conditions for phi_B and psi_B
# ---------------------------------------------------------------------------

def d_ratio_check(m: int, n: int, i: int) -> bool:
    """d(m,n,0; q^-i z1, q^2i z2) (1 - z2 q^{n+2i}) = d(m,m-n,5; q^i z1 z2, q^-2i/z2) (1 - q^n).

    (q)_{n-1} (1 - q^n) in the right side is merged into (q)_n.
    """
    d0 = [poch_signed(b, L, 1) for b, L in d_table(m, n, 0)]
    d5 = []
    for j, (b, L) in enumerate(d_table(m, m - n, 5)):
        if j == 1:
            L = n
        d5.append(poch_signed(b, L, -1))
    left = substitute(FactoredSum.term(1, ONE, d0), mono(1, 0, -i), mono(0, 1, 2 * i))
    right = substitute(FactoredSum.term(1, ONE, d5), mono(1, 1, i), mono(0, -1, -2 * i))
    ratio = normalize_poch_ratios(fs_mul(fs_mul(left, right),
                                         FactoredSum.term(1, ONE, [poch(mono(0, 1, n + 2 * i), 1, 1)])))
    return rational_identity(ratio, FactoredSum.one())[0]


def _tr_asserted(kind: str, p: ModuleParams) -> bool:
    """Where the uniqueness argument applies recursion `kind`."""
    if kind == "a":
        return in_R_U(p)
    if kind in ("b", "d"):
        return in_R_V(p)
    return in_Rtilde_U(p) and (_excess(p) != p.k2 or p.l3 == 0)


def reached_boundary_terms(kmax: int = 3) -> List[Tuple[str, ModuleParams]]:
    """Right-hand terms with a negative index met when the recursions run on
    Rtilde_U and R_V, k1 <= k2 <= kmax."""
    seen = {}
    for k2 in range(1, kmax + 1):
        for k1 in range(k2 + 1):
            for kind in SES_KINDS:
                for p in sweep_params(k1, k2, 0, k2):
                    if not _tr_asserted(kind, p):
                        continue
                    for name, q, _, _, _ in ses_terms(kind, p, True)[1:]:
                        if min(q.l1, q.l2, q.l3) < 0:
                            seen[(name, q)] = None
    return list(seen)


def _boundary_item(name: str, p: ModuleParams) -> str:
    if name == "psi":
        return "item1" if p.l1 < 0 else "item2"
    return "item3" if p.l2 < 0 else "item4"


def boundary_report(kmax: int = 3, zmax: int = 4, qwindow=(0, 6), literal: bool = False) -> Dict[str, bool]:
    """Items 1-6 for k1 <= k2 <= kmax (k2 >= 1), plus the d-ratio identity for m <= 3, n <= m, i <= 2.

    Items 1-4 are checked at the negative-index terms the recursions reach.
    literal=True checks them on the whole box of the other two indices instead;
    items 2 and 3 fail there.
    """
    P = ModuleParams
    fns = {"phi": phi_B_fs, "psi": psi_B_fs}
    res = {f"item{j}": True for j in range(1, 7)}

    def zero(fn, p):
        return expand(fn(p, zmax), ORIENT, zmax, qwindow).is_zero()

    def same(fn, p, q):
        return expand(fn(p, zmax), ORIENT, zmax, qwindow).equals(expand(fn(q, zmax), ORIENT, zmax, qwindow))

    if literal:
        cases = []
        for k2 in range(1, kmax + 1):
            for k1 in range(k2 + 1):
                for a in range(k2 + 1):
                    for b in range(k2 + 1):
                        cases += [("psi", P(k1, k2, -1, a, b)), ("psi", P(k1, k2, a, -1, b)),
                                  ("phi", P(k1, k2, a, -1, b)), ("phi", P(k1, k2, a, b, -1))]
    else:
        cases = reached_boundary_terms(kmax)
    for name, p in cases:
        item = _boundary_item(name, p)
        res[item] = res[item] and zero(fns[name], p)
    for k2 in range(1, kmax + 1):
        for k1 in range(k2 + 1):
            for l2 in range(k2 + 1):
                l3 = min(k1, l2)
                res["item5"] &= same(phi_B_fs, P(k1, k2, k1, l2, l3), P(k1, k2, k1, l2, l3 + 1))
            for l1 in range(k1 + 1):
                for l2 in range(k2 + 1):
                    res["item6"] &= same(psi_B_fs, P(k1, k2, l1, l2, l1 + l2), P(k1, k2, l1, l2, l1 + l2 + 1))
    res["d-ratio"] = all(d_ratio_check(m, n, i) for m in range(4) for n in range(m + 1) for i in range(3))
    return res


def verify_boundary(kmax: int = 3, zmax: int = 4, qwindow=(0, 6), literal: bool = False) -> bool:
    return all(boundary_report(kmax, zmax, qwindow, literal).values())


# ---------------------------------------------------------------------------
# k1 = k2: the series A^s, B^s and the six-term formulas
# ---------------------------------------------------------------------------

F_TABLE = {0: (1, mono()), 1: (-1, mono(1, 0, 0)), 2: (1, mono(2, 1, 0)),
           3: (-1, mono(2, 2, 0)), 4: (1, mono(1, 2, 0)), 5: (-1, mono(0, 1, 0))}

# B^s: (index shift, sign, w-monomial, base of the (1 - x) factor as (m1, m2, e-function))
_B_DATA = {
    0: ((0, 0), -1, mono(0, 1, 0), lambda d1, d2: mono(0, -1, d1 - d2)),
    1: ((0, 0), 1, mono(2, 1, 0), lambda d1, d2: mono(-1, -1, -d1)),
    2: ((1, 1), -1, mono(1, 0, 0), lambda d1, d2: Q(d2)),
    3: ((1, 1), 1, mono(1, 2, 0), lambda d1, d2: mono(0, -1, d1 - d2)),
    4: ((0, 1), -1, mono(2, 2, 0), lambda d1, d2: mono(-1, -1, -d1)),
    5: ((0, 1), 1, mono(), lambda d1, d2: Q(d2)),
}


def _w_images(d1: int, d2: int):
    return mono(1, 0, 2 * d1 - d2), mono(0, 1, 2 * d2 - d1)


def _w_monomial(m: ZqMonomial, d1: int, d2: int) -> ZqMonomial:
    return substitute_monomial(m, *_w_images(d1, d2))


def A_s(s: int, d1: int, d2: int) -> FactoredSum:
    """A^s_{d1,d2} = Jbar_{d1,d2}(w1, w2) f^s(w1, w2)."""
    if s not in F_TABLE:
        raise ValueError(f"s must be in 0..5, got {s}")
    if d1 < 0 or d2 < 0:
        return FactoredSum.zero()
    c, f = F_TABLE[s]
    return substitute(Jbar(d1, d2), *_w_images(d1, d2)).scale(_w_monomial(f, d1, d2), c)


def B_s(s: int, e1: int, e2: int) -> FactoredSum:
    """B^s_{e1,e2}(u1, u2), recovered from its value at (z1, q z2).

    B^2, B^3 are given at (d1-1, d2-1) and B^4, B^5 at (d1, d2-1), so
    the series vanishes only when the unshifted (d1, d2) has a negative entry.
    """
    if s not in _B_DATA:
        raise ValueError(f"s must be in 0..5, got {s}")
    (s1, s2), c, f, base = _B_DATA[s]
    d1, d2 = e1 + s1, e2 + s2
    if d1 < 0 or d2 < 0:
        return FactoredSum.zero()
    D = substitute(Jbar(d1, d2), *_w_images(d1, d2)).scale(_w_monomial(f, d1, d2), c)
    D = D.with_factors([poch(base(d1, d2), 1, 1)])
    return substitute(D, Z1(), mono(0, 1, -1))


def _gl_coeffs(l1: int, l2: int, d1: int, d2: int) -> List[ZqMonomial]:
    return [mono(0, 0, -l1 * d1 - l2 * d2),
            mono(l1, 0, l1 * (d1 - d2) - l2 * d2),
            mono(l1 + l2, l2, l1 * (d1 - d2) + l2 * d1),
            mono(l1 + l2, l1 + l2, l1 * d2 + l2 * d1),
            mono(l1, l1 + l2, l2 * (d2 - d1) + l1 * d2),
            mono(0, l2, -l1 * d1 - l2 * (d1 - d2))]


def _dd_sum(k: int, zmax: int, summand) -> FactoredSum:
    """sum over d1, d2 >= 0 of z1^{k d1} z2^{k d2} q^{k(d1^2+d2^2-d1d2)} summand(d1, d2)."""
    terms = []
    N = 0
    while True:
        shell_low = None
        for d1 in range(N + 1):
            d2 = N - d1
            x = summand(d1, d2).scale(mono(k * d1, k * d2, k * (d1 * d1 + d2 * d2 - d1 * d2)))
            low = fs_min_degree(x, ORIENT)
            if low is None:
                continue
            shell_low = low if shell_low is None else min(shell_low, low)
            if low <= zmax:
                terms.extend(x.terms)
        if N > 0 and (shell_low is None or shell_low > zmax) and N * k > zmax:
            return FactoredSum(terms)
        N += 1


def theorem_gl_psi_fs(k: int, l1: int, l2: int, zmax: int) -> FactoredSum:
    return _dd_sum(k, zmax, lambda d1, d2: fs_sum(
        A_s(s, d1, d2).scale(m) for s, m in enumerate(_gl_coeffs(l1, l2, d1, d2))))


def theorem_gl_phi_fs(k: int, l1: int, l2: int, zmax: int) -> FactoredSum:
    return _dd_sum(k, zmax, lambda d1, d2: fs_sum(
        B_s(s, d1, d2).scale(m) for s, m in enumerate(_gl_coeffs(l1, l2, d1, d2))))


def theorem_gl_psi(k: int, l1: int, l2: int, zmax: int, qwindow=(0, 8)) -> Series2:
    """Six-term formula for psi^{k,k}_{l1,l2,l1+l2}."""
    return expand(theorem_gl_psi_fs(k, l1, l2, zmax), ORIENT, zmax, qwindow)


def theorem_gl_phi(k: int, l1: int, l2: int, zmax: int, qwindow=(0, 8)) -> Series2:
    """Six-term formula for phi^{k,k}_{l1,l2,l1+l2-k}."""
    return expand(theorem_gl_phi_fs(k, l1, l2, zmax), ORIENT, zmax, qwindow)


def _one_minus(m: ZqMonomial) -> PochFactor:
    return poch(m, 1, 1)


def _shift(x: FactoredSum, a: int, b: int) -> FactoredSum:
    """x(q^a z1, q^b z2)."""
    return substitute(x, mono(1, 0, a), mono(0, 1, b))


def ab_relations(group: str, d1: int, d2: int) -> List[Tuple[FactoredSum, FactoredSum]]:
    """The six relations of one lemma group at (d1, d2), as (lhs, rhs) pairs."""
    A, B = A_s, B_s
    if group == "lem1":
        sh = lambda x: _shift(x, 0, 1)
        return [
            (A(0, d1, d2).with_factors([_one_minus(Q(d2))]), sh(B(5, d1, d2 - 1))),
            (A(1, d1, d2).with_factors([_one_minus(Q(d2))]), sh(B(2, d1 - 1, d2 - 1))),
            (A(2, d1, d2).with_factors([_one_minus(mono(-1, -1, -d1))]), sh(B(1, d1, d2))),
            (A(3, d1, d2).with_factors([_one_minus(mono(-1, -1, -d1))]), sh(B(4, d1, d2 - 1))),
            (A(4, d1, d2).with_factors([_one_minus(mono(0, -1, d1 - d2))]), sh(B(3, d1 - 1, d2 - 1))),
            (A(5, d1, d2).with_factors([_one_minus(mono(0, -1, d1 - d2))]), sh(B(0, d1, d2))),
        ]
    if group == "lem2":
        sh = lambda x: _shift(x, 1, 0)
        return [
            (A(0, d1, d2).with_factors([_one_minus(Q(d1))]), sh(B(1, d1 - 1, d2))),
            (A(1, d1, d2).with_factors([_one_minus(mono(-1, 0, d2 - d1))]), sh(B(0, d1, d2))),
            (A(2, d1, d2).with_factors([_one_minus(mono(-1, 0, d2 - d1))]), sh(B(3, d1 - 1, d2 - 1))),
            (A(3, d1, d2).with_factors([_one_minus(mono(-1, -1, -d2))]), sh(B(2, d1 - 1, d2))),
            (A(4, d1, d2).with_factors([_one_minus(mono(-1, -1, -d2))]), sh(B(5, d1, d2))),
            (A(5, d1, d2).with_factors([_one_minus(Q(d1))]), sh(B(4, d1 - 1, d2 - 1))),
        ]
    if group == "lem3":
        sh = lambda x: _shift(x, -1, 1)
        return [
            (B(0, d1, d2).with_factors([_one_minus(Q(d2))]),
             A(3, d1 - 1, d2 - 1).scale(mono(-1, -1, -d1 + 1)) + sh(A(5, d1, d2 - 1))),
            (B(1, d1, d2).with_factors([_one_minus(Q(d2))]),
             A(4, d1, d2 - 1).scale(mono(0, -1, d1 - d2 + 1)) + sh(A(2, d1, d2 - 1))),
            (B(2, d1, d2).with_factors([_one_minus(mono(-1, -1, -d1))]),
             A(5, d1 + 1, d2).scale(mono(0, -1, d1 - d2 + 1)) + sh(A(1, d1 + 1, d2))),
            (B(3, d1, d2).with_factors([_one_minus(mono(-1, -1, -d1))]),
             A(0, d1 + 1, d2 + 1).scale(Q(d2 + 1)) + sh(A(4, d1 + 1, d2))),
            (B(4, d1, d2).with_factors([_one_minus(mono(0, -1, d1 - d2))]),
             A(1, d1, d2 + 1).scale(Q(d2 + 1)) + sh(A(3, d1, d2))),
            (B(5, d1, d2).with_factors([_one_minus(mono(0, -1, d1 - d2))]),
             A(2, d1 - 1, d2).scale(mono(-1, -1, -d1 + 1)) + sh(A(0, d1, d2))),
        ]
    raise ValueError(f"unknown relation group {group!r}")


def _vacuum_cleared(x: FactoredSum) -> FactoredSum:
    vac = [poch(mono(1, 0, 0), INFINITY, 1), poch(mono(0, 1, 0), INFINITY, 1),
           poch(mono(1, 1, 0), INFINITY, 1)]
    return normalize_poch_ratios(x.with_factors(vac))


def verify_AB_relations(group: str, d1: int, d2: int) -> bool:
    """Exact check: multiply by (z1)_inf (z2)_inf (z1 z2)_inf and clear denominators."""
    return all(rational_identity(_vacuum_cleared(l), _vacuum_cleared(r))[0]
               for l, r in ab_relations(group, d1, d2))


# ---------------------------------------------------------------------------
# the character of V^k
# ---------------------------------------------------------------------------

VK_BACKENDS = ("fermionic", "bosonic", "psi_gl", "psi_B")


def VI_fs(k: int, zmax: int) -> FactoredSum:
    return _dd_sum(k, zmax, lambda d1, d2: substitute(J(d1, d2), *_w_images(d1, d2)))


def ch_Vk(k: int, zmax: int, qwindow=(0, 8), backend: str = "fermionic") -> Series2:
    if k < 1:
        raise ValueError("k >= 1 is required")
    if backend == "fermionic":
        return fermionic_F(k, k, 0, 0, zmax, qwindow)
    if backend == "bosonic":
        return expand(VI_fs(k, zmax), ORIENT, zmax, qwindow)
    if backend == "psi_gl":
        return theorem_gl_psi(k, 0, 0, zmax, qwindow)
    if backend == "psi_B":
        return psi_B(ModuleParams(k, k, 0, 0, 0), zmax, qwindow)
    raise ValueError(f"unknown backend {backend!r}")


def verify_Vrec(k: int, zmax: int = 5, qwindow=(0, 8)) -> bool:
    """ch V^k = sum z1^{kn} z2^{km} q^{k(n^2+m^2-mn)} / ((q)_n (q)_m) ch V^{k-1}(q^{2n-m} z1, q^{2m-n} z2)."""
    if k < 1:
        raise ValueError("k >= 1 is required")
    terms = []
    for n in range(zmax // k + 1):
        for m in range(zmax // k + 1 - n):
            budget = zmax - k * (n + m)
            inner = fermionic_F_fs(k - 1, k - 1, 0, 0, budget)
            inner = substitute(inner, mono(1, 0, 2 * n - m), mono(0, 1, 2 * m - n))
            pre = FactoredSum.term(1, mono(k * n, k * m, k * (n * n + m * m - m * n)),
                                   [poch(Q(1), n, -1), poch(Q(1), m, -1)])
            terms.extend((pre * inner).terms)
    rhs = expand(FactoredSum(terms), ORIENT, zmax, qwindow)
    return ch_Vk(k, zmax, qwindow).equals(rhs)


def nonnegative_integral(s: Series2) -> bool:
    return all(c >= 0 and c.denominator == 1 for _, c in s.items())


def verify_nonnegativity(kmax: int = 3, zmax: int = 4, qwindow=(0, 6)) -> Dict[str, bool]:
    """Coefficient positivity of chi_B, psi_B on R_V and phi_B on Rtilde_U."""
    res = {"chi": True, "psi": True, "phi": True}
    for k in range(kmax + 1):
        for l1 in range(k + 1):
            for l2 in range(k + 1 - l1):
                res["chi"] &= nonnegative_integral(chi_series(k, l1, l2, zmax, qwindow))
    for k2 in range(1, kmax + 1):
        for k1 in range(k2 + 1):
            for p in sweep_params(k1, k2, 0, k2):
                if in_R_V(p):
                    res["psi"] &= nonnegative_integral(psi_B(p, zmax, qwindow))
                if in_Rtilde_U(p):
                    res["phi"] &= nonnegative_integral(phi_B(p, zmax, qwindow))
    return res
