"""Exact q-series substrate.

Rationals are ``fractions.Fraction``.  A closed form is a ``FactoredSum``:
a list of terms ``coeff * z1^m1 z2^m2 q^e * prod (base)_n^{+-1}``.  Closed
forms are turned into truncated series with ``expand``, or compared exactly
by clearing denominators with ``rational_identity``.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

Rational = Fraction
INFINITY = math.inf


class QCoreError(Exception):
    pass


class PochError(QCoreError):
    pass


class ExpansionError(QCoreError):
    pass


class SubstitutionError(QCoreError):
    pass


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def rational_str(x: Fraction) -> str:
    x = as_rational(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# monomials and Pochhammer factors
# ---------------------------------------------------------------------------

class ZqMonomial(NamedTuple):
    m1: int = 0
    m2: int = 0
    e: int = 0

    def __mul__(self, other):  # type: ignore[override]
        return ZqMonomial(self.m1 + other.m1, self.m2 + other.m2, self.e + other.e)

    def __pow__(self, k: int):
        return ZqMonomial(self.m1 * k, self.m2 * k, self.e * k)

    def inv(self) -> "ZqMonomial":
        return ZqMonomial(-self.m1, -self.m2, -self.e)

    def is_pure_q(self) -> bool:
        return self.m1 == 0 and self.m2 == 0

    def __str__(self):
        parts = []
        for name, k in (("z1", self.m1), ("z2", self.m2), ("q", self.e)):
            if k == 1:
                parts.append(name)
            elif k:
                parts.append(f"{name}^{k}")
        return "*".join(parts) or "1"


Mono = ZqMonomial
ONE = ZqMonomial(0, 0, 0)


def mono(m1: int = 0, m2: int = 0, e: int = 0) -> ZqMonomial:
    return ZqMonomial(int(m1), int(m2), int(e))


def Z1(e: int = 0) -> ZqMonomial:
    return ZqMonomial(1, 0, e)


def Z2(e: int = 0) -> ZqMonomial:
    return ZqMonomial(0, 1, e)


def Q(e: int) -> ZqMonomial:
    return ZqMonomial(0, 0, e)


def _len_key(n) -> Tuple[int, int]:
    return (1, 0) if n == INFINITY else (0, int(n))


@dataclass(frozen=True)
class PochFactor:
    """(base)_length raised to exponent +1 or -1."""

    base: ZqMonomial
    length: object
    exponent: int = 1

    def __post_init__(self):
        if self.exponent not in (1, -1):
            raise PochError(f"exponent must be +1 or -1, got {self.exponent}")
        if self.length != INFINITY:
            if not isinstance(self.length, int) or self.length < 0:
                raise PochError(f"length must be a nonnegative int or INFINITY, got {self.length!r}")
        elif self.base.is_pure_q() and self.base.e <= 0:
            raise PochError(f"infinite product ({self.base})_inf does not converge")

    @property
    def infinite(self) -> bool:
        return self.length == INFINITY

    def sort_key(self):
        return (tuple(self.base), _len_key(self.length), self.exponent)

    def __str__(self):
        n = "inf" if self.infinite else str(self.length)
        s = f"({self.base};q)_{n}"
        return s if self.exponent == 1 else s + "^-1"


def poch(base: ZqMonomial, length, exponent: int = 1) -> PochFactor:
    return PochFactor(ZqMonomial(*base), length, exponent)


def poch_signed(base: ZqMonomial, n, exponent: int = 1) -> PochFactor:
    """(base)_n^exponent for any integer n, with (a)_{-k} = 1/(a q^{-k})_k."""
    if n == INFINITY or n >= 0:
        return poch(base, n, exponent)
    return PochFactor(ZqMonomial(base.m1, base.m2, base.e + n), -n, -exponent)


@dataclass(frozen=True)
class FactoredTerm:
    coeff: Fraction
    monomial: ZqMonomial
    factors: Tuple[PochFactor, ...] = ()

    def sort_key(self):
        return (tuple(self.monomial), tuple(f.sort_key() for f in self.factors), self.coeff)

    def __str__(self):
        fs = " ".join(str(f) for f in self.factors)
        return f"{self.coeff} * {self.monomial}" + (f" * {fs}" if fs else "")


def _make_term(coeff, m: ZqMonomial, factors: Iterable[PochFactor]) -> FactoredTerm:
    facs = tuple(sorted((f for f in factors if not (f.length == 0)), key=PochFactor.sort_key))
    return FactoredTerm(as_rational(coeff), ZqMonomial(*m), facs)


class FactoredSum:
    """Exact symbolic sum of factored terms, kept in canonical order."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[FactoredTerm] = ()):
        merged: Dict[Tuple, Fraction] = {}
        for t in terms:
            if t.coeff == 0:
                continue
            key = (t.monomial, t.factors)
            merged[key] = merged.get(key, Fraction(0)) + t.coeff
        out = [FactoredTerm(c, m, f) for (m, f), c in merged.items() if c != 0]
        out.sort(key=FactoredTerm.sort_key)
        self.terms: Tuple[FactoredTerm, ...] = tuple(out)

    @classmethod
    def one(cls) -> "FactoredSum":
        return cls([FactoredTerm(Fraction(1), ONE, ())])

    @classmethod
    def zero(cls) -> "FactoredSum":
        return cls()

    @classmethod
    def monomial(cls, m: ZqMonomial, coeff=1) -> "FactoredSum":
        return cls([_make_term(coeff, m, ())])

    @classmethod
    def term(cls, coeff, m: ZqMonomial, factors: Iterable[PochFactor] = ()) -> "FactoredSum":
        return cls([_make_term(coeff, m, factors)])

    def __iter__(self) -> Iterator[FactoredTerm]:
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "FactoredSum") -> "FactoredSum":
        return FactoredSum(self.terms + other.terms)

    def __neg__(self) -> "FactoredSum":
        return self.scale(ONE, -1)

    def __sub__(self, other: "FactoredSum") -> "FactoredSum":
        return self + (-other)

    def __mul__(self, other: "FactoredSum") -> "FactoredSum":
        return FactoredSum(
            _make_term(a.coeff * b.coeff, a.monomial * b.monomial, a.factors + b.factors)
            for a in self.terms
            for b in other.terms
        )

    def scale(self, m: ZqMonomial = ONE, coeff=1) -> "FactoredSum":
        c = as_rational(coeff)
        return FactoredSum(FactoredTerm(t.coeff * c, t.monomial * m, t.factors) for t in self.terms)

    def with_factors(self, factors: Iterable[PochFactor]) -> "FactoredSum":
        fs = tuple(factors)
        return FactoredSum(_make_term(t.coeff, t.monomial, t.factors + fs) for t in self.terms)

    def substitute(self, image1: ZqMonomial, image2: ZqMonomial) -> "FactoredSum":
        return substitute(self, image1, image2)

    def __eq__(self, other):
        return isinstance(other, FactoredSum) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return "FactoredSum(" + " + ".join(str(t) for t in self.terms) + ")"


def fs_add(a: FactoredSum, b: FactoredSum) -> FactoredSum:
    return a + b


def fs_mul(a: FactoredSum, b: FactoredSum) -> FactoredSum:
    return a * b


def fs_scale(x: FactoredSum, m: ZqMonomial = ONE, coeff=1) -> FactoredSum:
    return x.scale(m, coeff)


def fs_sum(items: Iterable[FactoredSum]) -> FactoredSum:
    terms: List[FactoredTerm] = []
    for x in items:
        terms.extend(x.terms)
    return FactoredSum(terms)


# ---------------------------------------------------------------------------
# substitution and ratio normalisation
# ---------------------------------------------------------------------------

def substitute_monomial(m: ZqMonomial, image1: ZqMonomial, image2: ZqMonomial) -> ZqMonomial:
    return ZqMonomial(
        image1.m1 * m.m1 + image2.m1 * m.m2,
        image1.m2 * m.m1 + image2.m2 * m.m2,
        image1.e * m.m1 + image2.e * m.m2 + m.e,
    )


def compose_images(inner: Tuple[ZqMonomial, ZqMonomial], outer: Tuple[ZqMonomial, ZqMonomial]):
    """Images of (z1, z2) for "apply inner, then outer"."""
    return (
        substitute_monomial(inner[0], *outer),
        substitute_monomial(inner[1], *outer),
    )


IDENTITY_IMAGES = (Z1(), Z2())


def substitute(x: FactoredSum, image1: ZqMonomial, image2: ZqMonomial) -> FactoredSum:
    out = []
    for t in x.terms:
        facs = []
        for f in t.factors:
            b = substitute_monomial(f.base, image1, image2)
            if f.infinite and b.is_pure_q() and b.e <= 0:
                raise SubstitutionError(f"substitution turns {f} into a divergent product ({b})_inf")
            facs.append(PochFactor(b, f.length, f.exponent))
        out.append(_make_term(t.coeff, substitute_monomial(t.monomial, image1, image2), facs))
    return FactoredSum(out)


def normalize_poch_ratios(x: FactoredSum) -> FactoredSum:
    """Cancel (x)_inf against (x q^m)_inf^-1 using (x)_inf = (x)_m (x q^m)_inf."""
    out = []
    for t in x.terms:
        facs = list(t.factors)
        changed = True
        while changed:
            changed = False
            for i, f in enumerate(facs):
                if not f.infinite or f.exponent != 1:
                    continue
                for j, g in enumerate(facs):
                    if not g.infinite or g.exponent != -1:
                        continue
                    if (g.base.m1, g.base.m2) != (f.base.m1, f.base.m2):
                        continue
                    m = g.base.e - f.base.e
                    rest = [h for k, h in enumerate(facs) if k not in (i, j)]
                    if m >= 0:
                        rest.append(PochFactor(f.base, m, 1))
                    else:
                        rest.append(PochFactor(g.base, -m, -1))
                    facs = rest
                    changed = True
                    break
                if changed:
                    break
        out.append(_make_term(t.coeff, t.monomial, facs))
    return FactoredSum(out)


# ---------------------------------------------------------------------------
# windowed series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QWindowSeries:
    window: Tuple[int, int]
    coeffs: Dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.window
        for e, c in self.coeffs.items():
            if not lo <= e <= hi or c == 0:
                raise QCoreError(f"coefficient at q^{e} violates window {self.window}")


Orientation = Tuple[int, int]


def _check_orientation(o) -> Orientation:
    o = (int(o[0]), int(o[1]))
    if o[0] not in (1, -1) or o[1] not in (1, -1):
        raise QCoreError(f"orientation entries must be +1 or -1, got {o}")
    return o


class Series2:
    """Truncated series in oriented z1, z2 with windowed q-Laurent coefficients.

    ``terms`` maps actual exponents (m1, m2, e) to nonzero rationals.
    """

    __slots__ = ("orientation", "zmax", "qwindow", "terms")

    def __init__(self, orientation, zmax: int, qwindow, terms: Optional[Dict] = None):
        self.orientation = _check_orientation(orientation)
        self.zmax = int(zmax)
        self.qwindow = (int(qwindow[0]), int(qwindow[1]))
        d1, d2 = self.orientation
        lo, hi = self.qwindow
        clean = {}
        for (m1, m2, e), c in (terms or {}).items():
            if c == 0:
                continue
            u1, u2 = d1 * m1, d2 * m2
            if u1 < 0 or u2 < 0 or u1 + u2 > self.zmax or not lo <= e <= hi:
                continue
            clean[(m1, m2, e)] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms: Dict[Tuple[int, int, int], Fraction] = clean

    # access
    def coefficient(self, m1: int, m2: int = 0) -> QWindowSeries:
        return QWindowSeries(self.qwindow, {e: c for (a, b, e), c in self.terms.items() if (a, b) == (m1, m2)})

    @property
    def coeffs(self) -> Dict[Tuple[int, int], QWindowSeries]:
        keys = sorted({(a, b) for a, b, _ in self.terms})
        return {k: self.coefficient(*k) for k in keys}

    def get(self, m1: int, m2: int, e: int) -> Fraction:
        return self.terms.get((m1, m2, e), Fraction(0))

    def items(self):
        return sorted(self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def restrict(self, zmax: int, qwindow) -> "Series2":
        return Series2(self.orientation, min(zmax, self.zmax),
                       (max(qwindow[0], self.qwindow[0]), min(qwindow[1], self.qwindow[1])), self.terms)

    def _common(self, other: "Series2"):
        if self.orientation != other.orientation:
            raise QCoreError(f"orientation mismatch: {self.orientation} vs {other.orientation}")
        return (min(self.zmax, other.zmax),
                (max(self.qwindow[0], other.qwindow[0]), min(self.qwindow[1], other.qwindow[1])))

    def __add__(self, other: "Series2") -> "Series2":
        zmax, win = self._common(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, 0) + c
        return Series2(self.orientation, zmax, win, acc)

    def __neg__(self) -> "Series2":
        return Series2(self.orientation, self.zmax, self.qwindow, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Series2") -> "Series2":
        return self + (-other)

    def scale(self, coeff) -> "Series2":
        c = as_rational(coeff)
        return Series2(self.orientation, self.zmax, self.qwindow, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "Series2") -> "Series2":
        # Exact provided neither factor has terms below its window.
        zmax, _ = self._common(other)
        (alo, ahi), (blo, bhi) = self.qwindow, other.qwindow
        win = (alo + blo, min(ahi + blo, bhi + alo))
        acc: Dict = {}
        for (a1, a2, ae), ca in self.terms.items():
            for (b1, b2, be), cb in other.terms.items():
                k = (a1 + b1, a2 + b2, ae + be)
                acc[k] = acc.get(k, 0) + ca * cb
        return Series2(self.orientation, zmax, win, acc)

    def first_difference(self, other: "Series2"):
        """Lexicographically first (m1, m2, e, self_coeff, other_coeff) on the common region, or None."""
        zmax, win = self._common(other)
        a = self.restrict(zmax, win).terms
        b = other.restrict(zmax, win).terms
        for k in sorted(set(a) | set(b)):
            ca, cb = a.get(k, Fraction(0)), b.get(k, Fraction(0))
            if ca != cb:
                return (k[0], k[1], k[2], ca, cb)
        return None

    def equals(self, other: "Series2") -> bool:
        return self.first_difference(other) is None

    def __eq__(self, other):
        return isinstance(other, Series2) and self.equals(other)

    __hash__ = None  # type: ignore[assignment]

    def is_integral_nonnegative(self) -> bool:
        return all(c >= 0 and c.denominator == 1 for c in self.terms.values())

    def to_json_obj(self) -> dict:
        return {
            "orientation": list(self.orientation),
            "zmax": self.zmax,
            "qwindow": list(self.qwindow),
            "terms": [
                {"m1": m1, "m2": m2, "q": e, "c": rational_str(c)}
                for (m1, m2, e), c in sorted(self.terms.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=False)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Series2":
        terms = {(t["m1"], t["m2"], t["q"]): Fraction(t["c"]) for t in obj["terms"]}
        return cls(tuple(obj["orientation"]), obj["zmax"], tuple(obj["qwindow"]), terms)

    def __repr__(self):
        return f"Series2(o={self.orientation}, zmax={self.zmax}, q={self.qwindow}, {len(self.terms)} terms)"


def series_eq(a: Series2, b: Series2) -> bool:
    return a.equals(b)


def series_add(a: Series2, b: Series2) -> Series2:
    return a + b


def series_sub(a: Series2, b: Series2) -> Series2:
    return a - b


def series_mul(a: Series2, b: Series2) -> Series2:
    return a * b


def series_zero(orientation, zmax, qwindow) -> Series2:
    return Series2(orientation, zmax, qwindow, {})


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------

def _classify(b1: int, b2: int, e: int) -> Optional[int]:
    """+1 first case, -1 second case, 0 for the constant 1, None for mixed sign."""
    if b1 == 0 and b2 == 0:
        return (e > 0) - (e < 0)
    if (b1 > 0 and b2 >= 0) or (b1 == 0 and b2 > 0):
        return 1
    if (b1 < 0 and b2 <= 0) or (b1 == 0 and b2 < 0):
        return -1
    return None


class _Prepared(NamedTuple):
    coeff: Fraction          # includes sign
    M: Tuple[int, int, int]  # oriented monomial
    P: Dict[Tuple[int, int, int], int]  # mixed-sign polynomial part
    steps: Dict[Tuple[int, int, int], int]  # y -> net exponent of (1 - y)
    families: Tuple[Tuple[Tuple[int, int, int], int], ...]


def _poly_mul(a: Dict, b: Dict) -> Dict:
    out: Dict = {}
    for (a1, a2, ae), ca in a.items():
        for (b1, b2, be), cb in b.items():
            k = (a1 + b1, a2 + b2, ae + be)
            out[k] = out.get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def _prepare(t: FactoredTerm, o: Orientation) -> Optional[_Prepared]:
    d1, d2 = o
    sign = 1
    M1, M2, Me = d1 * t.monomial.m1, d2 * t.monomial.m2, t.monomial.e
    P = {(0, 0, 0): 1}
    steps: Counter = Counter()
    fams = []
    for f in t.factors:
        b1, b2, be = d1 * f.base.m1, d2 * f.base.m2, f.base.e
        s = f.exponent
        if f.infinite:
            cls = _classify(b1, b2, be)
            if cls == 1:
                fams.append(((b1, b2, be), s))
                continue
            raise ExpansionError(
                f"infinite factor {f} has a base that is not first-case in orientation {o}")
        for i in range(f.length):
            x = (b1, b2, be + i)
            cls = _classify(*x)
            if cls == 1:
                steps[x] += s
            elif cls == -1:
                # (1 - x) = -x (1 - 1/x)
                sign = -sign
                M1, M2, Me = M1 + s * x[0], M2 + s * x[1], Me + s * x[2]
                steps[(-x[0], -x[1], -x[2])] += s
            elif cls == 0:
                if s == 1:
                    return None
                raise ExpansionError(f"factor {f} contains 1/(1 - 1)")
            else:
                if s == -1:
                    raise ExpansionError(
                        f"inverted factor {f} has mixed-sign base {ZqMonomial(*f.base)} in orientation {o}")
                P = _poly_mul(P, {(0, 0, 0): 1, x: -1})
    steps = {y: k for y, k in steps.items() if k}
    return _Prepared(t.coeff * sign, (M1, M2, Me), P, steps, tuple(fams))


def min_degree(t: FactoredTerm, orientation=(1, 1)) -> Optional[int]:
    """Lower bound for the oriented total z-degree of the expansion of t (None if t is zero)."""
    p = _prepare(t, _check_orientation(orientation))
    if p is None or not p.P:
        return None
    return p.M[0] + p.M[1] + min(a + b for a, b, _ in p.P)


def fs_min_degree(x: FactoredSum, orientation=(1, 1)) -> Optional[int]:
    vals = [d for d in (min_degree(t, orientation) for t in x.terms) if d is not None]
    return min(vals) if vals else None


_STEP_CACHE: Dict = {}
_STEP_CACHE_LIMIT = 4096


def _step_product(steps: Dict, fams, B: int, cap: int):
    """Product of the step factors, exact for oriented degree <= B and q <= cap.

    Returns (qa, arrays) where arrays maps (u1, u2) to an object array indexed
    by q - qa.
    """
    # lower bound on q for any product of steps with total degree <= B
    rmin = Fraction(0)
    for (a, b, e) in list(steps) + [y for y, _ in fams]:
        if a + b > 0 and e < 0:
            rmin = min(rmin, Fraction(e, a + b))
    LB = math.floor(B * rmin)
    if cap < LB:
        return LB, {}
    qa, qb = LB, cap - LB
    L = qb - qa + 1

    work = Counter()
    for y, k in steps.items():
        if y[0] + y[1] > B:
            continue
        if y[2] > 0 and y[2] + LB > cap:
            continue
        work[y] += k
    for (y0, s) in fams:
        if y0[0] + y0[1] > B:
            continue
        i = 0
        while True:
            y = (y0[0], y0[1], y0[2] + i)
            if y[2] > 0 and y[2] + LB > cap:
                break
            work[y] += s
            i += 1
    keys = [(u1, d - u1) for d in range(B + 1) for u1 in range(d, -1, -1)]
    S: Dict[Tuple[int, int], np.ndarray] = {}
    start = np.zeros(L, dtype=object)
    if 0 - qa < L:
        start[0 - qa] = 1
    S[(0, 0)] = start

    for y in sorted(work):
        k = work[y]
        a, b, e = y
        for _ in range(abs(k)):
            if k < 0:
                _geometric(S, keys, a, b, e, L)
            else:
                _linear(S, keys, a, b, e, L)
    return qa, S


def _shift_add(dst: np.ndarray, src: np.ndarray, e: int, L: int, sign: int):
    if e >= L or -e >= L:
        return
    if e >= 0:
        if sign > 0:
            dst[e:] += src[:L - e]
        else:
            dst[e:] -= src[:L - e]
    else:
        if sign > 0:
            dst[:L + e] += src[-e:]
        else:
            dst[:L + e] -= src[-e:]


def _geometric(S, keys, a, b, e, L):
    """Multiply by 1/(1 - z^(a,b) q^e)."""
    if a == 0 and b == 0:
        for arr in S.values():
            for st in range(e, L, e):
                n = min(e, L - st)
                arr[st:st + n] += arr[st - e:st - e + n]
        return
    for key in keys:
        src = S.get((key[0] - a, key[1] - b))
        if src is None:
            continue
        dst = S.get(key)
        if dst is None:
            dst = S[key] = np.zeros(L, dtype=object)
        _shift_add(dst, src, e, L, 1)


def _linear(S, keys, a, b, e, L):
    """Multiply by (1 - z^(a,b) q^e)."""
    if a == 0 and b == 0:
        for arr in S.values():
            if e < L:
                arr[e:] -= arr[:L - e].copy()
        return
    for key in reversed(keys):
        src = S.get((key[0] - a, key[1] - b))
        if src is None:
            continue
        dst = S.get(key)
        if dst is None:
            dst = S[key] = np.zeros(L, dtype=object)
        _shift_add(dst, src, e, L, -1)


def _cached_step_product(steps: Dict, fams, B: int, cap: int):
    key = (tuple(sorted(steps.items())), fams)
    hit = _STEP_CACHE.get(key)
    if hit is not None:
        hB, hcap, qa, S = hit
        if hB >= B and hcap >= cap:
            return qa, S
        B, cap = max(B, hB), max(cap, hcap)
    qa, S = _step_product(steps, fams, B, cap)
    if len(_STEP_CACHE) >= _STEP_CACHE_LIMIT:
        _STEP_CACHE.clear()
    _STEP_CACHE[key] = (B, cap, qa, S)
    return qa, S


def _expand_term_into(acc: Dict, t: FactoredTerm, o: Orientation, zmax: int, qlo: int, qhi: int):
    p = _prepare(t, o)
    if p is None:
        return
    M1, M2, Me = p.M
    Pdeg = [(a + b, e) for (a, b, e) in p.P]
    B = zmax - min(M1 + M2 + dd for dd, _ in Pdeg)
    if B < 0:
        return
    cap = qhi - min(Me + pe for _, pe in Pdeg)
    qa, S = _cached_step_product(p.steps, p.families, B, cap)
    d1, d2 = o
    for (p1, p2, pe), pc in sorted(p.P.items()):
        c = p.coeff * pc
        if c.denominator == 1:
            c = int(c)
        base1, base2, basee = M1 + p1, M2 + p2, Me + pe
        jlo = max(0, qlo - basee - qa)
        for (u1, u2), arr in S.items():
            v1, v2 = u1 + base1, u2 + base2
            if v1 < 0 or v2 < 0 or v1 + v2 > zmax:
                continue
            jhi = min(len(arr) - 1, qhi - basee - qa)
            if jhi < jlo:
                continue
            seg = arr[jlo:jhi + 1]
            for j in np.flatnonzero(seg):
                k = (d1 * v1, d2 * v2, int(jlo + j) + qa + basee)
                acc[k] = acc.get(k, 0) + seg[j] * c


def expand(x: FactoredSum, orientation=(1, 1), zmax: int = 4, qwindow=(0, 10)) -> Series2:
    """Expand a closed form into a truncated series, exact on the window."""
    o = _check_orientation(orientation)
    qlo, qhi = int(qwindow[0]), int(qwindow[1])
    if qlo > qhi:
        raise QCoreError(f"empty q-window {qwindow}")
    if zmax < 0:
        raise QCoreError("zmax must be nonnegative")
    acc: Dict = {}
    for t in x.terms:
        _expand_term_into(acc, t, o, zmax, qlo, qhi)
    return Series2(o, zmax, (qlo, qhi), acc)


# ---------------------------------------------------------------------------
# exact Laurent polynomials and cleared identities
# ---------------------------------------------------------------------------

class LaurentPoly3:
    """Sparse exact Laurent polynomial in three variables."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Optional[Dict[Tuple[int, int, int], object]] = None):
        self.c: Dict[Tuple[int, int, int], object] = {}
        for k, v in (coeffs or {}).items():
            if v:
                self.c[tuple(k)] = _norm_num(v)

    @classmethod
    def one(cls):
        return cls({(0, 0, 0): 1})

    @classmethod
    def monomial(cls, k, coeff=1):
        return cls({tuple(k): coeff})

    def __add__(self, other):
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly3(out)

    def __neg__(self):
        return LaurentPoly3({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly3):
            return LaurentPoly3({k: v * other for k, v in self.c.items()})
        out: Dict = {}
        for (a1, a2, a3), x in self.c.items():
            for (b1, b2, b3), y in other.c.items():
                k = (a1 + b1, a2 + b2, a3 + b3)
                out[k] = out.get(k, 0) + x * y
        return LaurentPoly3(out)

    def shift(self, k):
        return LaurentPoly3({(a + k[0], b + k[1], c + k[2]): v for (a, b, c), v in self.c.items()})

    def is_zero(self) -> bool:
        return not self.c

    def __eq__(self, other):
        return isinstance(other, LaurentPoly3) and self.c == other.c

    __hash__ = None  # type: ignore[assignment]

    def items(self):
        return sorted(self.c.items())

    def __len__(self):
        return len(self.c)

    def __repr__(self):
        return "LaurentPoly3(" + ", ".join(f"{k}: {v}" for k, v in self.items()) + ")"


def _norm_num(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def to_laurent3(x: FactoredSum) -> LaurentPoly3:
    out = LaurentPoly3()
    for t in x.terms:
        p = LaurentPoly3.monomial(tuple(t.monomial), t.coeff)
        for f in t.factors:
            if f.infinite or f.exponent != 1:
                raise QCoreError(f"to_laurent3 needs finite non-inverted factors, got {f}")
            for i in range(f.length):
                b = f.base
                p = p * LaurentPoly3({(0, 0, 0): 1, (b.m1, b.m2, b.e + i): -1})
        out = out + p
    return out


class ElemForm(NamedTuple):
    """coeff * x^mono * prod (1 - x^y)^k over a dict {y: k}; y is canonical."""

    coeff: Fraction
    mono: Tuple[int, int, int]
    factors: Tuple[Tuple[Tuple[int, int, int], int], ...]


def _canonical(y):
    for v in y:
        if v > 0:
            return True
        if v < 0:
            return False
    return None


def elem_form(coeff, m, pieces: Iterable[Tuple[Tuple[int, int, int], int]]) -> Optional[ElemForm]:
    """Build a canonical ElemForm from (1 - x^y)^k pieces; None if it is zero."""
    sign = 1
    m = list(m)
    fac: Counter = Counter()
    for y, k in pieces:
        if k == 0:
            continue
        pos = _canonical(y)
        if pos is None:
            if k > 0:
                return None
            raise ZeroDivisionError("factor (1 - 1) in a denominator")
        if not pos:
            if k % 2:
                sign = -sign
            m = [m[i] + k * y[i] for i in range(3)]
            y = (-y[0], -y[1], -y[2])
        fac[tuple(y)] += k
    items = tuple(sorted((y, k) for y, k in fac.items() if k))
    return ElemForm(as_rational(coeff) * sign, tuple(m), items)


def term_elem_form(t: FactoredTerm) -> Optional[ElemForm]:
    pieces = []
    for f in t.factors:
        if f.infinite:
            raise QCoreError(f"infinite factor {f} cannot be cleared; normalize ratios first")
        for i in range(f.length):
            pieces.append(((f.base.m1, f.base.m2, f.base.e + i), f.exponent))
    return elem_form(t.coeff, tuple(t.monomial), pieces)


def fs_elem_forms(x: FactoredSum) -> List[ElemForm]:
    return [f for f in (term_elem_form(t) for t in x.terms) if f is not None]


def map_elem_form(f: ElemForm, fn) -> Optional[ElemForm]:
    """Apply a linear exponent map fn: tuple -> tuple to a form."""
    return elem_form(f.coeff, fn(f.mono), [(fn(y), k) for y, k in f.factors])


_POW_CACHE: Dict = {}


def _one_minus_pow(y, k) -> LaurentPoly3:
    key = (y, k)
    p = _POW_CACHE.get(key)
    if p is None:
        if k == 1:
            p = LaurentPoly3({(0, 0, 0): 1, y: -1})
        else:
            p = _one_minus_pow(y, k - 1) * _one_minus_pow(y, 1)
        if len(_POW_CACHE) > 20000:
            _POW_CACHE.clear()
        _POW_CACHE[key] = p
    return p


def cleared_numerator(forms: Sequence[ElemForm]) -> LaurentPoly3:
    """Numerator of sum(forms) over a common denominator, common factors removed.

    The sum is zero iff the returned polynomial is zero.
    """
    if not forms:
        return LaurentPoly3()
    # group forms sharing the same factor multiset
    groups: Dict[Tuple, LaurentPoly3] = {}
    for f in forms:
        g = groups.get(f.factors)
        term = LaurentPoly3.monomial(f.mono, f.coeff)
        groups[f.factors] = term if g is None else g + term
    groups = {k: v for k, v in groups.items() if not v.is_zero()}
    if not groups:
        return LaurentPoly3()
    dicts = {k: dict(k) for k in groups}
    ys = sorted({y for d in dicts.values() for y in d})
    L = {y: max(0, max(-d.get(y, 0) for d in dicts.values())) for y in ys}
    raised = {k: {y: d.get(y, 0) + L[y] for y in ys} for k, d in dicts.items()}
    common = {y: min(r[y] for r in raised.values()) for y in ys}
    total = LaurentPoly3()
    for k, poly in groups.items():
        p = poly
        for y in ys:
            e = raised[k][y] - common[y]
            if e:
                p = p * _one_minus_pow(y, e)
        total = total + p
    return total


def rational_identity(lhs: FactoredSum, rhs: FactoredSum) -> Tuple[bool, LaurentPoly3]:
    """Exact check lhs == rhs for closed forms with finite factors only."""
    forms = fs_elem_forms(lhs) + fs_elem_forms(-rhs)
    r = cleared_numerator(forms)
    return r.is_zero(), r


def dumps_series(s: Series2) -> str:
    return s.to_json()
