"""Named verification suites shared by the command line and the test-suite."""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from . import sl2, sl3, toda
from .qcore import Series2, expand, rational_str

SUITES = ("sl2-all", "chsp", "ses", "boundary", "gl", "toda", "irec", "isum", "terms",
          "gt-numeric", "whittaker")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    zmax: Optional[int] = None
    qlo: Optional[int] = None
    qhi: Optional[int] = None
    imax_buffer: int = 2
    precision: int = 100
    samples: int = 5
    seed: int = 0
    k1: Optional[int] = None
    k2: Optional[int] = None

    def window(self, zmax: int, qlo: int, qhi: int) -> Tuple[int, Tuple[int, int]]:
        z = zmax if self.zmax is None else self.zmax
        lo = qlo if self.qlo is None else self.qlo
        hi = qhi if self.qhi is None else self.qhi
        if lo > hi:
            raise UsageError(f"qlo={lo} exceeds qhi={hi}")
        if z < 0:
            raise UsageError("zmax must be nonnegative")
        return z, (lo, hi)


@dataclass
class Report:
    suite: str
    checks: List[Dict] = field(default_factory=list)
    seconds: float = 0.0
    config: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def failures(self) -> List[Dict]:
        return [c for c in self.checks if not c["pass"]]

    def as_dict(self, timing: bool = True) -> Dict:
        d = {"suite": self.suite, "pass": self.passed, "count": len(self.checks),
             "failed": len(self.failures()), "config": self.config, "checks": self.checks}
        if timing:
            d["seconds"] = round(self.seconds, 3)
        return d


# ---------------------------------------------------------------------------
# check helpers: each returns (passed, detail)
# ---------------------------------------------------------------------------

def _diff(a: Series2, b: Series2):
    d = a.first_difference(b)
    if d is None:
        return True, None
    m1, m2, e, x, y = d
    return False, {"z1": m1, "z2": m2, "q": e, "lhs": rational_str(x), "rhs": rational_str(y)}


def _bool(x) -> Tuple[bool, None]:
    return bool(x), None


def c_sl2_triple(k, l, zmax, qw):
    a = sl2.chi_sl2(k, l, zmax, qw, "enumerate")
    ok, d = _diff(a, sl2.chi_sl2(k, l, zmax, qw, "fermionic"))
    if not ok:
        return ok, d
    return _diff(a, sl2.chi_sl2(k, l, zmax, qw, "bosonic"))


def c_sl2_rec(k, l, zmax, qw, backend):
    return _bool(sl2.verify_rec_sl2(k, l, zmax, qw, backend))


def c_fiber(k, l, mvec, dmax):
    return _bool(sl2.verify_fiber_sums(k, l, mvec, dmax))


def c_extremal(k, l, n, eps):
    w = sl2.extremal_point(k, l, n, eps)
    got = (sl2.seq_weight(w), sl2.seq_degree(w))
    return got == sl2.extremal_monomial(k, l, n, eps) and sl2.is_admissible(w, k, l), \
        {"weight_degree": list(got)}


def c_gnk_rec(n, k):
    return _bool(sl2.verify_gnk_recursion(n, k))


def c_qbinomial(n):
    return _bool(sl2.verify_qbinomial(n))


def c_gnk_direct(n, k, zmax, qw):
    return _diff(sl2.gnk_direct(n, k, zmax, qw), sl2.gnk_closed_series(n, k, zmax, qw))


def c_splitting(n, eps, l, zmax, qw):
    return _bool(sl2.verify_splitting_sums(n, eps, l, zmax, qw))


def c_chsp(k, l1, l2, zmax, qw):
    return _diff(sl3.enumerate_X(k, l1, l2, zmax, qw), sl3.chi_series(k, l1, l2, zmax, qw))


def c_sr(k, l1, l2, zmax, qw, backend):
    return _bool(sl3.verify_sr(k, l1, l2, zmax, qw, backend))


def c_chi_init(k, zmax, qw):
    ok = all(expand(sl3.chi_B_tables(k, -1, l2, zmax), sl3.ORIENT, zmax, qw).is_zero()
             for l2 in range(k + 2))
    s = sl3.chi_series(k, 0, 0, zmax, qw)
    return ok and s.terms.get((0, 0, 0)) == 1, None


def c_ses(kind, p, zmax, qw, clamped):
    lhs, rhs = sl3.ses_sides(kind, p, zmax, clamped)
    return _diff(expand(lhs, sl3.ORIENT, zmax, qw), expand(rhs, sl3.ORIENT, zmax, qw))


def c_boundary(kmax, zmax, qw):
    rep = sl3.boundary_report(kmax, zmax, qw)
    return all(rep.values()), rep


def c_fermform(p, zmax, qw):
    return _diff(sl3.fermionic_F(p.k1, p.k2, p.l1, p.l2, zmax, qw), sl3.phi_B(p, zmax, qw))


def c_nonneg(kmax, zmax, qw):
    rep = sl3.verify_nonnegativity(kmax, zmax, qw)
    return all(rep.values()), rep


def c_regions(kmax):
    return _bool(sl3.verify_region_inclusions(kmax))


def c_gl_psi(k, l1, l2, zmax, qw):
    return _diff(sl3.theorem_gl_psi(k, l1, l2, zmax, qw),
                 sl3.psi_B(sl3.ModuleParams(k, k, l1, l2, l1 + l2), zmax, qw))


def c_gl_phi(k, l1, l2, zmax, qw):
    return _diff(sl3.theorem_gl_phi(k, l1, l2, zmax, qw),
                 sl3.phi_B(sl3.ModuleParams(k, k, l1, l2, l1 + l2 - k), zmax, qw))


def c_ab(group, d1, d2):
    return _bool(sl3.verify_AB_relations(group, d1, d2))


def c_vk(k, zmax, qw, backend):
    return _diff(sl3.ch_Vk(k, zmax, qw, "fermionic"), sl3.ch_Vk(k, zmax, qw, backend))


def c_vrec(k, zmax, qw):
    return _bool(sl3.verify_Vrec(k, zmax, qw))


def c_toda(d1, d2):
    return _bool(toda.verify_toda(d1, d2))


def c_Isym(d1, d2):
    return _bool(toda.verify_I_symmetry(d1, d2))


def c_Irec(d1, d2):
    return _bool(toda.verify_Irec(d1, d2))


def c_Iferm(d1, d2, zmax, qw):
    return _diff(toda.I_fermionic(d1, d2, zmax, qw), toda.I_expanded(d1, d2, zmax, qw))


def c_Isum(d1, d2):
    return _bool(toda.verify_I_sum(d1, d2))


def c_terms(d1, d2, n):
    return _bool(toda.verify_terms(d1, d2, n))


def c_cinv(d1, d2, n):
    return _bool(toda.verify_c_invariance(d1, d2, n))


# ---------------------------------------------------------------------------
# suite definitions: lists of (check name, params, function, args)
# ---------------------------------------------------------------------------

Check = Tuple[str, Dict, Callable, tuple]


def _level_pairs(cfg: RunConfig, kmax: int = 3) -> List[Tuple[int, int]]:
    if cfg.k1 is not None or cfg.k2 is not None:
        if cfg.k1 is None or cfg.k2 is None:
            raise UsageError("--k1 and --k2 must be given together")
        if not 0 <= cfg.k1 <= cfg.k2 or cfg.k2 < 1:
            raise UsageError(f"need 0 <= k1 <= k2 and k2 >= 1, got k1={cfg.k1}, k2={cfg.k2}")
        return [(cfg.k1, cfg.k2)]
    return [(k1, k2) for k2 in range(1, kmax + 1) for k1 in range(k2 + 1)]


def _p(p: sl3.ModuleParams) -> Dict:
    return asdict(p)


def suite_sl2(cfg: RunConfig) -> List[Check]:
    zmax, qw = cfg.window(8, 0, 12)
    out: List[Check] = []
    for k in range(4):
        for l in range(k + 1):
            out.append(("triple", {"k": k, "l": l}, c_sl2_triple, (k, l, zmax, qw)))
    for k in range(1, 4):
        for l in range(1, k + 1):
            for b in sl2.BACKENDS:
                out.append(("rec", {"k": k, "l": l, "backend": b}, c_sl2_rec, (k, l, zmax, qw, b)))
    for k in range(1, 4):
        for mvec in sl2.m_vectors(k, 4):
            for l in range(k + 1):
                out.append(("fiber", {"k": k, "l": l, "m": list(mvec)}, c_fiber, (k, l, mvec, qw[1])))
    for k in range(1, 4):
        for l in range(k + 1):
            for n in range(4):
                for eps in (0, 1):
                    out.append(("extremal", {"k": k, "l": l, "n": n, "eps": eps}, c_extremal, (k, l, n, eps)))
    for n in range(5):
        for k in range(1, 5):
            out.append(("fnk-recursion", {"n": n, "k": k}, c_gnk_rec, (n, k)))
    for n in range(7):
        out.append(("q-binomial", {"n": n}, c_qbinomial, (n,)))
    for n in range(4):
        for k in range(1, 4):
            out.append(("fnk-direct", {"n": n, "k": k}, c_gnk_direct, (n, k, 4, (0, 10))))
    for n in range(3):
        for eps in (0, 1):
            for l in range(3):
                out.append(("splitting", {"n": n, "eps": eps, "l": l}, c_splitting, (n, eps, l, 4, (0, 10))))
    return out


def suite_chsp(cfg: RunConfig) -> List[Check]:
    zmax, qw = cfg.window(6, 0, 10)
    out: List[Check] = []
    for k in range(4):
        out.append(("initial", {"k": k}, c_chi_init, (k, zmax, qw)))
        for l1 in range(k + 1):
            for l2 in range(k + 1 - l1):
                prm = {"k": k, "l1": l1, "l2": l2}
                out.append(("chsp", prm, c_chsp, (k, l1, l2, zmax, qw)))
                for b in ("enumerator", "bosonic"):
                    out.append(("sr", dict(prm, backend=b), c_sr, (k, l1, l2, zmax, qw, b)))
    return out


def suite_ses(cfg: RunConfig) -> List[Check]:
    pairs = _level_pairs(cfg)
    zmax, qw = cfg.window(4, 0, 8)
    out: List[Check] = []
    if cfg.k1 is None:
        for kind in sl3.SES_KINDS:
            for p in sl3.random_ses_params(50, seed=cfg.seed + ord(kind)):
                out.append((f"B{kind}", _p(p), c_ses, (kind, p, zmax, (qw[0], min(qw[1], 6)), False)))
    for k1, k2 in pairs:
        for kind in sl3.SES_KINDS:
            for p in sl3.sweep_params(k1, k2, 0, k2):
                if sl3.ses_region(kind, p):
                    out.append((f"TR{kind}", _p(p), c_ses, (kind, p, zmax, qw, True)))
    return out


def suite_boundary(cfg: RunConfig) -> List[Check]:
    pairs = _level_pairs(cfg)
    zmax, qw = cfg.window(4, 0, 6)
    out: List[Check] = [("items-1-6", {"kmax": 3}, c_boundary, (3, zmax, qw)),
                        ("nonnegativity", {"kmax": 3}, c_nonneg, (3, zmax, qw)),
                        ("region-inclusions", {"kmax": 4}, c_regions, (4,))]
    for k1, k2 in pairs:
        for l1 in range(k1 + 1):
            for l2 in range(k2 + 1):
                p = sl3.ModuleParams(k1, k2, l1, l2, min(l1, l2))
                if sl3.in_Rtilde_U(p):
                    out.append(("fermionic-face", _p(p), c_fermform, (p, zmax, qw)))
    return out


def suite_gl(cfg: RunConfig) -> List[Check]:
    zmax, qw = cfg.window(4, 0, 8)
    out: List[Check] = []
    for k in (1, 2):
        for l1 in range(k + 1):
            for l2 in range(k + 1):
                if sl3.in_R_V(sl3.ModuleParams(k, k, l1, l2, l1 + l2)):
                    out.append(("gl-psi", {"k": k, "l1": l1, "l2": l2}, c_gl_psi, (k, l1, l2, zmax, qw)))
                if sl3.in_R_U(sl3.ModuleParams(k, k, l1, l2, l1 + l2 - k)):
                    out.append(("gl-phi", {"k": k, "l1": l1, "l2": l2}, c_gl_phi, (k, l1, l2, zmax, qw)))
    for group in ("lem1", "lem2", "lem3"):
        for d1 in range(3):
            for d2 in range(3):
                out.append(("ab-relations", {"group": group, "d1": d1, "d2": d2}, c_ab, (group, d1, d2)))
    vz, vw = cfg.window(5, 0, 8)
    for k in (1, 2, 3):
        for b in ("bosonic", "psi_gl", "psi_B"):
            out.append(("vk", {"k": k, "backend": b}, c_vk, (k, vz, vw, b)))
    for k in (2, 3):
        out.append(("vrec", {"k": k}, c_vrec, (k, vz, vw)))
    return out


def suite_toda(cfg: RunConfig) -> List[Check]:
    out: List[Check] = []
    for d1 in range(7):
        for d2 in range(7):
            out.append(("toda", {"d1": d1, "d2": d2}, c_toda, (d1, d2)))
            out.append(("I-symmetry", {"d1": d1, "d2": d2}, c_Isym, (d1, d2)))
    return out


def suite_irec(cfg: RunConfig) -> List[Check]:
    zmax, qw = cfg.window(6, 0, 12)
    out: List[Check] = []
    for d1 in range(5):
        for d2 in range(5):
            out.append(("irec", {"d1": d1, "d2": d2}, c_Irec, (d1, d2)))
            out.append(("I-fermionic", {"d1": d1, "d2": d2}, c_Iferm, (d1, d2, zmax, qw)))
    return out


def suite_isum(cfg: RunConfig) -> List[Check]:
    return [("isum", {"d1": d1, "d2": d2}, c_Isum, (d1, d2)) for d1 in range(6) for d2 in range(6)]


def suite_terms(cfg: RunConfig) -> List[Check]:
    out: List[Check] = []
    for d1 in range(5):
        for d2 in range(5):
            for n in range(min(d1, d2) + 1):
                prm = {"d1": d1, "d2": d2, "n": n}
                out.append(("terms", prm, c_terms, (d1, d2, n)))
                out.append(("c-invariance", prm, c_cinv, (d1, d2, n)))
    return out


BUILDERS = {
    "sl2-all": suite_sl2, "chsp": suite_chsp, "ses": suite_ses, "boundary": suite_boundary,
    "gl": suite_gl, "toda": suite_toda, "irec": suite_irec, "isum": suite_isum, "terms": suite_terms,
}


def _run_one(item):
    name, params, fn, args = item
    ok, detail = fn(*args)
    rec = {"check": name, "params": params, "pass": bool(ok)}
    if detail is not None and (not ok or isinstance(detail, dict) and name in ("items-1-6", "nonnegativity")):
        rec["detail"] = detail
    return rec


def threads() -> int:
    try:
        return max(1, int(os.environ.get("QCHAR_THREADS", "1")))
    except ValueError:
        return 1


def _numeric(suite: str, cfg: RunConfig) -> List[Dict]:
    fn = toda.verify_gt_representation if suite == "gt-numeric" else toda.verify_whittaker
    out = []
    for r in fn(D=5, samples=cfg.samples, precision=cfg.precision, seed=cfg.seed):
        out.append({"check": r["check"], "params": dict(r["sample"], D=r["D"]),
                    "pass": r["pass"], "max_residual": r["max_residual"]})
    return out


def run_suite(suite: str, cfg: Optional[RunConfig] = None) -> Report:
    cfg = cfg or RunConfig()
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}")
    t0 = time.perf_counter()
    rep = Report(suite, config=asdict(cfg))
    if suite in ("gt-numeric", "whittaker"):
        rep.checks = _numeric(suite, cfg)
    else:
        items = BUILDERS[suite](cfg)
        n = threads()
        if n > 1 and len(items) > 1:
            with ProcessPoolExecutor(max_workers=n) as ex:
                rep.checks = list(ex.map(_run_one, items, chunksize=max(1, len(items) // (4 * n))))
        else:
            rep.checks = [_run_one(it) for it in items]
    rep.seconds = time.perf_counter() - t0
    return rep
