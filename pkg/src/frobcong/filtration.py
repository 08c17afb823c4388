"""Mod-ell filtrations of modular forms on Gamma_0(m), m prime, and theta cycles.

The filtration w(f) of a mod-ell form f of weight k is the least weight k'
(necessarily k' = k mod ell-1) in which f is the reduction of a form with
ell-integral coefficients.  Membership in weight k' is decided by Gaussian
elimination over Z/ell on the coefficients q^0 .. q^B, B = sturm_bound(k, m),
against an ell-saturated basis of M_k'(m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import jacobi_symbol

from .bases import InadmissibleWeight, basis_element, basis_index_set, check_admissible
from .eisenstein import eisenstein, weight_two_form
from .eta import EtaQuotientSpec, expand, sturm_bound
from .frobenius import SearchContext, h_ell_mod
from .qseries import GF, QExpansion, QSeriesError, convolve

__all__ = [
    "FiltrationRecord",
    "SpanningSetUnavailable",
    "dim_cusp_forms",
    "dim_modular_forms",
    "eisenstein",
    "filtration_of",
    "modular_basis",
    "ramanujan_serre",
    "theta_cycle",
    "theta_step",
]

# large prime used only to pick a linearly independent subset of generators
_SELECT_PRIME = 2**61 - 1


class SpanningSetUnavailable(RuntimeError):
    pass


def _ring_cast(s: QExpansion, like: QExpansion) -> QExpansion:
    return s.change_ring(like.ring) if like.ring.kind == "GF" else s


def ramanujan_serre(f: QExpansion, k0: int) -> QExpansion:
    """theta f - (k0/12) E_2 f, which has weight k0 + 2 when f has weight k0."""
    e2 = _ring_cast(eisenstein(2, f.prec), f)
    return f.theta() - (e2 * f) * Fraction(k0, 12)


def theta_step(f: QExpansion, k0: int, ell: int) -> QExpansion:
    """E_{ell-1} d f + (k0/12) E_{ell+1} f: weight k0 + ell + 1 and congruent to theta f mod ell."""
    if ell < 5:
        raise ValueError("ell must be at least 5")
    lo = _ring_cast(eisenstein(ell - 1, f.prec), f)
    hi = _ring_cast(eisenstein(ell + 1, f.prec), f)
    return lo * ramanujan_serre(f, k0) + (hi * f) * Fraction(k0, 12)


# -- dimensions ------------------------------------------------------------------


def _level_invariants(m: int) -> tuple:
    """(genus, e2, e3, cusps) for Gamma_0(m), m = 1 or an odd prime."""
    if m == 1:
        return 0, 1, 1, 1
    e2 = 1 + jacobi_symbol(-1, m)
    e3 = 1 + jacobi_symbol(-3, m) if m != 3 else 1
    g = 1 + Fraction(m + 1, 12) - Fraction(e2, 4) - Fraction(e3, 3) - 1
    assert g.denominator == 1
    return int(g), e2, e3, 2


def dim_cusp_forms(m: int, k: int) -> int:
    if k <= 0 or k % 2:
        return 0
    g, e2, e3, c = _level_invariants(m)
    if k == 2:
        return g
    return (k - 1) * (g - 1) + (k // 4) * e2 + (k // 3) * e3 + (k // 2 - 1) * c


def dim_modular_forms(m: int, k: int) -> int:
    if k < 0 or k % 2:
        return 0
    if k == 0:
        return 1
    _, _, _, c = _level_invariants(m)
    if k == 2:
        return dim_cusp_forms(m, 2) + c - 1
    return dim_cusp_forms(m, k) + c


# -- spanning sets ------------------------------------------------------------------


def _int_vector(s: QExpansion, nslots: int) -> list:
    """Integer multiple of the coefficient vector q^0 .. q^(nslots-1)."""
    c = [Fraction(x) for x in s.list(0, nslots)]
    den = math.lcm(*(x.denominator for x in c)) if c else 1
    return [int(x * den) for x in c]


def _primitive(v: list) -> list:
    g = math.gcd(*v)
    return [x // g for x in v] if g > 1 else v


class _Echelon:
    """Incremental row echelon form over Z/p."""

    def __init__(self, p: int):
        self.p = p
        self.rows = []  # (pivot, row)

    def reduce(self, v: list) -> list:
        p = self.p
        v = [x % p for x in v]
        for piv, row in self.rows:
            c = v[piv]
            if c:
                v = [(a - c * b) % p for a, b in zip(v, row)]
        return v

    def add(self, v: list) -> bool:
        v = self.reduce(v)
        for piv, x in enumerate(v):
            if x:
                inv = pow(x, -1, self.p)
                row = [a * inv % self.p for a in v]
                # keep rows fully reduced so reduce() needs a single pass
                self.rows = [
                    (q, [(a - r[piv] * b) % self.p for a, b in zip(r, row)]) for q, r in self.rows
                ]
                self.rows.append((piv, row))
                return True
        return False


def _generators(m: int, k: int, nslots: int):
    """Yield integer coefficient vectors spanning M_k(m) (lazily, cheapest first)."""
    if k == 0:
        yield [1] + [0] * (nslots - 1)
        return
    if k == 2:
        yield _int_vector(weight_two_form(m, nslots), nslots)
        if dim_cusp_forms(m, 2):
            if m != 11:
                raise SpanningSetUnavailable(f"no weight-2 cusp forms implemented for level {m}")
            yield _int_vector(expand(EtaQuotientSpec(11, {1: 2, 11: 2}), nslots), nslots)
        return
    e = eisenstein(k, nslots)
    yield _int_vector(e, nslots)
    yield _int_vector(e.rescale(m).truncate(nslots), nslots)
    try:
        check_admissible(m, k)
        admissible = m != 1
    except InadmissibleWeight:
        admissible = False
    if admissible:
        for r in basis_index_set(m, k):
            if r < nslots:
                yield _int_vector(basis_element(m, k, r, nslots - r), nslots)
        return
    # products of lower-weight bases
    for a in (2, 4):
        if k - a > 0:
            for w in modular_basis(m, a, nslots):
                for v in modular_basis(m, k - a, nslots):
                    yield convolve(v, w, nslots)


@lru_cache(maxsize=None)
def _modular_basis(m: int, k: int, nslots: int) -> tuple:
    want = dim_modular_forms(m, k)
    if want == 0:
        return ()
    if nslots < sturm_bound(k, m) + 1:
        raise SpanningSetUnavailable(f"{nslots} slots cannot separate forms of weight {k}")
    ech = _Echelon(_SELECT_PRIME)
    chosen = []
    for v in _generators(m, k, nslots):
        if len(chosen) == want:
            break
        if ech.add(v):
            chosen.append(tuple(_primitive(v)))
    if len(chosen) != want:
        raise SpanningSetUnavailable(
            f"spanning set for M_{k}(Gamma_0({m})) has rank {len(chosen)}, expected {want}"
        )
    return tuple(chosen)


def modular_basis(m: int, k: int, nslots: int) -> list:
    """Integer vectors (q^0 .. q^(nslots-1)) forming a Q-basis of M_k(Gamma_0(m))."""
    if k < 0 or k % 2:
        return []
    return [list(v) for v in _modular_basis(m, k, nslots)]


def _dependency(vectors: list, ell: int):
    """Coefficients c (not all zero) with sum c_i v_i = 0 mod ell, or None."""
    n = len(vectors)
    rows = [([x % ell for x in v], [int(i == j) for j in range(n)]) for i, v in enumerate(vectors)]
    reduced = []
    for v, comb in rows:
        for piv, rv, rc in reduced:
            c = v[piv]
            if c:
                v = [(a - c * b) % ell for a, b in zip(v, rv)]
                comb = [(a - c * b) % ell for a, b in zip(comb, rc)]
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return comb
        inv = pow(v[piv], -1, ell)
        reduced.append((piv, [a * inv % ell for a in v], [a * inv % ell for a in comb]))
    return None


@lru_cache(maxsize=None)
def _saturated_basis(m: int, k: int, nslots: int, ell: int) -> tuple:
    """Basis of M_k(m, Z_(ell)) truncated to nslots, as integer vectors."""
    vecs = [list(v) for v in _modular_basis(m, k, nslots)]
    while True:
        c = _dependency(vecs, ell)
        if c is None:
            return tuple(tuple(v) for v in vecs)
        j = next(i for i, x in enumerate(c) if x)
        combo = [sum(ci * v[t] for ci, v in zip(c, vecs)) for t in range(nslots)]
        assert all(x % ell == 0 for x in combo)
        vecs[j] = [x // ell for x in combo]


def _in_span_mod(f: list, basis: list, ell: int) -> bool:
    ech = _Echelon(ell)
    for v in basis:
        ech.add(v)
    return not any(ech.reduce(f))


def _member(f: list, m: int, kp: int, k: int, ell: int, nslots: int) -> bool:
    basis = [list(v) for v in _saturated_basis(m, kp, nslots, ell)]
    j = (k - kp) // (ell - 1)
    if j:
        lift = eisenstein(ell - 1, nslots).change_ring(GF(ell)) ** j
        lv = list(lift.coeffs)
        basis = [convolve([x % ell for x in v], lv, nslots) for v in basis]
    return _in_span_mod(f, basis, ell)


def filtration_of(f_mod: QExpansion, k: int, m: int) -> int:
    """Filtration of f_mod, the reduction mod ell of a weight-k form on Gamma_0(m)."""
    if f_mod.ring.kind != "GF":
        raise QSeriesError("filtration_of needs a series over GF(ell)")
    ell = f_mod.ring.modulus
    nslots = sturm_bound(k, m) + 1
    try:
        f = [int(x) for x in f_mod.list(0, nslots)]
    except QSeriesError as exc:
        raise QSeriesError(f"need coefficients through q^{nslots - 1} to decide the filtration") from exc
    if not any(f):
        raise ValueError("the zero series has no filtration")
    if not _member(f, m, k, k, ell, nslots):
        raise ValueError(f"series is not the reduction of a weight-{k} form on Gamma_0({m})")
    best = k
    kp = k - (ell - 1)
    while kp >= 0:
        if not _member(f, m, kp, k, ell, nslots):
            break
        best = kp
        kp -= ell - 1
    return best


# -- theta cycles ------------------------------------------------------------------


@dataclass(frozen=True)
class FiltrationRecord:
    ell: int
    m: int
    start_weight: int
    cycle: tuple  # ((i, w(theta^i h_ell)), ...)

    @property
    def low_step(self) -> int:
        return (self.ell + 3) // 2

    @property
    def alpha(self):
        """alpha with w(theta^((ell+3)/2) h) = k0 + (ell+3)/2 (ell+1) - alpha (ell-1)."""
        steps = dict(self.cycle)
        i = self.low_step
        if i not in steps:
            return None
        drop = self.start_weight + i * (self.ell + 1) - steps[i]
        return Fraction(drop, self.ell - 1)


def theta_cycle(m: int, ell: int, i_max: int) -> FiltrationRecord:
    ctx = SearchContext(m, ell)
    k0 = ctx.weight
    top_weight = k0 + i_max * (ell + 1)
    top = sturm_bound(top_weight, m) + 1
    prec = max(1, top - ctx.r_inf)
    f = h_ell_mod(ctx, prec)
    cycle = []
    for i in range(i_max + 1):
        if i:
            f = f.theta()
        cycle.append((i, filtration_of(f, k0 + i * (ell + 1), m)))
    return FiltrationRecord(ell, m, k0, tuple(cycle))
