"""Explicit cusp-form bases at levels 5, 7, 11 and 13.

Every basis element has the shape

    F_r = eta(m z)^a * eta(z)^b * extra = q^r + ...

where ``extra`` is 1 (level 5), the weight-4 newform f (level 7), one of the
modular functions h_x on X_0(11) (level 11), or the W_13-fixed form f_4
(level 13).  The search only needs the first few coefficients of
F_{r_inf + i} / q^{r_inf}; those are computed once, with eta(m z)^(ell^2)
replaced by its bare q-power, in :func:`reduced_profile`.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .eisenstein import eisenstein, weight_two_form
from .eta import EtaQuotientSpec, cusp_orders, expand
from .frobenius import WIDTHS
from .qseries import QExpansion, QQ, QSeriesError, ZZ

ALPHA = (0, 2, 3, 4, 6)
F4_DATA_FILE = "f4_level13.txt"


class InadmissibleWeight(ValueError):
    pass


def alpha(x: int) -> int:
    return ALPHA[x]


def xi(x: int) -> int:
    return ALPHA[x] - x


def gamma(r: int, k: int) -> int:
    return (2 * k + r) % 5


def helper_maps(x: int) -> tuple:
    return alpha(x), xi(x)


# -- the X_0(11) model ----------------------------------------------------------


def binary_theta(prec: int) -> QExpansion:
    """sum over (x, y) in Z^2 of q^(x^2 + xy + 3y^2)."""
    c = [0] * prec
    ymax = math.isqrt(4 * prec // 11 + 1) + 1
    xspan = math.isqrt(prec) + 2
    for y in range(-ymax, ymax + 1):
        for x in range(-xspan - ymax, xspan + ymax + 1):
            n = x * x + x * y + 3 * y * y
            if n < prec:
                c[n] += 1
    return QExpansion(0, tuple(c), prec, ZZ)


# polynomials in F, G as {(i, j): coefficient of F^i G^j}
_H1 = {(2, 0): Fraction(-1, 2), (1, 0): 5, (0, 1): Fraction(-1, 2), (0, 0): 11}
_H2 = {(1, 0): -88, (2, 0): 21, (3, 0): -1, (0, 1): 11, (1, 1): -1}
_H3 = {(3, 0): -11, (2, 1): 1, (2, 0): 231, (1, 1): -21, (1, 0): -726, (0, 2): 1, (0, 1): 99, (0, 0): 242}


def _scale(poly: dict, c: Fraction) -> dict:
    return {key: Fraction(v) * c for key, v in poly.items()}


def _poly_mul(p1: dict, p2: dict) -> dict:
    out: dict = {}
    for (a, b), u in p1.items():
        for (c, d), v in p2.items():
            out[(a + c, b + d)] = out.get((a + c, b + d), 0) + u * v
    return {key: v for key, v in out.items() if v}


HX_POLYS = {
    0: {(0, 0): Fraction(1)},
    1: _scale(_H1, Fraction(-1, 121)),
    2: _scale(_H2, Fraction(-1, 2662)),
    3: _scale(_H3, Fraction(1, 29282)),
}
HX_POLYS[4] = _poly_mul(HX_POLYS[1], HX_POLYS[3])


@dataclass(frozen=True)
class X011Model:
    prec: int
    g: QExpansion
    h: QExpansion
    F: QExpansion
    G: QExpansion
    polys: dict
    hx: tuple  # h_0..h_4 over ZZ, each with ``prec`` slots from q^x

    def evaluate(self, poly: dict, g_sign: int = 1) -> QExpansion:
        """Expand sum c F^i (g_sign G)^j."""
        total = None
        for (i, j), c in sorted(poly.items()):
            term = (self.F**i) * (self.G**j) * Fraction(c) * (g_sign**j)
            total = term if total is None else total + term
        return total.change_ring(QQ)


@lru_cache(maxsize=8)
def x011_model(prec: int) -> X011Model:
    if prec < 12:
        raise ValueError("the X_0(11) model needs prec >= 12")
    work = prec + 12
    g = binary_theta(work) ** 2
    h = expand(EtaQuotientSpec(11, {1: 2, 11: 2}), work)
    hinv = h.invert()
    F = g * hinv
    G = F.theta() * hinv
    partial = X011Model(prec, g, h, F, G, HX_POLYS, ())
    hx = []
    for x in range(5):
        if x == 0:
            hx.append(QExpansion(0, (1,), prec, ZZ))
            continue
        s = partial.evaluate(HX_POLYS[x]).normalized()
        if s.offset24 != 24 * x or s.coeffs[0] != 1:
            raise AssertionError(f"h_{x} does not start with q^{x}")
        if any(c.denominator != 1 for c in s.coeffs):
            raise AssertionError(f"h_{x} has non-integral coefficients")
        hx.append(s.truncate(prec).to_integer())
    model = X011Model(prec, g, h, F, G, HX_POLYS, tuple(hx))
    _check_model(model)
    return model


def _check_model(model: X011Model) -> None:
    expected = {
        "F": (model.F, -1, [1, 6, 17]),
        "G": (model.G, -2, [-1, -2, 12]),
    }
    for name, (s, start, head) in expected.items():
        if s.list(start, start + len(head)) != head:
            raise AssertionError(f"{name} leading terms {s.list(start, start + 3)} != {head}")
    heads = {1: [1, 5], 2: [1, 9], 3: [1, 14], 4: [1, 19]}
    for x, head in heads.items():
        if model.hx[x].list(x, x + 2) != head:
            raise AssertionError(f"h_{x} leading terms mismatch")
    if not (model.hx[1] * model.hx[3]).agrees_with(model.hx[4]):
        raise AssertionError("h_4 != h_1 h_3")


def fricke_hx(x: int, prec: int) -> QExpansion:
    """h_x | W_11 (F fixed, G negated), with exact rational coefficients."""
    if x == 0:
        return QExpansion(0, (1,), prec, QQ)
    model = x011_model(prec)
    return model.evaluate(HX_POLYS[x], g_sign=-1).normalized()


# -- level 7 and level 13 seeds -------------------------------------------------


@lru_cache(maxsize=8)
def level7_cusp_form(prec: int) -> QExpansion:
    """The normalized cusp form f in S_4(7).

    Cusp conditions at infinity and zero on span{E_4(z), E_4(7z), e^2} (e the
    weight-2 Eisenstein form, anti-invariant under W_7) force
    E_4(z) + 49 E_4(7z) - 50 e^2 up to scaling.
    """
    e4 = eisenstein(4, prec)
    e4_7 = e4.rescale(7).truncate(prec)
    e = weight_two_form(7, prec)
    f = e4 + e4_7 * 49 - e * e * 50
    lead = f.coeffs[1]
    f = (f * (1 / lead)).normalized()
    if f.list(1, 4) != [1, -1, -2]:
        raise AssertionError("level-7 cusp form does not begin q - q^2 - 2q^3")
    return f.to_integer()


def compute_f4(prec: int) -> QExpansion:
    """The W_13-fixed form in S_4(13) of order 2 at infinity, from the Hauptmodul.

    With s = 13 eta(13z)^2 / eta(z)^2, E_4 vanishes exactly where
    s^4 + 7s^3 + 20s^2 + 19s + 1 does (besides the elliptic points), so
    E_4 s^a / (s^4 + ...) for a = 1, 2, 3 span S_4(13); a = 2 is the fixed one.
    """
    work = prec + 2
    s = expand(EtaQuotientSpec(13, {13: 2, 1: -2}), work) * 13
    quartic = s**4 + s**3 * 7 + s**2 * 20 + s * 19 + 1
    f = eisenstein(4, work) * s**2 * quartic.invert() * Fraction(1, 169)
    f = f.truncate_exponent(prec)
    if any(Fraction(c).denominator != 1 for c in f.coeffs):
        raise AssertionError("f_4 has non-integral coefficients")
    return QExpansion(0, (0, 0) + f.normalized().coeffs, prec, ZZ)


@lru_cache(maxsize=1)
def _f4_embedded() -> tuple:
    text = resources.files("frobcong.data").joinpath(F4_DATA_FILE).read_text(encoding="utf-8")
    header = {}
    values = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if ":" in line:
                key, val = line[1:].split(":", 1)
                header[key.strip()] = val.strip()
            continue
        values.append(int(line))
    return header, tuple(values)


def f4_data_version() -> str:
    return _f4_embedded()[0].get("version", "unknown")


def level13_f4(prec: int) -> QExpansion:
    """f_4 = q^2 - 3q^3 + q^4 + ..., from the embedded coefficient table."""
    _, values = _f4_embedded()
    if prec > len(values):
        raise QSeriesError(f"embedded f_4 table holds {len(values)} coefficients, {prec} requested")
    return QExpansion(0, values[:prec], prec, ZZ)


# -- bases ---------------------------------------------------------------------


def check_admissible(m: int, k: int) -> None:
    ok = {
        5: k >= 4 and k % 4 == 0,
        7: k % 12 == 4,
        11: k >= 4 and k % 2 == 0,
        13: k % 12 == 4,
    }.get(m)
    if ok is None:
        raise InadmissibleWeight(f"no explicit basis at level {m}")
    if not ok:
        raise InadmissibleWeight(f"weight {k} is not admissible at level {m}")


def basis_index_set(m: int, k: int) -> list:
    check_admissible(m, k)
    if m == 5:
        return list(range(1, k // 2))
    if m == 7:
        return list(range(1, 2 * (k - 1) // 3))
    if m == 13:
        return list(range(1, (7 * k - 4) // 6))
    if k % 5 == 2:
        return list(range(1, k - 2)) + [k - 1]
    return list(range(1, k - 1))


def dimension(m: int, k: int) -> int:
    """dim S_k(m) as stated for the admissible weights."""
    check_admissible(m, k)
    return {5: k // 2 - 1, 7: 2 * (k - 1) // 3 - 1, 11: k - 2, 13: (7 * k - 4) // 6 - 1}[m]


def basis_exponents(m: int, k: int, r: int) -> tuple:
    """(a, b, extra, extra_order) with F_r = eta(mz)^a eta(z)^b * extra."""
    check_admissible(m, k)
    if m == 5:
        return 6 * r - k // 2, 5 * k // 2 - 6 * r, None, 0
    if m == 7:
        e = r - (k - 1) // 3
        return k - 4 + 4 * e, k - 4 - 4 * e, "f7", 1
    if m == 13:
        e = r - 2 - 7 * (k - 4) // 12
        return k - 4 + 2 * e, k - 4 - 2 * e, "f4", 2
    x = gamma(r, k)
    num = 12 * r - 12 * x - k
    if num % 5:
        raise AssertionError(f"11z exponent (12r - 12 gamma - k)/5 is not integral for r={r}, k={k}")
    a = num // 5
    return a, 2 * k - a, f"h{x}", x


def _extra(name, prec: int) -> QExpansion | None:
    if name is None:
        return None
    if name == "f7":
        return level7_cusp_form(prec + 1)
    if name == "f4":
        return level13_f4(prec + 2)
    # round up so that nearby precisions share one cached model
    return x011_model(-(-max(prec, 12) // 64) * 64).hx[int(name[1])]


def _eta_product(m: int, a: int, b: int, prec: int) -> QExpansion:
    factors = {m: a, 1: b}
    if not a and not b:
        return QExpansion(0, (1,), prec, ZZ)
    return expand(EtaQuotientSpec(m, factors), prec)


def basis_element(m: int, k: int, r: int, prec: int) -> QExpansion:
    """F_r as an integer series with ``prec`` known slots starting at q^r."""
    if r not in basis_index_set(m, k):
        raise IndexError(f"r={r} is outside the basis index range for m={m}, k={k}")
    a, b, extra, _ = basis_exponents(m, k, r)
    out = _eta_product(m, a, b, prec)
    ex = _extra(extra, prec)
    if ex is not None:
        out = out * ex.normalized().truncate(prec)
    out = out.normalized()
    if out.offset24 != 24 * r or out.coeffs[0] != 1:
        raise AssertionError(f"F_{r} does not begin with q^{r}")
    return out


def ord_zero(m: int, k: int, r: int) -> int:
    """Order of F_r at the cusp 0."""
    check_admissible(m, k)
    if m == 5:
        return k // 2 - r
    if m == 7:
        return 2 * (k - 1) // 3 - r
    if m == 11:
        return k - r - xi(gamma(r, k))
    return 7 * (k - 4) // 6 + 4 - r


_EXTRA_ORD_ZERO = {None: 0, "f7": 1, "f4": 2}


def ord_zero_from_parts(m: int, k: int, r: int) -> Fraction:
    """Order at 0 recomputed from the eta-quotient formula plus the extra factor's order there."""
    a, b, extra, _ = basis_exponents(m, k, r)
    eta_zero = 0 if not (a or b) else cusp_orders(EtaQuotientSpec(m, {m: a, 1: b}))[1]
    if extra is not None and extra.startswith("h"):
        extra_zero = -alpha(int(extra[1]))
    else:
        extra_zero = _EXTRA_ORD_ZERO[extra]
    return eta_zero + extra_zero


# -- leading profiles used by the search ------------------------------------------------


@dataclass(frozen=True)
class BasisProfile:
    m: int
    width: int
    profile_len: int
    C: tuple  # C[n][i] = c_i(n)

    def checksum(self) -> str:
        blob = json.dumps({"m": self.m, "C": [list(row) for row in self.C]}, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @property
    def top(self) -> tuple:
        return self.C[: self.width]

    @property
    def check(self) -> tuple:
        return self.C[self.width :]


REFERENCE_PRIMES = {5: (7, 11), 7: (11, 13), 11: (13, 17), 13: (17, 19)}


def _lowpoint_weight(ell: int) -> int:
    return (ell * ell - 1) // 2 + 4


def _reduced_exponents(m: int, i: int) -> tuple:
    """Exponents of F_{r_inf+i} with the eta(mz)^(ell^2) factor removed; must not depend on ell."""
    seen = set()
    for ell in REFERENCE_PRIMES[m]:
        k = _lowpoint_weight(ell)
        r = (ell * ell - 1) * m // 24 + i
        a, b, extra, _ = basis_exponents(m, k, r)
        seen.add((a - ell * ell, b, extra))
    if len(seen) != 1:
        raise AssertionError(f"reduced exponents for m={m}, i={i} depend on ell: {seen}")
    return seen.pop()


def reduced_element(m: int, i: int, prec: int) -> QExpansion:
    """q^(m/24) eta(mz)^a eta(z)^b * extra: F_{r_inf+i}/q^{r_inf} with prod(1 - q^{mn})^(ell^2) dropped."""
    a, b, extra = _reduced_exponents(m, i)
    out = _eta_product(m, a, b, prec).shift(m)
    ex = _extra(extra, prec)
    if ex is not None:
        out = out * ex.normalized().truncate(prec)
    if not out.integral_exponents:
        raise AssertionError("reduced profile element is not on the integral grid")
    return out


@lru_cache(maxsize=None)
def reduced_profile(m: int, prec_rows: int | None = None) -> BasisProfile:
    width, length = WIDTHS[m]
    rows = length if prec_rows is None else prec_rows
    if rows > length:
        raise ValueError(f"at most {length} rows are ell-independent for m={m}")
    cols = []
    for i in range(width):
        s = reduced_element(m, i, rows + 1)
        cols.append(s.list(0, rows))
    C = tuple(tuple(cols[i][n] for i in range(width)) for n in range(rows))
    for n in range(min(rows, width)):
        for i in range(width):
            want = 1 if i == n else 0
            if i >= n and C[n][i] != want:
                raise AssertionError(f"profile for m={m} is not unit lower triangular at ({n}, {i})")
    return BasisProfile(m, width, rows, C)


@lru_cache(maxsize=None)
def extended_profile(m: int, rows: int) -> tuple:
    """Leading-coefficient rows beyond L; valid mod ell whenever rows <= m ell^2."""
    width, _ = WIDTHS[m]
    cols = [reduced_element(m, i, rows + 1).list(0, rows) for i in range(width)]
    return tuple(tuple(cols[i][n] for i in range(width)) for n in range(rows))


def exact_profile(m: int, ell: int, rows: int | None = None) -> tuple:
    """Leading coefficients of F_{r_inf+i}/q^{r_inf} computed from the full basis elements."""
    width, length = WIDTHS[m]
    rows = length if rows is None else rows
    k = _lowpoint_weight(ell)
    r_inf = (ell * ell - 1) * m // 24
    cols = []
    for i in range(width):
        s = basis_element(m, k, r_inf + i, rows)
        cols.append(s.list(r_inf, r_inf + rows))
    return tuple(tuple(cols[i][n] for i in range(width)) for n in range(rows))
