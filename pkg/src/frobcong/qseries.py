"""Truncated q-series with exact coefficients.

A :class:`QExpansion` stores the coefficients of

    q^(offset24/24) * (c_0 + c_1 q + c_2 q^2 + ... + c_{prec-1} q^{prec-1} + O(q^prec))

over one of three coefficient rings: the integers, the rationals, or Z/pZ for
an odd prime p.  Slots at or beyond ``prec`` are unknown; no operation ever
treats them as zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

MAX_MODULUS = 2**31


class QSeriesError(ValueError):
    """Raised on ring mismatches, incompatible grids or non-invertible series."""


@dataclass(frozen=True)
class Ring:
    kind: str  # "ZZ", "QQ" or "GF"
    modulus: int = 0

    def __post_init__(self):
        if self.kind not in ("ZZ", "QQ", "GF"):
            raise QSeriesError(f"unknown ring kind {self.kind!r}")
        if self.kind == "GF":
            p = self.modulus
            if p < 3 or p % 2 == 0 or p >= MAX_MODULUS:
                raise QSeriesError(f"modulus must be an odd prime below 2^31, got {p}")
        elif self.modulus:
            raise QSeriesError("only GF rings carry a modulus")

    def __str__(self):
        return f"GF({self.modulus})" if self.kind == "GF" else self.kind

    @property
    def is_exact(self) -> bool:
        return self.kind != "GF"

    def coerce(self, x):
        if self.kind == "ZZ":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise QSeriesError(f"{x} is not an integer")
                return x.numerator
            return int(x)
        if self.kind == "QQ":
            return Fraction(x)
        p = self.modulus
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise QSeriesError(f"denominator of {x} is divisible by {p}")
            return x.numerator * pow(x.denominator, -1, p) % p
        return int(x) % p

    def unit_inverse(self, x):
        if self.kind == "ZZ":
            if x not in (1, -1):
                raise QSeriesError(f"{x} is not a unit in ZZ")
            return x
        if self.kind == "QQ":
            if x == 0:
                raise QSeriesError("zero is not invertible")
            return 1 / Fraction(x)
        if x % self.modulus == 0:
            raise QSeriesError(f"zero is not invertible mod {self.modulus}")
        return pow(x, -1, self.modulus)


ZZ = Ring("ZZ")
QQ = Ring("QQ")


def GF(p: int) -> Ring:
    return Ring("GF", p)


def _join(r1: Ring, r2: Ring) -> Ring:
    if r1 == r2:
        return r1
    if {r1.kind, r2.kind} == {"ZZ", "QQ"}:
        return QQ
    raise QSeriesError(f"ring mismatch: {r1} vs {r2}")


def convolve(a: Sequence, b: Sequence, n: int) -> list:
    """First ``n`` terms of the Cauchy product of ``a`` and ``b``."""
    out = [0] * n
    nb = len(b)
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        lim = min(nb, n - i)
        for j in range(lim):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


@dataclass(frozen=True)
class QExpansion:
    offset24: int
    coeffs: tuple
    prec: int
    ring: Ring = ZZ

    def __post_init__(self):
        if self.prec < 1:
            raise QSeriesError(f"precision must be at least 1, got {self.prec}")
        c = list(self.coeffs[: self.prec])
        if len(c) < self.prec:
            c.extend([0] * (self.prec - len(c)))
        object.__setattr__(self, "coeffs", tuple(self.ring.coerce(x) for x in c))

    # -- construction -----------------------------------------------------
    @classmethod
    def from_exponents(cls, terms: dict, prec_exponent: int, ring: Ring = ZZ):
        """Integral-grid series ``sum terms[e] q^e`` known below exponent ``prec_exponent``."""
        lo = min(terms) if terms else 0
        c = [0] * (prec_exponent - lo)
        for e, v in terms.items():
            if e < prec_exponent:
                c[e - lo] = v
        return cls(24 * lo, tuple(c), prec_exponent - lo, ring)

    @classmethod
    def one(cls, prec: int, ring: Ring = ZZ):
        return cls(0, (1,), prec, ring)

    @classmethod
    def monomial(cls, exponent24: int, prec: int, ring: Ring = ZZ, coeff=1):
        return cls(exponent24, (coeff,), prec, ring)

    # -- basic accessors -----------------------------------------------------
    @property
    def integral_exponents(self) -> bool:
        return self.offset24 % 24 == 0

    @property
    def start(self) -> int:
        """Exponent of slot 0 (requires integral exponents)."""
        self._require_integral("start")
        return self.offset24 // 24

    @property
    def top24(self) -> int:
        """First unknown exponent, in 24ths."""
        return self.offset24 + 24 * self.prec

    def _require_integral(self, what: str):
        if not self.integral_exponents:
            raise QSeriesError(f"{what} needs integral exponents (offset24={self.offset24})")

    def __getitem__(self, exponent: int):
        """Coefficient of q^exponent (integral-exponent series only)."""
        self._require_integral("indexing by exponent")
        n = exponent - self.offset24 // 24
        if n < 0:
            return self.ring.coerce(0)
        if n >= self.prec:
            raise QSeriesError(f"q^{exponent} is beyond the known precision")
        return self.coeffs[n]

    def list(self, start: int, stop: int) -> list:
        """Coefficients of q^start, ..., q^(stop-1)."""
        return [self[e] for e in range(start, stop)]

    def valuation(self):
        """Exponent (in 24ths) of the first nonzero known slot, or None if all are zero."""
        for n, c in enumerate(self.coeffs):
            if c:
                return self.offset24 + 24 * n
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def normalized(self) -> "QExpansion":
        """Move leading zero slots into the offset."""
        v = self.valuation()
        if v is None or v == self.offset24:
            return self
        k = (v - self.offset24) // 24
        return QExpansion(v, self.coeffs[k:], self.prec - k, self.ring)

    def truncate(self, prec: int) -> "QExpansion":
        if prec > self.prec:
            raise QSeriesError("cannot raise precision by truncation")
        return QExpansion(self.offset24, self.coeffs[:prec], prec, self.ring)

    def truncate_exponent(self, top: int) -> "QExpansion":
        """Keep slots with exponent below ``top`` (integral grid)."""
        self._require_integral("truncate_exponent")
        return self.truncate(min(self.prec, top - self.offset24 // 24))

    def shift(self, exponent24: int) -> "QExpansion":
        """Multiply by q^(exponent24/24)."""
        return QExpansion(self.offset24 + exponent24, self.coeffs, self.prec, self.ring)

    def change_ring(self, ring: Ring) -> "QExpansion":
        return QExpansion(self.offset24, self.coeffs, self.prec, ring)

    def to_integer(self) -> "QExpansion":
        """Convert a rational series with integral coefficients to ZZ."""
        return self.change_ring(ZZ)

    def rescale(self, d: int) -> "QExpansion":
        """Substitute q -> q^d."""
        if d < 1:
            raise QSeriesError("rescale factor must be positive")
        c = [0] * (d * self.prec)
        for n, x in enumerate(self.coeffs):
            c[d * n] = x
        return QExpansion(self.offset24 * d, tuple(c), d * self.prec, self.ring)

    # -- alignment ------------------------------------------------------------
    def _aligned(self, other: "QExpansion"):
        if (self.offset24 - other.offset24) % 24:
            raise QSeriesError(
                f"incompatible exponent grids: {self.offset24}/24 vs {other.offset24}/24"
            )
        ring = _join(self.ring, other.ring)
        lo = min(self.offset24, other.offset24)
        top = min(self.top24, other.top24)
        n = (top - lo) // 24
        if n < 1:
            raise QSeriesError("no overlapping precision")

        def pad(s):
            k = (s.offset24 - lo) // 24
            c = [0] * k + list(s.coeffs)
            return c[:n] + [0] * max(0, n - len(c))

        return lo, n, ring, pad(self), pad(other)

    # -- arithmetic ----------------------------------------------------------
    def _scalar(self, x) -> "QExpansion":
        return QExpansion(self.offset24, tuple(c * x for c in self.coeffs), self.prec, self._scalar_ring(x))

    def _scalar_ring(self, x):
        if isinstance(x, Fraction) and x.denominator != 1 and self.ring.kind == "ZZ":
            return QQ
        return self.ring

    def __add__(self, other):
        if not isinstance(other, QExpansion):
            return self + self._constant(other)
        lo, n, ring, a, b = self._aligned(other)
        return QExpansion(lo, tuple(x + y for x, y in zip(a, b)), n, ring)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion(self.offset24, tuple(-c for c in self.coeffs), self.prec, self.ring)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _constant(self, x) -> "QExpansion":
        # a constant only makes sense on the integral grid
        ring = self._scalar_ring(x) if isinstance(x, Fraction) else self.ring
        top = self.top24
        if top <= 0:
            return QExpansion(self.offset24, (0,), self.prec, ring)
        if self.offset24 % 24:
            raise QSeriesError("cannot add a constant to a series on a fractional grid")
        start = self.offset24 // 24
        if start > 0:
            return QExpansion(0, (x,), top // 24, ring)
        return QExpansion(self.offset24, tuple([0] * (-start) + [x]), self.prec, ring)

    def __mul__(self, other):
        if not isinstance(other, QExpansion):
            return self._scalar(other)
        ring = _join(self.ring, other.ring)
        n = min(self.prec, other.prec)
        c = convolve(self.coeffs, other.coeffs, n)
        return QExpansion(self.offset24 + other.offset24, tuple(c), n, ring)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QExpansion):
            return self * other.invert()
        if self.ring.kind == "GF":
            return self * self.ring.unit_inverse(other % self.ring.modulus)
        return self._scalar(Fraction(1) / Fraction(other))

    def invert(self) -> "QExpansion":
        """Multiplicative inverse; the leading known slot must hold a unit."""
        a = self.normalized()
        if a.is_zero():
            raise QSeriesError("cannot invert a series with no nonzero known coefficient")
        c = a.coeffs
        inv0 = a.ring.unit_inverse(c[0])
        n = a.prec
        b = [0] * n
        b[0] = inv0
        for k in range(1, n):
            s = 0
            for j in range(1, k + 1):
                cj = c[j]
                if cj:
                    s += cj * b[k - j]
            b[k] = -s * inv0
            if a.ring.kind == "GF":
                b[k] %= a.ring.modulus
        return QExpansion(-a.offset24, tuple(b), n, a.ring)

    def __pow__(self, e: int) -> "QExpansion":
        if not isinstance(e, int):
            raise QSeriesError("only integer powers are supported")
        base = self
        if e < 0:
            base = self.invert()
            e = -e
        if e == 0:
            return QExpansion(0, (1,), self.prec, self.ring)
        base = base.normalized()
        result = None
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- operators -----------------------------------------------------------
    def theta(self) -> "QExpansion":
        """q d/dq: the slot with exponent e is multiplied by e."""
        if self.ring.kind == "GF" and not self.integral_exponents:
            raise QSeriesError("theta on a fractional grid needs 1/24 in the coefficient ring")
        if self.integral_exponents:
            s = self.offset24 // 24
            c = tuple((s + n) * x for n, x in enumerate(self.coeffs))
            return QExpansion(self.offset24, c, self.prec, self.ring)
        ring = QQ if self.ring.kind == "ZZ" else self.ring
        c = tuple(Fraction(self.offset24 + 24 * n, 24) * x for n, x in enumerate(self.coeffs))
        return QExpansion(self.offset24, c, self.prec, ring)

    def u_ell(self, ell: int) -> "QExpansion":
        """sum a(ell n) q^n."""
        self._require_integral("U_ell")
        s = self.offset24 // 24
        first = -((-s) // ell)  # smallest n with ell*n >= s
        top = s + self.prec  # first unknown exponent
        last = (top - 1) // ell  # largest n with ell*n known
        if last < first:
            raise QSeriesError("U_ell: no known slot with exponent divisible by ell")
        c = tuple(self.coeffs[ell * n - s] for n in range(first, last + 1))
        return QExpansion(24 * first, c, last - first + 1, self.ring)

    def reduce_mod(self, ell: int) -> "QExpansion":
        if self.ring.kind == "GF":
            if self.ring.modulus != ell:
                raise QSeriesError("cannot change modulus of a reduced series")
            return self
        return self.change_ring(GF(ell))

    # -- comparison ----------------------------------------------------------
    def agrees_with(self, other: "QExpansion") -> bool:
        """Equality on the shared precision window."""
        try:
            _, _, _, a, b = self._aligned(other)
        except QSeriesError:
            return False
        if self.ring.kind == "GF" or other.ring.kind == "GF":
            p = self.ring.modulus or other.ring.modulus
            return all((x - y) % p == 0 for x, y in zip(a, b))
        return a == b

    def __repr__(self):
        terms = []
        for n, c in enumerate(self.coeffs[:8]):
            if c:
                e = Fraction(self.offset24 + 24 * n, 24)
                terms.append(f"{c}*q^{e}")
        top = Fraction(self.top24, 24)
        body = " + ".join(terms) or "0"
        return f"QExpansion({body} + O(q^{top}), {self.ring})"


def series(coeffs: Iterable, prec: int | None = None, ring: Ring = ZZ, start: int = 0) -> QExpansion:
    """Integral-grid series with slot 0 at exponent ``start``."""
    c = tuple(coeffs)
    return QExpansion(24 * start, c, len(c) if prec is None else prec, ring)
