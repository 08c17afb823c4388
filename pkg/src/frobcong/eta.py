"""Dedekind eta quotients at prime level and their cusp orders."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .qseries import QExpansion, QSeriesError, ZZ, convolve


@lru_cache(maxsize=None)
def _sigma_table(n: int) -> tuple:
    sig = [0] * n
    for d in range(1, n):
        for k in range(d, n, d):
            sig[k] += d
    return tuple(sig)


def euler_power(e: int, prec: int) -> tuple:
    """Coefficients of prod_{n>=1} (1 - q^n)^e through q^(prec-1).

    Uses n c_n = -e sum_{k=1}^{n} sigma(k) c_{n-k}, which follows from the
    logarithmic derivative of the Euler product; cost does not depend on e.
    """
    sig = _sigma_table(prec)
    c = [0] * prec
    c[0] = 1
    for n in range(1, prec):
        s = 0
        for k in range(1, n + 1):
            s += sig[k] * c[n - k]
        c[n] = -e * s // n
    return tuple(c)


def eta_series(prec: int) -> QExpansion:
    """eta(z) = q^(1/24) prod (1 - q^n)."""
    if prec < 1:
        raise QSeriesError("prec must be positive")
    return QExpansion(1, euler_power(1, prec), prec, ZZ)


@dataclass(frozen=True)
class EtaQuotientSpec:
    """Formal product prod_{delta | level} eta(delta z)^r_delta."""

    level: int
    factors: dict = field(hash=False)

    def __post_init__(self):
        clean = {int(d): int(r) for d, r in self.factors.items() if r}
        if not clean:
            raise ValueError("an eta quotient needs at least one nonzero exponent")
        for d in clean:
            if d < 1 or self.level % d:
                raise ValueError(f"{d} does not divide the level {self.level}")
        object.__setattr__(self, "factors", dict(sorted(clean.items())))

    def __hash__(self):
        return hash((self.level, tuple(self.factors.items())))

    def weight(self) -> Fraction:
        return Fraction(sum(self.factors.values()), 2)

    def combine(self, other: "EtaQuotientSpec") -> "EtaQuotientSpec":
        if other.level != self.level:
            raise ValueError("levels differ")
        f = dict(self.factors)
        for d, r in other.factors.items():
            f[d] = f.get(d, 0) + r
        return EtaQuotientSpec(self.level, f)

    def order_inf24(self) -> int:
        return sum(d * r for d, r in self.factors.items())

    def satisfies_mod24(self) -> bool:
        """Both sum(delta r) and sum((N/delta) r) are divisible by 24."""
        n = self.level
        return self.order_inf24() % 24 == 0 and sum(n // d * r for d, r in self.factors.items()) % 24 == 0

    def is_holomorphic_form(self) -> bool:
        """Minimal holomorphy certificate used for trivial-character forms at prime level."""
        o_inf, o_zero = cusp_orders(self)
        return self.satisfies_mod24() and o_inf >= 0 and o_zero >= 0 and self.weight().denominator == 1


def expand(spec: EtaQuotientSpec, prec: int) -> QExpansion:
    """q-expansion of the eta quotient with ``prec`` known slots from q^(sum delta r / 24)."""
    if prec < 1:
        raise QSeriesError("prec must be positive")
    total = [1] + [0] * (prec - 1)
    for d, r in spec.factors.items():
        base = euler_power(r, (prec - 1) // d + 1)
        spread = [0] * prec
        for n, x in enumerate(base):
            spread[d * n] = x
        total = convolve(total, spread, prec)
    return QExpansion(spec.order_inf24(), tuple(total), prec, ZZ)


def cusp_orders(spec: EtaQuotientSpec) -> tuple:
    """(ord_inf, ord_0) as exact rationals; ord_0 is read off after the Fricke involution."""
    n = spec.level
    o_inf = Fraction(spec.order_inf24(), 24)
    o_zero = Fraction(n, 24) * sum(Fraction(r, d) for d, r in spec.factors.items())
    return o_inf, o_zero


def sturm_bound(k: int, m: int) -> int:
    """ceil(k (m+1) / 12) for Gamma_0(m), m prime."""
    if k < 0 or k % 2:
        raise ValueError("weight must be a non-negative even integer")
    return -((-k * (m + 1)) // 12)
