"""Eisenstein series with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import bernoulli, divisor_sigma

from .qseries import QExpansion, QQ


@lru_cache(maxsize=None)
def _bernoulli(k: int) -> Fraction:
    b = bernoulli(k)
    return Fraction(int(b.p), int(b.q))


@lru_cache(maxsize=256)
def eisenstein(k: int, prec: int) -> QExpansion:
    """E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n."""
    if k < 2 or k % 2:
        raise ValueError(f"Eisenstein weight must be even and at least 2, got {k}")
    c = -Fraction(2 * k) / _bernoulli(k)
    coeffs = [Fraction(1)] + [c * int(divisor_sigma(n, k - 1)) for n in range(1, prec)]
    return QExpansion(0, tuple(coeffs), prec, QQ)


@lru_cache(maxsize=64)
def weight_two_form(m: int, prec: int) -> QExpansion:
    """(m E_2(mz) - E_2(z)) / (m - 1): the weight-2 Eisenstein form on Gamma_0(m), constant term 1."""
    e2 = eisenstein(2, prec)
    e2m = e2.rescale(m).truncate(prec)
    return (e2m * m - e2) * Fraction(1, m - 1)
