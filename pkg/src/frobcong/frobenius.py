"""Colored Frobenius partition counts and the cusp forms h_ell built from them."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eta import EtaQuotientSpec, euler_power, expand
from .qseries import GF, QExpansion, QSeriesError, ZZ, convolve

# m -> (number of basis forms used in the search, number of low-point coefficients)
WIDTHS = {5: (4, 6), 7: (5, 7), 11: (9, 11), 13: (12, 13)}

CACHE_VERSION = 1


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % p for p in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class SearchContext:
    m: int
    ell: int

    def __post_init__(self):
        if self.m not in WIDTHS:
            raise ValueError(f"m must be one of {sorted(WIDTHS)}, got {self.m}")
        if not _is_prime(self.ell) or self.ell <= self.m:
            raise ValueError(f"ell must be a prime larger than m={self.m}, got {self.ell}")
        assert (self.ell**2 - 1) * self.m % 24 == 0
        assert (self.ell**2 - self.m**2) % 24 == 0

    @property
    def k(self) -> int:
        """Weight of the low point of the theta cycle."""
        return (self.ell**2 - 1) // 2 + 4

    @property
    def weight(self) -> int:
        """Weight of h_ell itself."""
        return (self.ell**2 - 1) // 2

    @property
    def r_inf(self) -> int:
        return (self.ell**2 - 1) * self.m // 24

    @property
    def r_zero(self) -> int:
        return (self.ell**2 - self.m**2) // 24

    @property
    def beta(self) -> int:
        return kiming_olsson_beta(self.m, self.ell)

    @property
    def width(self) -> int:
        return WIDTHS[self.m][0]

    @property
    def profile_len(self) -> int:
        return WIDTHS[self.m][1]


def rep_numbers(m: int, nmax: int) -> list:
    """r_m(n) for 0 <= n <= nmax: representations by sum x_i^2 + sum_{i<j} x_i x_j in m-1 variables.

    Dynamic programming over (s, t) = (sum x_i, sum x_i^2), since the form
    equals (s^2 + t) / 2.
    """
    if m < 1:
        raise ValueError("m must be positive")
    nvar = m - 1
    T = 2 * nmax
    X = math.isqrt(T)
    S = math.isqrt(nvar * T)
    dtype = np.int64 if (2 * X + 1) ** max(nvar, 1) < 2**62 else object
    dp = np.zeros((2 * S + 1, T + 1), dtype=dtype)
    dp[S, 0] = 1
    for _ in range(nvar):
        new = np.zeros_like(dp)
        for x in range(-X, X + 1):
            x2 = x * x
            src = dp[:, : T + 1 - x2]
            if x >= 0:
                new[x:, x2:] += src[: 2 * S + 1 - x]
            else:
                new[: 2 * S + 1 + x, x2:] += src[-x:]
        dp = new
    r = [0] * (nmax + 1)
    for si in range(2 * S + 1):
        s2 = (si - S) ** 2
        if s2 > T:
            continue
        row = dp[si]
        for t in range(T + 1 - s2):
            v = row[t]
            if v:
                r[(s2 + t) // 2] += int(v)
    return r


_CPHI: dict = {}


def cphi_series(m: int, nmax: int) -> list:
    """c phi_m(n) for 0 <= n <= nmax, from (sum r_m(n) q^n) / prod (1 - q^n)^m."""
    if m < 1 or m % 2 == 0:
        raise ValueError(f"m must be a positive odd integer, got {m}")
    have = _CPHI.get(m)
    if have is None or len(have) <= nmax:
        r = rep_numbers(m, nmax)
        have = tuple(convolve(r, euler_power(-m, nmax + 1), nmax + 1))
        _CPHI[m] = have
    return list(have[: nmax + 1])


def kiming_olsson_beta(m: int, ell: int) -> int:
    """The only residue class that can carry a congruence: m / 24 mod ell."""
    if ell <= 3:
        raise ValueError("ell must exceed 3")
    return m * pow(24, -1, ell) % ell


def h_ell_mod(ctx: SearchContext, prec: int) -> QExpansion:
    """q^r_inf sum_{n < prec} c phi_m(n) q^n reduced mod ell (valid for prec <= ell^2 m)."""
    if prec > ctx.ell**2 * ctx.m:
        raise QSeriesError(f"prec {prec} exceeds the window ell^2 m = {ctx.ell**2 * ctx.m}")
    c = cphi_series(ctx.m, prec - 1)
    return QExpansion(24 * ctx.r_inf, tuple(c), prec, GF(ctx.ell))


def theta_series_A(m: int, prec: int) -> QExpansion:
    """A_m = prod (1 - q^n)^m sum c phi_m(n) q^n."""
    c = convolve(cphi_series(m, prec - 1), euler_power(m, prec), prec)
    return QExpansion(0, tuple(c), prec, ZZ)


def h_ell_exact(ctx: SearchContext, prec: int) -> QExpansion:
    """eta^(ell^2)(m z) / eta^m(z) * A_m(z) over the integers."""
    if prec > 4000:
        raise QSeriesError("precision guard: prec above 4000")
    eta_part = expand(EtaQuotientSpec(ctx.m, {ctx.m: ctx.ell**2, 1: -ctx.m}), prec)
    h = eta_part * theta_series_A(ctx.m, prec)
    if h.offset24 != 24 * ctx.r_inf:
        raise AssertionError("h_ell does not start at q^r_inf")
    window = min(prec, ctx.ell**2 * ctx.m)
    if not h.truncate(window).reduce_mod(ctx.ell).agrees_with(h_ell_mod(ctx, window)):
        raise AssertionError("exact h_ell disagrees with its mod-ell shortcut")
    return h


def b_vector(m: int, length: int | None = None) -> tuple:
    """(c phi_m(n) (24n - m)^2) for n < length; independent of ell."""
    if length is None:
        length = WIDTHS[m][1]
    c = cphi_series(m, length - 1)
    return tuple(c[n] * (24 * n - m) ** 2 for n in range(length))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a / p) for an odd prime p, by Euler's criterion."""
    t = pow(a % p, (p - 1) // 2, p)
    return -1 if t == p - 1 else t


def eps_vector(m: int, ell: int, length: int | None = None) -> tuple:
    """Legendre symbols (24(24n - m) / ell) for n < length."""
    if length is None:
        length = WIDTHS[m][1]
    return tuple(legendre(24 * (24 * n - m), ell) for n in range(length))


@dataclass(frozen=True)
class CongruenceReport:
    m: int
    ell: int
    beta: int
    nmax: int
    holds: bool
    first_failure: int | None


def check_congruence(m: int, ell: int, nmax: int, beta: int | None = None) -> CongruenceReport:
    """Test c phi_m(ell n + beta) == 0 mod ell for 0 <= n <= nmax."""
    if beta is None:
        beta = kiming_olsson_beta(m, ell)
    c = cphi_series(m, ell * nmax + beta)
    for n in range(nmax + 1):
        if c[ell * n + beta] % ell:
            return CongruenceReport(m, ell, beta, nmax, False, n)
    return CongruenceReport(m, ell, beta, nmax, True, None)


def congruence_witnesses(m: int, ell: int, nmax: int) -> dict:
    """For every residue beta mod ell, the first n <= nmax with c phi_m(ell n + beta) != 0 mod ell."""
    return {b: check_congruence(m, ell, nmax, b).first_failure for b in range(ell)}


# -- coefficient cache ----------------------------------------------------------


def cache_path(cache_dir, m: int) -> Path:
    return Path(cache_dir) / f"cphi_m{m}_v{CACHE_VERSION}.txt"


def write_cache(path, m: int, values) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"cphi m={m} nmax={len(values) - 1} version={CACHE_VERSION}"]
    lines += [str(v) for v in values]
    tmp = path.with_suffix(".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def read_cache(path) -> tuple:
    """Return (m, values); raises ValueError on a malformed file."""
    lines = Path(path).read_text(encoding="utf-8").split()
    if len(lines) < 4 or lines[0] != "cphi":
        raise ValueError(f"{path}: not a cphi cache file")
    fields = dict(tok.split("=", 1) for tok in lines[1:4])
    m, nmax, version = int(fields["m"]), int(fields["nmax"]), int(fields["version"])
    if version != CACHE_VERSION:
        raise ValueError(f"{path}: unsupported cache version {version}")
    values = [int(v) for v in lines[4:]]
    if len(values) != nmax + 1:
        raise ValueError(f"{path}: header says nmax={nmax} but holds {len(values)} values")
    return m, values


def cached_cphi(m: int, nmax: int, cache_dir=None) -> list:
    """c phi_m(0..nmax), reusing and refreshing an on-disk cache when ``cache_dir`` is given."""
    if cache_dir is None:
        return cphi_series(m, nmax)
    path = cache_path(cache_dir, m)
    if path.exists():
        try:
            cm, values = read_cache(path)
        except (ValueError, KeyError):
            values, cm = [], None
        if cm == m and len(values) > nmax:
            if len(_CPHI.get(m, ())) < len(values):
                _CPHI[m] = tuple(values)
            return values[: nmax + 1]
    values = cphi_series(m, nmax)
    write_cache(path, m, values)
    return values
