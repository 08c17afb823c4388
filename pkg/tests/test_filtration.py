from __future__ import annotations

import random
from fractions import Fraction

import pytest

from frobcong.eta import EtaQuotientSpec, expand
from frobcong.filtration import (
    FiltrationRecord,
    SpanningSetUnavailable,
    dim_cusp_forms,
    dim_modular_forms,
    eisenstein,
    filtration_of,
    modular_basis,
    ramanujan_serre,
    theta_cycle,
    theta_step,
)
from frobcong.frobenius import SearchContext, h_ell_mod
from frobcong.qseries import GF, QQ, series


def test_eisenstein_examples():
    assert eisenstein(2, 3).list(0, 3) == [1, -24, -72]
    assert eisenstein(4, 2).list(0, 2) == [1, 240]
    assert eisenstein(6, 2).list(0, 2) == [1, -504]
    with pytest.raises(ValueError):
        eisenstein(3, 5)


@pytest.mark.parametrize("ell", [5, 7, 11, 13])
def test_eisenstein_congruences(ell):
    lo = eisenstein(ell - 1, 30).reduce_mod(ell)
    assert lo.list(0, 30) == [1] + [0] * 29
    hi = eisenstein(ell + 1, 30).reduce_mod(ell)
    assert hi.agrees_with(eisenstein(2, 30).reduce_mod(ell))


def test_ramanujan_serre_examples():
    one = series([1], prec=10)
    assert ramanujan_serre(one, 0).is_zero()
    delta = expand(EtaQuotientSpec(1, {1: 24}), 20)
    assert ramanujan_serre(delta, 12).is_zero()


def test_ramanujan_serre_is_graded_derivation():
    rng = random.Random(5)
    for _ in range(10):
        f = series([rng.randint(-9, 9) for _ in range(15)])
        g = series([rng.randint(-9, 9) for _ in range(15)])
        k0, k1 = 2 * rng.randint(0, 6), 2 * rng.randint(0, 6)
        lhs = ramanujan_serre(f * g, k0 + k1)
        rhs = ramanujan_serre(f, k0) * g + f * ramanujan_serre(g, k1)
        assert lhs.agrees_with(rhs)


def test_theta_step_congruent_to_theta():
    rng = random.Random(6)
    for _ in range(20):
        f = series([rng.randint(-99, 99) for _ in range(25)])
        k0 = 2 * rng.randint(0, 20)
        h = theta_step(f, k0, 7)
        assert (h - f.theta()).reduce_mod(7).is_zero()
    assert theta_step(series([1], prec=10), 0, 7).reduce_mod(7).is_zero()


def test_theta_step_on_h_ell_keeps_valuation():
    ctx = SearchContext(5, 7)
    f = h_ell_mod(ctx, 20)
    for i in range(3):
        g = theta_step(f, ctx.weight + i * 8, 7)
        assert g.valuation() >= 24 * ctx.r_inf
        f = g


def test_dimension_formulas():
    assert dim_cusp_forms(1, 12) == 1 and dim_modular_forms(1, 12) == 2
    assert [dim_cusp_forms(11, k) for k in (2, 4, 6)] == [1, 2, 4]
    assert dim_modular_forms(5, 2) == 1 and dim_modular_forms(11, 2) == 2
    assert dim_cusp_forms(13, 4) == 3 and dim_cusp_forms(7, 4) == 1
    assert dim_modular_forms(5, 0) == 1 and dim_modular_forms(5, -2) == 0


@pytest.mark.parametrize("m", [1, 5, 7, 11, 13])
def test_modular_basis_ranks(m):
    for k in range(0, 26, 2):
        assert len(modular_basis(m, k, 60)) == dim_modular_forms(m, k)


def test_modular_basis_needs_sturm_window():
    with pytest.raises(SpanningSetUnavailable):
        modular_basis(5, 40, 5)


def test_filtration_level_one():
    delta = expand(EtaQuotientSpec(1, {1: 24}), 10)
    lifted = (eisenstein(10, 10) * delta).reduce_mod(11)
    assert filtration_of(lifted, 22, 1) == 12
    e10 = eisenstein(10, 10).reduce_mod(11)
    assert filtration_of(e10, 10, 1) == 0


def test_filtration_requires_mod_series():
    with pytest.raises(ValueError):
        filtration_of(series([1, 2, 3]), 4, 5)


def test_filtration_examples_5_7():
    ctx = SearchContext(5, 7)
    f = h_ell_mod(ctx, 40)
    assert filtration_of(f, 24, 5) == 24
    for j in range(1, 6):
        f = f.theta()
        want = 24 + 8 * j if j <= 4 else 28
        assert filtration_of(f, 24 + 8 * j, 5) == want


def test_theta_cycle_5_7_record():
    rec = theta_cycle(5, 7, 6)
    assert isinstance(rec, FiltrationRecord)
    w = [x for _, x in rec.cycle]
    assert w == [24, 32, 40, 48, 56, 28, 24]
    assert rec.alpha == 6 == Fraction(7 + 5, 2)
    for i, x in rec.cycle:
        assert (x - rec.start_weight - 2 * i) % 6 == 0
        assert x >= (49 - 5) // 2
    for (i, a), (_, b) in zip(rec.cycle, rec.cycle[1:]):
        assert b <= a + 8
        assert (b == a + 8) == (a % 7 != 0)
    assert (w[6] - w[0]) % 6 == 12 % 6


def test_theta_cycle_5_11_low_point():
    rec = theta_cycle(5, 11, 7)
    assert dict(rec.cycle)[7] == 64
    assert rec.alpha == 8


def test_theta_power_fixes_h_ell_with_congruence():
    ctx = SearchContext(5, 7)
    h = h_ell_mod(ctx, 200)
    t = h
    for _ in range(6):
        t = t.theta()
    assert t.agrees_with(h)
    assert h.u_ell(7).is_zero()
