from __future__ import annotations

import json
import random

import pytest

from frobcong.bases import exact_profile, reduced_profile
from frobcong.frobenius import b_vector, eps_vector
from frobcong.search import (
    SearchError,
    enumerate_eps,
    eps_count,
    eps_to_str,
    evaluate_eps,
    extended_rows_check,
    lowpoint_profile_check,
    residual_candidates,
    run_search,
    solve_triangular,
    str_to_eps,
    sturm_verify_survivor,
)

EPS7 = (-1, 1, -1, -1, 0, 1)
EPS11 = (1, 1, 1, -1, -1, -1)
EPS11_M7 = (-1, 1, 1, 1, -1, -1, -1)


def test_enumerate_counts():
    assert sum(1 for _ in enumerate_eps(2)) == 8
    assert sum(1 for _ in enumerate_eps(6)) == 256
    assert sum(1 for _ in enumerate_eps(7)) == 576
    assert sum(1 for _ in enumerate_eps(11)) == 13312


def test_enumerate_order_and_shape():
    eps = list(enumerate_eps(3))
    assert eps == sorted(eps)
    assert all(e.count(0) <= 1 for e in eps)
    assert eps[0] == (-1, -1, -1) and eps[-1] == (1, 1, 1)


def test_eps_count_formula_brute_force():
    import itertools

    for L in range(1, 14):
        brute = sum(1 for e in itertools.product((-1, 0, 1), repeat=L) if e.count(0) <= 1)
        assert brute == eps_count(L)


def test_eps_string_roundtrip():
    assert eps_to_str(EPS7) == "-+--0+"
    assert str_to_eps("-+--0+") == EPS7
    with pytest.raises(ValueError):
        str_to_eps("x")


def _rhs(m, eps):
    return [x * e for x, e in zip(b_vector(m), eps)]


def test_solve_triangular_examples():
    p5 = reduced_profile(5)
    assert solve_triangular(p5, _rhs(5, EPS7)[:4]) == (-25, 8775, -241375, -2565625)
    assert solve_triangular(p5, _rhs(5, EPS11)[:4]) == (25, 9275, 313575, -3675025)
    p7 = reduced_profile(7)
    assert solve_triangular(p7, _rhs(7, EPS11_M7)[:5]) == (-49, 13916, 920171, 11759412, -224647409)


def test_residual_examples():
    p5 = reduced_profile(5)
    a = solve_triangular(p5, _rhs(5, EPS7)[:4])
    res, g, cands, low = residual_candidates(p5, a, _rhs(5, EPS7)[4:], 5)
    assert res == (-21659050, -115351150 - 104160100)
    assert g == 350 and cands == [7] and low == [2, 5]
    o = evaluate_eps(5, EPS11)
    assert o.gcd_value == 1100 and o.candidates == (11,)
    o = evaluate_eps(7, EPS11_M7)
    assert o.gcd_value == 3234 and o.candidates == (11,) and o.below_threshold == (2, 3, 7)


def test_all_zero_residuals_is_an_error():
    p5 = reduced_profile(5)
    with pytest.raises(SearchError):
        residual_candidates(p5, (0, 0, 0, 0), (0, 0), 5)


def test_run_search_m5_m7():
    r5 = run_search(5)
    assert r5.total_eps == 256 and r5.ok
    assert {(s.ell, s.eps) for s in r5.survivor_summary} == {(7, EPS7), (11, EPS11)}
    r7 = run_search(7)
    assert r7.total_eps == 576 and r7.ok
    assert [(s.ell, s.eps) for s in r7.survivor_summary] == [(11, EPS11_M7)]


def test_outcome_invariants():
    for o in run_search(7).outcomes:
        assert set(o.survivors) <= set(o.candidates)
        for p in o.candidates + o.below_threshold:
            assert o.gcd_value % p == 0
        for ell in o.survivors:
            assert eps_vector(7, ell) == o.eps


@pytest.mark.parametrize("m", [5, 7, 11, 13])
def test_non_divisors_make_system_unsolvable(m):
    rng = random.Random(m)
    p = reduced_profile(m)
    all_eps = list(enumerate_eps(p.profile_len)) if m != 13 else None
    primes = [q for q in range(17, 2000) if all(q % d for d in range(2, int(q**0.5) + 1))]
    for _ in range(100):
        eps = rng.choice(all_eps) if all_eps else tuple(rng.choice((-1, 1)) for _ in range(13))
        ell = rng.choice(primes)
        rhs = _rhs(m, eps)
        alpha = []
        for n in range(p.width):
            alpha.append((rhs[n] - sum(p.C[n][i] * alpha[i] for i in range(n))) % ell)
        consistent = all(
            (sum(c * a for c, a in zip(row, alpha)) - r) % ell == 0 for row, r in zip(p.check, rhs[p.width :])
        )
        assert consistent == (evaluate_eps(m, eps).gcd_value % ell == 0)


@pytest.mark.parametrize("ell", [7, 13])
def test_ell_squared_drop_is_harmless(ell):
    R = reduced_profile(5)
    E = exact_profile(5, ell)
    for eps in enumerate_eps(6):
        rhs = _rhs(5, eps)
        a = solve_triangular(R, rhs[:4])
        for n in (4, 5):
            r_red = sum(c * x for c, x in zip(R.C[n], a)) - rhs[n]
            r_ex = sum(c * x for c, x in zip(E[n], a)) - rhs[n]
            assert (r_red - r_ex) % ell == 0


def test_report_is_deterministic():
    a = json.dumps(run_search(5).to_dict(include_timing=False))
    b = json.dumps(run_search(5).to_dict(include_timing=False))
    assert a == b
    d = run_search(5).to_dict()
    assert {"m", "total_eps", "survivor_summary", "nonempty_candidates", "runtime_ms", "profile_checksum"} <= set(d)


def test_workers_do_not_change_report():
    one = run_search(7).to_dict(include_timing=False)
    two = run_search(7, workers=2, chunk_size=100).to_dict(include_timing=False)
    one["config"].pop("workers")
    two["config"].pop("workers")
    assert one == two


def test_lowpoint_examples():
    assert lowpoint_profile_check(5, 13)
    assert lowpoint_profile_check(5, 7)
    assert lowpoint_profile_check(11, 13)
    assert lowpoint_profile_check(13, 17)
    assert eps_vector(5, 7)[4] == 0


@pytest.mark.parametrize("m,ell", [(5, 7), (5, 11), (7, 11)])
def test_sturm_verify_known(m, ell):
    assert sturm_verify_survivor(m, ell)


def test_extended_rows_known_congruences_hold():
    for m, ell in [(5, 7), (5, 11), (7, 11)]:
        assert extended_rows_check(m, ell) is None
    # a prime without a congruence breaks somewhere past the profile
    assert extended_rows_check(13, 17) is not None
