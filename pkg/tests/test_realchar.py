import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from charlab import characters as ch
from charlab import realchar
from charlab.errors import DomainError
from charlab.smooth import psi_count

from conftest import naive_is_prime, trial_factor


def kron_oracle(D, n):
    """Kronecker symbol (D/n) by trial factorisation of n and Euler's criterion."""
    out = 1
    for p, e in trial_factor(n):
        if p == 2:
            s = 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
        else:
            r = D % p
            s = 0 if r == 0 else (1 if pow(r, (p - 1) // 2, p) == 1 else -1)
        out *= s**e
    return out


def is_fund_oracle(D):
    if D in (0, 1):
        return False
    sqf = lambda m: all(m % (p * p) for p in range(2, math.isqrt(abs(m)) + 1))  # noqa: E731
    if D % 4 == 1:
        return sqf(D)
    if D % 4 == 0:
        return (D // 4) % 4 in (2, 3) and sqf(D // 4)
    return False


def test_splitting_class_examples():
    for y, b in [(2, 8), (3, 24), (5, 120), (7, 840)]:
        cls = realchar.smooth_splitting_class(y)
        assert (cls.a, cls.b) == (1, b)
        assert cls.contains(1 + 5 * b) and not cls.contains(2)


def test_splitting_class_overflow():
    from charlab.errors import ResourceCapError

    with pytest.raises(ResourceCapError):
        realchar.smooth_splitting_class(60)


def test_fundamental_discriminant_examples():
    assert realchar.fundamental_discriminants_in(5, 12, "+") == [5, 8, 12]
    cls = realchar.smooth_splitting_class(3)
    assert realchar.fundamental_discriminants_in(1, 100, "+", cls) == [73, 97]
    assert realchar.fundamental_discriminants_in(14, 14.5, "both") == []
    assert realchar.fundamental_discriminants_in(3, 8, "both") == [-3, -4, 5, -7, 8, -8]


def test_fundamental_discriminants_match_oracle():
    got = realchar.fundamental_discriminants_in(1, 2000, "both")
    want = sorted((D for m in range(1, 2001) for D in (m, -m) if is_fund_oracle(D)), key=lambda D: (abs(D), D < 0))
    assert got == want


def test_real_char_sum_examples():
    assert realchar.real_char_sum(5, 4) == 0
    assert realchar.real_char_sum(73, 4) == 4
    for D in (-3, -4, 5, 8, -8, 12, 73):
        assert realchar.real_char_sum(D, 1) == 1
    with pytest.raises(DomainError):
        realchar.real_char_sum(9, 3)
    with pytest.raises(DomainError):
        realchar.real_char_sum(1, 3)


@given(st.integers(-3000, 3000), st.integers(1, 400))
def test_real_char_sum_matches_oracle(D, x):
    if not is_fund_oracle(D):
        return
    assert realchar.real_char_sum(D, x) == sum(kron_oracle(D, n) for n in range(1, x + 1))


def test_kronecker_rows_match_oracle():
    Ds = realchar.fundamental_discriminants_in(1, 300, "both")
    M = realchar.kronecker_rows(Ds, 120)
    assert M.shape == (len(Ds), 121)
    for i, D in enumerate(Ds):
        assert M[i, 0] == 0
        assert [int(v) for v in M[i, 1:]] == [kron_oracle(D, n) for n in range(1, 121)]


def test_full_period_sums_vanish():
    Ds = realchar.fundamental_discriminants_in(1, 10**4, "both")
    for D in Ds[::7]:
        assert realchar.real_char_sum(D, abs(D)) == 0


def test_consistent_with_character_module():
    for p in range(5, 1000, 4):
        if not naive_is_prime(p):
            continue
        quad = next(c for c in ch.character_group(p) if c.order == 2)
        for x in (1, 7, p // 3, p // 2):
            assert realchar.real_char_sum(p, x) == round(ch.character_sum(quad, x).real)


def test_real_delta_examples():
    assert realchar.real_delta_search(5, 4) == (2, -7)
    for q in (5, 30, 117):
        value, D = realchar.real_delta_search(q, 1)
        assert value == 1
        assert D == realchar.fundamental_discriminants_in(q, 2 * q)[0]
    with pytest.raises(DomainError):
        realchar.real_delta_search(2, 3)


@pytest.mark.parametrize("x", [3, 10, 20, 35])
def test_real_delta_bruteforce(x):
    q = 70
    cands = [D for m in range(70, 141) for D in (m, -m) if is_fund_oracle(D)]
    vals = {D: abs(sum(kron_oracle(D, n) for n in range(1, x + 1))) for D in cands}
    best = max(vals.values())
    witness = min((D for D in cands if vals[D] == best), key=lambda D: (abs(D), D < 0))
    assert realchar.real_delta_search(q, x) == (best, witness)


def test_real_delta_curve_agrees_pointwise():
    curve = realchar.real_delta_curve(200, [1, 5, 9, 30])
    for x, v, D in curve:
        assert (v, D) == realchar.real_delta_search(200, x)


@pytest.mark.parametrize("q,x,y", [(10**4, 30, 3), (10**5, 60, 5), (3 * 10**4, 40, 2)])
def test_theorem9_invariants(q, x, y):
    res = realchar.theorem9_search(q, x, y)
    assert res.class_ok and res.smooth_ok
    assert res.target == psi_count(x, y)
    assert res.achieved == (abs(res.best_sum) >= res.target)
    cls = realchar.smooth_splitting_class(y)
    if res.best_D is not None:
        D = res.best_D
        assert cls.contains(D) and q <= abs(D) <= 2 * q
        assert all(kron_oracle(D, p) == 1 for p in cls.primes)
        assert realchar.real_char_sum(D, x) == res.best_sum


def test_theorem9_spec_scale():
    res = realchar.theorem9_search(10**6, 100, 3)
    assert res.achieved


def test_tail_sum_examples():
    rows = realchar.tail_sum_rows([-7, -8], 7)
    assert rows[0]["tail_sum"] == 1
    assert realchar.tail_sum_rows([-8], 2)[0]["tail_sum"] == 2
    rows = realchar.tail_sum_experiment(10**4, 2, 5)
    assert rows and all(r["D"] < 0 for r in rows)
    for r in rows[:20]:
        assert r["tail_sum"] == realchar.real_char_sum(r["D"], r["cutoff"])
        assert r["normalized"] == pytest.approx(r["tail_sum"] / math.sqrt(-r["D"]))


def test_empirical_alpha_beta():
    out = realchar.empirical_alpha_beta(1.0, 100, 3000)
    assert out["beta_hat"] <= out["alpha_hat"]
    assert out["count"] == len(realchar.fundamental_discriminants_in(100, 3000))
