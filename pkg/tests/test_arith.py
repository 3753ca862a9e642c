import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from charlab import arith
from charlab.errors import DomainError
from conftest import naive_is_prime, trial_factor


@pytest.mark.parametrize(
    "n, expected",
    [(12, [(2, 2), (3, 1)]), (1, []), (9991, [(97, 1), (103, 1)])],
)
def test_factorize_examples(n, expected):
    assert list(arith.factorize(n).factors) == expected


def test_factorize_rejects_nonpositive():
    for bad in (0, -5):
        with pytest.raises(DomainError):
            arith.factorize(bad)


def test_factorize_large_semiprime_and_mersenne():
    p, q = 2147483647, 2147483629
    assert list(arith.factorize(p * q).factors) == [(q, 1), (p, 1)]
    assert arith.is_prime(2**61 - 1)
    f = arith.factorize(2**62 - 1)
    assert math.prod(pr**e for pr, e in f.factors) == 2**62 - 1


@given(st.integers(min_value=1, max_value=10**7))
def test_factorization_invariants(n):
    f = arith.factorize(n)
    assert math.prod(p**e for p, e in f.factors) == n
    primes = [p for p, _ in f.factors]
    assert primes == sorted(set(primes))
    assert all(arith.is_prime(p) for p in primes)
    assert (n == 1) == (len(f.factors) == 0)


@given(st.integers(min_value=1, max_value=10**6))
def test_factorize_matches_trial_division(n):
    assert list(arith.factorize(n).factors) == trial_factor(n)


def test_is_prime_matches_naive():
    assert [n for n in range(3000) if arith.is_prime(n)] == [n for n in range(3000) if naive_is_prime(n)]


@pytest.mark.parametrize("n, stats", [(1, (1, 0, 0)), (12, (0, 2, 3)), (30, (-1, 3, 3))])
def test_multiplicative_stats(n, stats):
    assert arith.multiplicative_stats(n) == stats


def test_mobius_sum_over_divisors():
    N = 10**5
    mu = arith.mobius_sieve(N).astype(np.int64)
    acc = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        if mu[d]:
            acc[d::d] += mu[d]
    assert acc[1] == 1
    assert not acc[2:].any()


def test_sieves_agree_with_scalar():
    N = 3000
    mu = arith.mobius_sieve(N)
    om, big = arith.omega_sieve(N)
    for n in range(1, N + 1):
        assert (mu[n], om[n], big[n]) == arith.multiplicative_stats(n)


@pytest.mark.parametrize("D, n, val", [(5, 3, -1), (-4, 2, 0), (73, 2, 1)])
def test_kronecker_examples(D, n, val):
    assert arith.kronecker(D, n) == val


def test_kronecker_zero_column():
    assert arith.kronecker(1, 0) == 1 and arith.kronecker(-1, 0) == 1
    assert arith.kronecker(5, 0) == 0


@given(st.integers(-2000, 2000), st.integers(0, 10**5), st.integers(0, 10**5))
def test_kronecker_completely_multiplicative(D, m, n):
    assert arith.kronecker(D, m * n) == arith.kronecker(D, m) * arith.kronecker(D, n)


def test_kronecker_matches_euler_criterion():
    primes = [p for p in range(3, 500) if naive_is_prime(p)]
    for D in range(-500, 501):
        if D == 0 or not arith.is_fundamental_discriminant(D):
            continue
        for p in primes:
            if D % p == 0:
                assert arith.kronecker(D, p) == 0
                continue
            e = pow(D % p, (p - 1) // 2, p)
            assert arith.kronecker(D, p) == (1 if e == 1 else -1)


@given(st.integers(-10**6, 10**6).filter(lambda d: d != 0))
def test_kronecker_array_matches_scalar(D):
    n = np.arange(0, 300)
    assert arith.kronecker_array(D, n).tolist() == [arith.kronecker(D, int(k)) for k in n]


@pytest.mark.parametrize("D, fund", [(5, True), (9, False), (12, True), (1, False), (-3, True), (-4, True), (8, True), (-8, True), (16, False), (-7, True)])
def test_fundamental_discriminant_examples(D, fund):
    assert arith.is_fundamental_discriminant(D) is fund


def test_fundamental_discriminant_rejects_zero():
    with pytest.raises(DomainError):
        arith.is_fundamental_discriminant(0)


def _sqfree(m):
    return all(m % (p * p) for p in range(2, math.isqrt(abs(m)) + 1))


@given(st.integers(-10**5, 10**5).filter(lambda d: d not in (0, 1)))
def test_fundamental_discriminant_definition(D):
    expected = (D % 4 == 1 and _sqfree(D)) or (D % 4 == 0 and (D // 4) % 4 in (2, 3) and _sqfree(D // 4))
    assert arith.is_fundamental_discriminant(D) == expected


def test_checked_int64_overflow():
    assert arith.checked_int64(2**63 - 1) == 2**63 - 1
    with pytest.raises(OverflowError):
        arith.checked_int64(2**63)


def test_primitive_root_is_generator():
    for p in [3, 5, 7, 11, 13, 101, 499, 997]:
        g = arith.primitive_root(p)
        assert len({pow(g, k, p) for k in range(p - 1)}) == p - 1
        assert all(len({pow(h, k, p) for k in range(p - 1)}) < p - 1 for h in range(2, g))
