import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from charlab import characters as ch
from charlab import moments
from charlab.errors import DomainError, ResourceCapError
from charlab.weights import WeightFunction


def brute_moment(k, x, squarefree=False):
    """Count pairs of k-tuples with equal products, the definition of the divisor side."""
    X = int(x)
    prods = {}
    for t in product(range(1, X + 1), repeat=k):
        N = math.prod(t)
        prods[N] = prods.get(N, 0) + 1
    if squarefree:
        prods = {N: c for N, c in prods.items() if all(N % (p * p) for p in range(2, math.isqrt(N) + 1))}
    return sum(c * c for c in prods.values())


def test_divisor_count_examples():
    t1 = moments.divisor_counts(1, 7, WeightFunction.moebius())
    mu = WeightFunction.moebius().values(7)
    assert all(t1[n] == mu[n] for n in range(1, 8))
    assert moments.divisor_counts(2, 3)[4] == 1
    assert moments.divisor_counts(2, 3)[6] == 2
    assert moments.divisor_counts(2, 6)[6] == 4


@pytest.mark.parametrize("weight", ["unit", "moebius", "divisor"])
def test_divisor_counts_match_bruteforce(weight):
    f = WeightFunction.parse(weight)
    for k in (1, 2, 3, 4):
        for x in (1, 2, 3, 5, 8):
            if x**k > 5000:
                continue
            assert moments.divisor_counts(k, x, f).nonzero() == moments.divisor_counts_bruteforce(k, x, f)


@given(st.integers(1, 4), st.integers(1, 12))
def test_total_mass(k, x):
    if x**k > 10**5:
        return
    assert int(moments.divisor_counts(k, x).counts.sum()) == x**k


def test_moment_divisor_examples():
    assert moments.moment_divisor_side(2, 3) == 15 == brute_moment(2, 3)
    assert moments.moment_divisor_side(2, 3, squarefree_only=True) == 13 == brute_moment(2, 3, True)
    for x in (1, 4, 17):
        assert moments.moment_divisor_side(1, x) == x


def test_table_cap():
    with pytest.raises(ResourceCapError):
        moments.divisor_counts(3, 1000, cap=10**6)


def test_character_side_examples():
    assert moments.moment_character_side(1, 2, 5).value == 2
    assert moments.moment_character_side(1, 3, 7).value == 3
    cm = moments.moment_character_side(3, 4, 101)
    assert cm.exact and cm.value == moments.moment_divisor_side(3, 4, 101) == 340


@pytest.mark.parametrize("q", [5, 7, 11, 12, 36, 101])
def test_moment_identity_exact_and_float(q):
    for k in (1, 2, 3):
        x = 1
        while (x + 1) ** k <= q:
            x += 1
        for xx in range(1, x + 1):
            for f in (WeightFunction.unit(), WeightFunction.moebius()):
                exact = moments.moment_character_side(k, xx, q, f, exact=True)
                div = moments.moment_divisor_side(k, xx, q, f)
                assert exact.identity_in_range
                assert exact.value == div
                approx = moments.moment_character_side(k, xx, q, f, exact=False).value
                assert abs(approx - div) <= 1e-9 * max(1, div)


def test_character_side_out_of_range_is_flagged():
    cm = moments.moment_character_side(2, 5, 7)
    assert not cm.identity_in_range
    # the exact value still matches the float average
    assert abs(float(cm.value) - moments.moment_character_side(2, 5, 7, exact=False).value) < 1e-9


def test_power_phase_identity_relative():
    f = WeightFunction.power_phase(2.5)
    for q, x, k in [(11, 3, 2), (101, 4, 3), (36, 6, 2)]:
        cs = moments.moment_character_side(k, x, q, f).value
        ds = moments.moment_divisor_side(k, x, q, f)
        assert abs(cs - ds) <= 1e-9 * ds


def test_weight_domination_monotone():
    for k in (1, 2):
        for x in (5, 17, 30):
            d = moments.moment_divisor_side(k, x, 1, WeightFunction.divisor())
            one = moments.moment_divisor_side(k, x)
            sm = moments.moment_divisor_side(k, x, 1, WeightFunction.smooth_indicator(5))
            sf = moments.moment_divisor_side(k, x, squarefree_only=True)
            assert d >= one >= sm
            assert sf <= one


def test_monte_carlo_trivial_cases():
    est, se = moments.moment_monte_carlo(3, 1, samples=200, seed=1)
    assert est == pytest.approx(1.0, abs=1e-12)
    est, se = moments.moment_monte_carlo(1, 2, samples=20000, seed=2)
    assert abs(est - 2) <= 3 * se
    est, se = moments.moment_monte_carlo(2, 3, samples=20000, seed=3)
    assert abs(est - 15) <= 3 * se


def test_monte_carlo_deterministic_and_split_invariant():
    a = moments.moment_monte_carlo(2, 12, samples=3000, seed=99, block=3000)
    b = moments.moment_monte_carlo(2, 12, samples=3000, seed=99, block=7)
    c = moments.moment_monte_carlo(2, 12, samples=3000, seed=99, block=1024)
    assert a == b == c
    assert moments.moment_monte_carlo(2, 12, samples=3000, seed=100) != a


def test_sampler_is_completely_multiplicative():
    s = moments.RandomModelSampler.for_bound(5, 40)
    coeff = lambda n: np.eye(41, dtype=complex)[n]  # noqa: E731
    X = {n: s.weighted_sums(coeff(n), 10, 5) for n in range(1, 41)}
    assert np.allclose(X[1], 1)
    for m in range(2, 7):
        for n in range(2, 41 // m + 1):
            assert np.allclose(X[m * n], X[m] * X[n])
    assert np.allclose(np.abs(X[37]), 1)


def test_monte_carlo_rejects_few_samples():
    with pytest.raises(DomainError):
        moments.moment_monte_carlo(1, 5, samples=50)


def test_jackknife_matches_standard_error_of_mean():
    rng = np.random.default_rng(0)
    y = rng.standard_normal(500)
    mean, se = moments.jackknife_mean(y)
    assert mean == pytest.approx(y.mean())
    assert se == pytest.approx(y.std(ddof=1) / math.sqrt(y.size))


def test_delta_lower_bound_examples():
    bound, diag = moments.delta_lower_bound(5, 2, 1)
    assert bound == pytest.approx(math.sqrt(2))
    assert diag.delta_max == pytest.approx(math.sqrt(2))
    bound, diag = moments.delta_lower_bound(7, 3, 1)
    assert bound == pytest.approx(math.sqrt(3)) and diag.delta_max == pytest.approx(2)
    with pytest.raises(DomainError):
        moments.delta_lower_bound(2, 2, 1)


@given(st.sampled_from([5, 7, 11, 12, 36, 101]), st.integers(1, 40), st.integers(1, 3), st.sampled_from(["unit", "moebius", "divisor"]))
def test_cauchy_schwarz_and_chain(q, x, k, weight):
    _, diag = moments.delta_lower_bound(q, x, k, WeightFunction.parse(weight))
    assert diag.cauchy_schwarz
    assert diag.chain_holds


def test_moment_bracket_orders():
    for k in (1, 2, 3):
        br = moments.moment_bracket(k, 20)
        assert br["ordered"]
        assert math.isfinite(br["C"])


def test_model_tail_is_reproducible():
    a = moments.model_tail_moment(1, 60, 7, samples=500, seed=4)
    b = moments.model_tail_moment(1, 60, 7, samples=500, seed=4)
    assert a == b
    # k = 1: second moment equals the number of non-smooth n <= x
    from charlab.smooth import psi_count

    est, se = moments.model_tail_moment(1, 60, 7, samples=20000, seed=5)
    assert abs(est - (60 - psi_count(60, 7))) <= 3 * se
