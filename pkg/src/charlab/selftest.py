"""Quick invariant suite behind ``charlab selftest``."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import arith, moments, polya, realchar, smooth
from . import characters as ch
from .weights import WeightFunction


def _orthogonality(qs=range(1, 61)) -> bool:
    for q in qs:
        group = ch.character_group(q)
        vals = group.values(np.arange(q))
        gram = vals @ vals.conj().T
        if not np.allclose(gram, np.eye(group.order) * group.order, atol=1e-9):
            return False
    return True


def _moment_identity() -> bool:
    for q in (5, 7, 11, 12, 36):
        for k in (1, 2, 3):
            x = 1
            while (x + 1) ** k <= q:
                x += 1
            for xx in range(1, x + 1):
                cs = moments.moment_character_side(k, xx, q, exact=True).value
                if cs != moments.moment_divisor_side(k, xx, q):
                    return False
    return True


def _gauss_sums() -> bool:
    for q in (5, 7, 11, 13):
        for chi in ch.primitive_characters(q):
            if abs(abs(ch.gauss_sum(chi)) - math.sqrt(q)) > 1e-9:
                return False
    return True


def _partition() -> bool:
    for x in (1, 10, 997, 10**4):
        for y in (2, 3, 5, 10, 100):
            top = int(math.log(x) / math.log(y)) if x > 1 else 0
            if sum(smooth.psi_count(x, y, ell) for ell in range(top + 1)) != x:
                return False
    return True


def _dickman() -> bool:
    us = np.linspace(1, 2, 41)
    if max(abs(smooth.dickman_rho(u) - (1 - math.log(u))) for u in us) > 1e-8:
        return False
    return abs(smooth.dickman_rho(3.0) - smooth.dickman_rho_oracle(3.0)) <= 1e-7


def _divisor_oracle() -> bool:
    for k in (1, 2, 3):
        for x in (2, 3, 5, 7):
            table = moments.divisor_counts(k, x)
            brute = moments.divisor_counts_bruteforce(k, x)
            if table.nonzero() != brute:
                return False
    return True


def _poisson() -> bool:
    for q in (5, 13, 17):
        for chi in ch.primitive_characters(q, parity=1):
            for r in (2, 4):
                if polya.poisson_identity_check(chi, Fraction(q, r), r).gap > 1e-6:
                    return False
    return True


def _polya() -> bool:
    for q in (5, 7, 11, 13):
        for res in polya.polya_residuals(q, q // 2, q):
            if res.residual > 12 * res.bound:
                return False
    return True


def _splitting_class() -> bool:
    for y in (3, 5, 7):
        cls = realchar.smooth_splitting_class(y)
        Ds = realchar.fundamental_discriminants_in(1, 10**4, "both", cls)
        if Ds and (realchar.kronecker_rows(Ds, 7)[:, cls.primes] != 1).any():
            return False
    return True


def _kronecker() -> bool:
    for D in (-8, -7, -4, -3, 5, 8, 12, 13):
        ref = [arith.kronecker(D, n) for n in range(200)]
        if list(arith.kronecker_array(D, np.arange(200))) != ref:
            return False
    return True


def _class_f() -> bool:
    from .weights import check_class_f

    return all(check_class_f(f, 2000) for f in (WeightFunction.unit(), WeightFunction.moebius(), WeightFunction.power_phase(1.5)))


CHECKS = [
    ("orthogonality q <= 60", _orthogonality),
    ("moment identity exact", _moment_identity),
    ("gauss sum magnitude", _gauss_sums),
    ("divisor table vs enumeration", _divisor_oracle),
    ("partition identity", _partition),
    ("dickman rho", _dickman),
    ("poisson identity", _poisson),
    ("polya residual", _polya),
    ("splitting class", _splitting_class),
    ("kronecker vectorised", _kronecker),
    ("class F weights", _class_f),
]


def run_selftest(out=print) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            passed = bool(fn())
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
