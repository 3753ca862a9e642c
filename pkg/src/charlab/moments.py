"""
Moments of character sums and of the random multiplicative model.

For x**k <= q the three quantities

    (1/phi(q)) sum_chi |sum_{n<=x} chi(n) f(n)|**(2k)
    sum_{N <= x**k, (N,q)=1} |d_{k,f}(N, x)|**2
    E |sum_{n<=x, (n,q)=1} X_n f(n)|**(2k)

coincide. Each side is computed here by its own code path: the character
side by summing over the whole character group (exactly, in the group ring
Z[C_L], when f is integer valued), the divisor side from multiplicative
convolution tables, and the expectation by Monte Carlo over X_p uniform on
the unit circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import arith
from .characters import character_group, character_sums_all
from .errors import DomainError, ResourceCapError
from .weights import WeightFunction

TABLE_CAP = 10**8


def _weight(f: WeightFunction | None) -> WeightFunction:
    return WeightFunction.unit() if f is None else f


@dataclass
class DivisorCountTable:
    """counts[N] = d_{k,f}(N, x) for 0 <= N <= floor(x)**k."""

    k: int
    x: float
    f: WeightFunction
    q: int
    counts: np.ndarray

    @property
    def size(self) -> int:
        return self.counts.size - 1

    @property
    def coprime(self) -> np.ndarray:
        """Flags N with gcd(N, q) = 1 (entries with gcd > 1 are kept, only flagged)."""
        n = np.arange(self.counts.size, dtype=np.int64)
        mask = np.gcd(n, self.q) == 1
        mask[0] = False
        return mask

    def __getitem__(self, N: int):
        if 0 <= N < self.counts.size:
            return self.counts[N].item()
        return 0

    def nonzero(self) -> dict[int, object]:
        idx = np.flatnonzero(self.counts)
        return {int(i): self.counts[i].item() for i in idx}


def divisor_counts(k: int, x: float, f: WeightFunction | None = None, q: int = 1, cap: int = TABLE_CAP) -> DivisorCountTable:
    """Tabulate d_{k,f}(N, x) = sum_{m_1...m_k = N, m_i <= x} f(m_1)...f(m_k).

    Built by repeated multiplicative convolution with the weight vector,
    truncated at floor(x)**j after step j.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    f = _weight(f)
    X = int(math.floor(x))
    if X < 1:
        return DivisorCountTable(k, x, f, q, np.zeros(1, dtype=np.int64))
    if X**k > cap:
        raise ResourceCapError(f"table for x**k = {X}**{k} = {X**k} exceeds cap {cap}")
    fv = f.values(X)
    table = fv.copy()
    table[0] = 0
    support = np.flatnonzero(fv)
    support = support[support > 0]
    fsum = int(np.abs(fv).sum()) if f.is_integer else None
    for j in range(2, k + 1):
        if fsum is not None:
            arith.checked_int64(int(np.abs(table).max()) * fsum, "divisor-count accumulation bound")
        new = np.zeros(X**j + 1, dtype=table.dtype)
        nz = np.flatnonzero(table)
        vals = table[nz]
        for m in support.tolist():
            new[m * nz] += fv[m] * vals
        table = new
    return DivisorCountTable(k, x, f, q, table)


def divisor_counts_bruteforce(k: int, x: float, f: WeightFunction | None = None) -> dict[int, object]:
    """Oracle: enumerate every k-tuple (m_1..m_k) with m_i <= x. Returns {N: d} for nonzero d."""
    f = _weight(f)
    X = int(math.floor(x))
    fv = f.values(max(X, 0)).tolist()
    out: dict[int, object] = {}
    for tup in product(range(1, X + 1), repeat=k):
        N = math.prod(tup)
        w = 1
        for m in tup:
            w *= fv[m]
        out[N] = out.get(N, 0) + w
    return {N: v for N, v in out.items() if v != 0}


def _exact_sum_squares(vals: np.ndarray) -> int:
    if vals.size == 0:
        return 0
    big = int(np.abs(vals).max())
    if big * big * vals.size < 2**62:
        v = vals.astype(np.int64)
        return int(np.dot(v, v))
    return sum(int(v) * int(v) for v in vals.tolist())


def moment_divisor_side(k: int, x: float, q: int = 1, f: WeightFunction | None = None, squarefree_only: bool = False):
    """sum over N <= x**k coprime to q (squarefree if asked) of |d_{k,f}(N, x)|**2.

    An exact int when f is integer valued, else a float.
    """
    f = _weight(f)
    table = divisor_counts(k, x, f, q)
    mask = table.coprime
    if squarefree_only:
        mask &= arith.squarefree_sieve(table.size)
    vals = table.counts[mask]
    if f.is_integer:
        return _exact_sum_squares(vals)
    return float(math.fsum((np.abs(vals) ** 2).tolist()))


def moment_identity_in_range(k: int, x: float, q: int) -> bool:
    """The moment identity needs x**k <= q."""
    return int(math.floor(x)) ** k <= q


@dataclass(frozen=True)
class CharacterMoment:
    value: object  # int / Fraction when computed exactly, else float
    identity_in_range: bool
    exact: bool

    def __float__(self) -> float:
        return float(self.value)


def _ramanujan_sums(L: int) -> np.ndarray:
    """c_L(j) = Tr_{Q(zeta_L)/Q}(zeta_L**j) for j = 0..L-1."""
    out = np.zeros(L, dtype=object)
    phiL = arith.euler_phi(L)
    for j in range(L):
        g = math.gcd(j, L)
        m = L // g
        out[j] = arith.mobius(m) * phiL // arith.euler_phi(m)
    return out


def _ring_mul(a: np.ndarray, b: np.ndarray, L: int) -> np.ndarray:
    """Product in Z[x]/(x**L - 1)."""
    full = np.convolve(a, b)
    out = full[:L].copy()
    out[: full.size - L] += full[L:]
    return out


def _character_side_exact(k: int, x: float, q: int, f: WeightFunction) -> Fraction:
    group = character_group(q)
    L = group.exponent
    X = int(math.floor(x))
    n = np.arange(1, X + 1)
    fv = f.values(X)[1:]
    ph = group.phases(n)
    bound = int(np.abs(fv).sum()) ** (2 * k) * group.order
    dtype = np.int64 if bound < 2**62 else object
    total = np.zeros(L, dtype=dtype)
    keep = fv != 0
    for row in ph:
        sel = keep & (row >= 0)
        S = np.zeros(L, dtype=dtype)
        np.add.at(S, row[sel], fv[sel].astype(dtype))
        Sbar = np.roll(S[::-1], 1)  # coefficient of x**(-j)
        mod2 = _ring_mul(S, Sbar, L)
        acc = mod2
        for _ in range(k - 1):
            acc = _ring_mul(acc, mod2, L)
        total = total + acc
    trace = sum(int(t) * int(c) for t, c in zip(total.tolist(), _ramanujan_sums(L).tolist()))
    value = Fraction(trace, arith.euler_phi(L))
    if value.denominator != 1:
        raise ArithmeticError("character-side sum is not rational-integral")  # pragma: no cover
    return Fraction(int(value), group.order)


def moment_character_side(k: int, x: float, q: int, f: WeightFunction | None = None, exact: bool | None = None) -> CharacterMoment:
    """(1/phi(q)) sum over all chi mod q of |sum_{n<=x} chi(n) f(n)|**(2k).

    With integer weights and a small group the value is computed exactly and
    returned as an int (or Fraction when x**k > q makes it non-integral).
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    f = _weight(f)
    group = character_group(q)
    if exact is None:
        exact = f.is_integer and group.order * group.exponent**2 * k <= 2 * 10**7
    in_range = moment_identity_in_range(k, x, q)
    if exact:
        if not f.is_integer:
            raise DomainError("exact character side needs an integer-valued weight")
        val = _character_side_exact(k, x, q, f)
        return CharacterMoment(int(val) if val.denominator == 1 else val, in_range, True)
    sums = character_sums_all(q, x, f)
    powers = np.abs(sums) ** (2 * k)
    return CharacterMoment(math.fsum(powers.tolist()) / group.order, in_range, False)


# ------------------------------------------------------------ random model


@dataclass
class RandomModelSampler:
    """Draws of the random completely multiplicative function X_n.

    X_p = exp(2 pi i U) with U a 53-bit uniform taken from a Philox stream keyed
    by (seed, prime index); sample s uses position s of that stream, so any
    block of samples can be produced independently of how the run is split.
    """

    seed: int
    primes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @classmethod
    def for_bound(cls, seed: int, x: float) -> "RandomModelSampler":
        return cls(seed, arith.primes_up_to(int(math.floor(x))))

    def uniforms(self, prime_index: int, start: int, count: int) -> np.ndarray:
        key = (int(self.seed) & (2**64 - 1)) | (int(prime_index) << 64)
        bg = np.random.Philox(key=key)
        bg.advance(start // 4)
        raw = bg.random_raw(count + start % 4)[start % 4 :]
        return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def prime_angles(self, start: int, count: int) -> np.ndarray:
        """Array (num_primes, count) of angles 2 pi U_p."""
        out = np.empty((self.primes.size, count))
        for i in range(self.primes.size):
            out[i] = 2 * np.pi * self.uniforms(i, start, count)
        return out

    def weighted_sums(self, coeffs: np.ndarray, start: int, count: int) -> np.ndarray:
        """sum_n coeffs[n] X_n for samples start..start+count-1 (coeffs indexed from 0)."""
        N = coeffs.size - 1
        n = np.flatnonzero(coeffs)
        n = n[n >= 1]
        if n.size == 0:
            return np.zeros(count, dtype=complex)
        plist = self.primes[self.primes <= N]
        expo = np.zeros((n.size, plist.size), dtype=np.float64)
        rem = n.copy()
        for j, p in enumerate(plist.tolist()):
            while True:
                div = rem % p == 0
                if not div.any():
                    break
                expo[div, j] += 1
                rem[div] //= p
        theta = self.prime_angles(start, count)[: plist.size]
        phase = expo @ theta  # (len(n), count)
        return (coeffs[n][:, None] * np.exp(1j * phase)).sum(axis=0)


def jackknife_mean(samples: np.ndarray) -> tuple[float, float]:
    """Sample mean with its leave-one-out jackknife standard error."""
    y = np.asarray(samples, dtype=float)
    n = y.size
    total = math.fsum(y.tolist())
    mean = total / n
    loo = (total - y) / (n - 1)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return mean, se


def moment_monte_carlo(
    k: int, x: float, q: int = 1, f: WeightFunction | None = None, samples: int = 10**5, seed: int = 0, block: int = 1 << 14
) -> tuple[float, float]:
    """Monte Carlo estimate of E|sum_{n<=x, (n,q)=1} X_n f(n)|**(2k) with jackknife error."""
    if samples < 100:
        raise DomainError("at least 100 samples are required")
    f = _weight(f)
    X = int(math.floor(x))
    coeffs = f.values(X).astype(complex)
    nn = np.arange(X + 1)
    coeffs[np.gcd(nn, q) != 1] = 0
    sampler = RandomModelSampler.for_bound(seed, X)
    draws = np.empty(samples)
    for start in range(0, samples, block):
        cnt = min(block, samples - start)
        s = sampler.weighted_sums(coeffs, start, cnt)
        draws[start : start + cnt] = np.abs(s) ** (2 * k)
    return jackknife_mean(draws)


def model_tail_moment(k: int, x: float, y: float, samples: int = 10**4, seed: int = 0) -> tuple[float, float]:
    """E|sum_{n<=x} X_n - sum_{n in S(x,y)} X_n|**(2k), i.e. the part from n with a prime factor > y."""
    X = int(math.floor(x))
    from .weights import _smooth_flags

    coeffs = np.ones(X + 1, dtype=complex)
    coeffs[0] = 0
    coeffs[_smooth_flags(X, y) == 1] = 0
    sampler = RandomModelSampler.for_bound(seed, X)
    s = sampler.weighted_sums(coeffs, 0, samples)
    return jackknife_mean(np.abs(s) ** (2 * k))


# ------------------------------------------------------------ lower bound chain


@dataclass(frozen=True)
class LowerBoundDiagnostics:
    delta0: float
    delta1: float
    delta2: float
    average: float
    delta_max: float
    witness_index: int
    identity_in_range: bool
    cauchy_schwarz: bool
    chain_holds: bool
    passes: bool
    slack: float


def delta_lower_bound(
    q: int, x: float, k: int, f: WeightFunction | None = None, slack: float = 2.0, sums: np.ndarray | None = None
):
    """The moment lower bound (average)^(1/2k) for Delta_f(x, q), with the quantities of its proof.

    Returns ``(bound, diagnostics)``. ``diagnostics.passes`` records whether
    the measured Delta_f(x, q) is at least bound / slack; ``chain_holds``
    checks average <= Delta1**(2k)/phi(q) + (phi(q)-1)/phi(q) * Delta**(2k).
    ``sums`` may carry precomputed character sums at x (enumeration order).
    """
    if q <= 2:
        raise DomainError(f"q = {q} has no nonprincipal character")
    f = _weight(f)
    group = character_group(q)
    X = int(math.floor(x))
    fv = f.values(X)[1:]
    n = np.arange(1, X + 1)
    chi0 = (np.gcd(n, q) == 1).astype(float)
    delta0 = float(chi0.sum())
    delta1 = float(abs(np.sum(chi0 * fv)))
    delta2 = float(np.sum(chi0 * np.abs(fv) ** 2))
    sums = np.abs(character_sums_all(q, X, f) if sums is None else np.asarray(sums))
    average = math.fsum((sums ** (2 * k)).tolist()) / group.order
    nonprincipal = sums.copy()
    nonprincipal[0] = -1.0
    widx = int(np.argmax(nonprincipal))
    dmax = float(nonprincipal[widx])
    bound = average ** (1.0 / (2 * k))
    phi = group.order
    tol = 1e-9 * max(1.0, average)
    chain_rhs = delta1 ** (2 * k) / phi + (phi - 1) / phi * dmax ** (2 * k)
    diag = LowerBoundDiagnostics(
        delta0=delta0,
        delta1=delta1,
        delta2=delta2,
        average=average,
        delta_max=dmax,
        witness_index=widx,
        identity_in_range=moment_identity_in_range(k, X, q),
        cauchy_schwarz=delta1**2 <= delta0 * delta2 * (1 + 1e-12) + 1e-9,
        chain_holds=average <= chain_rhs + tol,
        passes=dmax >= bound / slack,
        slack=slack,
    )
    return bound, diag


def moment_bracket(k: int, x: float) -> dict[str, float]:
    """Squarefree and full 2k-th moment roots next to x**(1/2) (log x / k)**((k-1)**2 / 2k).

    ``C`` is the constant making the upper shape e**(C k) tight for this (k, x).
    """
    sf = moment_divisor_side(k, x, 1, None, squarefree_only=True)
    full = moment_divisor_side(k, x, 1, None)
    sf_root = sf ** (1.0 / (2 * k))
    full_root = full ** (1.0 / (2 * k))
    lx = math.log(x)
    shape = math.sqrt(x) * (lx / k) ** ((k - 1) ** 2 / (2 * k))
    return {
        "k": k,
        "x": x,
        "squarefree_moment": sf,
        "full_moment": full,
        "squarefree_root": sf_root,
        "full_root": full_root,
        "shape": shape,
        "C": math.log(full_root / shape) / k,
        "ordered": sf_root <= full_root,
    }
