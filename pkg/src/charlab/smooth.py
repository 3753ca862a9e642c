"""
Smooth and round numbers.

S_l(x, y) is the set of n <= x having exactly l prime factors > y counted with
multiplicity (l = 0 gives the y-smooth numbers). pi(x, y) counts n <= x with
exactly y *distinct* prime factors; the two conventions are kept apart on
purpose.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import arith
from .errors import DomainError, ResourceCapError
from .weights import WeightFunction

MEMBER_CAP = 10**8
CENSUS_CAP = 10**8
RHO_STEP = 2.0**-10
RHO_UMAX = 50.0
RHO_SWITCH = 4


@dataclass(frozen=True)
class SmoothSet:
    x: float
    y: float
    ell: int
    members: np.ndarray

    def __len__(self) -> int:
        return int(self.members.size)

    def __iter__(self):
        return iter(self.members.tolist())

    def __contains__(self, n) -> bool:
        i = np.searchsorted(self.members, n)
        return bool(i < self.members.size and self.members[i] == n)


def _check_xy(x: float, y: float) -> int:
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    return int(math.floor(x))


@lru_cache(maxsize=128)
def _primes_tuple(limit: int) -> tuple[int, ...]:
    return tuple(int(p) for p in arith.primes_up_to(limit))


def _smooth_members(N: int, y: float) -> np.ndarray:
    """All y-smooth n <= N, sorted. Products are built prime by prime, then sorted."""
    members = np.array([1], dtype=np.int64)
    for p in _primes_tuple(int(min(N, math.floor(y)))):
        parts = [members]
        cur = members
        while True:
            cur = cur[cur <= N // p] * p
            if cur.size == 0:
                break
            parts.append(cur)
        members = np.concatenate(parts)
    members.sort()
    return members


def _large_parts(N: int, y: float, ell: int) -> np.ndarray:
    """Products of exactly ``ell`` primes > y (with repetition) not exceeding N."""
    if ell == 0:
        return np.array([1], dtype=np.int64)
    ylo = int(math.floor(y))
    if ylo + 1 > N:
        return np.zeros(0, dtype=np.int64)
    primes = arith.primes_up_to(N)
    primes = primes[primes > y]
    prods = np.array([1], dtype=np.int64)
    last = np.array([0], dtype=np.int64)  # index into primes of the smallest allowed next prime
    for level in range(ell):
        remaining = ell - level - 1
        if primes.size == 0:
            return np.zeros(0, dtype=np.int64)
        # the chosen prime p must leave room for `remaining` further primes >= p
        bound = N // prods
        if remaining:
            # p**(remaining + 1) <= bound
            cap = np.floor(bound.astype(float) ** (1.0 / (remaining + 1)) + 1e-9).astype(np.int64)
            while True:
                over = cap ** (remaining + 1) > bound
                if not over.any():
                    break
                cap[over] -= 1
            bound = cap
        hi = np.searchsorted(primes, bound, side="right")
        counts = np.maximum(hi - last, 0)
        total = int(counts.sum())
        if total > MEMBER_CAP:
            raise ResourceCapError(f"large-prime parts exceed cap {MEMBER_CAP}")
        rep_prod = np.repeat(prods, counts)
        starts = np.repeat(last, counts)
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        idx = starts + offs
        prods = rep_prod * primes[idx]
        last = idx
    return prods


@lru_cache(maxsize=64)
def _smooth_counter(y: float):
    """Memoised count of y-smooth integers <= t, by recursion over the largest prime used."""
    ylim = int(math.floor(y))
    primes = _primes_tuple(ylim)

    @lru_cache(maxsize=None)
    def count(t: int, i: int) -> int:
        # integers <= t built from primes[0..i]
        if t <= 1:
            return max(t, 0)
        pi_t = bisect_right(primes, t)
        i = min(i, pi_t - 1)
        if i < 0:
            return 1
        if t <= ylim and i == pi_t - 1:
            return t
        total = t.bit_length()  # 1 and the powers of two
        for k in range(1, i + 1):
            total += count(t // primes[k], k)
        return total

    return count, len(primes) - 1


def psi_count(x: float, y: float, ell: int = 0, cap: int = MEMBER_CAP) -> int:
    """|S_ell(x, y)| without materialising the set."""
    N = _check_xy(x, y)
    if ell < 0:
        raise DomainError("ell must be >= 0")
    if y >= N:
        return N if ell == 0 else 0
    count, top = _smooth_counter(y)
    if ell == 0:
        return count(N, top)
    if N > cap:
        raise ResourceCapError(f"x = {x} exceeds the enumeration cap {cap} for ell >= 1")
    parts = _large_parts(N, y, ell)
    if parts.size == 0:
        return 0
    smooth = _smooth_members(N // int(parts.min()), y)
    return int(np.searchsorted(smooth, N // parts, side="right").sum())


def smooth_enumerate(x: float, y: float, ell: int = 0, cap: int = MEMBER_CAP) -> SmoothSet:
    """Materialise S_ell(x, y), sorted ascending."""
    N = _check_xy(x, y)
    size = psi_count(x, y, ell, cap=max(cap, N))
    if size > cap:
        raise ResourceCapError(f"|S_{ell}({x}, {y})| = {size} exceeds cap {cap}")
    if ell == 0:
        members = _smooth_members(N, y)
    else:
        parts = _large_parts(N, y, ell)
        if parts.size == 0:
            members = np.zeros(0, dtype=np.int64)
        else:
            smooth = _smooth_members(N // int(parts.min()), y)
            chunks = [smooth[: np.searchsorted(smooth, N // L, side="right")] * L for L in parts.tolist()]
            members = np.sort(np.concatenate(chunks))
    return SmoothSet(x, y, ell, members)


def psi_weighted(x: float, y: float, f: WeightFunction | None = None):
    """Psi(x, y; f) = sum of f(n) over y-smooth n <= x."""
    members = smooth_enumerate(x, y, 0).members
    if f is None or f.kind == "unit":
        return int(members.size)
    if f.kind == "character":
        vals = f.params["chi"].values_at(members)
    else:
        vals = f.values(int(members.max()))[members]
    total = vals.sum()
    if np.iscomplexobj(total):
        return complex(total)
    return int(total) if f.is_integer else float(total)


def smooth_power_sums(x: float, y: float, kappa: float, with_log: bool = False) -> float:
    """sum n**-kappa over S(x, y); with ``with_log`` the summand carries log(x/n)."""
    if not 0.0 <= kappa <= 1.0:
        raise DomainError(f"kappa must lie in [0, 1], got {kappa}")
    n = smooth_enumerate(x, y, 0).members.astype(float)
    terms = n**-kappa
    if with_log:
        terms = terms * np.log(x / n)
    return float(math.fsum(terms.tolist()))


# ------------------------------------------------------------ Dickman rho


class DickmanInterpolant:
    """rho on the grid u = j * step, 0 <= u <= u_max.

    [0, 2] uses the closed form; on (2, 4] each grid value comes from
    rho(u) = rho(u - 2h) - int_{u-2h}^{u} rho(t - 1)/t dt with Simpson's rule,
    filled one unit interval at a time. Past 4 that form leaves an absolute
    error floor near 1e-14, larger than rho itself once u > 10, so the grid
    continues with the positive-weight relation u rho(u) = int_{u-1}^u rho.
    """

    def __init__(self, step: float = RHO_STEP, u_max: float = RHO_UMAX):
        per_unit = round(1.0 / step)
        if per_unit < 4 or abs(per_unit * step - 1.0) > 1e-12 or per_unit % 2:
            raise DomainError("step must be 1/(even integer >= 4)")
        self.step = 1.0 / per_unit
        self.per_unit = per_unit
        self.u_max = float(u_max)
        n = int(math.ceil(u_max)) * per_unit
        u = np.arange(n + 1) * self.step
        rho = np.ones(n + 1)
        two = 2 * per_unit
        mid = (u > 1) & (u <= 2)
        rho[mid] = 1.0 - np.log(u[mid])
        h = self.step
        switch = min(n, RHO_SWITCH * per_unit)
        for start in range(two, switch, per_unit):
            j = np.arange(start + 1, start + per_unit + 1)
            g = rho[: n + 1 - per_unit] / u[per_unit:]  # g[i] = rho(u_i - 1) / u_i at index i + per_unit
            gi = lambda idx: g[idx - per_unit]  # noqa: E731
            inc = h / 3.0 * (gi(j - 2) + 4.0 * gi(j - 1) + gi(j))
            if start == two:
                # the odd chain straddles u = 2 where rho(t - 1) has a kink: integrate
                # [2, 2 + h] exactly-closed-form with a half-step Simpson rule instead
                t = np.array([2.0, 2.0 + h / 2, 2.0 + h])
                val = (1.0 - np.log(t - 1.0)) / t
                inc0 = h / 6.0 * (val[0] + 4 * val[1] + val[2])
                inc[0] = inc0
                base_odd = rho[two]
            else:
                base_odd = rho[start - 1]
            base_even = rho[start]
            # chains j = start+1, start+3, ... and start+2, start+4, ...
            odd = np.cumsum(inc[0::2])
            even = np.cumsum(inc[1::2])
            rho[start + 1 : start + per_unit + 1 : 2] = base_odd - odd
            rho[start + 2 : start + per_unit + 1 : 2] = base_even - even
        # beyond the switch point use u rho(u) = int_{u-1}^{u} rho(t) dt: all weights are
        # positive, so relative accuracy survives where rho is far below rounding of rho(2)
        w = np.full(per_unit + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= h / 3.0
        head = w[:-1]
        for j in range(switch + 1, n + 1):
            rho[j] = float(head @ rho[j - per_unit : j]) / (u[j] - w[-1])
        self.grid = u
        self.values = rho

    def __call__(self, u: float) -> float:
        return self.rho(u)

    def rho(self, u: float) -> float:
        if u < 0:
            raise DomainError(f"rho is undefined for u = {u} < 0")
        if u > self.u_max:
            raise DomainError(f"u = {u} exceeds u_max = {self.u_max}")
        if u <= 1.0:
            return 1.0
        if u <= 2.0:
            return 1.0 - math.log(u)
        j = int(math.floor(u / self.step))
        frac = u - j * self.step
        if frac < 1e-15:
            return float(self.values[j])
        # integrate from the grid point below using interpolated rho(t - 1)
        t = np.array([j * self.step, j * self.step + frac / 2, u])
        g = np.array([self._interp(ti - 1.0) / ti for ti in t])
        return float(self.values[j] - frac / 6.0 * (g[0] + 4 * g[1] + g[2]))

    def _interp(self, s: float) -> float:
        if s <= 2.0:
            return 1.0 if s <= 1.0 else 1.0 - math.log(s)
        # cubic Lagrange on the four surrounding nodes, kept inside [2, u_max]
        j = int(math.floor(s / self.step))
        lo = max(j - 1, 2 * self.per_unit)
        lo = min(lo, self.values.size - 4)
        xs = self.grid[lo : lo + 4]
        ys = self.values[lo : lo + 4]
        out = 0.0
        for a in range(4):
            w = 1.0
            for b in range(4):
                if a != b:
                    w *= (s - xs[b]) / (xs[a] - xs[b])
            out += w * ys[a]
        return out

    def delay_residual(self, skip: float = 0.0) -> float:
        """max |rho'(u) + rho(u - 1)/u| over interior grid points u > 2 (central differences)."""
        h = self.step
        pu = self.per_unit
        j = np.arange(2 * pu + 1, self.values.size - 1)
        if skip:
            j = j[self.grid[j] >= skip]
        d = (self.values[j + 1] - self.values[j - 1]) / (2 * h)
        return float(np.max(np.abs(d + self.values[j - pu] / self.grid[j])))


@lru_cache(maxsize=4)
def dickman_interpolant(step: float = RHO_STEP, u_max: float = RHO_UMAX) -> DickmanInterpolant:
    return DickmanInterpolant(step, u_max)


def dickman_rho(u: float) -> float:
    """Dickman's function; absolute accuracy about 1e-10 for u <= 20."""
    return dickman_interpolant().rho(u)


def dickman_rho_oracle(u: float) -> float:
    """Independent high-precision value of rho on [0, 3] by adaptive quadrature.

    On [2, 3], rho(u) = rho(2) - int_2^u (1 - log(t - 1))/t dt.
    """
    import mpmath

    if u < 0 or u > 3:
        raise DomainError("the quadrature oracle covers 0 <= u <= 3 only")
    if u <= 1:
        return 1.0
    if u <= 2:
        return float(1 - mpmath.log(u))
    with mpmath.workdps(30):
        val = (1 - mpmath.log(2)) - mpmath.quad(lambda t: (1 - mpmath.log(t - 1)) / t, [2, u])
        return float(val)


# ------------------------------------------------------------ round numbers


@dataclass(frozen=True)
class CensusConstraint:
    kind: str = "none"  # none | squarefree_coprime | exact_large
    m: int = 1
    min_prime: int | None = None
    ell: int | None = None
    y_bound: float | None = None

    @classmethod
    def none(cls) -> "CensusConstraint":
        return cls()

    @classmethod
    def squarefree_coprime(cls, m: int = 1, min_prime: int | None = None) -> "CensusConstraint":
        return cls("squarefree_coprime", m=int(m), min_prime=min_prime)

    @classmethod
    def exact_large(cls, ell: int, y_bound: float) -> "CensusConstraint":
        return cls("exact_large", ell=int(ell), y_bound=float(y_bound))


def prime_factor_census(
    x: float, y: int | None, constraint: CensusConstraint | None = None, cap: int = CENSUS_CAP
) -> int:
    """Count n <= x with omega(n) = y distinct prime factors under ``constraint``.

    ``y = None`` drops the omega condition (used with ``exact_large``, which asks
    for Omega(n) = ell with every prime factor > y_bound).
    """
    N = int(math.floor(x))
    if N > cap:
        raise ResourceCapError(f"x = {x} exceeds the census cap {cap}")
    if N < 1:
        return 0
    constraint = constraint or CensusConstraint()
    omega, big = arith.omega_sieve(N)
    mask = np.ones(N + 1, dtype=bool)
    mask[0] = False
    if y is not None:
        mask &= omega == y
    if constraint.kind == "squarefree_coprime":
        mask &= arith.squarefree_sieve(N)
        if constraint.m > 1:
            mask &= np.gcd(np.arange(N + 1), constraint.m) == 1
        if constraint.min_prime:
            spf = arith.smallest_prime_factor_sieve(N)
            mask &= (spf >= constraint.min_prime) | (np.arange(N + 1) == 1)
    elif constraint.kind == "exact_large":
        mask &= big == constraint.ell
        spf = arith.smallest_prime_factor_sieve(N)
        mask &= (spf > constraint.y_bound) | (np.arange(N + 1) == 1)
    elif constraint.kind != "none":
        raise DomainError(f"unknown census constraint {constraint.kind!r}")
    return int(mask.sum())


def hardy_ramanujan_bound(x: float, y: int, C: float = 35.0, C2: float = 4.0) -> float:
    """C * (x / log x) * (log log x + C2)**(y - 1) / (y - 1)!  for y >= 1."""
    if y < 1:
        raise DomainError("the Hardy-Ramanujan shape needs y >= 1")
    L = math.log(math.log(x)) + C2
    return C * x / math.log(x) * math.exp((y - 1) * math.log(L) - math.lgamma(y))


def pomerance_shape(x: float, y: int) -> float:
    """x/log x * L**y / y!  with  L = log(log x / (y log y)); NaN outside its range."""
    if y < 2:
        return float("nan")
    arg = math.log(x) / (y * math.log(y))
    if arg <= 1:
        return float("nan")
    L = math.log(arg)
    return x / math.log(x) * math.exp(y * math.log(L) - math.lgamma(y + 1))


def monotonicity_constant(x: float, y: float, z: float) -> float:
    """Smallest c with Psi(x/z, y) z / Psi(x, y) <= (c log x)**(log z / log y)."""
    ratio = psi_count(x / z, y) * z / psi_count(x, y)
    return ratio ** (math.log(y) / math.log(z)) / math.log(x)
