"""
Exact elementary number theory.

Factorization (deterministic Miller-Rabin + Brent/Pollard rho), the
multiplicative statistics mu / omega / Omega, Kronecker symbols and the
fundamental-discriminant test, plus numpy sieves used by the other modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

INT64_MAX = 2**63 - 1
FACTOR_CAP = 2**64

# Deterministic for n < 3.3e24, which covers the 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def checked_int64(value: int, what: str = "value") -> int:
    """Return ``value`` unchanged, raising OverflowError if it leaves the int64 range."""
    value = int(value)
    if value > INT64_MAX or value < -INT64_MAX - 1:
        raise OverflowError(f"{what} = {value} does not fit a signed 64-bit integer")
    return value


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise RuntimeError(f"rho failed to split {n}")  # pragma: no cover


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 0
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization of {self.n}: {self.factors}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factors {self.factors} do not multiply to {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**j for d in divs for j in range(e + 1)]
        return sorted(divs)


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _brent(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Factor ``1 <= n < 2**64`` into primes, increasing."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise DomainError(f"factorize expects an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise DomainError(f"factorize expects n >= 1, got {n}")
    if n >= FACTOR_CAP:
        raise DomainError(f"n = {n} exceeds the factorization cap 2**64")
    out: dict[int, int] = {}
    m = n
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    _split(m, out)
    return Factorization(n, tuple(sorted(out.items())))


def multiplicative_stats(n: int) -> tuple[int, int, int]:
    """Return ``(mu(n), omega(n), Omega(n))``."""
    fac = factorize(n)
    omega = len(fac.factors)
    big_omega = sum(e for _, e in fac.factors)
    mu = 0 if any(e > 1 for _, e in fac.factors) else (-1) ** omega
    return mu, omega, big_omega


def mobius(n: int) -> int:
    return multiplicative_stats(n)[0]


def euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n).factors:
        result -= result // p
    return result


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    return all(e == 1 for _, e in factorize(n).factors)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for integer D and n >= 0.

    (D/0) is 1 when |D| = 1 and 0 otherwise; (D/2) is 0 for even D and
    +1 / -1 according as D = +-1 or +-3 mod 8.
    """
    D, n = int(D), int(n)
    if n < 0:
        raise DomainError(f"kronecker expects n >= 0, got {n}")
    if n == 0:
        return 1 if abs(D) == 1 else 0
    if D % 2 == 0 and n % 2 == 0:
        return 0
    v = (n & -n).bit_length() - 1
    m = n >> v
    result = 1
    if v % 2 == 1 and D % 8 in (3, 5):
        result = -1
    if m == 1:
        return result
    return result * jacobi(D, m)


def kronecker_array(D: int, n) -> np.ndarray:
    """Vectorised Kronecker symbol (D/n) over an array of nonnegative n (D fixed)."""
    n = np.asarray(n, dtype=np.int64)
    if n.size and n.min() < 0:
        raise DomainError("kronecker_array expects n >= 0")
    out = np.ones(n.shape, dtype=np.int8)
    zero = n == 0
    out[zero] = 1 if abs(D) == 1 else 0
    m = n.copy()
    m[zero] = 1
    # strip powers of two from n
    tz = np.zeros(n.shape, dtype=np.int64)
    even = (m & 1) == 0
    while even.any():
        m[even] >>= 1
        tz[even] += 1
        even = (m & 1) == 0
    if D % 2 == 0:
        out[tz > 0] = 0
    elif D % 8 in (3, 5):
        out[(tz % 2) == 1] *= -1
    # Jacobi (D / m) for odd m, vectorised binary algorithm
    a = np.mod(D, m)
    mm = m.copy()
    sign = np.ones(n.shape, dtype=np.int8)
    active = mm > 1
    while active.any():
        ev = active & (a != 0) & ((a & 1) == 0)
        while ev.any():
            a[ev] >>= 1
            r8 = mm[ev] % 8
            flip = (r8 == 3) | (r8 == 5)
            idx = np.flatnonzero(ev)[flip]
            sign[idx] *= -1
            ev = active & (a != 0) & ((a & 1) == 0)
        done = active & (a == 0)
        sign[done & (mm != 1)] = 0
        active &= a != 0
        if not active.any():
            break
        flip = active & (a % 4 == 3) & (mm % 4 == 3)
        sign[flip] *= -1
        a_new = np.where(active, mm, a)
        mm_new = np.where(active, a, mm)
        a, mm = a_new, mm_new
        a[active] %= mm[active]
        active &= mm > 1
    return (out * sign).astype(np.int8)


def is_fundamental_discriminant(D: int) -> bool:
    """True for D = 1 mod 4 squarefree or D = 4m with m = 2, 3 mod 4 squarefree.

    D = 1 is deliberately excluded.
    """
    D = int(D)
    if D == 0:
        raise DomainError("D = 0 is not a discriminant")
    if D == 1:
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


@lru_cache(maxsize=64)
def primitive_root(p: int) -> int:
    """Least primitive root of the odd prime ``p``."""
    if p == 2:
        return 1
    order = p - 1
    qs = factorize(order).primes
    for g in range(2, p):
        if all(pow(g, order // r, p) != 1 for r in qs):
            return g
    raise DomainError(f"{p} has no primitive root")  # pragma: no cover


# ---------------------------------------------------------------- sieves


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array."""
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def smallest_prime_factor_sieve(n: int) -> np.ndarray:
    """spf[m] for 0 <= m <= n (spf[0] = spf[1] = 1 by convention)."""
    n = int(n)
    spf = np.zeros(n + 1, dtype=np.int64)
    spf[: min(n, 1) + 1] = 1
    for p in primes_up_to(math.isqrt(n)):
        block = spf[p * p :: p]
        block[block == 0] = p
        spf[p * p :: p] = block
    unset = spf == 0
    spf[unset] = np.arange(n + 1)[unset]
    return spf


def omega_sieve(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``(omega, Omega)`` for 0..n (entries at 0 are 0)."""
    n = int(n)
    omega = np.zeros(n + 1, dtype=np.int8)
    big = np.zeros(n + 1, dtype=np.int8)
    for p in primes_up_to(n):
        omega[p::p] += 1
        pk = p
        while pk <= n:
            big[pk::pk] += 1
            pk *= p
    return omega, big


def mobius_sieve(n: int) -> np.ndarray:
    """mu(m) for 0 <= m <= n as int8 (mu(0) = 0)."""
    n = int(n)
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_up_to(n):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def squarefree_sieve(n: int) -> np.ndarray:
    """Boolean squarefree flags for 0..n."""
    n = int(n)
    sf = np.ones(n + 1, dtype=bool)
    sf[0] = False
    for p in primes_up_to(math.isqrt(n)):
        sf[p * p :: p * p] = False
    return sf
