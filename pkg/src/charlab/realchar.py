"""
Real characters: Kronecker symbols (D/.) attached to fundamental discriminants.

A residue class D = a (mod b(y)), b(y) = 4 * prod_{p <= y} p, with a = 1 mod 8
and (a/p) = 1 for odd p <= y forces (D/p) = 1 for every p <= y. We always use
a = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import arith
from .errors import DomainError, ResourceCapError
from .smooth import psi_count

EULER_GAMMA = 0.5772156649015329
SCAN_CAP = 10**7


@dataclass(frozen=True)
class SmoothSplittingClass:
    y: float
    a: int
    b: int

    def __post_init__(self):
        if math.gcd(self.a, self.b) != 1:
            raise DomainError(f"gcd({self.a}, {self.b}) != 1")
        if self.a % 8 != 1:
            raise DomainError("a must be 1 mod 8")

    @property
    def primes(self) -> list[int]:
        return [int(p) for p in arith.primes_up_to(int(math.floor(self.y)))]

    def contains(self, D: int) -> bool:
        return (int(D) - self.a) % self.b == 0


def smooth_splitting_class(y: float) -> SmoothSplittingClass:
    if y < 2:
        raise DomainError("y must be >= 2")
    b = 4
    for p in arith.primes_up_to(int(math.floor(y))):
        b *= int(p)
        if b > arith.INT64_MAX:
            raise ResourceCapError(f"b(y) overflows 64 bits at p = {p}")
    return SmoothSplittingClass(float(y), 1, b)


def _check_sign(sign: str) -> None:
    if sign not in ("+", "-", "both"):
        raise DomainError(f"sign must be '+', '-' or 'both', got {sign!r}")


def fundamental_discriminants_in(
    lo: float, hi: float, sign: str = "both", cls: SmoothSplittingClass | None = None
) -> list[int]:
    """Fundamental D with lo <= |D| <= hi, ordered by |D| and then positive before negative."""
    _check_sign(sign)
    if lo < 1 or hi < lo:
        raise DomainError("need 1 <= lo <= hi")
    a, b = int(math.ceil(lo)), int(math.floor(hi))
    if b < a:
        return []
    if b > SCAN_CAP:
        raise ResourceCapError(f"|D| up to {b} exceeds the scan cap {SCAN_CAP}")
    sf = arith.squarefree_sieve(b)
    m = np.arange(a, b + 1, dtype=np.int64)
    sf_m = sf[m]
    quarter = m // 4
    sf_q = np.zeros(m.shape, dtype=bool)
    div4 = m % 4 == 0
    sf_q[div4] = sf[quarter[div4]]
    # D = +m: m = 1 mod 4 squarefree, or m = 4k with k = 2, 3 mod 4 squarefree
    pos = ((m % 4 == 1) & sf_m) | (div4 & np.isin(quarter % 4, (2, 3)) & sf_q)
    pos &= m != 1
    # D = -m: m = 3 mod 4 squarefree, or m = 4k with k = 1, 2 mod 4 squarefree
    neg = ((m % 4 == 3) & sf_m) | (div4 & np.isin(quarter % 4, (1, 2)) & sf_q)
    if cls is not None:
        pos &= (m - cls.a) % cls.b == 0
        neg &= (-m - cls.a) % cls.b == 0
    out = []
    for mv, p, n in zip(m.tolist(), pos.tolist(), neg.tolist()):
        if p and sign in ("+", "both"):
            out.append(mv)
        if n and sign in ("-", "both"):
            out.append(-mv)
    return out


def _require_fundamental(D: int) -> None:
    if D == 0 or not arith.is_fundamental_discriminant(D):
        raise DomainError(f"{D} is not a fundamental discriminant")


def real_char_sum(D: int, x: float) -> int:
    """sum_{n <= x} (D/n), exactly."""
    D = int(D)
    _require_fundamental(D)
    X = int(math.floor(x))
    if X < 1:
        return 0
    return int(arith.kronecker_array(D, np.arange(1, X + 1)).astype(np.int64).sum())


def _legendre_columns(Ds: np.ndarray, primes: np.ndarray, chunk_cells: int = 1 << 22) -> np.ndarray:
    """(D/p) for D in ``Ds`` and odd primes p, by Euler's criterion on a 2-D grid."""
    out = np.empty((len(Ds), len(primes)), dtype=np.int8)
    if not len(primes) or not len(Ds):
        return out
    exps = (primes - 1) // 2
    rows = max(1, chunk_cells // len(primes))
    for s in range(0, len(Ds), rows):
        base = Ds[s : s + rows, None] % primes[None, :]
        result = np.ones(base.shape, dtype=np.int64)
        e = exps.copy()
        while e.any():
            odd = (e & 1).astype(bool)
            if odd.any():
                result[:, odd] = result[:, odd] * base[:, odd] % primes[odd]
            base = base * base % primes
            e >>= 1
        out[s : s + rows] = np.where(result == primes - 1, -1, result)
    return out


def kronecker_rows(Ds, X: int) -> np.ndarray:
    """Matrix of (D/n) for D in ``Ds`` (rows) and n = 0..X (columns), int8."""
    Ds = np.asarray(Ds, dtype=np.int64)
    X = int(X)
    if X > 3 * 10**9:
        raise ResourceCapError("kronecker_rows needs X < 3e9 to stay in int64")
    out = np.zeros((len(Ds), X + 1), dtype=np.int8)
    out[:, 0] = np.abs(Ds) == 1
    if X < 1 or not len(Ds):
        return out
    out[:, 1] = 1
    primes = arith.primes_up_to(X)
    if len(primes):
        r = Ds % 8
        out[:, 2] = np.where(Ds % 2 == 0, 0, np.where((r == 1) | (r == 7), 1, -1))
        odd = primes[1:]
        out[:, odd] = _legendre_columns(Ds, odd)
    if X >= 4:
        spf = arith.smallest_prime_factor_sieve(X)
        _, big = arith.omega_sieve(X)
        n = np.arange(X + 1)
        for level in range(2, int(big.max()) + 1):
            idx = n[big == level]
            out[:, idx] = out[:, spf[idx]] * out[:, idx // spf[idx]]
    return out


def _prefix_sums_at(Ds, cutoffs, chunk_cells: int = 1 << 24) -> np.ndarray:
    """sum_{n <= cutoffs[i]} (Ds[i]/n) for each i."""
    Ds = np.asarray(Ds, dtype=np.int64)
    cutoffs = np.asarray(cutoffs, dtype=np.int64)
    out = np.zeros(len(Ds), dtype=np.int64)
    if not len(Ds):
        return out
    X = int(cutoffs.max())
    rows = max(1, chunk_cells // (X + 1))
    for s in range(0, len(Ds), rows):
        block = kronecker_rows(Ds[s : s + rows], X).astype(np.int64)
        csum = np.cumsum(block, axis=1)
        out[s : s + rows] = csum[np.arange(len(block)), cutoffs[s : s + rows]]
    return out


def _argmax_tiebreak(Ds: list[int], values: np.ndarray) -> int:
    """Index of the largest value; ties go to smallest |D|, then positive D."""
    keys = sorted(range(len(Ds)), key=lambda i: (-values[i], abs(Ds[i]), Ds[i] < 0))
    return keys[0]


def real_delta_search(q: float, x: float, sign: str = "both") -> tuple[int, int]:
    """max |sum_{n<=x} (D/n)| over fundamental q <= |D| <= 2q; returns (value, D)."""
    if q < 3:
        raise DomainError("q must be >= 3")
    Ds = fundamental_discriminants_in(q, 2 * q, sign)
    if not Ds:
        raise DomainError(f"no fundamental discriminant with {q} <= |D| <= {2 * q}")
    X = max(int(math.floor(x)), 0)
    sums = np.abs(_prefix_sums_at(Ds, np.full(len(Ds), X)))
    i = _argmax_tiebreak(Ds, sums)
    return int(sums[i]), int(Ds[i])


def real_delta_curve(q: float, xs, sign: str = "both") -> list[tuple[int, int, int]]:
    """(x, value, witness) for each x; the curve need not be monotone."""
    Ds = fundamental_discriminants_in(q, 2 * q, sign)
    if not Ds:
        raise DomainError(f"no fundamental discriminant with {q} <= |D| <= {2 * q}")
    X = int(max(xs))
    csum = np.zeros((len(Ds), X + 1), dtype=np.int64)
    rows = max(1, (1 << 24) // (X + 1))
    for s in range(0, len(Ds), rows):
        csum[s : s + rows] = np.cumsum(kronecker_rows(Ds[s : s + rows], X).astype(np.int64), axis=1)
    out = []
    for x in xs:
        vals = np.abs(csum[:, int(x)])
        i = _argmax_tiebreak(Ds, vals)
        out.append((int(x), int(vals[i]), int(Ds[i])))
    return out


@dataclass(frozen=True)
class SplittingSearchResult:
    best_D: int | None
    best_sum: int
    target: int
    achieved: bool
    scanned: int
    class_ok: bool
    smooth_ok: bool


def theorem9_search(q: float, x: float, y: float, sign: str = "both") -> SplittingSearchResult:
    """Scan D = 1 mod b(y) with q <= |D| <= 2q for a large sum_{n<=x} (D/n) versus Psi(x, y)."""
    cls = smooth_splitting_class(y)
    Ds = fundamental_discriminants_in(q, 2 * q, sign, cls)
    X = int(math.floor(x))
    target = psi_count(X, y) if X >= 1 else 0
    if not Ds:
        return SplittingSearchResult(None, 0, target, False, 0, True, True)
    primes = cls.primes
    class_ok = True
    smooth_ok = True
    sums = np.zeros(len(Ds), dtype=np.int64)
    width = max(X, max(primes))
    smooth_idx = _smooth_index(X, y)
    rows = max(1, (1 << 24) // (width + 1))
    for s in range(0, len(Ds), rows):
        block = kronecker_rows(Ds[s : s + rows], width).astype(np.int64)
        class_ok &= bool((block[:, primes] == 1).all())
        smooth_ok &= bool((block[:, smooth_idx].sum(axis=1) == target).all())
        sums[s : s + rows] = block[:, 1 : X + 1].sum(axis=1)
    vals = np.abs(sums)
    i = _argmax_tiebreak(Ds, vals)
    best = int(sums[i])
    return SplittingSearchResult(int(Ds[i]), best, target, abs(best) >= target, len(Ds), class_ok, smooth_ok)


def _smooth_index(X: int, y: float) -> np.ndarray:
    if X < 1:
        return np.zeros(0, dtype=np.int64)
    rem = np.arange(X + 1, dtype=np.int64)
    for p in arith.primes_up_to(min(X, int(math.floor(y)))).tolist():
        pk = p
        while pk <= X:
            rem[pk::pk] //= p
            pk *= p
    idx = np.flatnonzero(rem == 1)
    return idx[idx >= 1]


def paley_scale(D: int) -> float:
    """(e^gamma / pi) sqrt|D| log log |D|."""
    a = abs(int(D))
    return math.exp(EULER_GAMMA) / math.pi * math.sqrt(a) * math.log(math.log(a))


def tail_sum_experiment(q: float, N: float, y: float) -> list[dict]:
    """For negative fundamental D = 1 mod b(y), q <= |D| <= 2q: sum_{n <= |D|/N} (D/n) and its normalisations."""
    if N < 2:
        raise DomainError("N must be >= 2")
    cls = smooth_splitting_class(y)
    Ds = fundamental_discriminants_in(q, 2 * q, "-", cls)
    return tail_sum_rows(Ds, N)


def tail_sum_rows(Ds, N: float) -> list[dict]:
    if not len(Ds):
        return []
    cut = np.array([int(math.floor(abs(D) / N)) for D in Ds], dtype=np.int64)
    sums = _prefix_sums_at(Ds, cut)
    rows = []
    for D, c, s in zip(Ds, cut.tolist(), sums.tolist()):
        rows.append(
            {
                "D": int(D),
                "cutoff": c,
                "tail_sum": int(s),
                "normalized": s / math.sqrt(abs(D)),
                "paley_ratio": s / paley_scale(D),
            }
        )
    return rows


def empirical_alpha_beta(B: float, lo: float, hi: float, sign: str = "both") -> dict:
    """Finite-scan max and min of (log|D|)^-B sum_{n <= (log|D|)^B} (D/n) over lo <= |D| <= hi."""
    Ds = fundamental_discriminants_in(lo, hi, sign)
    if not Ds:
        raise DomainError("no discriminants in range")
    cut = np.array([int(math.floor(math.log(abs(D)) ** B)) for D in Ds], dtype=np.int64)
    sums = _prefix_sums_at(Ds, cut)
    scale = np.array([math.log(abs(D)) ** B for D in Ds])
    ratio = sums / scale
    i, j = int(np.argmax(ratio)), int(np.argmin(ratio))
    return {"alpha_hat": float(ratio[i]), "alpha_D": Ds[i], "beta_hat": float(ratio[j]), "beta_D": Ds[j], "count": len(Ds)}
