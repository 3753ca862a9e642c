"""
Polya's truncated Fourier expansion and the Poisson-summation harness.

Phi_1 is the indicator of [-1, 1] and Phi_r its r-fold convolution, stored
exactly as one rational polynomial per unit interval. Its Fourier transform
(with e(-xi t) in the kernel) is (sin(2 pi xi) / (pi xi))**r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .characters import CharacterId, character_group, e, gauss_sum, is_primitive
from .errors import DomainError, ResourceCapError
from .moments import moment_divisor_side

TAIL_CAP = 10**8


def _poly_eval(coeffs, s):
    out = 0
    for c in reversed(coeffs):
        out = out * s + c
    return out


def _poly_integrate(coeffs):
    """Antiderivative vanishing at 0."""
    return [Fraction(0)] + [Fraction(c) / (i + 1) for i, c in enumerate(coeffs)]


@dataclass(frozen=True)
class BSplineKernel:
    """Phi_r on [-r, r]; ``pieces[j + r]`` is the polynomial in s = t - j on [j, j + 1]."""

    r: int
    pieces: tuple[tuple[Fraction, ...], ...]

    def __call__(self, t: float) -> float:
        return self.value(t)

    def value(self, t: float) -> float:
        if abs(t) >= self.r:
            return 0.0
        j = math.floor(t)
        s = t - j
        coeffs = self.pieces[j + self.r]
        return float(_poly_eval([float(c) for c in coeffs], s))

    def value_exact(self, t: Fraction) -> Fraction:
        t = Fraction(t)
        if abs(t) >= self.r:
            return Fraction(0)
        j = math.floor(t)
        return _poly_eval(self.pieces[j + self.r], t - j)

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = np.abs(t) < self.r
        j = np.floor(t[inside]).astype(np.int64)
        s = t[inside] - j
        res = np.zeros(s.shape)
        for jj in np.unique(j):
            sel = j == jj
            coeffs = [float(c) for c in self.pieces[int(jj) + self.r]]
            res[sel] = _poly_eval(coeffs, s[sel])
        out[inside] = res
        return out

    def integral(self) -> Fraction:
        return sum((_poly_eval(_poly_integrate(p), Fraction(1)) for p in self.pieces), Fraction(0))


@lru_cache(maxsize=32)
def bspline(r: int) -> BSplineKernel:
    """Exact Phi_r, built by Phi_r(t) = int_{t-1}^{t+1} Phi_{r-1}(s) ds."""
    if r < 1:
        raise DomainError("r must be >= 1")
    if r == 1:
        return BSplineKernel(1, ((Fraction(1),), (Fraction(1),)))
    prev = bspline(r - 1)
    # F_j(s): antiderivative of Phi_{r-1} from -(r-1) up to j + s
    antider = []
    acc = Fraction(0)
    for p in prev.pieces:
        integ = _poly_integrate(p)
        integ[0] += acc
        antider.append(integ)
        acc = _poly_eval(integ, Fraction(1))
    total = acc
    lo = -(r - 1)

    def F(j):
        idx = j - lo
        if idx < 0:
            return [Fraction(0)]
        if idx >= len(antider):
            return [total]
        return antider[idx]

    pieces = []
    for j in range(-r, r):
        a, b = F(j + 1), F(j - 1)
        n = max(len(a), len(b))
        a = a + [Fraction(0)] * (n - len(a))
        b = b + [Fraction(0)] * (n - len(b))
        coeffs = [x - y for x, y in zip(a, b)]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        pieces.append(tuple(coeffs))
    return BSplineKernel(r, tuple(pieces))


def bspline_kernel(r: int, t: float) -> float:
    return bspline(r).value(t)


def bspline_kernel_hat(r: int, xi: float) -> float:
    """(sin(2 pi xi) / (pi xi))**r, equal to 2**r at xi = 0."""
    if r < 1:
        raise DomainError("r must be >= 1")
    xi = float(xi)
    if xi == 0.0:
        return float(2**r)
    return (math.sin(2 * math.pi * xi) / (math.pi * xi)) ** r


def bspline_kernel_hat_array(r: int, xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    out = np.full(xi.shape, float(2**r))
    nz = xi != 0
    out[nz] = (np.sin(2 * np.pi * xi[nz]) / (np.pi * xi[nz])) ** r
    return out


# ------------------------------------------------------------ Polya


@dataclass(frozen=True)
class PolyaResult:
    expansion: complex
    direct: complex
    residual: float
    bound: float


def polya_bound(q: int, H: int) -> float:
    """1 + q log q / H, the shape of the truncation error."""
    return 1.0 + q * math.log(q) / H


def polya_truncated_sum(chi: CharacterId, x: float, H: int) -> PolyaResult:
    """tau(chi)/(2 pi i) sum_{0 < |h| <= H} conj(chi)(h)/h (1 - e(-h x / q)), next to the direct sum."""
    if H < 1:
        raise DomainError("H must be >= 1")
    if not is_primitive(chi):
        raise DomainError(f"{chi} is not primitive")
    return _polya_many(chi.q, [chi.index], x, H)[0]


def _polya_many(q: int, indices, x: float, H: int) -> list[PolyaResult]:
    group = character_group(q)
    X = int(math.floor(x))
    E = group.exponent_matrix[list(indices)]
    h = np.arange(1, H + 1)
    vals_h = group.values(h, E)  # chi(h)
    parity = np.array([group[i].parity for i in indices])
    weight_pos = (1 - e(-h * x / q)) / h
    weight_neg = (1 - e(h * x / q)) / (-h)
    # conj(chi)(-h) = chi(-1) conj(chi)(h)
    inner = np.conj(vals_h) @ weight_pos + parity * (np.conj(vals_h) @ weight_neg)
    n = np.arange(1, X + 1)
    direct = group.values(n, E).sum(axis=1) if X else np.zeros(len(indices), dtype=complex)
    out = []
    bound = polya_bound(q, H)
    for i, idx in enumerate(indices):
        tau = gauss_sum(group[idx])
        expansion = tau / (2j * math.pi) * inner[i]
        out.append(PolyaResult(complex(expansion), complex(direct[i]), float(abs(expansion - direct[i])), bound))
    return out


def polya_residuals(q: int, x: float, H: int, indices=None) -> list[PolyaResult]:
    """Polya expansion vs direct sum for many primitive characters mod q at once."""
    group = character_group(q)
    if indices is None:
        indices = [chi.index for chi in group if is_primitive(chi)]
    return _polya_many(q, indices, x, H)


# ------------------------------------------------------------ Poisson harness


@dataclass(frozen=True)
class PoissonCheck:
    lhs: complex
    rhs: complex
    gap: float
    method: str


def default_tail_cut(q: int, X: float, r: int, tol: float = 1e-9) -> int:
    """Smallest a_max with (rN/(pi a_max))**(r-1) (rN/pi) (X sqrt(q)/q) <= tol, where rN = q/X."""
    rN = q / X
    c = (rN / math.pi) * X * math.sqrt(q) / q
    if r == 1:
        return int(math.ceil(c / tol))
    return max(1, int(math.ceil((rN / math.pi) * (c / tol) ** (1.0 / (r - 1)))))


def _rhs_truncated(chi: CharacterId, X: float, r: int, a_max: int) -> complex:
    q = chi.q
    if a_max > TAIL_CAP:
        raise ResourceCapError(f"tail cut {a_max} exceeds {TAIL_CAP}; pass X as a Fraction or raise r")
    s_pos = 0j
    for lo in range(1, a_max + 1, 1 << 20):
        a = np.arange(lo, min(a_max, lo + (1 << 20) - 1) + 1)
        s_pos += np.sum(np.conj(chi.values_at(a)) * bspline_kernel_hat_array(r, a * X / q))
    return complex(s_pos * (1 + chi.parity))  # a < 0 mirrors a > 0 up to chi(-1)


def _rhs_periodic(chi: CharacterId, X: Fraction, r: int, period: int) -> complex:
    """Sum over all a != 0 exactly: numerator periodic mod ``period``, tail via Hurwitz zeta."""
    q = chi.q
    b = np.arange(1, period + 1)
    ratio = float(X / q)
    chibar = np.conj(chi.values_at(b))
    num = chibar * np.sin(2 * np.pi * (b * ratio)) ** r
    tail = hurwitz_zeta(r, b / period) / float(period) ** r
    s_pos = (num * tail).sum() / (math.pi * ratio) ** r
    return complex(s_pos * (1 + chi.parity))


def poisson_identity_check(chi: CharacterId, X, r: int, tail_cut: int | None = None, period_cap: int = 10**6) -> PoissonCheck:
    """Both sides of sum_n chi(n) Phi_r(n/X) = (X tau(chi)/q) sum_a conj(chi)(a) hat Phi_r(aX/q).

    Without ``tail_cut``, and when X/q is rational with a modest denominator,
    the right side is summed over all a exactly using the periodicity of the
    numerator and the Hurwitz zeta function; otherwise it is truncated at
    |a| <= tail_cut (default from the decay bound of hat Phi_r).
    """
    q = chi.q
    if not is_primitive(chi):
        raise DomainError(f"{chi} is not primitive")
    if chi.parity != 1:
        raise DomainError(f"{chi} is odd; the harness needs chi(-1) = +1")
    if r < 1:
        raise DomainError("r must be >= 1")
    Xf = float(X)
    kernel = bspline(r)
    nmax = int(math.floor(r * Xf))
    n = np.arange(1, nmax + 1)
    # chi even: the n < 0 terms repeat the n > 0 ones; chi(0) = 0 for q > 1
    lhs = 2 * complex(np.sum(chi.values_at(n) * kernel.values(n / Xf))) if nmax else 0j
    if q == 1:
        lhs += kernel.value(0.0)
    scale = Xf * gauss_sum(chi) / q
    method = "truncated"
    rhs_sum = None
    if tail_cut is None and r >= 2:
        Xr = Fraction(X).limit_denominator(10**6) if not isinstance(X, Fraction) else X
        if abs(float(Xr) - Xf) <= 1e-15 * max(1.0, abs(Xf)):
            den = (Xr / q).denominator
            period = math.lcm(q, den)
            if period <= period_cap:
                rhs_sum = _rhs_periodic(chi, Xr, r, period)
                method = "periodic"
    if rhs_sum is None:
        a_max = default_tail_cut(q, Xf, r) if tail_cut is None else int(tail_cut)
        rhs_sum = _rhs_truncated(chi, Xf, r, a_max)
    rhs = complex(scale * rhs_sum)
    return PoissonCheck(lhs, rhs, abs(lhs - rhs), method)


def smoothed_sum_chain(chi: CharacterId, N: int, r: int) -> dict[str, float]:
    """|sum chi(n) Phi_r(n/X)| against 2**r max_{t<=q/N} |sum_{n<=t} chi(n)|, with X = q/(rN)."""
    q = chi.q
    X = q / (r * N)
    t_max = int(math.floor(q / N))
    n = np.arange(1, t_max + 1)
    vals = chi.values_at(n)
    smoothed = abs(2 * np.sum(vals * bspline(r).values(n / X)))
    partial = float(np.max(np.abs(np.cumsum(vals)))) if t_max else 0.0
    return {"smoothed": float(smoothed), "max_partial": partial, "rhs": 2**r * partial, "holds": smoothed <= 2**r * partial + 1e-9}


def moment_constraint(q: int, N: int, r: int) -> float:
    """Largest admissible k: (r - 1) log(q/2) / (r log(rN))."""
    return (r - 1) * math.log(q / 2) / (r * math.log(r * N))


def smoothed_moment_bound(q: int, N: int, r: int, k: int, slack: float = 8.0) -> tuple[float, dict]:
    """(sqrt q / rN) * E(|sum_{a<=N} X_a|**(2k))**(1/2k) next to the measured
    max over even nonprincipal chi and t <= q/N of |sum_{n<=t} chi(n)|."""
    if r < 1 or r % 2:
        raise DomainError("r must be a positive even integer")
    if N < 1 or k < 1:
        raise DomainError("N and k must be positive")
    kmax = moment_constraint(q, N, r)
    if k > kmax:
        raise DomainError(f"k = {k} violates k <= (r-1)log(q/2)/(r log(rN)) = {kmax:.4f}")
    moment = moment_divisor_side(k, N, 1)
    bound = math.sqrt(q) / (r * N) * moment ** (1.0 / (2 * k))
    group = character_group(q)
    t_max = int(math.floor(q / N))
    best, witness = 0.0, None
    for chi in group:
        if chi.is_principal or chi.parity != 1:
            continue
        vals = chi.values_at(np.arange(1, t_max + 1))
        m = float(np.max(np.abs(np.cumsum(vals)))) if t_max else 0.0
        if m > best:
            best, witness = m, chi.index
    details = {
        "q": q,
        "N": N,
        "r": r,
        "k": k,
        "k_max": kmax,
        "moment": moment,
        "measured_max": best,
        "witness_index": witness,
        "ratio": best / bound if bound else float("inf"),
        "passes": best >= bound / slack,
        "slack": slack,
    }
    return bound, details
