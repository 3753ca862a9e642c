"""Arithmetic weight functions f(n) used in weighted character sums and moments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import arith
from .errors import DomainError

KINDS = (
    "unit",
    "moebius",
    "divisor",
    "power_phase",
    "smooth_indicator",
    "principal_indicator",
    "character",
    "custom",
)


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """A weight n -> f(n) evaluated in bulk on 1..N.

    ``values(N)`` returns an array of length N + 1 whose entry n holds f(n)
    (entry 0 is always 0). Integer-valued kinds return int64 arrays so that
    downstream moment computations stay exact.
    """

    kind: str = "unit"
    params: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown weight kind {self.kind!r}; expected one of {KINDS}")

    @property
    def key(self) -> tuple:
        items = []
        for name, value in sorted(self.params.items()):
            if isinstance(value, np.ndarray):
                value = (value.dtype.str, value.tobytes())
            items.append((name, value))
        return (self.kind, tuple(items))

    def __eq__(self, other) -> bool:
        return isinstance(other, WeightFunction) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    # -- constructors
    @classmethod
    def unit(cls) -> "WeightFunction":
        return cls("unit")

    @classmethod
    def moebius(cls) -> "WeightFunction":
        return cls("moebius")

    @classmethod
    def divisor(cls) -> "WeightFunction":
        return cls("divisor")

    @classmethod
    def power_phase(cls, t: float) -> "WeightFunction":
        return cls("power_phase", {"t": float(t)})

    @classmethod
    def smooth_indicator(cls, y: float, x: float | None = None) -> "WeightFunction":
        return cls("smooth_indicator", {"y": float(y), "x": None if x is None else float(x)})

    @classmethod
    def principal_indicator(cls, q: int) -> "WeightFunction":
        return cls("principal_indicator", {"q": int(q)})

    @classmethod
    def character(cls, chi) -> "WeightFunction":
        return cls("character", {"chi": chi})

    @classmethod
    def custom(cls, table) -> "WeightFunction":
        """``table[i]`` is f(i + 1); f vanishes beyond the table."""
        arr = np.asarray(table)
        return cls("custom", {"table": arr})

    @classmethod
    def parse(cls, spec: str) -> "WeightFunction":
        """Build from a short text form: ``unit``, ``moebius``, ``divisor``, ``power_phase:t``,
        ``smooth:y``, ``principal:q``."""
        name, _, arg = spec.partition(":")
        if name == "unit":
            return cls.unit()
        if name in ("moebius", "mu"):
            return cls.moebius()
        if name == "divisor":
            return cls.divisor()
        if name == "power_phase" and arg:
            return cls.power_phase(float(arg))
        if name == "smooth" and arg:
            return cls.smooth_indicator(float(arg))
        if name == "principal" and arg:
            return cls.principal_indicator(int(arg))
        raise DomainError(f"cannot parse weight {spec!r}")

    def __str__(self) -> str:
        if self.kind == "power_phase":
            return f"power_phase:{self.params['t']:g}"
        if self.kind == "smooth_indicator":
            return f"smooth:{self.params['y']:g}"
        if self.kind == "principal_indicator":
            return f"principal:{self.params['q']}"
        return self.kind

    @property
    def is_integer(self) -> bool:
        if self.kind == "custom":
            return np.issubdtype(self.params["table"].dtype, np.integer)
        return self.kind in ("unit", "moebius", "divisor", "smooth_indicator", "principal_indicator")

    @property
    def is_nonnegative(self) -> bool:
        if self.kind == "custom":
            t = self.params["table"]
            return bool(np.isrealobj(t) and (t >= 0).all())
        return self.kind in ("unit", "divisor", "smooth_indicator", "principal_indicator")

    def values(self, N: int) -> np.ndarray:
        N = int(N)
        if N < 0:
            raise DomainError("weight length must be nonnegative")
        n = np.arange(N + 1, dtype=np.int64)
        k = self.kind
        if k == "unit":
            out = np.ones(N + 1, dtype=np.int64)
        elif k == "moebius":
            out = arith.mobius_sieve(N).astype(np.int64)
        elif k == "divisor":
            out = np.zeros(N + 1, dtype=np.int64)
            for d in range(1, N + 1):
                out[d::d] += 1
        elif k == "power_phase":
            t = self.params["t"]
            out = np.zeros(N + 1, dtype=complex)
            out[1:] = np.exp(1j * t * np.log(n[1:].astype(float)))
        elif k == "smooth_indicator":
            y = self.params["y"]
            x = self.params.get("x")
            out = np.zeros(N + 1, dtype=np.int64)
            out[1:] = _smooth_flags(N, y)[1:]
            if x is not None:
                out[n > math.floor(x)] = 0
        elif k == "principal_indicator":
            q = self.params["q"]
            out = (np.gcd(n, q) == 1).astype(np.int64)
        elif k == "character":
            chi = self.params["chi"]
            out = chi.values_at(n)
        else:
            table = self.params["table"]
            out = np.zeros(N + 1, dtype=table.dtype if table.size else np.int64)
            m = min(N, table.size)
            out[1 : m + 1] = table[:m]
        out[0] = 0
        return out

    def class_f_parts(self, N: int) -> tuple[np.ndarray, np.ndarray] | None:
        """Declared decomposition f = g*h with g multiplicative, |g| = 1 and h >= 0.

        Returns ``(g, h)`` on 0..N, or None when the kind declares no decomposition.
        """
        f = self.values(N)
        ones = np.ones(N + 1, dtype=complex)
        k = self.kind
        if k == "moebius":
            _, big = arith.omega_sieve(N)
            g = np.where(big % 2 == 0, 1.0, -1.0).astype(complex)
            h = (f != 0).astype(float)
        elif k in ("unit", "divisor", "smooth_indicator", "principal_indicator"):
            g, h = ones, f.astype(float)
        elif k == "power_phase":
            g, h = f.astype(complex), np.ones(N + 1)
        elif k == "character":
            # g = chi on the part of n coprime to the modulus, so g stays multiplicative
            chi = self.params["chi"]
            core = np.arange(N + 1, dtype=np.int64)
            for p, _ in arith.factorize(chi.q).factors:
                while True:
                    hit = (core % p == 0) & (core > 0)
                    if not hit.any():
                        break
                    core[hit] //= p
            g = chi.values_at(core).astype(complex)
            h = (f != 0).astype(float)
        else:
            return None
        g = g.copy()
        g[0] = 1.0
        h = np.asarray(h, dtype=float).copy()
        h[0] = 0.0
        return g, h


def check_class_f(f: WeightFunction, N: int, samples: int = 2000, seed: int = 0) -> bool:
    """Verify the declared class-F decomposition of ``f`` on 1..N and sampled coprime pairs."""
    parts = f.class_f_parts(N)
    if parts is None:
        return False
    g, h = parts
    vals = f.values(N)
    idx = np.arange(1, N + 1)
    if not np.allclose(np.abs(g[idx]), 1.0, atol=1e-12):
        return False
    if (h[idx] < 0).any():
        return False
    if not np.allclose(g[idx] * h[idx], vals[idx], atol=1e-12):
        return False
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        a = int(rng.integers(1, max(2, math.isqrt(N)) + 1))
        b = int(rng.integers(1, N // a + 1))
        if math.gcd(a, b) != 1:
            continue
        if abs(g[a * b] - g[a] * g[b]) > 1e-9:
            return False
    return True


def _smooth_flags(N: int, y: float) -> np.ndarray:
    """1 where n is y-smooth (every prime factor <= y), for 0..N."""
    rem = np.arange(N + 1, dtype=np.int64)
    for p in arith.primes_up_to(min(N, math.floor(y))):
        pk = int(p)
        while pk <= N:
            rem[pk::pk] //= p
            pk *= int(p)
    flags = (rem == 1).astype(np.int64)
    flags[0] = 0
    return flags
