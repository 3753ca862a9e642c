"""
Dirichlet characters mod q.

The unit group is split into prime-power cells. Odd p**k uses the least
primitive root, 4 uses 3, 2**k (k >= 3) uses the pair (2**k - 1, 5) and 2 is
trivial. Discrete logs of every residue are tabulated once, so evaluating a
character is a table lookup plus exponent arithmetic mod the group exponent L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from . import arith
from .errors import DomainError, ResourceCapError
from .weights import WeightFunction

MODULUS_CAP = 10**7
SUM_CAP = 10**9


def e(z):
    """e(z) = exp(2 pi i z)."""
    return np.exp(2j * np.pi * np.asarray(z, dtype=float))


@dataclass(frozen=True)
class Cell:
    p: int
    k: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.p**self.k


def _least_primitive_root_prime_power(p: int, k: int) -> int:
    pk = p**k
    order = (p - 1) * p ** (k - 1)
    qs = arith.factorize(order).primes
    for g in range(2, pk):
        if g % p == 0:
            continue
        if all(pow(g, order // r, pk) != 1 for r in qs):
            return g
    raise DomainError(f"no primitive root mod {pk}")  # pragma: no cover


def _cyclic_powers(g: int, order: int, m: int) -> np.ndarray:
    """g**j mod m for j = 0..order-1, built by block doubling."""
    pw = np.ones(order, dtype=np.int64)
    filled = 1
    step = g % m
    while filled < order:
        take = min(filled, order - filled)
        pw[filled : filled + take] = pw[:take] * step % m
        filled += take
        step = step * step % m
    return pw


def _cell_logs(cell: Cell) -> np.ndarray:
    """Table of shape (p**k, len(orders)); rows of non-units are -1."""
    m = cell.modulus
    ncols = len(cell.orders)
    logs = np.full((m, ncols), -1, dtype=np.int64)
    if ncols == 0:
        return logs
    if cell.p != 2 or cell.k == 2:
        g, order = cell.generators[0], cell.orders[0]
        pw = _cyclic_powers(g, order, m)
        logs[pw, 0] = np.arange(order)
        return logs
    # 2**k with k >= 3: u = (-1)**a * 5**b
    order5 = cell.orders[1]
    pw = _cyclic_powers(5, order5, m)
    logs[pw, 0] = 0
    logs[pw, 1] = np.arange(order5)
    neg = (m - pw) % m
    logs[neg, 0] = 1
    logs[neg, 1] = np.arange(order5)
    return logs


class CharacterGroup:
    """The full dual group of (Z/qZ)^*.

    Characters are enumerated in lexicographic order of their exponent
    tuples, one exponent per cyclic factor; index 0 is the principal character.
    """

    def __init__(self, q: int, cap: int = MODULUS_CAP):
        if not isinstance(q, (int, np.integer)) or q < 1:
            raise DomainError(f"modulus must be a positive integer, got {q!r}")
        q = int(q)
        if q > cap:
            raise ResourceCapError(f"modulus q = {q} exceeds cap {cap}")
        self.q = q
        cells = []
        for p, k in arith.factorize(q).factors:
            if p == 2 and k == 1:
                cells.append(Cell(2, 1, (), ()))
            elif p == 2 and k == 2:
                cells.append(Cell(2, 2, (3,), (2,)))
            elif p == 2:
                cells.append(Cell(2, k, (2**k - 1, 5), (2, 2 ** (k - 2))))
            else:
                g = _least_primitive_root_prime_power(p, k)
                cells.append(Cell(p, k, (g,), ((p - 1) * p ** (k - 1),)))
        self.cells: tuple[Cell, ...] = tuple(cells)
        self.orders: tuple[int, ...] = tuple(o for c in cells for o in c.orders)
        self.order = math.prod(self.orders)
        self.exponent = math.lcm(*self.orders) if self.orders else 1
        self._scale = np.array([self.exponent // o for o in self.orders], dtype=np.int64)

        residues = np.arange(q, dtype=np.int64)
        cols = []
        unit = np.ones(q, dtype=bool)
        for cell in cells:
            table = _cell_logs(cell)
            local = table[residues % cell.modulus]
            if cell.p == 2 and cell.k == 1:
                unit &= residues % 2 == 1
            else:
                unit &= local[:, 0] >= 0
            cols.append(local)
        self.logs = np.concatenate(cols, axis=1) if cols else np.zeros((q, 0), dtype=np.int64)
        if q == 1:
            unit[:] = True
        self.unit_mask = unit
        self.logs[~unit] = -1
        self._roots = np.exp(2j * np.pi * np.arange(self.exponent) / self.exponent)
        self._exponents: np.ndarray | None = None

    def __repr__(self) -> str:
        return f"CharacterGroup(q={self.q}, structure={self.orders})"

    def __len__(self) -> int:
        return self.order

    def __iter__(self):
        for i in range(self.order):
            yield self[i]

    def __getitem__(self, index: int) -> "CharacterId":
        if not 0 <= index < self.order:
            raise IndexError(index)
        return CharacterId(self, tuple(int(v) for v in self.exponent_matrix[index]))

    @property
    def exponent_matrix(self) -> np.ndarray:
        """(order, m) array of exponent tuples in enumeration order."""
        if self._exponents is None:
            if self.orders:
                grids = np.meshgrid(*[np.arange(o) for o in self.orders], indexing="ij")
                self._exponents = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
            else:
                self._exponents = np.zeros((1, 0), dtype=np.int64)
        return self._exponents

    def character(self, exponents) -> "CharacterId":
        return CharacterId(self, tuple(int(e) for e in exponents))

    @property
    def principal(self) -> "CharacterId":
        return self[0]

    def units(self) -> np.ndarray:
        return np.flatnonzero(self.unit_mask)

    def phases(self, n, exponents: np.ndarray | None = None) -> np.ndarray:
        """Phase indices (mod L) of characters at integers n; -1 marks gcd(n, q) > 1.

        Returns shape (num_characters, len(n)).
        """
        E = self.exponent_matrix if exponents is None else np.atleast_2d(exponents)
        r = np.mod(np.asarray(n, dtype=np.int64), self.q)
        L = self.exponent
        logs = self.logs[r]
        if logs.shape[1] == 0:
            ph = np.zeros((E.shape[0], r.size), dtype=np.int64)
        else:
            ph = ((E * self._scale) % L) @ np.where(logs < 0, 0, logs).T % L
        ph[:, ~self.unit_mask[r]] = -1
        return ph

    def values(self, n, exponents: np.ndarray | None = None) -> np.ndarray:
        """Character values at n: complex array (num_characters, len(n))."""
        ph = self.phases(n, exponents)
        out = self._roots[np.where(ph < 0, 0, ph)]
        out[ph < 0] = 0
        return out

    def partial_sums(self, x: float, f: WeightFunction | None = None, block: int = 1 << 14):
        """Running sums S_chi(t) = sum_{n <= t} chi(n) f(n) for all characters, t = 1..floor(x).

        Yields (n_block, cumulative_block) pairs; cumulative_block has shape (order, len(n_block)).
        """
        N = int(math.floor(x))
        fvals = None if f is None else f.values(N)
        acc = np.zeros(self.order, dtype=complex)
        for start in range(1, N + 1, block):
            n = np.arange(start, min(N, start + block - 1) + 1)
            vals = self.values(n)
            if fvals is not None:
                vals = vals * fvals[n]
            cum = np.cumsum(vals, axis=1) + acc[:, None]
            acc = cum[:, -1].copy()
            yield n, cum


@lru_cache(maxsize=32)
def character_group(q: int, cap: int = MODULUS_CAP) -> CharacterGroup:
    return CharacterGroup(q, cap)


@dataclass(frozen=True)
class CharacterId:
    group: CharacterGroup
    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.group.orders):
            raise DomainError("exponent tuple length does not match the group structure")
        reduced = tuple(e % o for e, o in zip(self.exponents, self.group.orders))
        object.__setattr__(self, "exponents", reduced)

    def __repr__(self) -> str:
        return f"chi(q={self.q}, index={self.index}, exps={self.exponents})"

    def __hash__(self):
        return hash((self.group.q, self.exponents))

    def __eq__(self, other):
        return isinstance(other, CharacterId) and self.group.q == other.group.q and self.exponents == other.exponents

    @property
    def q(self) -> int:
        return self.group.q

    @property
    def index(self) -> int:
        idx = 0
        for e_, o in zip(self.exponents, self.group.orders):
            idx = idx * o + e_
        return idx

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @property
    def order(self) -> int:
        o = 1
        for e_, n in zip(self.exponents, self.group.orders):
            o = math.lcm(o, n // math.gcd(e_, n))
        return o

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    @property
    def parity(self) -> int:
        """chi(-1) as +1 or -1."""
        return 1 if self.q <= 2 else int(round(self.evaluate(-1).real))

    def conjugate(self) -> "CharacterId":
        return CharacterId(self.group, tuple(-e_ for e_ in self.exponents))

    def phases_at(self, n) -> np.ndarray:
        return self.group.phases(n, np.array([self.exponents], dtype=np.int64).reshape(1, -1))[0]

    def values_at(self, n) -> np.ndarray:
        return self.group.values(n, np.array([self.exponents], dtype=np.int64).reshape(1, -1))[0]

    def values(self) -> np.ndarray:
        """chi(n) for n = 0..q-1."""
        return self.values_at(np.arange(self.q))

    def evaluate(self, n: int) -> complex:
        return complex(self.values_at(np.array([n]))[0])

    __call__ = evaluate


def evaluate(chi: CharacterId, n: int) -> complex:
    return chi.evaluate(n)


def _cell_component_phase(chi: CharacterId, cell_index: int, u: np.ndarray) -> np.ndarray:
    """Phase (mod L) of the cell-local component of chi at units u of the cell modulus."""
    group = chi.group
    cell = group.cells[cell_index]
    start = sum(len(c.orders) for c in group.cells[:cell_index])
    cols = slice(start, start + len(cell.orders))
    table = _cell_logs(cell)
    logs = table[u % cell.modulus]
    exps = np.array(chi.exponents[cols], dtype=np.int64)
    scale = group._scale[cols]
    if exps.size == 0:
        return np.zeros(u.size, dtype=np.int64)
    return (logs @ ((exps * scale) % group.exponent)) % group.exponent


def conductor(chi: CharacterId) -> int:
    """Smallest f | q such that chi is induced by a character mod f."""
    f = 1
    for i, cell in enumerate(chi.group.cells):
        m = cell.modulus
        u = np.arange(m, dtype=np.int64)
        u = u[np.gcd(u, m) == 1]
        ph = _cell_component_phase(chi, i, u)
        for j in range(cell.k + 1):
            pj = cell.p**j
            if not ph[u % pj == 1 % pj].any():
                f *= pj
                break
    return f


def is_primitive(chi: CharacterId) -> bool:
    return conductor(chi) == chi.q


def primitive_character(chi: CharacterId) -> CharacterId:
    """The primitive character mod conductor(chi) that induces chi."""
    f = conductor(chi)
    target = character_group(f)
    exps = []
    for cell in target.cells:
        for g in cell.generators:
            # global generator of the cell mod f: g on this cell, 1 on the others
            others = f // cell.modulus
            gf = _crt(g, cell.modulus, 1, others)
            u = gf
            while math.gcd(u, chi.q) != 1:
                u += f
            exps.append(int(chi.phases_at(np.array([u]))[0]))
    # convert phases (units of 1/L_q) into exponents for the target's cyclic orders
    out = []
    for ph, o in zip(exps, target.orders):
        num = ph * o
        if num % chi.group.exponent:
            raise DomainError("inconsistent induced character")  # pragma: no cover
        out.append(num // chi.group.exponent)
    return target.character(out)


def _crt(a: int, m: int, b: int, n: int) -> int:
    if n == 1:
        return a % m
    t = (b - a) * pow(m, -1, n) % n
    return (a + m * t) % (m * n)


def gauss_sum(chi: CharacterId) -> complex:
    """tau(chi) = sum_{n mod q} chi(n) e(n/q)."""
    n = np.arange(chi.q)
    return complex(np.sum(chi.values() * e(n / chi.q)))


def character_sum(chi: CharacterId, x: float, f: WeightFunction | None = None, cap: int = SUM_CAP) -> complex:
    """Direct sum of chi(n) f(n) over 1 <= n <= floor(x)."""
    if x < 0:
        raise DomainError("x must be nonnegative")
    N = int(math.floor(x))
    if N > cap:
        raise ResourceCapError(f"x = {x} exceeds the summation cap {cap}")
    total = 0j
    block = 1 << 20
    fvals = None if f is None else f.values(N)
    for start in range(1, N + 1, block):
        n = np.arange(start, min(N, start + block - 1) + 1)
        v = chi.values_at(n)
        if fvals is not None:
            v = v * fvals[n]
        total += v.sum()
    return complex(total)


def character_sums_all(q: int, x: float, f: WeightFunction | None = None) -> np.ndarray:
    """sum_{n <= x} chi(n) f(n) for every character mod q, in enumeration order."""
    group = character_group(q)
    total = np.zeros(group.order, dtype=complex)
    for _, cum in group.partial_sums(x, f):
        total = cum[:, -1]
    return total


def character_sum_table(q: int, xs, f: WeightFunction | None = None) -> np.ndarray:
    """Sums sum_{n <= x} chi(n) f(n) for every x in ``xs`` and every character, in one pass.

    Returns shape (len(xs), num_characters).
    """
    group = character_group(q)
    xs = [int(math.floor(v)) for v in xs]
    out = np.zeros((len(xs), group.order), dtype=complex)
    if not xs:
        return out
    order = np.argsort(xs, kind="stable")
    want = [xs[i] for i in order]
    pos = 0
    while pos < len(want) and want[pos] < 1:
        pos += 1
    for n, cum in group.partial_sums(max(want), f):
        while pos < len(want) and want[pos] <= n[-1]:
            out[order[pos]] = cum[:, want[pos] - n[0]]
            pos += 1
    return out


def delta_max(q: int, x: float, f: WeightFunction | None = None) -> tuple[float, CharacterId]:
    """max over nonprincipal chi of |sum_{n <= x} chi(n) f(n)|, with the lowest-index maximiser."""
    if q <= 2:
        raise DomainError(f"q = {q} has no nonprincipal character")
    group = character_group(q)
    sums = np.abs(character_sums_all(q, x, f))
    sums[0] = -1.0
    idx = int(np.argmax(sums))
    return float(sums[idx]), group[idx]


def primitive_characters(q: int, parity: int | None = None) -> list[CharacterId]:
    out = []
    for chi in character_group(q):
        if parity is not None and chi.parity != parity:
            continue
        if is_primitive(chi):
            out.append(chi)
    return out


def all_exponent_tuples(orders) -> list[tuple[int, ...]]:
    return list(product(*[range(o) for o in orders]))
