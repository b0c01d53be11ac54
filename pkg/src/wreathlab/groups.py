"""Concrete finitely generated groups with canonical element forms.

Every group works on *payloads*: plain hashable Python values that are
always kept in canonical form, so ``==`` on payloads is equality in the
group.  Payload conventions:

* ``FiniteCyclic(n)`` / rank-1 lattice quotients: an ``int`` in ``[0, n)``
* ``FreeAbelian(1)``: an ``int``; ``FreeAbelian(m)`` for m >= 2: a tuple
* finite abelian groups and lattice quotients of rank >= 2: a tuple of
  reduced coordinates
* ``HeisenbergZ``: ``(a, b, c)`` for the unitriangular matrix
  ``[[1, a, c], [0, 1, b], [0, 0, 1]]``
* ``FiniteTable``: the row index into the multiplication table

:class:`GroupElement` wraps a payload together with its owner for callers
that want checked arithmetic; the internal algorithms use payloads directly.
"""

from __future__ import annotations

import functools
import itertools
import math
import os
from dataclasses import dataclass
from typing import Any, Iterator, Optional, Sequence

from .errors import CapExceeded, MixedOwners, UnsupportedDescriptor

DEFAULT_MAX_CELLS = 10**6


def max_cells() -> int:
    """Ball-size cap; ``WREATHLAB_MAX_CELLS`` overrides the default."""
    raw = os.environ.get("WREATHLAB_MAX_CELLS")
    if raw:
        return int(raw)
    return DEFAULT_MAX_CELLS


class Group:
    """Common interface.  Subclasses are frozen dataclasses, hence hashable."""

    is_abelian = False

    # -- arithmetic ---------------------------------------------------------
    @property
    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def pow(self, g, k: int):
        if k < 0:
            g, k = self.inv(g), -k
        result = self.identity
        while k:
            if k & 1:
                result = self.mul(result, g)
            g = self.mul(g, g)
            k >>= 1
        return result

    def conj(self, g, w):
        """``w g w^-1``."""
        return self.mul(self.mul(w, g), self.inv(w))

    def commutator(self, g, h):
        """``[g, h] = g h g^-1 h^-1``."""
        return self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))

    # -- structure ----------------------------------------------------------
    @property
    def generators(self) -> tuple:
        raise NotImplementedError

    @property
    def order(self) -> Optional[int]:
        """Group order, or None for infinite groups."""
        return None

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def elements(self) -> list:
        if not self.is_finite:
            raise UnsupportedDescriptor(f"{self.label} is infinite")
        # closure under generators; finite subclasses override with a direct listing
        return sorted(_closure(self))

    def element_order(self, g) -> Optional[int]:
        if g == self.identity:
            return 1
        if not self.is_finite:
            return self._infinite_element_order(g)
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    def _infinite_element_order(self, g) -> Optional[int]:
        # torsion-free groups override nothing: every non-identity element has infinite order
        return None

    def canonical(self, raw):
        """Normalize a raw payload (e.g. unreduced residues)."""
        return raw

    def fmt(self, g) -> str:
        return str(g)

    @property
    def label(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.label

    # -- metric -------------------------------------------------------------
    def norm(self, g) -> int:
        """Word length with respect to ``generators``."""
        n = word_length(self, g, radius_cap=None)
        assert n is not None
        return n

    # -- cyclic subgroups ---------------------------------------------------
    def cyclic_log(self, x, b) -> Optional[int]:
        """Some ``k`` with ``b^k = x``, or None when ``x`` is not in ``<b>``."""
        n = self.element_order(b)
        if n is None:
            raise UnsupportedDescriptor(f"cyclic membership not implemented for {self.label}")
        y = self.identity
        for k in range(n):
            if y == x:
                return k
            y = self.mul(b, y)
        return None

    def coset_rep(self, t, b) -> tuple[Any, int]:
        """Canonical representative of the right coset ``<b> t``.

        Returns ``(rep, k)`` with ``t = b^k rep``.
        """
        n = self.element_order(b)
        if n is None:
            raise UnsupportedDescriptor(f"coset representatives not implemented for {self.label}")
        orbit = [t]
        for _ in range(n - 1):
            orbit.append(self.mul(b, orbit[-1]))
        rep = min(orbit)
        j = orbit.index(rep)
        # rep = b^j t, so t = b^(-j) rep
        return rep, (-j) % n

    def is_conjugate(self, g, h) -> bool:
        if self.is_abelian:
            return g == h
        if self.is_finite:
            return h in conjugacy_class(self, g)
        raise UnsupportedDescriptor(f"conjugacy test not implemented for {self.label}")


def _closure(G: Group) -> set:
    seen = {G.identity}
    frontier = [G.identity]
    gens = list(G.generators)
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = G.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def conjugacy_class(G: Group, g) -> frozenset:
    """Full conjugacy class of ``g`` in a finite group (closure under generators)."""
    gens = list(G.generators)
    seen = {g}
    frontier = [g]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = G.conj(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


# ---------------------------------------------------------------------------
# abelian groups: Z^k modulo a (possibly zero-rank) relation lattice
# ---------------------------------------------------------------------------


class AbelianGroup(Group):
    """Abelian groups presented as ``Z^k / R`` through integer coordinates."""

    is_abelian = True

    @property
    def rank(self) -> int:
        raise NotImplementedError

    def coords(self, g) -> tuple:
        raise NotImplementedError

    def from_coords(self, v: Sequence[int]):
        raise NotImplementedError

    @property
    def relations(self) -> tuple:
        """Rows spanning the relation lattice R (empty for free abelian groups)."""
        raise NotImplementedError

    def mul(self, g, h):
        return self.from_coords([a + b for a, b in zip(self.coords(g), self.coords(h))])

    def inv(self, g):
        return self.from_coords([-a for a in self.coords(g)])

    def pow(self, g, k: int):
        return self.from_coords([k * a for a in self.coords(g)])

    def conj(self, g, w):
        return g

    @property
    def identity(self):
        return self.from_coords([0] * self.rank)

    @property
    def generators(self) -> tuple:
        out = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            out.append(self.from_coords(e))
        return tuple(out)


def reduce_mod_hnf(v: Sequence[int], H: Sequence[Sequence[int]]) -> tuple:
    """Reduce ``v`` modulo the row lattice of an upper-triangular HNF matrix."""
    v = list(v)
    for i, row in enumerate(H):
        q = v[i] // row[i]
        if q:
            for j in range(i, len(v)):
                v[j] -= q * row[j]
    return tuple(v)


@dataclass(frozen=True)
class FreeAbelian(AbelianGroup):
    m: int = 1

    @property
    def rank(self):
        return self.m

    def coords(self, g):
        return (g,) if self.m == 1 else g

    def from_coords(self, v):
        return v[0] if self.m == 1 else tuple(v)

    @property
    def relations(self):
        return ()

    def mul(self, g, h):
        if self.m == 1:
            return g + h
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        if self.m == 1:
            return -g
        return tuple(-a for a in g)

    def canonical(self, raw):
        if self.m == 1:
            if isinstance(raw, tuple):
                (raw,) = raw
            return int(raw)
        v = tuple(int(a) for a in raw)
        if len(v) != self.m:
            raise ValueError(f"expected a vector of length {self.m}")
        return v

    def norm(self, g):
        return sum(abs(a) for a in self.coords(g))

    def cyclic_log(self, x, b):
        rep, k = self.coset_rep(x, b)
        return k if rep == self.identity else None

    def coset_rep(self, t, b):
        bv, tv = self.coords(b), self.coords(t)
        pivot = next((i for i, a in enumerate(bv) if a), None)
        if pivot is None:
            return t, 0
        k = tv[pivot] // bv[pivot]
        rep = [a - k * c for a, c in zip(tv, bv)]
        return self.from_coords(rep), k

    def fmt(self, g):
        if self.m == 1:
            return str(g)
        return "(" + ",".join(str(a) for a in g) + ")"

    @property
    def label(self):
        return "Z" if self.m == 1 else f"Z^{self.m}"


@dataclass(frozen=True)
class LatticeQuotient(AbelianGroup):
    """Finite abelian group ``Z^k / L`` with ``L`` given by a full-rank upper-triangular HNF."""

    H: tuple

    @property
    def rank(self):
        return len(self.H)

    @property
    def diagonal(self) -> tuple:
        return tuple(self.H[i][i] for i in range(len(self.H)))

    @property
    def order(self):
        return math.prod(self.diagonal)

    def coords(self, g):
        return (g,) if self.rank == 1 else g

    def from_coords(self, v):
        r = reduce_mod_hnf(v, self.H)
        return r[0] if self.rank == 1 else r

    @property
    def relations(self):
        return self.H

    def canonical(self, raw):
        if isinstance(raw, int):
            raw = (raw,)
        return self.from_coords(raw)

    def elements(self):
        out = [self.from_coords(v) for v in itertools.product(*(range(d) for d in self.diagonal))]
        return sorted(out)

    def norm(self, g):
        return _cached_norm(self, g)

    def fmt(self, g):
        if self.rank == 1:
            return str(g)
        return "(" + ",".join(str(a) for a in g) + ")"

    @property
    def label(self):
        if self.rank == 1:
            return f"Z/{self.H[0][0]}"
        if all(self.H[i][j] == 0 for i in range(self.rank) for j in range(self.rank) if i != j):
            return "x".join(f"Z/{d}" for d in self.diagonal)
        rows = ",".join("[" + ",".join(str(a) for a in row) + "]" for row in self.H)
        return f"Z^{self.rank}/[{rows}]"


def FiniteCyclic(n: int) -> LatticeQuotient:
    if n < 1:
        raise ValueError("cyclic order must be positive")
    return LatticeQuotient(((n,),))


def FiniteAbelian(*factors: int) -> LatticeQuotient:
    """Direct sum of cyclic groups; invariant factors are not required to divide."""
    if len(factors) == 1:
        return FiniteCyclic(factors[0])
    k = len(factors)
    H = tuple(tuple(factors[i] if i == j else 0 for j in range(k)) for i in range(k))
    return LatticeQuotient(H)


@functools.lru_cache(maxsize=None)
def _cached_norm(G: Group, g) -> int:
    n = word_length(G, g, radius_cap=None)
    assert n is not None
    return n


# ---------------------------------------------------------------------------
# direct products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DirectProduct(Group):
    factors: tuple

    @property
    def is_abelian(self):
        return all(f.is_abelian for f in self.factors)

    @property
    def identity(self):
        return tuple(f.identity for f in self.factors)

    def mul(self, g, h):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, g, h))

    def inv(self, g):
        return tuple(f.inv(a) for f, a in zip(self.factors, g))

    @property
    def generators(self):
        out = []
        for i, f in enumerate(self.factors):
            for s in f.generators:
                e = list(self.identity)
                e[i] = s
                out.append(tuple(e))
        return tuple(out)

    @property
    def order(self):
        orders = [f.order for f in self.factors]
        if any(o is None for o in orders):
            return None
        return math.prod(orders)

    def elements(self):
        return sorted(itertools.product(*(f.elements() for f in self.factors)))

    def element_order(self, g):
        orders = [f.element_order(a) for f, a in zip(self.factors, g)]
        if any(o is None for o in orders):
            return None
        return math.lcm(*orders)

    def canonical(self, raw):
        return tuple(f.canonical(a) for f, a in zip(self.factors, raw))

    def norm(self, g):
        return sum(f.norm(a) for f, a in zip(self.factors, g))

    def is_conjugate(self, g, h):
        return all(f.is_conjugate(a, b) for f, a, b in zip(self.factors, g, h))

    def fmt(self, g):
        return "<" + ",".join(f.fmt(a) for f, a in zip(self.factors, g)) + ">"

    @property
    def label(self):
        return " x ".join(f"({f.label})" for f in self.factors)

    # abelian coordinates, available when every factor is abelian
    @property
    def rank(self):
        return sum(f.rank for f in self.factors)

    def coords(self, g):
        return tuple(itertools.chain.from_iterable(f.coords(a) for f, a in zip(self.factors, g)))

    def from_coords(self, v):
        out, i = [], 0
        for f in self.factors:
            out.append(f.from_coords(v[i:i + f.rank]))
            i += f.rank
        return tuple(out)

    @property
    def relations(self):
        rows, offset, k = [], 0, self.rank
        for f in self.factors:
            for r in f.relations:
                row = [0] * k
                row[offset:offset + f.rank] = r
                rows.append(tuple(row))
            offset += f.rank
        return tuple(rows)


# ---------------------------------------------------------------------------
# Heisenberg group and its congruence quotients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeisenbergZ(Group):
    """3x3 upper unitriangular integer matrices, payload ``(a, b, c)``.

    ``(a, b, c)`` is the matrix with ``a`` at (1,2), ``b`` at (2,3) and
    ``c`` at (1,3).  Generated by ``(1,0,0)`` and ``(0,1,0)``.
    """

    @property
    def identity(self):
        return (0, 0, 0)

    def mul(self, g, h):
        a, b, c = g
        x, y, z = h
        return (a + x, b + y, c + z + a * y)

    def inv(self, g):
        a, b, c = g
        return (-a, -b, -c + a * b)

    def pow(self, g, k):
        a, b, c = g
        return (k * a, k * b, k * c + a * b * k * (k - 1) // 2)

    @property
    def generators(self):
        return ((1, 0, 0), (0, 1, 0))

    def canonical(self, raw):
        a, b, c = raw
        return (int(a), int(b), int(c))

    def norm(self, g):
        return _cached_norm(self, g)

    def cyclic_log(self, x, b):
        if x == self.identity:
            return 0
        a, bb, c = b
        xa, xb, xc = x
        if (a, bb) == (0, 0):
            if c == 0 or xa or xb or xc % c:
                return None
            return xc // c
        k = xa // a if a else xb // bb
        if self.pow(b, k) == x:
            return k
        return None

    def is_conjugate(self, g, h):
        a, b, c = g
        x, y, z = h
        if (a, b) != (x, y):
            return False
        d = math.gcd(a, b)
        if d == 0:
            return c == z
        return (z - c) % d == 0

    def fmt(self, g):
        return "H(%d,%d,%d)" % g

    @property
    def label(self):
        return "H"


@dataclass(frozen=True)
class HeisenbergMod(Group):
    """Heisenberg group over Z/k; target of the congruence quotient mod k."""

    k: int

    @property
    def identity(self):
        return (0, 0, 0)

    def mul(self, g, h):
        k = self.k
        a, b, c = g
        x, y, z = h
        return ((a + x) % k, (b + y) % k, (c + z + a * y) % k)

    def inv(self, g):
        k = self.k
        a, b, c = g
        return (-a % k, -b % k, (-c + a * b) % k)

    @property
    def generators(self):
        return ((1 % self.k, 0, 0), (0, 1 % self.k, 0))

    @property
    def order(self):
        return self.k ** 3

    def elements(self):
        return sorted(itertools.product(range(self.k), repeat=3))

    def canonical(self, raw):
        return tuple(int(a) % self.k for a in raw)

    def fmt(self, g):
        return "H(%d,%d,%d)" % g

    @property
    def label(self):
        return f"H(Z/{self.k})"


# ---------------------------------------------------------------------------
# explicit multiplication tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteTable(Group):
    """A finite group from its Cayley table; element 0 must be the identity."""

    table: tuple
    gens: tuple = ()
    name: str = "T"

    def __post_init__(self):
        n = len(self.table)
        if any(len(row) != n for row in self.table):
            raise ValueError("multiplication table must be square")
        if tuple(self.table[0]) != tuple(range(n)):
            raise ValueError("element 0 must be the identity")
        if not self.gens:
            object.__setattr__(self, "gens", tuple(range(1, n)))

    @property
    def identity(self):
        return 0

    def mul(self, g, h):
        return self.table[g][h]

    def inv(self, g):
        return self._inverses[g]

    @functools.cached_property
    def _inverses(self):
        return tuple(row.index(0) for row in self.table)

    @property
    def generators(self):
        return self.gens

    @property
    def is_abelian(self):
        n = len(self.table)
        return all(self.table[i][j] == self.table[j][i] for i in range(n) for j in range(n))

    @property
    def order(self):
        return len(self.table)

    def elements(self):
        return list(range(len(self.table)))

    def canonical(self, raw):
        g = int(raw)
        if not 0 <= g < len(self.table):
            raise ValueError("table index out of range")
        return g

    def norm(self, g):
        return _cached_norm(self, g)

    @property
    def label(self):
        return self.name


def symmetric_group_table(n: int) -> FiniteTable:
    """Cayley table of Sym(n) with permutations in lexicographic order."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(
        tuple(index[tuple(p[q[i]] for i in range(n))] for q in perms) for p in perms
    )
    transposition = index[tuple([1, 0] + list(range(2, n)))]
    cycle = index[tuple(list(range(1, n)) + [0])]
    return FiniteTable(table, gens=(transposition, cycle), name=f"S{n}")


# ---------------------------------------------------------------------------
# checked elements and generic operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    owner: Group
    payload: Any

    def __mul__(self, other):
        return mul(self, other)

    def __invert__(self):
        return GroupElement(self.owner, self.owner.inv(self.payload))

    def __str__(self):
        return self.owner.fmt(self.payload)


def element(G: Group, raw) -> GroupElement:
    return GroupElement(G, G.canonical(raw))


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.owner != h.owner:
        raise MixedOwners(f"{g.owner.label} vs {h.owner.label}")
    return GroupElement(g.owner, g.owner.mul(g.payload, h.payload))


def centralizer_contains(b: GroupElement, c: GroupElement) -> bool:
    """True iff ``c`` commutes with ``b``."""
    if b.owner != c.owner:
        raise MixedOwners(f"{b.owner.label} vs {c.owner.label}")
    G = b.owner
    return G.mul(c.payload, b.payload) == G.mul(b.payload, c.payload)


def symmetric_generators(G: Group) -> tuple:
    out = []
    for s in G.generators:
        for t in (s, G.inv(s)):
            if t not in out and t != G.identity:
                out.append(t)
    return tuple(out)


@functools.lru_cache(maxsize=64)
def _layers(G: Group, n: int, cap: int) -> tuple:
    gens = symmetric_generators(G)
    seen = {G.identity}
    layers = [(G.identity,)]
    frontier = [G.identity]
    for _ in range(n):
        nxt = []
        for x in frontier:
            for s in gens:
                y = G.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > cap:
            raise CapExceeded(f"ball in {G.label} exceeds {cap} elements")
        if not nxt:
            break
        nxt.sort()
        layers.append(tuple(nxt))
        frontier = nxt
    return tuple(layers)


def ball_layers(G: Group, n: int, cap: Optional[int] = None) -> tuple:
    """Spheres of radius 0..n (each sorted); stops early if the group is exhausted."""
    return _layers(G, n, cap if cap is not None else max_cells())


def ball(G: Group, n: int, cap: Optional[int] = None) -> list:
    """All elements of word length <= n, sorted by canonical form."""
    return sorted(itertools.chain.from_iterable(ball_layers(G, n, cap)))


def word_length(G: Group, g, radius_cap: Optional[int] = 32) -> Optional[int]:
    """Geodesic length of ``g`` by breadth-first search; None if beyond ``radius_cap``."""
    if isinstance(g, GroupElement):
        G, g = g.owner, g.payload
    if g == G.identity:
        return 0
    gens = symmetric_generators(G)
    cap = max_cells()
    seen = {G.identity}
    frontier = [G.identity]
    r = 0
    while frontier and (radius_cap is None or r < radius_cap):
        r += 1
        nxt = []
        for x in frontier:
            for s in gens:
                y = G.mul(x, s)
                if y == g:
                    return r
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > cap:
            raise CapExceeded(f"word length search in {G.label} exceeds {cap} elements")
        frontier = nxt
    return None


def iter_pairs(xs: Sequence) -> Iterator[tuple]:
    return itertools.combinations(xs, 2)
