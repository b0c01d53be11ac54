"""Finite quotients: co-C subgroup streams, wreath extensions, separation tests.

Quotients of abelian groups are described by sublattices ``L`` of the
coordinate lattice ``Z^k`` that contain the relation lattice.  Each ``L``
is stored as its upper-triangular Hermite normal form (positive diagonal,
entries above the diagonal reduced modulo the diagonal entry of their
column), which is unique per sublattice.  Streams are ordered by
``(index, flattened HNF)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import NonAbelianBase, UnsupportedDescriptor
from .groups import (
    AbelianGroup,
    DirectProduct,
    Group,
    HeisenbergMod,
    HeisenbergZ,
    LatticeQuotient,
    ball,
    reduce_mod_hnf,
)
from .wreath import WreathElement, WreathProduct


@dataclass(frozen=True)
class CoCFamily:
    """``AllFinite`` (p is None) or ``PGroups(p)``."""

    p: Optional[int] = None

    def admits(self, index: int) -> bool:
        if self.p is None:
            return True
        while index % self.p == 0:
            index //= self.p
        return index == 1

    @property
    def label(self) -> str:
        return "all" if self.p is None else f"p{self.p}"

    def __str__(self):
        return self.label


ALL_FINITE = CoCFamily()


def PGroups(p: int) -> CoCFamily:
    if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"{p} is not prime")
    return CoCFamily(p)


# ---------------------------------------------------------------------------
# Hermite normal forms
# ---------------------------------------------------------------------------


def _ordered_factorizations(n: int, k: int) -> Iterator[tuple]:
    if k == 1:
        yield (n,)
        return
    for d in range(1, n + 1):
        if n % d == 0:
            for rest in _ordered_factorizations(n // d, k - 1):
                yield (d,) + rest


def hnf_of_index(k: int, index: int) -> list:
    """All rank-k upper-triangular HNF matrices of determinant ``index``, lexicographically sorted."""
    out = []
    for diag in _ordered_factorizations(index, k):
        slots = [(i, j) for i in range(k) for j in range(i + 1, k)]
        for values in itertools.product(*(range(diag[j]) for _, j in slots)):
            M = [[0] * k for _ in range(k)]
            for i in range(k):
                M[i][i] = diag[i]
            for (i, j), v in zip(slots, values):
                M[i][j] = v
            out.append(tuple(tuple(r) for r in M))
    out.sort(key=lambda M: tuple(itertools.chain.from_iterable(M)))
    return out


def contains_lattice(H, rows: Sequence[Sequence[int]]) -> bool:
    return all(not any(reduce_mod_hnf(r, H)) for r in rows)


# ---------------------------------------------------------------------------
# quotient maps on the factor groups
# ---------------------------------------------------------------------------


class QuotientMap:
    """Surjection from ``source`` onto the finite group ``target``."""

    def __init__(self, source: Group, target: Group, kind: str, param=None, label: Optional[str] = None):
        self.source = source
        self.target = target
        self.kind = kind
        self.param = param
        self.index = target.order
        self.label = label or target.label

    def apply(self, g):
        kind = self.kind
        if kind == "lattice":
            return self.target.from_coords(self.source.coords(g))
        if kind == "heisenberg":
            return self.target.canonical(g)
        if kind == "identity":
            return g
        raise AssertionError(kind)

    def kernel_test(self, g) -> bool:
        return self.apply(g) == self.target.identity

    @property
    def sort_key(self) -> tuple:
        return (self.index, self.kind, _flatten(self.param))

    def __eq__(self, other):
        return isinstance(other, QuotientMap) and (self.source, self.kind, self.param) == (
            other.source,
            other.kind,
            other.param,
        )

    def __hash__(self):
        return hash((self.source, self.kind, self.param))

    def __repr__(self):
        return f"QuotientMap({self.source.label} -> {self.label})"


def _flatten(param):
    if param is None:
        return ()
    if isinstance(param, int):
        return (param,)
    return tuple(itertools.chain.from_iterable(param))


def identity_quotient(G: Group) -> QuotientMap:
    if not G.is_finite:
        raise UnsupportedDescriptor(f"{G.label} is infinite")
    return QuotientMap(G, G, "identity", label=G.label)


def _is_abelian_presented(G: Group) -> bool:
    if isinstance(G, AbelianGroup):
        return True
    return isinstance(G, DirectProduct) and all(_is_abelian_presented(f) for f in G.factors)


def lattice_quotient(G: Group, H) -> QuotientMap:
    H = tuple(tuple(r) for r in H)
    k = len(H)
    if k == 1:
        label = f"Z/{H[0][0]}"
    else:
        label = f"Z^{k}/[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in H) + "]"
    return QuotientMap(G, LatticeQuotient(H), "lattice", H, label=label)


def cyclic_quotient(m: int, G: Optional[Group] = None) -> QuotientMap:
    """``Z -> Z/m`` (or ``Z/n -> Z/m`` when ``G`` is given)."""
    from .groups import FreeAbelian

    return lattice_quotient(G if G is not None else FreeAbelian(1), ((m,),))


def enumerate_coC(desc: Group, family: CoCFamily, max_index: int) -> Iterator[QuotientMap]:
    """Quotients of ``desc`` in ``family`` with index <= max_index, by (index, descriptor)."""
    if _is_abelian_presented(desc):
        k = desc.rank
        rels = desc.relations
        limit = max_index if desc.order is None else min(max_index, desc.order)
        if k == 0:
            if limit >= 1:
                yield QuotientMap(desc, desc, "identity", label="1")
            return
        for n in range(1, limit + 1):
            if not family.admits(n):
                continue
            if desc.order is not None and desc.order % n:
                continue
            for H in hnf_of_index(k, n):
                if contains_lattice(H, rels):
                    yield lattice_quotient(desc, H)
        return
    if isinstance(desc, HeisenbergZ):
        k = 1
        while k ** 3 <= max_index:
            if family.admits(k):
                yield QuotientMap(desc, HeisenbergMod(k), "heisenberg", k, label=f"H(Z/{k})")
            k += 1
        return
    raise UnsupportedDescriptor(f"no co-C enumeration for {desc.label}")


# ---------------------------------------------------------------------------
# wreath-shaped quotients
# ---------------------------------------------------------------------------


class WreathQuotientMap:
    """``A wr B -> (A/M) wr (B/N)``: coset sums of base values, then reduction through ``qA``.

    ``qA=None`` keeps ``A`` as it is (the extension of a quotient of ``B``).
    """

    def __init__(self, source: WreathProduct, qA: Optional[QuotientMap], qB: QuotientMap):
        self.source = source
        self.qA = qA
        self.qB = qB
        self.collapses = qB.index != source.B.order
        if self.collapses and not source.A.is_abelian:
            raise NonAbelianBase(f"{source.A.label} is not abelian; cannot sum over cosets")
        A_target = qA.target if qA is not None else source.A
        self.target = WreathProduct(A_target, qB.target)
        self.index = self.target.order
        a_label = qA.label if qA is not None else source.A.label
        self.label = f"({a_label})wr({qB.label})"

    def apply_base(self, f) -> tuple:
        At = self.target.A
        qA, qB = self.qA, self.qB
        acc: dict = {}
        items = f.base if isinstance(f, WreathElement) else (f.items() if isinstance(f, dict) else f)
        for k, v in items:
            kk = qB.apply(k)
            vv = qA.apply(v) if qA is not None else v
            acc[kk] = At.mul(acc[kk], vv) if kk in acc else vv
        e = At.identity
        return tuple(sorted(kv for kv in acc.items() if kv[1] != e))

    def apply(self, x: WreathElement) -> WreathElement:
        return WreathElement(self.apply_base(x.base), self.qB.apply(x.top))

    def kernel_test(self, x) -> bool:
        return self.apply(x) == self.target.identity

    def __repr__(self):
        return f"WreathQuotientMap({self.source.label} -> {self.label})"


def extend_quotient(W: WreathProduct, q: QuotientMap) -> WreathQuotientMap:
    if not W.A.is_abelian:
        raise NonAbelianBase(f"{W.A.label} is not abelian")
    return WreathQuotientMap(W, None, q)


def product_quotient(W: WreathProduct, qA: Optional[QuotientMap], qB: QuotientMap) -> WreathQuotientMap:
    return WreathQuotientMap(W, qA, qB)


def wreath_quotients(W: WreathProduct, family: CoCFamily, max_index: int) -> list:
    """Every ``(A/M) wr (B/N)`` in the family with index <= max_index.

    Ordered by ``(index, position of qB in its stream, position of qA)``.
    ``M = A`` gives the quotients that factor through the retraction onto ``B``.
    """
    qBs = list(enumerate_coC(W.B, family, max_index))
    qAs = list(enumerate_coC(W.A, family, max_index))
    combos = []
    for iB, qB in enumerate(qBs):
        nB = qB.index
        for iA, qA in enumerate(qAs):
            nA = qA.index
            # nA ** nB * nB can be astronomically large; compare in logs first
            if nA > 1 and nB * math.log(nA) > math.log(max_index) + 1:
                break
            index = nA ** nB * nB
            if index <= max_index:
                combos.append((index, iB, iA))
    combos.sort()
    return [WreathQuotientMap(W, qAs[iA], qBs[iB]) for _, iB, iA in combos]


# ---------------------------------------------------------------------------
# separation subroutines
# ---------------------------------------------------------------------------


def separates_cosets(q: QuotientMap, b, S: Sequence) -> bool:
    """Whether ``q`` keeps distinct cosets ``s<b>`` (s in S) distinct, and only those."""
    G, T = q.source, q.target
    qb = q.apply(b)
    for s, t in itertools.combinations(S, 2):
        same = G.cyclic_log(G.mul(G.inv(s), t), b) is not None
        img = T.mul(T.inv(q.apply(s)), q.apply(t))
        same_img = T.cyclic_log(img, qb) is not None
        if same != same_img:
            return False
    return True


def injective_on_ball(q: QuotientMap, n: int) -> bool:
    images = set()
    for g in ball(q.source, n):
        y = q.apply(g)
        if y in images:
            return False
        images.add(y)
    return True


def separates_support_translation(q: QuotientMap, S_f: Sequence, S_g: Sequence) -> bool:
    """True iff ``q`` is injective on ``S_f + S_g`` and no element of the target
    translates ``q(S_f)`` onto ``q(S_g)``.

    A quotient that merges support points certifies nothing about the supports.
    """
    T = q.target
    pts = set(S_f) | set(S_g)
    if len({q.apply(s) for s in pts}) != len(pts):
        return False
    img_f = {q.apply(s) for s in S_f}
    img_g = frozenset(q.apply(s) for s in S_g)
    if len(img_f) != len(img_g):
        return True
    for c in T.elements():
        if frozenset(T.mul(c, s) for s in img_f) == img_g:
            return False
    return True


def in_KN(W: WreathProduct, q: QuotientMap, f) -> bool:
    """Every ``ker(q)``-coset sum of ``f`` vanishes."""
    return not extend_quotient(W, q).apply_base(f)
