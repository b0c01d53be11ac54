"""Restricted wreath products ``A wr B`` and the coset gadgets used by the deciders.

An element is a pair ``(f, b)`` with ``f`` a finitely supported map
``B -> A`` and ``b`` in ``B``.  ``B`` acts on base maps on the left,
``(b . f)(x) = f(b^-1 x)``, and

    (f, b) (g, c) = (f . (b . g), b c).

Base maps are stored as sorted tuples of ``(B-payload, A-payload)`` pairs
with identity values dropped, so equality of elements is tuple equality.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any, Iterable, Optional

from .errors import NonAbelianBase
from .groups import Group, ball

BaseMap = tuple  # sorted ((key, value), ...)


@dataclass(frozen=True, order=True, slots=True)
class WreathElement:
    base: BaseMap
    top: Any

    @property
    def support(self) -> tuple:
        return tuple(k for k, _ in self.base)

    def value(self, key, identity):
        for k, v in self.base:
            if k == key:
                return v
        return identity


def _items(f) -> Iterable:
    if isinstance(f, WreathElement):
        return f.base
    if isinstance(f, Mapping):
        return f.items()
    return f


@dataclass(frozen=True)
class WreathProduct(Group):
    A: Group
    B: Group

    # -- construction -------------------------------------------------------
    @property
    def abelian_base(self) -> bool:
        return self.A.is_abelian

    def base_map(self, f) -> BaseMap:
        """Normalize a mapping (or pair list) into a canonical base map, summing repeats."""
        A, B = self.A, self.B
        acc: dict = {}
        for k, v in _items(f):
            k, v = B.canonical(k), A.canonical(v)
            acc[k] = A.mul(acc[k], v) if k in acc else v
        e = A.identity
        return tuple(sorted((k, v) for k, v in acc.items() if v != e))

    def element(self, f=(), top=None) -> WreathElement:
        top = self.B.identity if top is None else self.B.canonical(top)
        return WreathElement(self.base_map(f), top)

    def canonical(self, raw):
        if isinstance(raw, WreathElement):
            return self.element(raw.base, raw.top)
        f, top = raw
        return self.element(f, top)

    # -- group law ----------------------------------------------------------
    @property
    def identity(self) -> WreathElement:
        return WreathElement((), self.B.identity)

    def mul(self, x: WreathElement, y: WreathElement) -> WreathElement:
        A, B = self.A, self.B
        b = x.top
        if not y.base:
            return WreathElement(x.base, B.mul(b, y.top))
        acc = dict(x.base)
        for k, v in y.base:
            key = B.mul(b, k)
            cur = acc.get(key)
            acc[key] = v if cur is None else A.mul(cur, v)
        e = A.identity
        base = tuple(sorted(kv for kv in acc.items() if kv[1] != e))
        return WreathElement(base, B.mul(b, y.top))

    def inv(self, x: WreathElement) -> WreathElement:
        A, B = self.A, self.B
        bi = B.inv(x.top)
        base = tuple(sorted((B.mul(bi, k), A.inv(v)) for k, v in x.base))
        return WreathElement(base, bi)

    def translate(self, f, c) -> BaseMap:
        """``c . f``: the base map ``x -> f(c^-1 x)``."""
        B = self.B
        return tuple(sorted((B.mul(c, k), v) for k, v in _items(f)))

    @property
    def generators(self) -> tuple:
        eB = self.B.identity
        base_gens = tuple(WreathElement(((eB, a),), eB) for a in self.A.generators)
        top_gens = tuple(WreathElement((), s) for s in self.B.generators)
        return base_gens + top_gens

    # -- finiteness ---------------------------------------------------------
    @property
    def order(self) -> Optional[int]:
        a, b = self.A.order, self.B.order
        if a is None or b is None:
            return None
        return a ** b * b

    def elements(self) -> list:
        A, B = self.A, self.B
        keys = B.elements()
        e = A.identity
        out = []
        for values in itertools.product(A.elements(), repeat=len(keys)):
            base = tuple((k, v) for k, v in zip(keys, values) if v != e)
            for b in keys:
                out.append(WreathElement(base, b))
        out.sort()
        return out

    def _infinite_element_order(self, x):
        if x.top != self.B.identity:
            return None
        orders = [self.A.element_order(v) for _, v in x.base]
        if any(o is None for o in orders):
            return None
        return math.lcm(*orders) if orders else 1

    def element_order(self, x):
        if not self.is_finite:
            if x == self.identity:
                return 1
            return self._infinite_element_order(x)
        return super().element_order(x)

    # -- display ------------------------------------------------------------
    def fmt(self, x: WreathElement) -> str:
        A, B = self.A, self.B
        inner = ",".join(f"{B.fmt(k)}:{A.fmt(v)}" for k, v in x.base)
        return "{" + inner + "}@" + B.fmt(x.top)

    @property
    def label(self) -> str:
        return f"({self.A.label})wr({self.B.label})"

    def norm(self, x) -> int:
        return wr_norm(self, x)


# ---------------------------------------------------------------------------
# element-level helpers
# ---------------------------------------------------------------------------


def wr_mul(W: WreathProduct, x, y):
    return W.mul(x, y)


def wr_inv(W: WreathProduct, x):
    return W.inv(x)


def wr_conj(W: WreathProduct, x, w):
    """``w x w^-1``."""
    return W.conj(x, w)


def base_commutator(W: WreathProduct, h, b) -> BaseMap:
    """Base map of ``[h, b] = h b h^-1 b^-1``; equals ``h - b.h`` for abelian ``A``."""
    hb = W.element(h)
    return W.commutator(hb, WreathElement((), b)).base


def _require_abelian(W: WreathProduct):
    if not W.A.is_abelian:
        raise NonAbelianBase(f"{W.A.label} is not abelian")


def tilde_profile(W: WreathProduct, f, b) -> dict:
    """Nonzero values of the tilde function, keyed by canonical ``<b>``-coset representative."""
    _require_abelian(W)
    A, B = W.A, W.B
    acc: dict = {}
    for k, v in _items(f):
        rep, _ = B.coset_rep(k, b)
        acc[rep] = A.mul(acc[rep], v) if rep in acc else v
    e = A.identity
    return {rep: v for rep, v in acc.items() if v != e}


def tilde(W: WreathProduct, f, b, t):
    """Product of ``f`` over the orbit ``<b> t``."""
    _require_abelian(W)
    A, B = W.A, W.B
    rep_t, _ = B.coset_rep(t, b)
    total = A.identity
    for k, v in _items(f):
        if B.coset_rep(k, b)[0] == rep_t:
            total = A.mul(total, v)
    return total


def in_Kb(W: WreathProduct, f, b) -> bool:
    """Membership of ``f`` in ``K_b = {[h, b]}``: tilde vanishes on every coset."""
    return not tilde_profile(W, f, b)


def _coset_points(W: WreathProduct, f, b) -> dict:
    """Support grouped by coset: rep -> sorted [(exponent, key, value)]."""
    B = W.B
    n = B.element_order(b)
    groups: dict = {}
    for k, v in _items(f):
        rep, e = B.coset_rep(k, b)
        if n is not None:
            e %= n
        groups.setdefault(rep, []).append((e, k, v))
    for pts in groups.values():
        pts.sort()
    return groups


def reduce_support_with_conjugator(W: WreathProduct, f, b) -> tuple[BaseMap, BaseMap]:
    """Return ``(f', h)`` with ``(h,1)(f,b)(h,1)^-1 = (f',b)`` and coset-distinct ``supp(f')``.

    Inside one coset the support points ``s_1, ..., s_r`` (ordered by their
    exponent along ``<b>``) are folded forward one at a time: the value at
    ``s_i`` is moved onto ``s_{i+1} = b^m s_i`` by conjugating with the base
    map that is ``-f(s_i)`` on ``s_i, b s_i, ..., b^(m-1) s_i``.
    """
    _require_abelian(W)
    A, B = W.A, W.B
    h: dict = {}
    for pts in _coset_points(W, f, b).values():
        carry = A.identity
        for (e_i, s_i, v_i), (e_j, _, _) in zip(pts, pts[1:]):
            carry = A.mul(carry, v_i)
            neg = A.inv(carry)
            x = s_i
            for _ in range(e_j - e_i):
                h[x] = A.mul(h[x], neg) if x in h else neg
                x = B.mul(b, x)
    hmap = W.base_map(h)
    conj = W.conj(WreathElement(W.base_map(f), b), WreathElement(hmap, B.identity))
    return conj.base, hmap


def reduce_support(W: WreathProduct, f, b) -> BaseMap:
    return reduce_support_with_conjugator(W, f, b)[0]


def has_coset_distinct_support(W: WreathProduct, f, b) -> bool:
    reps = [W.B.coset_rep(k, b)[0] for k, _ in _items(f)]
    return len(reps) == len(set(reps))


def solve_commutator(W: WreathProduct, k, b) -> Optional[BaseMap]:
    """Some ``h`` with ``[h, b] = k`` (i.e. ``h(x) h(b^-1 x)^-1 = k(x)``), or None if ``k`` is not in ``K_b``."""
    _require_abelian(W)
    A, B = W.A, W.B
    n = B.element_order(b)
    h: dict = {}
    for rep, pts in _coset_points(W, k, b).items():
        if n is None:
            # infinite orbit: h(b^j rep) = sum_{i <= j} k(b^i rep)
            lo, hi = pts[0][0], pts[-1][0]
            vals = {e: v for e, _, v in pts}
            running = A.identity
            x = B.mul(B.pow(b, lo), rep)
            for j in range(lo, hi + 1):
                if j in vals:
                    running = A.mul(running, vals[j])
                if j < hi:
                    h[x] = running
                x = B.mul(b, x)
            if running != A.identity:
                return None
        else:
            vals = {e: v for e, _, v in pts}
            running = A.identity
            x = rep
            for j in range(1, n + 1):
                x = B.mul(b, x)
                running = A.mul(running, vals.get(j % n, A.identity))
                if j < n:
                    h[x] = running
            if running != A.identity:
                return None
    return W.base_map(h)


# ---------------------------------------------------------------------------
# length
# ---------------------------------------------------------------------------


def _is_integers(B: Group) -> bool:
    return getattr(B, "m", None) == 1 and B.is_abelian and not B.is_finite


def wr_norm(W: WreathProduct, x: WreathElement) -> int:
    """Length of ``x`` for generators {A-generators at 1} + {B-generators}.

    Exact when ``B = Z``: the cursor must sweep the interval spanned by
    ``0``, the support and the top, and the cheaper of the two sweep
    directions costs ``2 (R - L) - |top|``.  For other ``B`` this is an
    upper bound from a nearest-neighbour tour through the support.
    """
    A, B = W.A, W.B
    lamps = sum(A.norm(v) for _, v in x.base)
    if _is_integers(B):
        pts = [0, x.top, *x.support]
        lo, hi = min(pts), max(pts)
        return lamps + 2 * (hi - lo) - abs(x.top)
    here = B.identity
    todo = list(x.support)
    walk = 0
    while todo:
        dists = [B.norm(B.mul(B.inv(here), s)) for s in todo]
        i = min(range(len(todo)), key=lambda j: (dists[j], todo[j]))
        walk += dists[i]
        here = todo.pop(i)
    walk += B.norm(B.mul(B.inv(here), x.top))
    return lamps + walk


def wr_ball(W: WreathProduct, n: int, cap: Optional[int] = None) -> list:
    """Elements with ``wr_norm <= n`` (sorted); coincides with the word-metric ball for ``B = Z``."""
    return [x for x in ball(W, n, cap) if wr_norm(W, x) <= n]
