"""Free metabelian groups through their Magnus embedding into ``Z^m wr Z^m``.

``x_i`` goes to ``({0: e_i}, a_i)``: a single lamp carrying the i-th basis
vector of the base copy of ``Z^m``, sitting over the origin, followed by a
unit step along the i-th axis.  The embedding is faithful on
``F_m / F_m''``, so the wreath image is used as the canonical form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from .conjugacy import conj_abelianA_wreath
from .errors import ParseError
from .groups import FreeAbelian
from .wreath import WreathElement, WreathProduct


@dataclass(frozen=True)
class FreeWord:
    """Freely reduced word; letters are ``(i, +-1)`` with ``1 <= i <= rank``."""

    letters: tuple
    rank: int

    def __post_init__(self):
        for i, e in self.letters:
            if not 1 <= i <= self.rank or e not in (1, -1):
                raise ValueError(f"bad letter {(i, e)} for rank {self.rank}")
        object.__setattr__(self, "letters", _reduce(self.letters))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters, max(self.rank, other.rank))

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((i, -e) for i, e in reversed(self.letters)), self.rank)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"x{i}" if e > 0 else f"X{i}" for i, e in self.letters)


def _reduce(letters) -> tuple:
    out: list = []
    for i, e in letters:
        if out and out[-1] == (i, -e):
            out.pop()
        else:
            out.append((i, e))
    return tuple(out)


def generator(i: int, rank: int) -> FreeWord:
    return FreeWord(((i, 1),), rank)


def commutator(u: FreeWord, v: FreeWord) -> FreeWord:
    """``[u, v] = u v u^-1 v^-1``."""
    return u * v * u.inverse() * v.inverse()


def exponent_sums(w: FreeWord) -> tuple:
    s = [0] * w.rank
    for i, e in w.letters:
        s[i - 1] += e
    return tuple(s)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([xX])(\d+)|(\[)|(\])|(,))")


def parse_word(text: str, rank: int | None = None) -> FreeWord:
    """Parse ``x1 X2 [x1,x2] ...``; capitals are inverses, brackets nest.

    ``rank`` defaults to the largest generator index used (at least 1).
    """
    toks = []
    pos = 0
    text = text.strip()
    if text in ("", "1", "e"):
        return FreeWord((), rank or 1)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {pos}: {text[pos:]!r}")
        pos = m.end()
        if m.group(1):
            toks.append(("g", int(m.group(2)), 1 if m.group(1) == "x" else -1))
        else:
            toks.append((m.group(3) or m.group(4) or m.group(5),))
        if pos < len(text) and text[pos:].strip() == "":
            break
    used = max((t[1] for t in toks if t[0] == "g"), default=1)
    if any(t[0] == "g" and t[1] < 1 for t in toks):
        raise ParseError("generator indices start at 1")
    r = rank if rank is not None else used
    if used > r:
        raise ParseError(f"x{used} exceeds rank {r}")

    def seq(i, stop):
        w = FreeWord((), r)
        while i < len(toks) and toks[i][0] not in stop:
            t = toks[i]
            if t[0] == "g":
                w = w * FreeWord(((t[1], t[2]),), r)
                i += 1
            elif t[0] == "[":
                u, i = seq(i + 1, {","})
                if i >= len(toks) or toks[i][0] != ",":
                    raise ParseError("expected ',' in commutator")
                v, i = seq(i + 1, {"]"})
                if i >= len(toks) or toks[i][0] != "]":
                    raise ParseError("unclosed '['")
                w = w * commutator(u, v)
                i += 1
            else:
                raise ParseError(f"unexpected {t[0]!r}")
        return w, i

    w, i = seq(0, set())
    if i != len(toks):
        raise ParseError("trailing input")
    return w


# ---------------------------------------------------------------------------
# the embedding
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def magnus_group(m: int) -> WreathProduct:
    Zm = FreeAbelian(m)
    return WreathProduct(Zm, Zm)


def _basis(m: int, i: int):
    return 1 if m == 1 else tuple(int(j == i) for j in range(m))


def generator_image(m: int, i: int) -> WreathElement:
    W = magnus_group(m)
    e = _basis(m, i - 1)
    return W.element({W.B.identity: e}, e)


def magnus_embed(w: FreeWord) -> WreathElement:
    W = magnus_group(w.rank)
    gens = [generator_image(w.rank, i) for i in range(1, w.rank + 1)]
    invs = [W.inv(g) for g in gens]
    out = W.identity
    for i, e in w.letters:
        out = W.mul(out, gens[i - 1] if e > 0 else invs[i - 1])
    return out


@dataclass(frozen=True)
class MetabelianElement:
    word: FreeWord
    image: WreathElement

    @classmethod
    def of(cls, w: FreeWord) -> "MetabelianElement":
        return cls(w, magnus_embed(w))

    def __eq__(self, other):
        return isinstance(other, MetabelianElement) and self.image == other.image

    def __hash__(self):
        return hash(self.image)


def metabelian_is_identity(w: FreeWord) -> bool:
    return magnus_embed(w) == magnus_group(w.rank).identity


def metabelian_conjugate(w1: FreeWord, w2: FreeWord):
    """Conjugacy verdict in ``S_{m,2}``, decided on the wreath images."""
    m = max(w1.rank, w2.rank)
    w1, w2 = FreeWord(w1.letters, m), FreeWord(w2.letters, m)
    return conj_abelianA_wreath(magnus_group(m), magnus_embed(w1), magnus_embed(w2))
