"""Text syntax for groups, elements and quotient families.

Groups::

    Z   Z^2   Z/6   Z/2xZ/4   H   H(Z/3)   <A> wr <B>

Elements (for the group they are read in)::

    5   -2   3 mod 5   (2,3)   H(1,0,-1)   {0:1, 2:1}@1   {}@0

Families: ``all`` or ``p<prime>`` (``p2``, ``p3``, ...).
"""

from __future__ import annotations

import re

from .errors import ParseError
from .groups import (
    DirectProduct,
    FiniteAbelian,
    FiniteCyclic,
    FreeAbelian,
    Group,
    HeisenbergMod,
    HeisenbergZ,
    LatticeQuotient,
)
from .quotients import ALL_FINITE, CoCFamily, PGroups
from .wreath import WreathProduct

GROUP_GRAMMAR = "group := Z | Z^m | Z/n | Z/n1xZ/n2... | H | H(Z/k) | <group> wr <group>"
ELEMENT_GRAMMAR = "element := int | 'a mod n' | (a,b,...) | H(a,b,c) | {b:a, ...}@b"
FAMILY_GRAMMAR = "family := all | p<prime>"


def split_top(s: str, sep: str) -> list:
    """Split on ``sep`` outside any (), [] or {} nesting."""
    out, depth, cur = [], 0, []
    for ch in s:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced brackets in {s!r}")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError(f"unbalanced brackets in {s!r}")
    out.append("".join(cur))
    return out


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------

_CYC = re.compile(r"^Z/(\d+)$")
_FREE = re.compile(r"^Z(?:\^(\d+))?$")
_HMOD = re.compile(r"^H\(Z/(\d+)\)$")


def parse_group(text: str) -> Group:
    s = text.strip()
    parts = re.split(r"\s+wr\s+", s, maxsplit=1)
    if len(parts) == 2:
        return WreathProduct(parse_group(parts[0]), parse_group(parts[1]))
    if s.startswith("(") and s.endswith(")") and not s.startswith("H"):
        return parse_group(s[1:-1])
    s = s.replace(" ", "")
    m = _FREE.match(s)
    if m:
        k = int(m.group(1) or 1)
        if k < 1:
            raise ParseError("rank must be positive")
        return FreeAbelian(k)
    if s == "H":
        return HeisenbergZ()
    m = _HMOD.match(s)
    if m:
        return HeisenbergMod(int(m.group(1)))
    factors = s.split("x")
    if all(_CYC.match(f) for f in factors):
        ns = [int(_CYC.match(f).group(1)) for f in factors]
        if any(n < 1 for n in ns):
            raise ParseError("cyclic orders must be positive")
        return FiniteCyclic(ns[0]) if len(ns) == 1 else FiniteAbelian(*ns)
    raise ParseError(f"cannot read group {text!r}; {GROUP_GRAMMAR}")


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------


def _ints(body: str) -> tuple:
    try:
        return tuple(int(p) for p in body.split(","))
    except ValueError:
        raise ParseError(f"expected integers, got {body!r}") from None


def parse_element(G: Group, text: str):
    s = text.strip()
    if isinstance(G, WreathProduct):
        return _parse_wreath(G, s)
    try:
        if isinstance(G, (HeisenbergZ, HeisenbergMod)):
            m = re.fullmatch(r"H\((.*)\)", s.replace(" ", ""))
            if not m:
                raise ParseError(f"expected H(a,b,c), got {text!r}")
            return G.canonical(_ints(m.group(1)))
        m = re.fullmatch(r"(-?\d+)\s+mod\s+(\d+)", s)
        if m:
            a, n = int(m.group(1)), int(m.group(2))
            if isinstance(G, LatticeQuotient) and G.rank == 1 and G.order != n:
                raise ParseError(f"{text!r} is not an element of {G.label}")
            return G.canonical(a)
        s = s.replace(" ", "")
        if s.startswith("(") and s.endswith(")"):
            return G.canonical(_ints(s[1:-1]))
        if isinstance(G, DirectProduct):
            raise ParseError(f"expected a tuple for {G.label}")
        return G.canonical(int(s))
    except ParseError:
        raise
    except (ValueError, TypeError) as exc:
        raise ParseError(f"cannot read {text!r} in {G.label}: {exc}") from None


def _parse_wreath(W: WreathProduct, s: str):
    parts = split_top(s, "@")
    if len(parts) != 2:
        raise ParseError(f"expected '{{...}}@top', got {s!r}; {ELEMENT_GRAMMAR}")
    base, top = parts[0].strip(), parts[1].strip()
    if not (base.startswith("{") and base.endswith("}")):
        raise ParseError(f"base map must be in braces: {base!r}")
    inner = base[1:-1].strip()
    items = []
    if inner:
        for entry in split_top(inner, ","):
            kv = split_top(entry, ":")
            if len(kv) != 2:
                raise ParseError(f"expected key:value, got {entry!r}")
            items.append((parse_element(W.B, kv[0]), parse_element(W.A, kv[1])))
    return W.element(items, parse_element(W.B, top))


def format_element(G: Group, x) -> str:
    return G.fmt(x)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def parse_family(text: str) -> CoCFamily:
    s = text.strip().lower()
    if s in ("all", "allfinite"):
        return ALL_FINITE
    m = re.fullmatch(r"p(\d+)", s)
    if m:
        try:
            return PGroups(int(m.group(1)))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    raise ParseError(f"cannot read family {text!r}; {FAMILY_GRAMMAR}")
