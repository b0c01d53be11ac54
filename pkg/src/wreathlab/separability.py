"""Measured separability functions and the closed-form bounds they are checked against.

All minimal-index searches walk the deterministic quotient streams from
:mod:`wreathlab.quotients` and report the first success.  For infinite
acting groups only wreath-shaped quotients ``(A/M) wr (B/N)`` are tried, so
the measured depths there are upper estimates of the true depths.
"""

from __future__ import annotations

import csv
import functools
import io
import itertools
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from .conjugacy import Conjugate, decide, separated_by
from .errors import (
    OVERFLOW,
    UNREACHED,
    ArgumentInSubgroup,
    ArgumentsConjugate,
    CapExceeded,
    NonAbelianBase,
    PreconditionViolated,
)
from .groups import AbelianGroup, Group, ball, ball_layers
from .quotients import (
    CoCFamily,
    PGroups,
    cyclic_quotient,
    enumerate_coC,
    injective_on_ball,
    product_quotient,
    wreath_quotients,
)
from .wreath import (
    WreathElement,
    WreathProduct,
    base_commutator,
    in_Kb,
    solve_commutator,
    wr_ball,
    wr_norm,
)

DEFAULT_MAX_INDEX = 4096
DEFAULT_DIGIT_CAP = 100_000


@dataclass(frozen=True)
class ProfileRow:
    n: int
    measured: Any  # int or UNREACHED
    witness_count: int = 0
    bound: Any = None  # int, OVERFLOW, or None when no bound applies


@dataclass
class DepthProfile:
    kind: str  # ConjDepth | CyclicDepth | ResidualGirth | ShortConj
    family: Optional[CoCFamily]
    rows: list = field(default_factory=list)

    def measured(self) -> dict:
        return {r.n: r.measured for r in self.rows}


def _max(values):
    """Max with UNREACHED dominating; 0 on empty input."""
    out = 0
    for v in values:
        if v is UNREACHED:
            return UNREACHED
        out = max(out, v)
    return out


# ---------------------------------------------------------------------------
# conjugacy depth
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=32)
def _quotients(W: WreathProduct, family: CoCFamily, max_index: int) -> tuple:
    return tuple(wreath_quotients(W, family, max_index))


def separating_quotient(W: WreathProduct, x, y, family: CoCFamily, max_index: int):
    """First wreath-shaped quotient in stream order separating the classes of x and y."""
    for q in _quotients(W, family, max_index):
        if separated_by(q, x, y):
            return q
    return None


def depth_conjugacy(W: WreathProduct, x, y, family: CoCFamily, max_index: int = DEFAULT_MAX_INDEX):
    """Minimal index of a wreath-shaped quotient in which x and y are not conjugate."""
    if isinstance(decide(W, x, y), Conjugate):
        raise ArgumentsConjugate(f"{W.fmt(x)} ~ {W.fmt(y)}")
    q = separating_quotient(W, x, y, family, max_index)
    return UNREACHED if q is None else q.index


def _pair_depth(item):
    W, x, y, family, max_index = item
    if isinstance(decide(W, x, y), Conjugate):
        return None
    q = separating_quotient(W, x, y, family, max_index)
    return UNREACHED if q is None else q.index


def map_ordered(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """``list(map(fn, items))``, optionally on a process pool; order follows ``items``."""
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    chunk = max(1, len(items) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def conj_profile(
    W: WreathProduct,
    n_max: int,
    family: CoCFamily,
    max_index: int = DEFAULT_MAX_INDEX,
    workers: int = 1,
    bound: Optional["BoundFormula"] = None,
    digit_cap: int = DEFAULT_DIGIT_CAP,
) -> DepthProfile:
    """Conj(n) for n = 0..n_max over the wr_norm ball.

    Each non-conjugate pair is measured once, at the radius where both
    elements first appear; row n takes the max over pairs with level <= n.
    ``witness_count`` is the number of pairs attaining that max.
    """
    elems = wr_ball(W, n_max)
    level = {x: wr_norm(W, x) for x in elems}
    pairs = list(itertools.combinations(elems, 2))
    depths = map_ordered(_pair_depth, [(W, x, y, family, max_index) for x, y in pairs], workers)
    measured_pairs = [
        (max(level[x], level[y]), d) for (x, y), d in zip(pairs, depths) if d is not None
    ]
    prof = DepthProfile("ConjDepth", family)
    for n in range(n_max + 1):
        ds = [d for lv, d in measured_pairs if lv <= n]
        m = _max(ds)
        count = sum(1 for d in ds if d == m) if ds else 0
        bval = theorem_bound(bound, n, digit_cap) if bound is not None and n >= 1 else None
        prof.rows.append(ProfileRow(n, m, count, bval))
    return prof


def depth_conjugacy_group(G: Group, g, h, family: CoCFamily, max_index: int = DEFAULT_MAX_INDEX):
    """Conjugacy depth inside a single (non-wreath) group, through its co-C stream."""
    if G.is_abelian or G.is_finite or hasattr(G, "is_conjugate"):
        if G.is_conjugate(g, h):
            raise ArgumentsConjugate(f"{G.fmt(g)} ~ {G.fmt(h)}")
    for q in enumerate_coC(G, family, max_index):
        if not q.target.is_conjugate(q.apply(g), q.apply(h)):
            return q.index
    return UNREACHED


def group_conj_profile(G: Group, n_max: int, family: CoCFamily, max_index: int = DEFAULT_MAX_INDEX) -> DepthProfile:
    prof = DepthProfile("ConjDepth", family)
    layers = ball_layers(G, n_max)
    lvl = {g: i for i, layer in enumerate(layers) for g in layer}
    found = []
    for g, h in itertools.combinations(sorted(lvl), 2):
        if not G.is_conjugate(g, h):
            found.append((max(lvl[g], lvl[h]), depth_conjugacy_group(G, g, h, family, max_index)))
    for n in range(n_max + 1):
        ds = [d for lv, d in found if lv <= n]
        m = _max(ds)
        prof.rows.append(ProfileRow(n, m, sum(1 for d in ds if d == m) if ds else 0))
    return prof


# ---------------------------------------------------------------------------
# cyclic subgroup depth, residual girth, shortest conjugators
# ---------------------------------------------------------------------------


def depth_cyclic(B: Group, b, x, family: CoCFamily, max_index: int = DEFAULT_MAX_INDEX):
    """Minimal index of a quotient in which the image of x leaves the image of <b>."""
    if B.cyclic_log(x, b) is not None:
        raise ArgumentInSubgroup(f"{B.fmt(x)} lies in <{B.fmt(b)}>")
    for q in enumerate_coC(B, family, max_index):
        T = q.target
        if T.cyclic_log(q.apply(x), q.apply(b)) is None:
            return q.index
    return UNREACHED


def cyclic_profile(B: Group, n_max: int, family: CoCFamily, max_index: int = DEFAULT_MAX_INDEX) -> DepthProfile:
    prof = DepthProfile("CyclicDepth", family)
    layers = ball_layers(B, n_max)
    lvl = {g: i for i, layer in enumerate(layers) for g in layer}
    found = []
    for g, h in itertools.product(sorted(lvl), repeat=2):
        if B.cyclic_log(h, g) is None:
            found.append((max(lvl[g], lvl[h]), depth_cyclic(B, g, h, family, max_index)))
    for n in range(n_max + 1):
        ds = [d for lv, d in found if lv <= n]
        m = _max(ds)
        prof.rows.append(ProfileRow(n, m, sum(1 for d in ds if d == m) if ds else 0))
    return prof


def residual_girth(B: Group, family: CoCFamily, n: int, max_index: int = DEFAULT_MAX_INDEX):
    """Minimal index of a quotient that is injective on the n-ball."""
    for q in enumerate_coC(B, family, max_index):
        if injective_on_ball(q, n):
            return q.index
    return UNREACHED


def girth_profile(B: Group, n_max: int, family: CoCFamily, max_index: int = DEFAULT_MAX_INDEX) -> DepthProfile:
    prof = DepthProfile("ResidualGirth", family)
    for n in range(n_max + 1):
        prof.rows.append(ProfileRow(n, residual_girth(B, family, n, max_index), 1))
    return prof


def shortest_conjugators(B: Group, g, radius_cap: int = 8) -> dict:
    """``{h: SC(g, h)}`` for every ``h = x^-1 g x`` with ``|x| <= radius_cap``."""
    out: dict = {}
    for r, layer in enumerate(ball_layers(B, radius_cap)):
        for x in layer:
            h = B.mul(B.mul(B.inv(x), g), x)
            if h not in out:
                out[h] = r
    return out


def short_profile(B: Group, n_max: int, radius_cap: int = 8) -> DepthProfile:
    """Short_B(n): the largest minimal conjugator length over conjugate pairs in the n-ball."""
    prof = DepthProfile("ShortConj", None)
    layers = ball_layers(B, n_max)
    lvl = {g: i for i, layer in enumerate(layers) for g in layer}
    elems = sorted(lvl)
    found = []
    for g in elems:
        if B.is_abelian:
            found.append((lvl[g], 0))
            continue
        sc = shortest_conjugators(B, g, radius_cap)
        for h in elems:
            if not B.is_conjugate(g, h):
                continue
            if h not in sc:
                raise CapExceeded(f"no conjugator of length <= {radius_cap} for {B.fmt(g)} -> {B.fmt(h)}")
            found.append((max(lvl[g], lvl[h]), sc[h]))
    for n in range(n_max + 1):
        ds = [d for lv, d in found if lv <= n]
        m = max(ds, default=0)
        prof.rows.append(ProfileRow(n, m, sum(1 for d in ds if d == m) if ds else 0))
    return prof


# ---------------------------------------------------------------------------
# closed-form bounds
# ---------------------------------------------------------------------------


def _digits_exceed(base: int, exp: int, cap: int) -> bool:
    if base <= 1 or exp <= 0:
        return False
    if exp.bit_length() > 60:
        return True
    return exp * math.log10(base) > cap + 1


def _pow(base, exp, cap):
    if base is OVERFLOW:
        return OVERFLOW
    if exp is OVERFLOW:
        return base if base in (0, 1) else OVERFLOW
    if _digits_exceed(base, exp, cap):
        return OVERFLOW
    return base ** exp


def _mul(a, b, cap):
    if a is OVERFLOW or b is OVERFLOW:
        return OVERFLOW
    r = a * b
    return OVERFLOW if r and math.log10(r) > cap else r


def _add(a, b):
    if a is OVERFLOW or b is OVERFLOW:
        return OVERFLOW
    return a + b


def _bmax(*vals):
    if any(v is OVERFLOW for v in vals):
        return OVERFLOW
    return max(vals)


def _call(fn, n):
    v = fn(n) if callable(fn) else fn
    if v is UNREACHED:
        raise PreconditionViolated("bound parameter evaluated to Unreached")
    return v


@dataclass(frozen=True)
class BoundFormula:
    """A named upper bound with its parameters.

    Names and parameters (callables map n to a natural number):

    * ``ThmB_finiteB``: ``B_order``, ``conj_A`` -- ``conj_A(n)^(|B|^3)``
    * ``ThmB_infiniteA``: ``conj_A, conj_B, short_B, rg_B, cyclic_B``
    * ``ThmB_finiteA``: ``conj_B, short_B, rg_B, cyclic_B``
    * ``ThmC_abelian``: ``n^(n^(n^2))``
    * ``ThmC_finiteA``: ``2^(n^(n^2))``
    * ``ThmC_nilpotent``: ``d``, optional ``finite_base`` -- ``n^(n^(n^d))`` or ``2^(n^(n^d))``

    With ``phi(n) = short_B(n) + n`` and
    ``psi(n) = rg_B(phi(n)) * cyclic_B(phi(n))^(phi(n)^2)`` the two
    infinite-B bounds are ``max(conj_B(n), (psi conj_A(psi n))^(psi^3))``
    and ``max(conj_B(n), psi 2^psi)``.  Multiplicative constants are 1.
    """

    name: str
    params: tuple = ()

    def param(self, key, default=None):
        return dict(self.params).get(key, default)


def make_bound(name: str, **params) -> BoundFormula:
    return BoundFormula(name, tuple(sorted(params.items())))


def _psi(f: BoundFormula, n: int, cap: int):
    phi = _call(f.param("short_B"), n) + n
    rg = _call(f.param("rg_B"), phi)
    cyc = _call(f.param("cyclic_B"), phi)
    return _mul(rg, _pow(cyc, phi * phi, cap), cap)


def theorem_bound(formula: BoundFormula, n: int, digit_cap: int = DEFAULT_DIGIT_CAP):
    """Exact big-integer value of the bound at n, or OVERFLOW past ``digit_cap`` digits."""
    if n < 1:
        raise PreconditionViolated("bounds are evaluated for n >= 1")
    name = formula.name
    cap = digit_cap
    if name == "ThmC_abelian":
        return _pow(n, _pow(n, n * n, cap), cap)
    if name == "ThmC_finiteA":
        return _pow(2, _pow(n, n * n, cap), cap)
    if name == "ThmC_nilpotent":
        d = formula.param("d")
        inner = _pow(n, _pow(n, d, cap), cap)
        return _pow(2 if formula.param("finite_base") else n, inner, cap)
    if name == "ThmB_finiteB":
        b = formula.param("B_order")
        return _pow(_call(formula.param("conj_A"), n), b ** 3, cap)
    if name == "ThmB_finiteA":
        psi = _psi(formula, n, cap)
        return _bmax(_call(formula.param("conj_B"), n), _mul(psi, _pow(2, psi, cap), cap))
    if name == "ThmB_infiniteA":
        psi = _psi(formula, n, cap)
        if psi is OVERFLOW:
            return OVERFLOW
        inner = _mul(psi, _call(formula.param("conj_A"), psi * n), cap)
        return _bmax(_call(formula.param("conj_B"), n), _pow(inner, _pow(psi, 3, cap), cap))
    raise ValueError(f"unknown bound {name!r}")


def thm_c_bound_for(W: WreathProduct) -> Optional[BoundFormula]:
    """The nilpotent-acting-group bound that applies to W, if any."""
    from .groups import FreeAbelian

    if not W.A.is_abelian or not isinstance(W.B, FreeAbelian):
        return None
    return make_bound("ThmC_finiteA") if W.A.is_finite else make_bound("ThmC_abelian")


@dataclass(frozen=True)
class BoundViolation:
    n: int
    measured: int
    bound: Any


def bound_violations(profile: DepthProfile) -> list:
    """Rows whose measured value exceeds the evaluated bound (shape check, constants = 1)."""
    out = []
    for r in profile.rows:
        if r.bound is None or r.bound is OVERFLOW or r.measured is UNREACHED:
            continue
        if r.measured > r.bound:
            out.append(BoundViolation(r.n, r.measured, r.bound))
    return out


# ---------------------------------------------------------------------------
# residual finiteness sanity check
# ---------------------------------------------------------------------------


def residual_witness(W: WreathProduct, x, family: CoCFamily, max_index: int = DEFAULT_MAX_INDEX):
    """Smallest wreath-shaped quotient not killing x, as ``(index, quotient)``.

    Only abelian base groups (or finite B) admit such quotients; a
    nonabelian base over an infinite B is not residually finite at all.
    """
    if not W.A.is_abelian and not W.B.is_finite:
        raise NonAbelianBase(f"{W.label} is not residually finite")
    if x == W.identity:
        raise PreconditionViolated("the identity survives in no quotient")
    for q in _quotients(W, family, max_index):
        if not q.kernel_test(x):
            return q.index, q
    return UNREACHED


# ---------------------------------------------------------------------------
# p-conjugacy non-separability witness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NonsepRow:
    quotient: str
    j: int
    image: tuple
    in_image: bool
    preimage: Optional[tuple]
    c_in_closure: bool


@dataclass(frozen=True)
class NonsepReport:
    base: str
    b: int
    p: int
    k_max: int
    h: tuple
    h_in_Kb: bool
    rows: tuple

    @property
    def all_in_image(self) -> bool:
        return all(r.in_image for r in self.rows)

    @property
    def confirms_nonseparability(self) -> bool:
        return not self.h_in_Kb and self.all_in_image

    def text(self) -> str:
        lines = [
            f"NONSEP base={self.base} b={self.b} p={self.p} k_max={self.k_max}",
            f"h={_fmt_base(self.h)} in_Kb={str(self.h_in_Kb).lower()}",
        ]
        for r in self.rows:
            pre = _fmt_base(r.preimage) if r.preimage is not None else "-"
            lines.append(
                f"  quotient={r.quotient} j={r.j} image={_fmt_base(r.image)} "
                f"in_image={str(r.in_image).lower()} preimage={pre}"
            )
        lines.append(f"verdict={'h in pro-p closure of K_b, not in K_b' if self.confirms_nonseparability else 'not confirmed'}")
        return "\n".join(lines)


def _fmt_base(f) -> str:
    return "{" + ",".join(f"{k}:{v}" for k, v in f) + "}"


def _is_p_group(A: Group, p: int) -> bool:
    n = A.order
    while n % p == 0:
        n //= p
    return n == 1


def pro_p_nonsep_witness(A: AbelianGroup, b: int, p: int, k_max: int) -> NonsepReport:
    """Exhibit ``h = [g, c]`` outside ``K_b`` whose image lies in the image of ``K_b``
    in every quotient ``(A/M) wr (Z/p^j)``, ``j <= k_max``.

    ``c = 1`` lies in the pro-p closure of ``<b>`` when ``gcd(b, p) = 1``, and
    ``g`` is a single nontrivial lamp at 0.  Membership in each quotient is
    shown by an explicit preimage ``f'`` with ``[f', b] = pi(h)``, checked by
    multiplying out the commutator in the finite target.
    """
    from .groups import FreeAbelian

    family = PGroups(p)
    if not isinstance(A, AbelianGroup) or not A.is_finite:
        raise PreconditionViolated("A must be a finite abelian group")
    if not _is_p_group(A, p):
        raise PreconditionViolated(f"{A.label} is not residually {p}-finite")
    if b in (0, 1, -1) or math.gcd(b, p) != 1:
        raise PreconditionViolated(f"need gcd(b, p) = 1 and b not in {{0, 1, -1}}; got b={b}")
    Z = FreeAbelian(1)
    W = WreathProduct(A, Z)
    a = A.generators[0]
    g = W.element({0: a})
    c = 1
    h = base_commutator(W, g.base, c)
    h_in = in_Kb(W, h, b)
    rows = []
    for qA in enumerate_coC(A, family, A.order):
        for j in range(k_max + 1):
            qB = cyclic_quotient(p ** j)
            pi = product_quotient(W, qA, qB)
            T = pi.target
            img = pi.apply_base(h)
            bb = qB.apply(b)
            c_closure = T.B.cyclic_log(qB.apply(c), bb) is not None
            pre = solve_commutator(T, img, bb)
            ok = pre is not None and base_commutator(T, pre, bb) == img
            rows.append(NonsepRow(pi.label, j, img, ok, pre if ok else None, c_closure))
    return NonsepReport(A.label, b, p, k_max, h, h_in, tuple(rows))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

CSV_FIELDS = ("kind", "family", "n", "measured", "bound", "witness_count")


def _cell(v) -> str:
    if v is None:
        return ""
    return repr(v) if v is UNREACHED or v is OVERFLOW else str(v)


def profile_csv(profiles: Sequence[DepthProfile], stamp: Optional[str] = None) -> str:
    # exact bounds can run to many thousands of digits
    limit = sys.get_int_max_str_digits()
    sys.set_int_max_str_digits(0)
    try:
        return _profile_csv(profiles, stamp)
    finally:
        sys.set_int_max_str_digits(limit)


def _profile_csv(profiles, stamp):
    buf = io.StringIO()
    if stamp:
        buf.write(f"# generated {stamp}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for prof in profiles:
        fam = prof.family.label if prof.family is not None else ""
        for r in prof.rows:
            w.writerow([prof.kind, fam, r.n, _cell(r.measured), _cell(r.bound), r.witness_count])
    return buf.getvalue()
