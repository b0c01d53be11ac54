import itertools
import math

import pytest

import oracles
from wreathlab.conjugacy import conjugates_within
from wreathlab.errors import (
    OVERFLOW,
    UNREACHED,
    ArgumentInSubgroup,
    ArgumentsConjugate,
    NonAbelianBase,
    PreconditionViolated,
)
from wreathlab.groups import FiniteCyclic, FreeAbelian, HeisenbergZ, ball_layers, symmetric_group_table
from wreathlab.quotients import ALL_FINITE, PGroups
from wreathlab.separability import (
    CSV_FIELDS,
    conj_profile,
    cyclic_profile,
    depth_conjugacy,
    depth_conjugacy_group,
    depth_cyclic,
    girth_profile,
    make_bound,
    pro_p_nonsep_witness,
    profile_csv,
    residual_girth,
    residual_witness,
    short_profile,
    theorem_bound,
    thm_c_bound_for,
)
from wreathlab.wreath import WreathProduct, wr_ball, wr_norm

Z = FreeAbelian(1)
L = WreathProduct(FiniteCyclic(2), Z)
ZZ = WreathProduct(Z, Z)


def el(W, f, top=0):
    return W.element(f, top)


# -- depth of conjugacy classes ----------------------------------------------


def test_depth_conjugacy_examples():
    x, y = el(L, {0: 1}), el(L, {0: 1, 1: 1})
    assert depth_conjugacy(L, x, y, ALL_FINITE) == 2
    assert oracles.depth_by_enumeration(oracles.as_pair(x), oracles.as_pair(y), 2, 64) == 2
    assert depth_conjugacy(ZZ, el(ZZ, {}, 1), el(ZZ, {}, 2), ALL_FINITE) == 2
    with pytest.raises(ArgumentsConjugate):
        depth_conjugacy(L, el(L, {0: 1}), el(L, {3: 1}), ALL_FINITE)


def test_depth_symmetric():
    elems = wr_ball(L, 2)
    for x, y in itertools.combinations(elems, 2):
        try:
            d = depth_conjugacy(L, x, y, ALL_FINITE, 64)
        except ArgumentsConjugate:
            continue
        assert d == depth_conjugacy(L, y, x, ALL_FINITE, 64)


def test_depth_unreached_with_small_budget():
    x, y = el(L, {}, 1), el(L, {}, -1)
    assert depth_conjugacy(L, x, y, ALL_FINITE, 2) is UNREACHED
    assert depth_conjugacy(L, x, y, ALL_FINITE, 3) == 3


def test_conj_profile_matches_independent_script():
    prof = conj_profile(L, 2, ALL_FINITE, 64)
    elems = [oracles.as_pair(x) for x in wr_ball(L, 2)]
    # independent: straight-line conjugacy via a radius-8 search, then depths
    reach = {oracles.freeze(p): {oracles.freeze(oracles.as_pair(y)) for y in conjugates_within(L, L.element(p[0], p[1]), 8)} for p in elems}
    levels = {oracles.freeze(p): wr_norm(L, L.element(p[0], p[1])) for p in elems}
    exp = {0: 0, 1: 0, 2: 0}
    for p, q in itertools.combinations(elems, 2):
        if oracles.freeze(q) in reach[oracles.freeze(p)]:
            continue
        d = oracles.depth_by_enumeration(p, q, 2, 64)
        lv = max(levels[oracles.freeze(p)], levels[oracles.freeze(q)])
        for n in exp:
            if n >= lv:
                exp[n] = max(exp[n], d)
    assert prof.measured() == exp


def test_conj_profile_monotone_and_zero_at_origin():
    prof = conj_profile(L, 3, ALL_FINITE, 64)
    vals = [r.measured for r in prof.rows]
    assert vals[0] == 0
    assert vals == sorted(vals)
    assert [r.n for r in prof.rows] == [0, 1, 2, 3]


def test_conj_profile_parallel_matches_sequential():
    a = conj_profile(L, 2, ALL_FINITE, 64, workers=1)
    b = conj_profile(L, 2, ALL_FINITE, 64, workers=3)
    assert a.rows == b.rows


def test_group_conj_depth():
    assert depth_conjugacy_group(Z, 1, 2, ALL_FINITE) == 2
    assert depth_conjugacy_group(Z, 0, 6, ALL_FINITE) == 4
    with pytest.raises(ArgumentsConjugate):
        depth_conjugacy_group(Z, 3, 3, ALL_FINITE)


# -- cyclic subgroups, girth ------------------------------------------------


def test_depth_cyclic_examples():
    assert depth_cyclic(Z, 2, 3, ALL_FINITE) == 2
    assert depth_cyclic(Z, 2, 3, PGroups(3), 3 ** 4) is UNREACHED
    assert depth_cyclic(Z, 0, 1, ALL_FINITE) == 2
    with pytest.raises(ArgumentInSubgroup):
        depth_cyclic(Z, 2, 4, ALL_FINITE)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_depth_cyclic_pro_p_density(p):
    for b in range(-10, 11):
        if abs(b) in (0, 1):
            continue
        for x in (1, b + 1):
            if x % b == 0:
                continue
            d = depth_cyclic(Z, b, x, PGroups(p), p ** 4)
            assert (d is UNREACHED) == (math.gcd(b, p) == 1), (b, x, d)


def test_depth_cyclic_heisenberg():
    H = HeisenbergZ()
    d = depth_cyclic(H, (1, 0, 0), (0, 1, 0), ALL_FINITE, 64)
    assert d == 8  # H(Z/2): the b-coordinate survives


@pytest.mark.parametrize("n", range(11))
def test_residual_girth_exact(n):
    assert residual_girth(Z, ALL_FINITE, n) == 2 * n + 1 == oracles.girth_exhaustive(n)
    for p in (2, 3, 5):
        exp = oracles.least_power_at_least(p, 2 * n + 1)
        assert residual_girth(Z, PGroups(p), n) == exp == oracles.girth_exhaustive(n, p)


def test_residual_girth_misc():
    assert residual_girth(Z, ALL_FINITE, 3) == 7
    assert residual_girth(Z, PGroups(2), 3) == 8
    assert residual_girth(HeisenbergZ(), ALL_FINITE, 0) == 1
    assert residual_girth(FreeAbelian(2), ALL_FINITE, 0) == 1
    assert residual_girth(Z, ALL_FINITE, 10, max_index=5) is UNREACHED
    prof = girth_profile(Z, 4, ALL_FINITE)
    assert prof.measured() == {n: 2 * n + 1 for n in range(5)}


def test_cyclic_profile_small():
    prof = cyclic_profile(Z, 2, ALL_FINITE, 64)
    vals = [r.measured for r in prof.rows]
    assert vals == sorted(vals) and vals[0] == 0


# -- shortest conjugators -----------------------------------------------------


def test_short_abelian_zero():
    assert all(r.measured == 0 for r in short_profile(FreeAbelian(2), 3).rows)


def test_short_heisenberg_matches_enumeration():
    H = HeisenbergZ()
    prof = short_profile(H, 2)
    assert prof.rows[0].measured == 0
    # independent: try every conjugator of length <= 6 for every pair
    lvl = {g: i for i, layer in enumerate(ball_layers(H, 2)) for g in layer}
    conj_lvl = {g: i for i, layer in enumerate(ball_layers(H, 6)) for g in layer}
    best = {n: 0 for n in range(3)}
    for g, h in itertools.product(lvl, repeat=2):
        lens = [conj_lvl[x] for x in conj_lvl if H.mul(H.mul(H.inv(x), g), x) == h]
        if not lens:
            continue
        for n in best:
            if n >= max(lvl[g], lvl[h]):
                best[n] = max(best[n], min(lens))
    assert prof.measured() == best


# -- bounds -----------------------------------------------------------------


def test_bound_examples():
    assert theorem_bound(make_bound("ThmC_abelian"), 2) == 65536
    assert theorem_bound(make_bound("ThmC_abelian"), 1) == 1
    assert theorem_bound(make_bound("ThmB_finiteB", B_order=2, conj_A=lambda n: n), 3) == 6561
    assert theorem_bound(make_bound("ThmC_finiteA"), 2) == 2 ** 16
    assert theorem_bound(make_bound("ThmC_finiteA"), 3) == 2 ** (3 ** 9)
    assert theorem_bound(make_bound("ThmC_nilpotent", d=1), 2) == 2 ** 4
    assert theorem_bound(make_bound("ThmC_nilpotent", d=2, finite_base=True), 2) == 2 ** 16


def test_bound_overflow():
    assert theorem_bound(make_bound("ThmC_abelian"), 4) is OVERFLOW
    assert theorem_bound(make_bound("ThmC_finiteA"), 3, digit_cap=100) is OVERFLOW
    with pytest.raises(PreconditionViolated):
        theorem_bound(make_bound("ThmC_abelian"), 0)


def test_bound_infinite_b_forms():
    # B = Z: Short = 0 and RG(n) = 2n+1; a constant Cyclic = 2 keeps the numbers small
    params = dict(conj_B=lambda n: 2 * n + 1, short_B=0, rg_B=lambda n: 2 * n + 1, cyclic_B=lambda n: 2)
    f = make_bound("ThmB_finiteA", **params)
    # phi(1) = 1, psi(1) = 3 * 2^1 = 6 -> max(3, 6 * 2^6)
    assert theorem_bound(f, 1) == 6 * 2 ** 6
    g = make_bound("ThmB_infiniteA", conj_A=lambda n: n, **params)
    # (psi * conj_A(psi n))^(psi^3) = (6 * 6)^216
    assert theorem_bound(g, 1) == 36 ** 216


def test_thm_c_selection():
    assert thm_c_bound_for(L).name == "ThmC_finiteA"
    assert thm_c_bound_for(ZZ).name == "ThmC_abelian"
    assert thm_c_bound_for(WreathProduct(FiniteCyclic(2), FiniteCyclic(3))) is None


# -- witnesses ----------------------------------------------------------------


def test_nonsep_witness_z3():
    r = pro_p_nonsep_witness(FiniteCyclic(3), 2, 3, 3)
    assert not r.h_in_Kb and r.all_in_image and r.confirms_nonseparability
    assert {row.j for row in r.rows} == {0, 1, 2, 3}
    assert all(row.c_in_closure for row in r.rows)
    assert "in_Kb=false" in r.text()


def test_nonsep_witness_z2():
    r = pro_p_nonsep_witness(FiniteCyclic(2), 3, 2, 3)
    assert r.confirms_nonseparability


def test_nonsep_preimages_verify_by_enumeration():
    # independent membership check: enumerate all of K_b's image in (Z/3) wr (Z/9)
    r = pro_p_nonsep_witness(FiniteCyclic(3), 2, 3, 2)
    row = next(row for row in r.rows if row.quotient == "(Z/3)wr(Z/9)")
    A, B = oracles.cyclic(3), oracles.cyclic(9)
    image = set()
    for f, _ in oracles.finite_wreath_elements(3, 9)[::9]:
        comm = oracles.wmul(A, B, oracles.wmul(A, B, (f, 0), ({}, 2)), oracles.winv(A, B, oracles.wmul(A, B, ({}, 2), (f, 0))))
        image.add(oracles.freeze(comm)[0])
    assert tuple(row.image) in image


def test_nonsep_preconditions():
    with pytest.raises(PreconditionViolated):
        pro_p_nonsep_witness(FiniteCyclic(3), 1, 3, 2)
    with pytest.raises(PreconditionViolated):
        pro_p_nonsep_witness(FiniteCyclic(3), 3, 3, 2)
    with pytest.raises(PreconditionViolated):
        pro_p_nonsep_witness(FiniteCyclic(6), 5, 3, 2)
    with pytest.raises(PreconditionViolated):
        pro_p_nonsep_witness(Z, 2, 3, 2)


def test_residual_witness():
    idx, q = residual_witness(L, el(L, {0: 1, 1: 1}), ALL_FINITE)
    assert idx == 8 and not q.kernel_test(el(L, {0: 1, 1: 1}))
    assert residual_witness(ZZ, el(ZZ, {}, 1), ALL_FINITE)[0] == 2
    with pytest.raises(NonAbelianBase):
        residual_witness(WreathProduct(symmetric_group_table(3), Z), None, ALL_FINITE)
    with pytest.raises(PreconditionViolated):
        residual_witness(L, L.identity, ALL_FINITE)


# -- csv ----------------------------------------------------------------------


def test_csv_schema_and_big_values():
    prof = conj_profile(L, 3, ALL_FINITE, 64, bound=make_bound("ThmC_finiteA"))
    text = profile_csv([prof])
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    assert lines[1].startswith("ConjDepth,all,0,0,,")
    # 2^(3^9) written out in full
    assert len(lines[4].split(",")[4]) == math.floor(3 ** 9 * math.log10(2)) + 1
    assert profile_csv([prof], stamp="x").startswith("# generated x\n")
    assert profile_csv([prof]) == text
