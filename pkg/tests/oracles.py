"""Straight-line reference computations that share no code with the package.

Groups are passed as plain ``(mul, inv, e)`` triples and wreath elements
as ``(dict, top)`` pairs, so these functions double as an independent
reading of the product rule ``(f, b)(g, c) = (x -> f(x) g(b^-1 x), bc)``.
"""

import itertools


def cyclic(n):
    return (lambda a, b: (a + b) % n, lambda a: (-a) % n, 0)


def integers():
    return (lambda a, b: a + b, lambda a: -a, 0)


def wmul(A, B, x, y):
    (f, b), (g, c) = x, y
    amul, _, ae = A
    bmul, binv, _ = B
    keys = set(f) | {bmul(b, k) for k in g}
    binv_b = binv(b)
    out = {}
    for k in keys:
        v = amul(f.get(k, ae), g.get(bmul(binv_b, k), ae))
        if v != ae:
            out[k] = v
    return out, bmul(b, c)


def winv(A, B, x):
    f, b = x
    _, ainv, ae = A
    bmul, binv, _ = B
    bi = binv(b)
    return {bmul(bi, k): ainv(v) for k, v in f.items()}, bi


def wconj(A, B, x, w):
    return wmul(A, B, wmul(A, B, w, x), winv(A, B, w))


def as_pair(x):
    return dict(x.base), x.top


def finite_wreath_elements(a, k):
    out = []
    for vals in itertools.product(range(a), repeat=k):
        f = {i: v for i, v in enumerate(vals) if v}
        for b in range(k):
            out.append((f, b))
    return out


def freeze(x):
    f, b = x
    return tuple(sorted(f.items())), b


def conj_class(A, B, elems, x):
    return {freeze(wconj(A, B, x, w)) for w in elems}


# -- lamplighter-style quotients (Z/a) wr (Z/k) of (Z/a0) wr Z -------------


def image_mod(x, a, k):
    f, b = x
    acc = {}
    for pos, v in f.items():
        acc[pos % k] = (acc.get(pos % k, 0) + v) % a
    return {p: v for p, v in acc.items() if v}, b % k


def quotient_params(a0, max_index, base_is_z=False):
    """(index, k, a) for every (Z/a) wr (Z/k) reachable from (Z/a0) wr Z, sorted by index, k, a."""
    out = []
    for k in range(1, max_index + 1):
        for a in range(1, max_index + 1):
            if not base_is_z and a0 % a:
                continue
            idx = a ** k * k
            if idx > max_index:
                break
            out.append((idx, k, a))
    out.sort()
    return out


def depth_by_enumeration(x, y, a0, max_index, base_is_z=False):
    """Least index of a (Z/a) wr (Z/k) quotient separating the classes of x and y."""
    for idx, k, a in quotient_params(a0, max_index, base_is_z):
        A, B = cyclic(a), cyclic(k)
        elems = finite_wreath_elements(a, k)
        if freeze(image_mod(y, a, k)) not in conj_class(A, B, elems, image_mod(x, a, k)):
            return idx
    return None


def girth_exhaustive(n, p=None):
    m = 1
    while True:
        ok = p is None or _is_power(m, p)
        if ok and len({i % m for i in range(-n, n + 1)}) == 2 * n + 1:
            return m
        m += 1


def _is_power(m, p):
    while m % p == 0:
        m //= p
    return m == 1


def least_power_at_least(p, v):
    q = 1
    while q < v:
        q *= p
    return q


def heis_mul(g, h):
    # explicit 3x3 unitriangular product
    M = [[1, g[0], g[2]], [0, 1, g[1]], [0, 0, 1]]
    N = [[1, h[0], h[2]], [0, 1, h[1]], [0, 0, 1]]
    P = [[sum(M[i][t] * N[t][j] for t in range(3)) for j in range(3)] for i in range(3)]
    return P[0][1], P[1][2], P[0][2]
