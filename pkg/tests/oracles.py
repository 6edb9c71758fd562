"""Independent reference computations used by the tests.

Everything here is deliberately naive: dense Fraction matrices, explicit
enumeration, no shared code with the package beyond data access.
"""

from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial


def naive_rank(rows, ncols=None):
    """Dense Gauss-Jordan over Fraction on sparse ``{col: value}`` rows."""
    cols = sorted({c for r in rows for c in r}, key=repr) if ncols is None else list(range(ncols))
    m = [[Fraction(r.get(j, 0)) for j in cols] for r in rows]
    r = 0
    for c in range(len(cols)):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
    return r


def naive_cohomology(C):
    """``{degree: dim H}`` from dense ranks of the differential blocks."""
    degs = sorted(set(C.space.degree.values()))
    rk = {}
    for k in degs:
        rows = [dict(C.d.image(n)) for n in C.space if C.space.degree[n] == k]
        rk[k] = naive_rank(rows)
    out = {}
    for k in degs:
        dim = sum(1 for n in C.space if C.space.degree[n] == k)
        out[k] = dim - rk[k] - rk.get(k - 1, 0)
    return out


def canon(alg, letters):
    """Oracle: sort a letter list by generator order, tracking odd transpositions."""
    idx = [alg.space.index[a] for a in letters]
    odd = [alg.odd[i] for i in idx]
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j] and odd[i] and odd[j]:
                sign = -sign
    e = [0] * alg.n
    for i in idx:
        e[i] += 1
    if any(e[i] > 1 for i in range(alg.n) if alg.odd[i]):
        return 0, None
    return sign, tuple(e)


def letters_of(alg, m):
    return [alg.names[i] for i, e in enumerate(m) for _ in range(e)]


def double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def monomials(nvars, max_degree):
    out = []
    for deg in range(max_degree + 1):
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def multinomial_count(exps):
    n = sum(exps)
    out = factorial(n)
    for e in exps:
        out //= factorial(e)
    return out


def magma_lie_dims(sdegs, cutoff):
    """Free graded Lie algebra dimensions by weight, as magma algebra / Lie ideal.

    ``sdegs`` are the (desuspended) degrees of the letters, each of weight 1.
    Trees are ints (letters) or pairs.  The ideal at weight ``w`` is spanned by
    antisymmetry and Jacobi at weight ``w`` and by brackets of lower-weight
    ideal elements with trees.
    """
    trees = {1: list(range(len(sdegs)))}
    for w in range(2, cutoff + 1):
        trees[w] = [(a, b) for w1 in range(1, w) for a in trees[w1] for b in trees[w - w1]]

    def deg(t):
        return sdegs[t] if isinstance(t, int) else deg(t[0]) + deg(t[1])

    def sgn(n):
        return -1 if n % 2 else 1

    def br(P, Q):
        out = {}
        for a, x in P.items():
            for b, y in Q.items():
                out[(a, b)] = out.get((a, b), 0) + x * y
        return {k: v for k, v in out.items() if v}

    def add(*terms):
        out = {}
        for c, P in terms:
            for k, v in P.items():
                out[k] = out.get(k, 0) + c * v
        return {k: v for k, v in out.items() if v}

    ideal = {1: []}
    dims = {1: len(sdegs)}
    for w in range(2, cutoff + 1):
        rels = []
        for w1 in range(1, w):
            for a in trees[w1]:
                for b in trees[w - w1]:
                    # [a,b] + (-1)^{|a||b|} [b,a]
                    rels.append(add((1, {(a, b): 1}), (sgn(deg(a) * deg(b)), {(b, a): 1})))
                for r in ideal[w1]:
                    for t in trees[w - w1]:
                        rels.append(br(r, {t: 1}))
                        rels.append(br({t: 1}, r))
        for w1 in range(1, w - 1):
            for w2 in range(1, w - w1):
                w3 = w - w1 - w2
                for a in trees[w1]:
                    for b in trees[w2]:
                        for c in trees[w3]:
                            # [a,[b,c]] - [[a,b],c] - (-1)^{|a||b|} [b,[a,c]]
                            rels.append(add((1, {(a, (b, c)): 1}), (-1, {((a, b), c): 1}),
                                            (-sgn(deg(a) * deg(b)), {(b, (a, c)): 1})))
        # incremental echelon form; independent relations generate the next round
        pivots = {}
        keep = []
        for r in rels:
            v = {k: Fraction(c) for k, c in r.items()}
            while v:
                lead = min(v, key=repr)
                if lead not in pivots:
                    pivots[lead] = v
                    keep.append(r)
                    break
                p = pivots[lead]
                f = v[lead] / p[lead]
                for k, c in p.items():
                    x = v.get(k, 0) - f * c
                    if x:
                        v[k] = x
                    else:
                        v.pop(k, None)
        dims[w] = len(trees[w]) - len(pivots)
        ideal[w] = keep
    return {w: d for w, d in dims.items() if d}
