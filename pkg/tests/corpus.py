"""Seeded random inputs shared by the module tests and the acceptance suite."""

from fractions import Fraction

from bvq.core.complexes import GradedMap, GradedSpace, build_complex
from bvq.lie1 import QuadraticModule, pullback_pairing, cotangent


def unitriangular(rng, k, bound=2):
    """Random invertible integer matrix as a product of unit triangular factors."""
    L = [[Fraction(1 if i == j else (rng.randint(-bound, bound) if j < i else 0)) for j in range(k)]
         for i in range(k)]
    U = [[Fraction(1 if i == j else (rng.randint(-bound, bound) if j > i else 0)) for j in range(k)]
         for i in range(k)]
    s = [Fraction(rng.choice((1, -1, 2, Fraction(1, 2)))) for _ in range(k)]
    return [[sum(L[i][m] * U[m][j] for m in range(k)) * s[j] for j in range(k)] for i in range(k)]


def change_basis(Q, rng):
    """Transport a zero-differential module along a random within-degree basis change."""
    assert Q.d.is_zero()
    cols = {}
    gens = []
    for deg in Q.space.degrees():
        old = Q.space.in_degree(deg)
        M = unitriangular(rng, len(old))
        for j in range(len(old)):
            name = f"g{len(gens)}"
            gens.append((name, deg))
            cols[name] = {old[i]: M[i][j] for i in range(len(old)) if M[i][j]}
    rng.shuffle(gens)
    space = GradedSpace(gens)
    f = GradedMap.from_columns(space, Q.space, 0, cols)
    omega = pullback_pairing(f, Q.pair)
    return QuadraticModule(build_complex(gens), omega, complete=False)


def random_atomic_module(rng, max_dim=6, degree_range=(-3, 3)):
    """Product of hyperbolic atoms (degrees n, -1-n inside the range), basis scrambled."""
    lo, hi = degree_range
    choices = [n for n in range(lo, hi + 1) if lo <= -1 - n <= hi]
    k = rng.randint(1, max_dim // 2)
    gens, pairs = [], []
    for i in range(k):
        n = rng.choice(choices)
        a, b = f"a{i}", f"b{i}"
        gens += [(a, n), (b, -1 - n)]
        pairs.append((a, b, rng.choice((1, 2, -3, Fraction(1, 2)))))
    C = build_complex(gens)
    omega = {(a, b): Fraction(c) for a, b, c in pairs}
    Q = QuadraticModule(C, omega)
    return change_basis(Q, rng)


def random_complex(rng, nmax=2, degs=(-1, 0, 1), tag="w"):
    """Random two-step complex in the given consecutive degrees (d² = 0 by construction)."""
    gens = []
    for d in degs:
        gens += [(f"{tag}{d}_{i}".replace("-", "m"), d) for i in range(rng.randint(0, nmax))]
    by = {d: [g for g, e in gens if e == d] for d in degs}
    triples = []
    # only the lowest step gets entries, so d² = 0 automatically
    for s in by[degs[0]]:
        for t in by[degs[1]]:
            v = rng.randint(-2, 2)
            if v:
                triples.append((s, t, v))
    return build_complex(gens, triples)


def random_cotangent(rng, nmax=2):
    return cotangent(random_complex(rng, nmax))


def random_chain_map(rng, C, D, bound=2):
    """Random degree-0 chain map C -> D from the solution space of d f = f d."""
    from bvq.core.linalg import nullspace
    unknowns = [(s, t) for s in C.space for t in D.space if C.space.degree[s] == D.space.degree[t]]
    if not unknowns:
        return GradedMap.zero(C.space, D.space)
    idx = {u: i for i, u in enumerate(unknowns)}
    eqs = []
    for s in C.space:
        # (d_D f - f d_C)(s) = 0, one equation per target generator
        eq = {}
        for (s2, t), i in idx.items():
            if s2 == s:
                for u, c in D.d.image(t).items():
                    eq.setdefault(u, {})[i] = eq.get(u, {}).get(i, 0) + c
        for s2, c in C.d.image(s).items():
            for (s3, t), i in idx.items():
                if s3 == s2:
                    eq.setdefault(t, {})[i] = eq.get(t, {}).get(i, 0) - c
        eqs += [{i: v for i, v in row.items() if v} for row in eq.values()]
    basis = nullspace(eqs, len(unknowns))
    entries = {}
    for v in basis:
        a = rng.randint(-bound, bound)
        for i, c in v.items():
            entries[unknowns[i]] = entries.get(unknowns[i], 0) + a * c
    return GradedMap(C.space, D.space, 0, entries)


def random_eta(rng, C, bound=2):
    """Random graded-symmetric degree-0 pairing on C, one side listed."""
    names = list(C.space)
    deg = C.space.degree
    eta = {}
    for i, a in enumerate(names):
        for b in names[i:]:
            if deg[a] + deg[b] == 0 and (a != b or deg[a] % 2 == 0):
                v = rng.randint(-bound, bound)
                if v:
                    eta[(a, b)] = Fraction(v)
    return eta


def pulled_back_morphism(rng, V, R):
    """A valid morphism ``(f, η): (V, ω) -> R`` with ``ω := f*ω' + ∂η``."""
    from bvq.lie1 import QuadraticMorphism, homotopy_boundary
    for _ in range(20):
        f = random_chain_map(rng, V, R.complex)
        if not f.is_zero():
            break
    F = QuadraticMorphism(f, random_eta(rng, V))
    omega = pullback_pairing(f, R.pair)
    for k, v in homotopy_boundary(V, F.eta).items():
        omega[k] = omega.get(k, 0) + v
    Q = QuadraticModule(V, {k: v for k, v in omega.items() if v}, complete=False)
    return F, Q


def random_small_complex(rng, tag):
    """Between two and four generators in degrees -1..1 with a random differential."""
    while True:
        degs = rng.choice([(-1, 0), (-1, 0, 1), (0, 1)])
        C = random_complex(rng, 2, degs=degs, tag=tag)
        if 2 <= C.dim <= 4:
            return C


def random_composable_pair(rng):
    """Valid ``F: Q -> R`` and ``G: R -> S`` on modules with at most four generators."""
    S = rng.choice([random_cotangent(rng, 1), random_atomic_module(rng, 4)])
    while S.space.dim > 4 or S.space.dim == 0:
        S = random_atomic_module(rng, 4)
    G, R = pulled_back_morphism(rng, random_small_complex(rng, "r"), S)
    F, Q = pulled_back_morphism(rng, random_small_complex(rng, "q"), R)
    if F.f.is_zero() or G.f.is_zero():
        return random_composable_pair(rng)
    return (F, G), (Q, R, S)
