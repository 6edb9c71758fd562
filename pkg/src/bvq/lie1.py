"""Shifted Lie algebras, quadratic modules and the Heisenberg construction.

Bracket convention.  A shifted Lie bracket has degree +1 and is transported
to an ordinary graded Lie bracket on the desuspension ``σg`` (``|σa| = |a|+1``)
by ``⟦σa, σb⟧ = (-1)**|a| σ[a, b]`` with differential ``d(σa) = -σ(da)``.
Transporting the axioms back gives, on homogeneous elements,

* symmetry      ``[a, b] = (-1)**(|a||b|) [b, a]``
* chain rule    ``d[a, b] = -[da, b] - (-1)**|a| [a, db]``

and Jacobi is checked on the desuspension directly.  For a pairing ``ω`` of
degree -1 (degrees summing to -1) symmetry reads ``ω(y, x) = ω(x, y)``, so
the Heisenberg bracket ``[x, y] = ω(x, y)c`` satisfies the axioms exactly
when ``ω`` is symmetric in this sense and ``ω(dx, y) + (-1)**|x| ω(x, dy) = 0``.

Homotopies ``η`` of a quadratic morphism are graded-symmetric pairings of
degree 0 and satisfy ``η(dx, y) + (-1)**|x| η(x, dy) = ω(x, y) - ω'(fx, fy)``.
"""

from __future__ import annotations

from .core.complexes import (
    GradedComplex,
    GradedMap,
    GradedSpace,
    add_into,
    build_complex,
    check_chain_map,
    cohomology,
    cone,
    direct_sum,
)
from .core.linalg import CoordinateSolver, rank, rref
from .core.scalars import ONE, ZERO, Fraction, format_scalar, parse_scalar, specialize, to_rational
from .errors import (
    DegeneratePairing,
    DegreeMismatch,
    InvalidQuadraticModule,
    NonzeroDifferential,
    ValidationError,
)
from .reports import ValidationReport


def _sign(n):
    return -1 if n % 2 else 1


def _scaled(vec, c):
    return {k: c * v for k, v in vec.items() if c * v}


# shifted Lie algebras


class ShiftedLieAlgebra:
    """Finite-dimensional dg Lie₁-algebra given by a bracket table on generators."""

    def __init__(self, complex_, bracket=None, central=None):
        self.complex = complex_
        self.space = complex_.space
        self.d = complex_.d
        self.table = {}
        for (a, b), val in (bracket or {}).items():
            val = {k: v for k, v in val.items() if v}
            if not val:
                continue
            for k in val:
                if k not in self.space:
                    raise ValidationError(f"bracket value uses unknown generator {k!r}")
                if self.space.degree[k] != self.space.degree[a] + self.space.degree[b] + 1:
                    raise DegreeMismatch(f"[{a},{b}] lands in degree {self.space.degree[k]}, "
                                         f"expected {self.space.degree[a] + self.space.degree[b] + 1}")
            self.table[(a, b)] = val
        self.central = central

    @property
    def names(self):
        return self.space.names

    def deg(self, name):
        return self.space.degree[name]

    def bracket_gens(self, a, b):
        return dict(self.table.get((a, b), {}))

    def bracket(self, u, v):
        out = {}
        for a, ca in u.items():
            for b, cb in v.items():
                val = self.table.get((a, b))
                if val:
                    add_into(out, val, ca * cb)
        return out

    def is_abelian(self):
        return not self.table

    def specialize(self, values):
        table = {k: {n: specialize(c, values) for n, c in v.items()} for k, v in self.table.items()}
        return ShiftedLieAlgebra(self.complex.specialize(values), table, self.central)

    def __repr__(self):
        return f"ShiftedLieAlgebra({self.space!r}, {len(self.table)} bracket entries)"


def abelian(complex_):
    return ShiftedLieAlgebra(complex_, {})


def desuspended_bracket(L, u, v):
    """``⟦σu, σv⟧`` expressed in σ-coordinates (same keys as ``L``)."""
    out = {}
    for a, ca in u.items():
        add_into(out, L.bracket({a: ONE}, v), _sign(L.deg(a)) * ca)
    return out


def validate_lie1(L):
    """Check symmetry, Jacobi (on the desuspension) and the chain rule."""
    rep = ValidationReport("lie1", checked=["symmetry", "jacobi", "chain"])
    # declared order keeps witnesses in the order the user wrote them
    names = [n for n, _ in L.space.declared]
    deg = L.deg
    for i, a in enumerate(names):
        for b in names[i:]:
            lhs = L.bracket_gens(a, b)
            rhs = _scaled(L.bracket_gens(b, a), _sign(deg(a) * deg(b)))
            if add_into(dict(lhs), rhs, -ONE):
                rep.add("symmetry", (a, b), f"[{a},{b}] = {lhs}, [{b},{a}] = {L.bracket_gens(b, a)}")
    # Jacobi on σg: ⟦X,⟦Y,Z⟧⟧ = ⟦⟦X,Y⟧,Z⟧ + (-1)^{|X||Y|}⟦Y,⟦X,Z⟧⟧
    sd = {n: deg(n) + 1 for n in names}
    for a in names:
        for b in names:
            ab = desuspended_bracket(L, {a: ONE}, {b: ONE})
            for c in names:
                bc = desuspended_bracket(L, {b: ONE}, {c: ONE})
                ac = desuspended_bracket(L, {a: ONE}, {c: ONE})
                lhs = desuspended_bracket(L, {a: ONE}, bc)
                rhs = desuspended_bracket(L, ab, {c: ONE})
                add_into(rhs, desuspended_bracket(L, {b: ONE}, ac), _sign(sd[a] * sd[b]))
                if add_into(lhs, rhs, -ONE):
                    rep.add("jacobi", (a, b, c), f"defect {lhs}")
    for a in names:
        for b in names:
            lhs = L.d.apply(L.bracket_gens(a, b))
            rhs = L.bracket(L.d.image(a), {b: ONE})
            add_into(rhs, L.bracket({a: ONE}, L.d.image(b)), _sign(deg(a)))
            if add_into(lhs, rhs):
                rep.add("chain", (a, b), f"d[{a},{b}] + [da,{b}] ± [{a},db] = {lhs}")
    return rep


# quadratic modules


class QuadraticModule:
    """A complex ``V`` with a degree -1 symmetric pairing ``ω``.

    ``pairing`` entries may be given on one side only; the mirrored entry is
    filled in by the symmetry rule unless it is given explicitly.
    """

    def __init__(self, complex_, pairing=None, complete=True):
        self.complex = complex_
        self.space = complex_.space
        self.d = complex_.d
        omega = {}
        for (a, b), c in (pairing or {}).items():
            if a not in self.space or b not in self.space:
                raise ValidationError(f"pairing uses unknown generator in ({a!r}, {b!r})")
            if c:
                omega[(a, b)] = omega.get((a, b), ZERO) + c
        if complete:
            for (a, b), c in list(omega.items()):
                if (b, a) not in omega:
                    omega[(b, a)] = _sign(self.space.degree[a] * self.space.degree[b]) * c
        self.omega = {k: v for k, v in omega.items() if v}

    def __repr__(self):
        return f"QuadraticModule({self.space!r}, {len(self.omega)} pairing entries)"

    @property
    def names(self):
        return self.space.names

    def pair(self, u, v):
        out = ZERO
        for a, ca in u.items():
            for b, cb in v.items():
                w = self.omega.get((a, b))
                if w:
                    out = out + ca * cb * w
        return out

    def specialize(self, values):
        omega = {k: specialize(c, values) for k, c in self.omega.items()}
        return QuadraticModule(self.complex.specialize(values), omega, complete=False)

    def parameters(self):
        from .core.scalars import scalar_params
        out = set()
        for c in list(self.omega.values()) + list(self.d.entries.values()):
            out |= scalar_params(c)
        return out


def quadratic_module(generators, differential=(), pairing=(), parameters=()):
    """Convenience constructor; ``pairing`` is a list of ``(a, b, coefficient)``."""
    C = build_complex(generators, differential, parameters)
    omega = {}
    for a, b, c in pairing:
        if isinstance(c, (str, int)):
            c = parse_scalar(c, parameters)
        omega[(a, b)] = omega.get((a, b), ZERO) + c
    return QuadraticModule(C, omega)


def validate_quadratic(Q):
    rep = ValidationReport("quadratic", checked=["degree", "symmetry", "compatibility"])
    deg = Q.space.degree
    for (a, b), c in sorted(Q.omega.items(), key=lambda kv: (Q.space.index[kv[0][0]], Q.space.index[kv[0][1]])):
        if deg[a] + deg[b] != -1:
            rep.add("degree", (a, b), f"ω({a},{b}) = {format_scalar(c)} with degrees summing to {deg[a] + deg[b]}")
    for a in Q.names:
        for b in Q.names:
            x, y = Q.omega.get((a, b), ZERO), Q.omega.get((b, a), ZERO)
            if x - _sign(deg[a] * deg[b]) * y:
                rep.add("symmetry", (a, b), f"ω({a},{b}) = {format_scalar(x)}, ω({b},{a}) = {format_scalar(y)}")
    for a in Q.names:
        for b in Q.names:
            val = Q.pair(Q.d.image(a), {b: ONE}) + _sign(deg[a]) * Q.pair({a: ONE}, Q.d.image(b))
            if val:
                rep.add("compatibility", (a, b), f"ω(d{a},{b}) ± ω({a},d{b}) = {format_scalar(val)}")
    return rep


def heisenberg(Q, central_name="c"):
    """Central extension ``V ⊕ kc`` with ``[x, y] = ω(x, y) c``."""
    rep = validate_quadratic(Q)
    if not rep.ok:
        raise InvalidQuadraticModule(str(rep))
    name = central_name
    while name in Q.space:
        name = name + "_"
    gens = list(Q.space.declared) + [(name, 0)]
    space = GradedSpace(gens)
    d = GradedMap(space, space, 1, Q.d.entries)
    table = {(a, b): {name: c} for (a, b), c in Q.omega.items()}
    L = ShiftedLieAlgebra(GradedComplex(space, d, check=False), table, central=name)
    L.module = Q
    return L


def zero_module():
    return QuadraticModule(build_complex([]), {})


def atom(n, names=None):
    """The hyperbolic atom: generators in degrees ``n`` and ``-1-n`` with unit pairing."""
    a, b = names or (f"a{n}", f"b{n}")
    return quadratic_module([(a, n), (b, -1 - n)], [], [(a, b, 1)])


def v0():
    return quadratic_module([("x", 0), ("xi", -1)], [], [("x", "xi", 1)])


def cotangent(W, dual_suffix="*"):
    """``W ⊕ W^∨[1]``: duals ``w*`` in degree ``-|w| - 1`` with ``ω(w, w*) = 1``.

    The dual differential is fixed by compatibility with ``ω``: if ``d w_j``
    contains ``c·w_i`` then ``d w_i*`` contains ``(-1)**(|w_j|+1) c·w_j*``.
    """
    def dn(n):
        return f"{n}{dual_suffix}" if isinstance(n, str) else ("dual", n)

    gens = list(W.space.declared) + [(dn(n), -d - 1) for n, d in W.space.declared]
    space = GradedSpace(gens)
    entries = dict(W.d.entries)
    for (wj, wi), c in W.d.entries.items():
        entries[(dn(wi), dn(wj))] = _sign(W.space.degree[wj] + 1) * c
    C = GradedComplex(space, GradedMap(space, space, 1, entries))
    omega = {(n, dn(n)): ONE for n in W.space}
    return QuadraticModule(C, omega)


def oplus(Q, R):
    C = direct_sum(Q.complex, R.complex)
    clash = any(n in R.space for n in Q.space)
    left = (lambda n: ("L", n)) if clash else (lambda n: n)
    right = (lambda n: ("R", n)) if clash else (lambda n: n)
    omega = {(left(a), left(b)): c for (a, b), c in Q.omega.items()}
    omega.update({(right(a), right(b)): c for (a, b), c in R.omega.items()})
    out = QuadraticModule(C, omega, complete=False)
    out.embeddings = (left, right)
    return out


def rename(Q, mapping):
    """Relabel generators by ``mapping`` (missing names kept)."""
    f = lambda n: mapping.get(n, n)
    gens = [(f(n), d) for n, d in Q.space.declared]
    space = GradedSpace(gens)
    d = GradedMap(space, space, 1, {(f(s), f(t)): c for (s, t), c in Q.d.entries.items()})
    return QuadraticModule(GradedComplex(space, d, check=False),
                           {(f(a), f(b)): c for (a, b), c in Q.omega.items()}, complete=False)


# nondegeneracy and normal form


def omega_sharp(Q):
    """The chain map ``ω*: V -> V^∨[1]``, ``x -> Σ_y ω(x, y) ŷ`` with ``|ŷ| = -|y|-1``."""
    W = Q.complex
    target_space = GradedSpace([(("hat", n), -d - 1) for n, d in W.space.declared])
    entries = {}
    for (wj, wi), c in W.d.entries.items():
        entries[(("hat", wi), ("hat", wj))] = _sign(W.space.degree[wj] + 1) * c
    T = GradedComplex(target_space, GradedMap(target_space, target_space, 1, entries), check=False)
    f = GradedMap(W.space, target_space, 0, {(x, ("hat", y)): c for (x, y), c in Q.omega.items()})
    return f, T


def is_nondegenerate(Q, strict=False):
    """Nondegeneracy of ``ω``: by default ``ω*`` must be a quasi-isomorphism.

    With ``strict=True`` the map must be an isomorphism of graded spaces.
    """
    if Q.space.dim == 0:
        return True
    f, T = omega_sharp(Q)
    if strict:
        rows = [{T.space.index[t]: c for t, c in f.image(n).items()} for n in Q.space]
        return rank(rows) == Q.space.dim
    if not check_chain_map(f, Q.complex, T):
        return False
    K = cone(f, Q.complex, T)
    return cohomology(K).total == 0


class SymplecticAtomDecomposition:
    """Hyperbolic atoms ``(e, f)`` with ``ω(e, f) = 1`` and the change of basis."""

    def __init__(self, module, atoms):
        self.module = module
        self.atoms = atoms  # list of (degree_of_e, e_vector, f_vector)
        gens = []
        cols = {}
        for i, (n, e, f) in enumerate(atoms):
            gens.append((f"e{i}", n))
            gens.append((f"f{i}", -1 - n))
            cols[f"e{i}"] = e
            cols[f"f{i}"] = f
        self.space = GradedSpace(gens)
        self.change_of_basis = GradedMap.from_columns(self.space, module.space, 0, cols)

    def transported_pairing(self):
        cols = self.change_of_basis.columns
        out = {}
        for a in self.space:
            for b in self.space:
                v = self.module.pair(cols.get(a, {}), cols.get(b, {}))
                if v:
                    out[(a, b)] = v
        return out

    def is_atomic(self):
        expected = {}
        for i in range(len(self.atoms)):
            expected[(f"e{i}", f"f{i}")] = ONE
            expected[(f"f{i}", f"e{i}")] = ONE
        return self.transported_pairing() == expected

    def is_invertible(self):
        idx = self.module.space.index
        rows = [{idx[t]: c for t, c in self.change_of_basis.image(n).items()} for n in self.space]
        return len(rows) == self.module.space.dim and rank(rows) == len(rows)

    def atom_modules(self):
        return [atom(n, (f"e{i}", f"f{i}")) for i, (n, _, _) in enumerate(self.atoms)]


def symplectic_normal_form(Q):
    """Split a zero-differential nondegenerate module into hyperbolic atoms.

    The pairing only couples degree ``n`` with ``-1-n`` (never a degree with
    itself), so each block ``V^n x V^{-1-n}`` (``n >= 0``) is reduced on its own:
    keep a basis ``e`` of ``V^n`` and take ``f`` as the ω-dual basis.
    """
    if not Q.d.is_zero():
        raise NonzeroDifferential("symplectic normal form needs a zero differential")
    for c in Q.omega.values():
        to_rational(c, "symplectic normal form")
    deg = Q.space.degree
    atoms = []
    for n in sorted({d for d in deg.values() if d >= 0}):
        E = Q.space.in_degree(n)
        F = Q.space.in_degree(-1 - n)
        if len(E) != len(F):
            raise DegeneratePairing(f"dim V^{n} = {len(E)} but dim V^{-1 - n} = {len(F)}")
        # M[i][j] = ω(E_i, F_j); f_i = Σ_j (M^{-1})_{ji} F_j gives ω(E_k, f_i) = δ_ki
        k = len(E)
        rows = [{j: Q.omega.get((E[i], F[j]), ZERO) for j in range(k)} for i in range(k)]
        aug = []
        for i in range(k):
            r = {j: v for j, v in rows[i].items() if v}
            r[k + i] = ONE
            aug.append(r)
        red, piv = rref(aug)
        if len(piv) < k or any(p >= k for p in piv):
            raise DegeneratePairing(f"pairing block in degrees ({n}, {-1 - n}) is singular")
        inv = [[red[i].get(k + j, ZERO) for j in range(k)] for i in range(k)]  # M^{-1}
        for i in range(k):
            f = {}
            for j in range(k):
                if inv[j][i]:
                    f[F[j]] = inv[j][i]
            atoms.append((n, {E[i]: ONE}, f))
    if 2 * len(atoms) != Q.space.dim:
        raise DegeneratePairing("some generators are not paired")
    return SymplecticAtomDecomposition(Q, atoms)


# morphisms


class QuadraticMorphism:
    """A chain map ``f: V -> V'`` with a degree-0 homotopy ``η`` on ``V``."""

    def __init__(self, f, eta=None, complete=True):
        self.f = f
        eta_ = {}
        for (a, b), c in (eta or {}).items():
            if c:
                eta_[(a, b)] = eta_.get((a, b), ZERO) + c
        if complete:
            deg = f.source.degree
            for (a, b), c in list(eta_.items()):
                if (b, a) not in eta_:
                    eta_[(b, a)] = _sign(deg[a] * deg[b]) * c
        self.eta = {k: v for k, v in eta_.items() if v}

    def eta_pair(self, u, v):
        out = ZERO
        for a, ca in u.items():
            for b, cb in v.items():
                w = self.eta.get((a, b))
                if w:
                    out = out + ca * cb * w
        return out


def identity_morphism(Q):
    return QuadraticMorphism(GradedMap.identity(Q.space), {})


def pullback_pairing(f, omega_pair):
    """``(f*ω')(x, y) = ω'(fx, fy)`` as a table on the source generators."""
    out = {}
    for a in f.source:
        fa = f.image(a)
        if not fa:
            continue
        for b in f.source:
            v = omega_pair(fa, f.image(b))
            if v:
                out[(a, b)] = v
    return out


def homotopy_boundary(complex_, eta):
    """``(∂η)(x, y) = η(dx, y) + (-1)**|x| η(x, dy)`` on generator pairs."""
    sp = complex_.space

    def pair(u, v):
        out = ZERO
        for a, ca in u.items():
            for b, cb in v.items():
                w = eta.get((a, b))
                if w:
                    out = out + ca * cb * w
        return out

    out = {}
    for a in sp:
        for b in sp:
            v = pair(complex_.d.image(a), {b: ONE}) + _sign(sp.degree[a]) * pair({a: ONE}, complex_.d.image(b))
            if v:
                out[(a, b)] = v
    return out


def validate_morphism(F, Q, R):
    rep = ValidationReport("morphism", checked=["chain_map", "degree", "symmetry", "homotopy"])
    if F.f.source != Q.space or F.f.target != R.space:
        rep.add("spaces", (), "f does not map between the given modules")
        return rep
    if F.f.degree != 0 or not check_chain_map(F.f, Q.complex, R.complex):
        for a in Q.space:
            lhs = R.d.apply(F.f.image(a))
            if add_into(lhs, F.f.apply(Q.d.image(a)), -ONE):
                rep.add("chain_map", (a,), f"d f({a}) - f(d {a}) = {lhs}")
    deg = Q.space.degree
    for (a, b), c in F.eta.items():
        if deg[a] + deg[b] != 0:
            rep.add("degree", (a, b), f"η({a},{b}) with degrees summing to {deg[a] + deg[b]}")
    for a in Q.names:
        for b in Q.names:
            x, y = F.eta.get((a, b), ZERO), F.eta.get((b, a), ZERO)
            if x - _sign(deg[a] * deg[b]) * y:
                rep.add("symmetry", (a, b), f"η({a},{b}) = {format_scalar(x)}, η({b},{a}) = {format_scalar(y)}")
    bd = homotopy_boundary(Q.complex, F.eta)
    pulled = pullback_pairing(F.f, R.pair)
    for a in Q.names:
        for b in Q.names:
            defect = bd.get((a, b), ZERO) - Q.omega.get((a, b), ZERO) + pulled.get((a, b), ZERO)
            if defect:
                rep.add("homotopy", (a, b), f"(∂η - ω + f*ω')({a},{b}) = {format_scalar(defect)}")
    return rep


def compose_morphisms(G, F):
    """``G ∘ F = (g∘f, f*γ + η)``."""
    fgam = pullback_pairing(F.f, G.eta_pair)
    eta = dict(F.eta)
    add_into(eta, fgam)
    return QuadraticMorphism(G.f.compose(F.f), eta, complete=False)


# free shifted Lie algebras


def lyndon_words(n_letters, weights, max_weight):
    """Lyndon words over ``range(n_letters)`` with total weight <= ``max_weight``."""
    out = []

    def is_lyndon(w):
        return all(w < w[i:] for i in range(1, len(w)))

    def rec(prefix, wt):
        if prefix and is_lyndon(tuple(prefix)):
            out.append(tuple(prefix))
        for a in range(n_letters):
            if wt + weights[a] <= max_weight:
                prefix.append(a)
                rec(prefix, wt + weights[a])
                prefix.pop()

    rec([], 0)
    out.sort(key=lambda w: (sum(weights[a] for a in w), len(w), w))
    return out


def standard_factorization(w):
    for i in range(1, len(w)):
        v = w[i:]
        if all(v < v[j:] for j in range(1, len(v))):
            return w[:i], v
    raise ValueError("word of length one has no factorization")


class FreeLie1:
    """Weight-truncated free Lie₁-algebra on graded letters.

    Elements live in the tensor algebra on the desuspended letters ``σℓ``
    (degree ``|ℓ| + 1``) as dicts ``{word: scalar}``; the free graded Lie
    algebra is the span of iterated graded commutators.  The basis consists of
    standard bracketings of Lyndon words plus ``[u, u]`` for odd Lyndon ``u``.
    Brackets of basis elements are recorded as trees so that Lie morphisms can
    be evaluated.
    """

    def __init__(self, letters, cutoff):
        """``letters``: list of ``(name, degree, weight)``; ``cutoff``: total weight."""
        if cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        self.letters = list(letters)
        self.cutoff = cutoff
        self.lw = [w for _, _, w in self.letters]
        self.ldeg = [d for _, d, _ in self.letters]
        self.sdeg = [d + 1 for d in self.ldeg]
        trees = {}

        def tree_of(w):
            if len(w) == 1:
                return w[0]
            if w in trees:
                return trees[w]
            u, v = standard_factorization(w)
            t = (tree_of(u), tree_of(v))
            trees[w] = t
            return t

        basis = []
        for w in lyndon_words(len(self.letters), self.lw, cutoff):
            basis.append(tree_of(w))
        for w in lyndon_words(len(self.letters), self.lw, cutoff // 2):
            if sum(self.sdeg[a] for a in w) % 2:
                t = tree_of(w)
                basis.append((t, t))
        basis.sort(key=lambda t: (self.tree_weight(t), self.tree_sdeg(t)))
        self.basis = basis
        self.images = [self.tree_tensor(t) for t in basis]
        self._solver = None

    # trees

    def tree_weight(self, t):
        if isinstance(t, int):
            return self.lw[t]
        return self.tree_weight(t[0]) + self.tree_weight(t[1])

    def tree_sdeg(self, t):
        if isinstance(t, int):
            return self.sdeg[t]
        return self.tree_sdeg(t[0]) + self.tree_sdeg(t[1])

    def tree_degree(self, t):
        """Degree in the Lie₁ grading (σ-degree minus one)."""
        return self.tree_sdeg(t) - 1

    def tree_name(self, t):
        if isinstance(t, int):
            return str(self.letters[t][0])
        return f"[{self.tree_name(t[0])},{self.tree_name(t[1])}]"

    def tree_tensor(self, t):
        if isinstance(t, int):
            return {(t,): ONE}
        return self.commutator(self.tree_tensor(t[0]), self.tree_tensor(t[1]))

    # tensor algebra

    def word_sdeg(self, w):
        return sum(self.sdeg[a] for a in w)

    def word_weight(self, w):
        return sum(self.lw[a] for a in w)

    def concat(self, P, Q):
        out = {}
        for u, a in P.items():
            for v, b in Q.items():
                k = u + v
                x = out.get(k, ZERO) + a * b
                if x:
                    out[k] = x
                else:
                    out.pop(k, None)
        return out

    def commutator(self, P, Q):
        """Graded commutator ``PQ - (-1)^{|P||Q|} QP`` on homogeneous parts."""
        out = {}
        for u, a in P.items():
            du = self.word_sdeg(u)
            for v, b in Q.items():
                dv = self.word_sdeg(v)
                add_into(out, {u + v: a * b})
                add_into(out, {v + u: a * b}, Fraction(-_sign(du * dv)))
        return out

    def truncate(self, P):
        return {w: c for w, c in P.items() if self.word_weight(w) <= self.cutoff}

    @property
    def solver(self):
        if self._solver is None:
            self._solver = CoordinateSolver(self.images)
        return self._solver

    def coordinates(self, P):
        return self.solver.coordinates(self.truncate(P))

    def dimension_by_weight(self):
        out = {}
        for t in self.basis:
            w = self.tree_weight(t)
            out[w] = out.get(w, 0) + 1
        return out

    def shifted_bracket(self, P, Q, deg_P):
        """Lie₁ bracket ``[a, b] = (-1)**|a| σ⁻¹⟦σa, σb⟧`` in tensor coordinates."""
        return _scaled(self.commutator(P, Q), _sign(deg_P))

    def as_shifted_lie(self):
        """Bracket table on the basis, dropping products above the cutoff."""
        names = [self.tree_name(t) for t in self.basis]
        space = GradedSpace([(names[i], self.tree_degree(t)) for i, t in enumerate(self.basis)])
        table = {}
        for i, ti in enumerate(self.basis):
            for j, tj in enumerate(self.basis):
                if self.tree_weight(ti) + self.tree_weight(tj) > self.cutoff:
                    continue
                val = self.shifted_bracket(self.images[i], self.images[j], self.tree_degree(ti))
                if not val:
                    continue
                coords = self.coordinates(val)
                table[(names[i], names[j])] = {names[k]: c for k, c in coords.items()}
        L = ShiftedLieAlgebra(GradedComplex(space, None, check=False), table)
        L.free = self
        return L


def free_lie1(space, cutoff):
    """Free Lie₁-algebra on a graded space (letters of weight one)."""
    if not isinstance(space, GradedSpace):
        space = GradedSpace(space)
    letters = [(n, space.degree[n], 1) for n in space.names]
    return FreeLie1(letters, cutoff).as_shifted_lie()


def brute_force_free_lie_dims(letters, cutoff):
    """Dimensions by weight of the span of all iterated commutators (oracle)."""
    F = FreeLie1.__new__(FreeLie1)
    F.letters = list(letters)
    F.cutoff = cutoff
    F.lw = [w for _, _, w in letters]
    F.sdeg = [d + 1 for _, d, _ in letters]
    by_weight = {}
    for i, (_, _, w) in enumerate(letters):
        by_weight.setdefault(w, []).append({(i,): ONE})
    for w in range(2, cutoff + 1):
        elems = []
        for w1 in range(1, w):
            for P in by_weight.get(w1, []):
                for Qe in by_weight.get(w - w1, []):
                    c = F.commutator(P, Qe)
                    if c:
                        elems.append(c)
        # keep an independent spanning subset to bound the next round
        keep = []
        keys = {}
        rows = []
        for e in elems:
            row = {keys.setdefault(k, len(keys)): v for k, v in e.items()}
            if rank(rows + [row]) > len(rows):
                rows.append(row)
                keep.append(e)
        by_weight[w] = keep
    return {w: len(v) for w, v in by_weight.items() if v}
