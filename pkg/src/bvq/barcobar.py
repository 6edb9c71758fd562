"""Bar and cobar constructions, the counit, and the Heisenberg functor on morphisms.

Cobar differential.  Cobar elements live in the tensor algebra on desuspended
letters ``σ⟨c⟩`` (``c`` a reduced monomial of the bar coalgebra).  On a letter

    D σ⟨c⟩ = -σ⟨d_C c⟩ + 1/2 Σ (-1)^{|c'|} ⟦σ⟨c'⟩, σ⟨c''⟩⟧,

summed over the reduced coproduct ``Σ c' ⊗ c''``, and ``D`` is extended to
words as a degree +1 derivation.  The signs are the ones for which ``D² = 0``
and the counit ``⟨x⟩ -> x`` is a chain map; both are verified on the
truncation rather than assumed.

Morphisms.  A quadratic morphism ``(f, η)`` induces
``Φ = Sym^c(f ⊕ id_c) ∘ exp(D_η)`` between bar coalgebras of the Heisenberg
algebras, where ``D_η`` is the coderivation with corestriction
``x·y -> -η(x, y) c``.  With this sign ``[d_C, D_η] = δ_ω - δ_{f*ω'}``.
"""

from __future__ import annotations

from .core.complexes import add_into
from .core.linalg import rank
from .core.scalars import ONE, ZERO, Fraction
from .envelope import ce_chains
from .errors import InvalidMorphism, WeightNotGraded
from .lie1 import (
    FreeLie1,
    compose_morphisms,
    desuspended_bracket,
    heisenberg,
    pullback_pairing,
    validate_morphism,
)
from .reports import ValidationReport
from .symalg import (
    coproduct,
    counit,
    exp_weight_lowering,
    extend_operator,
    ops_equal,
    zero_op,
)


def _sign(n):
    return -1 if n % 2 else 1


class BarCoalgebra:
    """CE chains of ``g`` viewed as a conilpotent dg coalgebra."""

    def __init__(self, g, N):
        self.env = ce_chains(g, N)
        self.g = g
        self.alg = self.env.alg
        self.d = self.env.d
        self.cutoff = N

    def coproduct(self, p):
        return coproduct(self.alg, p)

    def coaugmentation(self, scalar=ONE):
        return {self.alg.unit: scalar} if scalar else {}

    def counit(self, p):
        return counit(self.alg, p)

    def reduced_coproduct(self, p):
        u = self.alg.unit
        return {k: v for k, v in self.coproduct(p).items() if k[0] != u and k[1] != u}

    def reduced_basis(self):
        return [m for m in self.alg.basis() if sum(m)]


def bar(g, N):
    return BarCoalgebra(g, N)


class CobarAlgebra:
    """Weight-truncated cobar construction on a bar coalgebra."""

    def __init__(self, B, N=None):
        N = B.cutoff if N is None else N
        self.bar = B
        self.cutoff = N
        alg = B.alg
        reduced = [m for m in alg.with_cutoff(N).basis() if sum(m)]
        reduced.sort(key=lambda m: (sum(m), alg.degree(m), m))
        self.letters = reduced
        self.letter_index = {m: i for i, m in enumerate(reduced)}
        self.free = FreeLie1([(alg.format_monomial(m), alg.degree(m), sum(m)) for m in reduced], N)
        self._dletter = {}
        self._dword = {}

    # differential on the tensor algebra of desuspended letters

    def d_letter(self, i):
        hit = self._dletter.get(i)
        if hit is not None:
            return hit
        B = self.bar
        alg = B.alg
        m = self.letters[i]
        out = {}
        for t, c in B.d.on_monomial(m).items():
            if sum(t):
                add_into(out, {(self.letter_index[t],): -c})
        for (a, b), c in B.reduced_coproduct({m: ONE}).items():
            la = {(self.letter_index[a],): ONE}
            lb = {(self.letter_index[b],): ONE}
            add_into(out, self.free.commutator(la, lb), Fraction(_sign(alg.degree(a))) * c / 2)
        self._dletter[i] = out
        return out

    def d_word(self, w):
        hit = self._dword.get(w)
        if hit is not None:
            return hit
        out = {}
        sd = 0
        for k, letter in enumerate(w):
            s = _sign(sd)
            for v, c in self.d_letter(letter).items():
                add_into(out, {w[:k] + v + w[k + 1:]: s * c})
            sd += self.free.sdeg[letter]
        self._dword[w] = out
        return out

    def d(self, P):
        out = {}
        for w, c in P.items():
            add_into(out, self.d_word(w), c)
        return out

    def check_square_zero(self):
        rep = ValidationReport("cobar", checked=["d^2"])
        for t, img in zip(self.free.basis, self.free.images):
            dd = self.d(self.d(img))
            if dd:
                rep.add("d^2", (self.free.tree_name(t),), str(dd))
        return rep

    def respects_filtration(self):
        F = self.free
        for img in F.images:
            w0 = max(F.word_weight(w) for w in img)
            if any(F.word_weight(w) > w0 for w in self.d(img)):
                return False
        return True

    def is_weight_graded(self):
        F = self.free
        for t, img in zip(F.basis, F.images):
            w0 = F.tree_weight(t)
            if any(F.word_weight(w) != w0 for w in self.d(img)):
                return False
        return True


def cobar(B, N=None):
    return CobarAlgebra(B, N)


def weight_cohomology(Om, w):
    """Cohomology dimensions of the weight-``w`` piece (weight-graded input only)."""
    if w > Om.cutoff:
        raise ValueError("weight above the cobar cutoff")
    if not Om.is_weight_graded():
        raise WeightNotGraded("the cobar differential mixes weights for this input")
    F = Om.free
    by_deg = {}
    for t, img in zip(F.basis, F.images):
        if F.tree_weight(t) == w:
            by_deg.setdefault(F.tree_degree(t), []).append(img)
    if not by_deg:
        return {}
    keys = {}

    def rows(imgs):
        return [{keys.setdefault(k, len(keys)): v for k, v in Om.d(img).items()} for img in imgs]

    ranks = {k: rank(rows(v)) for k, v in by_deg.items()}
    out = {}
    for k in range(min(by_deg), max(by_deg) + 1):
        n = len(by_deg.get(k, []))
        out[k] = n - ranks.get(k, 0) - ranks.get(k - 1, 0)
    return out


class CounitMap:
    """Lie morphism ``ΩB(g) -> g``: ``⟨x⟩ -> x`` on weight-one letters, zero on others."""

    def __init__(self, Om):
        self.cobar = Om
        self.g = Om.bar.g
        alg = Om.bar.alg
        self._letter = {}
        for i, m in enumerate(Om.letters):
            if sum(m) == 1:
                j = next(k for k, e in enumerate(m) if e)
                self._letter[i] = {alg.names[j]: ONE}
        self._tree = {}

    def on_tree(self, t):
        """Image in σg of a basis tree (desuspended picture)."""
        if isinstance(t, int):
            return dict(self._letter.get(t, {}))
        hit = self._tree.get(t)
        if hit is None:
            hit = desuspended_bracket(self.g, self.on_tree(t[0]), self.on_tree(t[1]))
            self._tree[t] = hit
        return hit

    def on_coordinates(self, coords):
        out = {}
        for i, c in coords.items():
            add_into(out, self.on_tree(self.cobar.free.basis[i]), c)
        return out

    def on_tensor(self, P):
        return self.on_coordinates(self.cobar.free.coordinates(P))

    def is_chain_map(self):
        """``d_{σg} φ = φ D`` with ``d_{σg}(σa) = -σ(da)``."""
        F = self.cobar.free
        for t, img in zip(F.basis, F.images):
            lhs = self.on_tensor(self.cobar.d(img))
            phi = self.on_tree(t)
            rhs = {}
            for a, c in phi.items():
                add_into(rhs, self.g.d.image(a), -c)
            if add_into(lhs, rhs, -ONE):
                return False
        return True

    def is_lie_morphism(self):
        F = self.cobar.free
        for i, ti in enumerate(F.basis):
            for j, tj in enumerate(F.basis):
                if F.tree_weight(ti) + F.tree_weight(tj) > F.cutoff:
                    continue
                lhs = self.on_tensor(F.commutator(F.images[i], F.images[j]))
                rhs = desuspended_bracket(self.g, self.on_tree(ti), self.on_tree(tj))
                if add_into(lhs, rhs, -ONE):
                    return False
        return True


def counit_map(g, N):
    return CounitMap(cobar(bar(g, N), N))


# Heisenberg functor on morphisms


class CoalgebraMorphism:
    """Linear map between two truncated symmetric coalgebras, memoized."""

    def __init__(self, source, target, func, cutoff):
        self.source = source
        self.target = target
        self._func = func
        self._cache = {}
        self.cutoff = cutoff

    def on_monomial(self, m):
        hit = self._cache.get(m)
        if hit is None:
            hit = self._cache[m] = self._func(m)
        return hit

    def __call__(self, p):
        out = {}
        for m, c in p.items():
            add_into(out, self.on_monomial(m), c)
        return out

    def compose(self, other):
        """``self ∘ other``."""
        return CoalgebraMorphism(other.source, self.target,
                                 lambda m: self(other.on_monomial(m)), self.cutoff)

    def basis(self):
        return self.source.with_cutoff(self.cutoff).basis()

    def equals(self, other):
        for m in self.basis():
            if add_into(dict(self.on_monomial(m)), other.on_monomial(m), -ONE):
                return False
        return True

    def is_coalgebra_map(self):
        S, T = self.source, self.target
        for m in self.basis():
            img = self.on_monomial(m)
            lhs = coproduct(T, img)
            rhs = {}
            for (a, b), c in coproduct(S, {m: ONE}).items():
                fa, fb = self.on_monomial(a), self.on_monomial(b)
                for a2, ca in fa.items():
                    for b2, cb in fb.items():
                        add_into(rhs, {(a2, b2): c * ca * cb})
            if add_into(lhs, rhs, -ONE):
                return False
            if counit(T, img) != (ONE if m == S.unit else ZERO):
                return False
        return True

    def is_chain_map(self, d_source, d_target):
        for m in self.basis():
            lhs = d_target(self.on_monomial(m))
            if add_into(lhs, self(d_source.on_monomial(m)), -ONE):
                return False
        return True


def sym_map(source, target, images, cutoff):
    """Algebra (and coalgebra) map ``Sym(f)`` given generator images."""
    gens = [images.get(n, {}) for n in source.names]

    def func(m):
        out = target.one()
        for i, e in enumerate(m):
            for _ in range(e):
                out = target.mul_elements(out, gens[i])
                if not out:
                    return {}
        return out

    return CoalgebraMorphism(source, target, func, cutoff)


def _arity_two(alg, table, central, degree):
    """Coderivation ``x·y -> table(x, y)·c`` (``table`` symmetric)."""
    names = alg.space.names
    cores = {}
    for i, a in enumerate(names):
        for b in names[i:]:
            v = table.get((a, b), ZERO)
            if v:
                cores[(a, b)] = {central: v}
    return extend_operator(alg, cores, degree=degree)


def _arity_one(alg, complex_):
    cores = {n: complex_.d.image(n) for n in complex_.space if complex_.d.image(n)}
    return extend_operator(alg, cores, degree=1)


class HeisenbergMorphism:
    """``Φ = Sym^c(f ⊕ id_c) ∘ exp(D_η)`` together with its checked hypotheses."""

    def __init__(self, F, Q, R, N):
        rep = validate_morphism(F, Q, R)
        if not rep.ok:
            raise InvalidMorphism(str(rep))
        self.F, self.Q, self.R, self.N = F, Q, R, N
        gs, gt = heisenberg(Q), heisenberg(R)
        self.bar_source, self.bar_target = bar(gs, N), bar(gt, N)
        S, T = self.bar_source.alg, self.bar_target.alg
        cs, ct = gs.central, gt.central
        self.d_C = _arity_one(S, Q.complex) if not Q.d.is_zero() else zero_op(S, 1)
        self.delta_omega = _arity_two(S, Q.omega, cs, 1)
        self.delta_pull = _arity_two(S, pullback_pairing(F.f, R.pair), cs, 1)
        self.D_eta = _arity_two(S, {k: -v for k, v in F.eta.items()}, cs, 0)
        self.exp_D = exp_weight_lowering(self.D_eta)
        images = {n: F.f.image(n) for n in Q.space}
        images = {n: {T.gen(t): c for t, c in img.items()} for n, img in images.items()}
        images[cs] = {T.gen(ct): ONE}
        self.sym_f = sym_map(S, T, images, N)
        exp_D = self.exp_D
        self.phi = CoalgebraMorphism(S, T, lambda m: self.sym_f(exp_D.on_monomial(m)), N)

    def hypotheses(self):
        """The three commutator identities needed before exponentiating."""
        basis = self.bar_source.alg.basis()
        rep = ValidationReport("exp-hypotheses",
                               checked=["[d_C,D]=δω-δf*ω'", "[D,δω]=0", "[D,δf*ω']=0"])
        lhs = self.d_C.commutator(self.D_eta)
        rhs = self.delta_omega - self.delta_pull
        if not ops_equal(lhs, rhs, basis):
            rep.add("[d_C,D]=δω-δf*ω'", (), "commutator identity fails")
        zero = zero_op(self.bar_source.alg, 1)
        if not ops_equal(self.D_eta.commutator(self.delta_omega), zero, basis):
            rep.add("[D,δω]=0", (), "commutator does not vanish")
        if not ops_equal(self.D_eta.commutator(self.delta_pull), zero, basis):
            rep.add("[D,δf*ω']=0", (), "commutator does not vanish")
        return rep

    def conjugation_holds(self):
        """``(d_C + δ_{f*ω'}) exp(D) = exp(D) (d_C + δ_ω)`` on the truncation."""
        basis = self.bar_source.alg.basis()
        left = (self.d_C + self.delta_pull).compose(self.exp_D)
        right = self.exp_D.compose(self.d_C + self.delta_omega)
        return ops_equal(left, right, basis)

    def is_coalgebra_chain_map(self):
        return (self.phi.is_coalgebra_map()
                and self.phi.is_chain_map(self.bar_source.d, self.bar_target.d))


def heis_on_morphism(F, Q, R, N):
    """The coalgebra morphism ``bar(heisenberg(Q)) -> bar(heisenberg(R))``."""
    H = HeisenbergMorphism(F, Q, R, N)
    H.phi.construction = H
    return H.phi


def check_composition(F, G, Q, R, S, N):
    """``Φ(G∘F) = Φ(G) ∘ Φ(F)`` on the weight-``<= N`` basis."""
    for M, A, B in ((F, Q, R), (G, R, S)):
        rep = validate_morphism(M, A, B)
        if not rep.ok:
            raise InvalidMorphism(str(rep))
    GF = compose_morphisms(G, F)
    direct = heis_on_morphism(GF, Q, S, N)
    composite = heis_on_morphism(G, R, S, N).compose(heis_on_morphism(F, Q, R, N))
    return direct.equals(composite)
