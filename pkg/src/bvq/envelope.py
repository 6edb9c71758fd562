"""Enveloping algebras of shifted Lie algebras and Chevalley–Eilenberg chains.

Four flavours live on the weight truncation ``Sym^{<=N}(g)``:

* ``P0``  – the derivation extension ``d`` of ``d_g`` plus the biderivation
  bracket ``{,}``;
* ``E0t`` – ``d(x·m) = (dx)m + (-1)^|x| x·d(m) + {x, m}``;
* ``BD``  – the same with the bracket term multiplied by ``hbar``; it is
  stored as ``d = d0 + hbar·d1``;
* ``CE``  – the coderivation of ``Sym^c(g)`` with corestrictions ``d_g`` on
  arity one and ``[,]`` on arity two.

The algebra flavours are built from the recursion above on the first letter
of each monomial, independently of the coderivation formula used for CE, so
that their agreement is a real check.
"""

from __future__ import annotations

import random

from .core.complexes import add_into
from .core.scalars import ONE, ZERO, Fraction, Poly, specialize
from .errors import DSquaredNonzero, NotCentral, NotClosed, NotDegreeZero
from .reports import ValidationReport
from .symalg import (
    Biderivation,
    LinearOp,
    SymAlgebra,
    coderivation_defect,
    extend_operator,
    ops_equal,
)

HBAR = Poly.var("hbar")


def _sign(n):
    return -1 if n % 2 else 1


def leibniz_differential(alg, g, use_d=True, bracket=None, koszul=True, name="d"):
    """Operator defined by ``d(x·m) = [dx·m] + (-1)^|x| x·d(m) + [{x, m}]``.

    ``x`` is the first letter of the monomial, so ``x·m`` needs no reordering.
    """
    dg = {}
    if use_d:
        for n in g.space:
            img = g.d.image(n)
            if img:
                dg[alg.space.index[n]] = {alg.gen(t): c for t, c in img.items()}
    degs = alg.degs

    op = None

    def f(m):
        for i, e in enumerate(m):
            if e:
                break
        else:
            return {}
        rest = list(m)
        rest[i] -= 1
        rest = tuple(rest)
        x = alg.gen_index(i)
        out = {}
        if i in dg:
            add_into(out, alg.mul_elements(dg[i], {rest: ONE}))
        if sum(rest):
            inner = op.on_monomial(rest)
            if inner:
                s = _sign(degs[i]) if koszul else 1
                add_into(out, alg.mul_elements({x: ONE}, inner), Fraction(s))
            if bracket is not None:
                add_into(out, bracket.gen_right(i, rest))
        return out

    op = LinearOp(alg, 1, f, name)
    return op


def bracket_table(g, alg=None):
    """Generator bracket table of ``g`` as elements of ``Sym(g)``."""
    alg = alg or SymAlgebra(g.space)
    return {(a, b): {alg.gen(t): c for t, c in val.items()} for (a, b), val in g.table.items()}


class EnvelopedAlgebra:
    """A flavour of enveloping algebra on ``Sym^{<=N}(g)``.

    ``d`` is the differential, ``bracket`` a :class:`Biderivation` (or ``None``
    for CE), ``hbar`` the scalar multiplying the bracket term of the
    differential (``HBAR`` when formal).
    """

    def __init__(self, kind, g, alg, d, bracket=None, hbar=None, d0=None, d1=None, bound=None):
        self.kind = kind
        self.g = g
        self.alg = alg
        self.d = d
        self.bracket = bracket
        self.hbar = hbar
        self.d0 = d0
        self.d1 = d1
        self.bound = dict(bound or {})

    @property
    def cutoff(self):
        return self.alg.cutoff

    def basis(self):
        return self.alg.basis()

    def matrix(self):
        """``{monomial: d(monomial)}`` over the truncation basis."""
        return {m: self.d.on_monomial(m) for m in self.basis()}

    def same_differential(self, other):
        return self.basis() == other.basis() and ops_equal(self.d, other.d, self.basis())

    def check_square_zero(self):
        for m in self.basis():
            dd = self.d(self.d.on_monomial(m))
            if dd:
                raise DSquaredNonzero(f"d² of {self.alg.format_monomial(m)} is {self.alg.format(dd)}",
                                      witness=m)

    def __repr__(self):
        return f"EnvelopedAlgebra({self.kind}, N={self.cutoff}, bound={self.bound})"


def _parts(g, N):
    alg = SymAlgebra(g.space, N)
    br = Biderivation(alg, bracket_table(g, alg))
    return alg, br


def u_p0(g, N):
    alg, br = _parts(g, N)
    d = leibniz_differential(alg, g, True, None, name="d_P0")
    return EnvelopedAlgebra("P0", g, alg, d, br, hbar=ZERO, d0=d)


def u_e0t(g, N):
    alg, br = _parts(g, N)
    d = leibniz_differential(alg, g, True, br, name="d_E0t")
    return EnvelopedAlgebra("E0t", g, alg, d, br, hbar=ONE)


def u_bd(g, N):
    alg, br = _parts(g, N)
    d0 = leibniz_differential(alg, g, True, None, name="d0")
    d1 = leibniz_differential(alg, g, False, br, name="d1")
    d = d0 + d1.scale(HBAR)
    d.name = "d_BD"
    U = EnvelopedAlgebra("BD", g, alg, d, br, hbar=HBAR, d0=d0, d1=d1)
    return U


def check_bd_decomposition(U):
    """``d0² = d1² = d0d1 + d1d0 = 0`` on the truncation basis."""
    rep = ValidationReport("bd-decomposition", checked=["d0^2", "d1^2", "d0d1+d1d0"])
    for m in U.basis():
        a = U.d0(U.d0.on_monomial(m))
        b = U.d1(U.d1.on_monomial(m))
        c = U.d0(U.d1.on_monomial(m))
        add_into(c, U.d1(U.d0.on_monomial(m)))
        for label, v in (("d0^2", a), ("d1^2", b), ("d0d1+d1d0", c)):
            if v:
                rep.add(label, (U.alg.format_monomial(m),), U.alg.format(v))
    return rep


def ce_chains(g, N):
    """CE chains: the coderivation with corestrictions ``d_g`` and ``[,]``."""
    alg = SymAlgebra(g.space, N)
    cores = {}
    for n in g.space:
        img = g.d.image(n)
        if img:
            cores[n] = img
    names = g.space.names
    for i, a in enumerate(names):
        for b in names[i:]:
            val = g.bracket_gens(a, b)
            if val:
                cores[(a, b)] = val
    d = extend_operator(alg, cores, degree=1, name="d_CL")
    return EnvelopedAlgebra("CE", g, alg, d, None)


def compare_env_ce(g, N):
    return u_e0t(g, N).same_differential(ce_chains(g, N))


# central binding


class _BoundBracket:
    def __init__(self, parent, embed, project):
        self.parent = parent
        self.embed = embed
        self.project = project

    def __call__(self, p, q):
        return self.project(self.parent(self.embed(p), self.embed(q)))

    def gen_right(self, i, m):  # pragma: no cover - only used by constructions
        raise NotImplementedError


def bind_central(U, binding):
    """Substitute values for ``hbar`` and/or central generators.

    ``binding`` maps ``"hbar"`` and generator names (e.g. ``"c"``) to
    rationals.  A bound generator must have degree 0, be closed and be
    central; monomials containing it collapse (``c^k -> value^k``).
    """
    binding = dict(binding)
    hval = binding.pop("hbar", None)
    g = U.g
    for name in binding:
        if name not in g.space:
            raise NotCentral(f"{name!r} is not a generator")
        if g.space.degree[name] != 0:
            raise NotDegreeZero(f"{name!r} has degree {g.space.degree[name]}")
        if g.d.image(name):
            raise NotClosed(f"d({name}) = {g.d.image(name)} is not zero")
        for other in g.space:
            if g.bracket_gens(name, other) or g.bracket_gens(other, name):
                raise NotCentral(f"[{name},{other}] is not zero")
    d, d0, d1, hbar = U.d, U.d0, U.d1, U.hbar
    kind = U.kind
    if hval is not None:
        hval = Fraction(hval)
        values = {"hbar": hval}
        d = d.specialize(values)
        hbar = specialize(U.hbar, values) if U.hbar is not None else None
        if kind == "BD":
            kind = "P0" if hval == 0 else ("E0t" if hval == 1 else "BD")
    if not binding:
        out = EnvelopedAlgebra(kind, g, U.alg, d, U.bracket, hbar, d0, d1, {**U.bound, "hbar": hval})
        out.check_square_zero()
        return out

    parent = U.alg
    kept = [(n, deg) for n, deg in parent.space.declared if n not in binding]
    alg = SymAlgebra(kept, parent.cutoff)
    pos = [parent.space.index[n] for n in alg.names]
    bound_pos = [(parent.space.index[n], Fraction(v)) for n, v in binding.items()]

    def embed_mono(m):
        e = [0] * parent.n
        for j, i in enumerate(pos):
            e[i] = m[j]
        return tuple(e)

    def embed(p):
        return {embed_mono(m): c for m, c in p.items()}

    def project(p):
        out = {}
        for m, c in p.items():
            for i, v in bound_pos:
                if m[i]:
                    c = c * v ** m[i]
            if not c:
                continue
            key = tuple(m[i] for i in pos)
            x = out.get(key, ZERO) + c
            if x:
                out[key] = x
            else:
                out.pop(key, None)
        return out

    def lift(op):
        if op is None:
            return None
        if hval is not None:
            op = op.specialize({"hbar": hval})
        return LinearOp(alg, op.degree, lambda m: project(op.on_monomial(embed_mono(m))), op.name)

    new_d = LinearOp(alg, 1, lambda m: project(d.on_monomial(embed_mono(m))), d.name)
    bracket = _BoundBracket(U.bracket, embed, project) if U.bracket is not None else None
    bound = {**U.bound, **binding}
    if hval is not None:
        bound["hbar"] = hval
    out = EnvelopedAlgebra(kind, g, alg, new_d, bracket, hbar, lift(d0), lift(d1), bound)
    out.embed, out.project = embed, project
    out.check_square_zero()
    return out


# axiom checks


def _pairs(U, rng, samples):
    """Generator x basis pairs plus seeded random basis pairs, weight-capped."""
    alg = U.alg
    N = alg.cutoff
    basis = alg.basis()
    gens = [alg.gen(n) for n, _ in alg.space.declared]
    pairs = []
    for a in gens:
        for b in gens:
            pairs.append((a, b))
    for a in gens:
        for b in basis:
            if sum(b) + 1 <= N and sum(b) > 1:
                pairs.append((a, b))
    if len(basis) > 1:
        for _ in range(samples):
            a, b = rng.choice(basis), rng.choice(basis)
            if sum(a) + sum(b) <= N:
                pairs.append((a, b))
    return pairs


def check_axioms(U, samples=200, seed=0):
    """Verify the defining relations of ``U`` on its truncation.

    Generator pairs and triples are checked exhaustively, higher monomials on
    a seeded random sample.  Witnesses are monomials rendered as strings.
    """
    alg = U.alg
    N = alg.cutoff
    fmt = alg.format_monomial
    rng = random.Random(seed)
    rep = ValidationReport(f"{U.kind}-axioms")
    basis = alg.basis()
    deg = alg.degree

    rep.checked.append("d^2")
    for m in basis:
        dd = U.d(U.d.on_monomial(m))
        if dd:
            rep.add("d^2", (fmt(m),), alg.format(dd))
            break

    pairs = _pairs(U, rng, samples)
    rep.checked.append("graded-commutativity")
    for a, b in pairs:
        ab = alg.mul_elements({a: ONE}, {b: ONE})
        ba = alg.mul_elements({b: ONE}, {a: ONE})
        if add_into(ab, ba, Fraction(-_sign(deg(a) * deg(b)))):
            rep.add("graded-commutativity", (fmt(a), fmt(b)), alg.format(ab))

    if U.kind == "CE":
        rep.checked.append("coderivation")
        bad = coderivation_defect(U.d)
        if bad is not None:
            rep.add("coderivation", (fmt(bad),), "Δd != (d⊗1 + 1⊗d)Δ")
        return rep

    br = U.bracket
    if U.kind == "P0":
        hbar_term = ZERO
        law = "derivation"
    elif U.kind == "E0t":
        hbar_term = ONE
        law = "second-order"
    else:
        hbar_term = U.hbar
        law = "bd-relation"
    rep.checked.append(law)
    for a, b in pairs:
        ab = alg.mul_elements({a: ONE}, {b: ONE})
        if not ab:
            continue
        lhs = U.d(ab)
        rhs = alg.mul_elements(U.d.on_monomial(a), {b: ONE})
        add_into(rhs, alg.mul_elements({a: ONE}, U.d.on_monomial(b)), Fraction(_sign(deg(a))))
        if hbar_term:
            add_into(rhs, br({a: ONE}, {b: ONE}), hbar_term)
        if add_into(lhs, rhs, -ONE):
            rep.add(law, (fmt(a), fmt(b)), alg.format(lhs))

    # bracket axioms, shared by every flavour with a bracket
    rep.checked += ["bracket-symmetry", "biderivation", "jacobi", "bracket-chain"]
    for a, b in pairs:
        if sum(a) + sum(b) > N + 2:
            continue
        x = br({a: ONE}, {b: ONE})
        y = br({b: ONE}, {a: ONE})
        if add_into(dict(x), y, Fraction(-_sign(deg(a) * deg(b)))):
            rep.add("bracket-symmetry", (fmt(a), fmt(b)), alg.format(x))
    gens = [alg.gen(n) for n, _ in alg.space.declared]
    triples = [(a, b, c) for a in gens for b in gens for c in gens]
    for _ in range(samples):
        a, b, c = rng.choice(basis), rng.choice(basis), rng.choice(basis)
        if sum(a) + sum(b) + sum(c) <= N + 2:
            triples.append((a, b, c))
    for a, b, c in triples:
        # {a, bc} = {a,b}c + (-1)^{(|a|+1)|b|} b{a,c}
        bc = alg.mul_elements({b: ONE}, {c: ONE})
        if bc:
            lhs = br({a: ONE}, bc)
            rhs = alg.mul_elements(br({a: ONE}, {b: ONE}), {c: ONE})
            add_into(rhs, alg.mul_elements({b: ONE}, br({a: ONE}, {c: ONE})),
                     Fraction(_sign((deg(a) + 1) * deg(b))))
            if add_into(lhs, rhs, -ONE):
                rep.add("biderivation", (fmt(a), fmt(b), fmt(c)), alg.format(lhs))
        # Jacobi after desuspension: ⟦σp,σq⟧ = (-1)^{|p|} σ{p,q}
        sa, sb = deg(a) + 1, deg(b) + 1
        bc_ = br({b: ONE}, {c: ONE})
        lhs = _scale(br({a: ONE}, bc_), _sign(deg(a) + deg(b)))
        ab_ = br({a: ONE}, {b: ONE})
        rhs = _scale(br(ab_, {c: ONE}), _sign(deg(a) + deg(a) + deg(b) + 1))
        ac_ = br({a: ONE}, {c: ONE})
        add_into(rhs, _scale(br({b: ONE}, ac_), _sign(deg(b) + deg(a))), Fraction(_sign(sa * sb)))
        if add_into(lhs, rhs, -ONE):
            rep.add("jacobi", (fmt(a), fmt(b), fmt(c)), alg.format(lhs))
    # the classical differential is a derivation of the bracket:
    # d0{a,b} = -{d0 a, b} - (-1)^{|a|} {a, d0 b}
    d0 = U.d0 if U.d0 is not None else None
    if d0 is not None:
        for a, b in pairs:
            lhs = d0(br({a: ONE}, {b: ONE}))
            rhs = br(d0.on_monomial(a), {b: ONE})
            add_into(rhs, br({a: ONE}, d0.on_monomial(b)), Fraction(_sign(deg(a))))
            if add_into(lhs, rhs):
                rep.add("bracket-chain", (fmt(a), fmt(b)), alg.format(lhs))
    return rep


def _scale(p, s):
    return {k: s * v for k, v in p.items()}

