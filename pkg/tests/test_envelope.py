import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvq.core.complexes import build_complex, direct_sum
from bvq.core.scalars import Poly
from bvq.envelope import (
    bind_central,
    check_axioms,
    check_bd_decomposition,
    ce_chains,
    compare_env_ce,
    u_bd,
    u_e0t,
    u_p0,
)
from bvq.errors import NotCentral, NotClosed, NotDegreeZero
from bvq.lie1 import ShiftedLieAlgebra, abelian, atom, cotangent, heisenberg, oplus, v0
from bvq.symalg import SymAlgebra, extend_operator, ops_equal
from corpus import random_atomic_module, random_cotangent
from oracles import canon, letters_of
import mutants
from mutants import MUTANTS

hbar = Poly.var("hbar")
H0 = heisenberg(v0())


def corpus():
    degenerate = heisenberg(cotangent(build_complex([("a", 0), ("b", 1)], [("a", "b", 1)])))
    return [
        ("abelian", abelian(build_complex([("x", 0), ("xi", -1)]))),
        ("heis-V0", H0),
        ("heis-V0+V1", heisenberg(oplus(v0(), atom(1, ("a", "b"))))),
        ("heis-cotangent-cone", degenerate),
    ]


def test_u_p0_examples():
    U = u_p0(H0, 4)
    A = U.alg
    assert U.bracket(A.parse("x"), A.parse("xi")) == A.parse("c")
    assert U.bracket(A.parse("x^2"), A.parse("xi")) == A.parse("2*x*c")
    A0 = u_p0(abelian(build_complex([("x", 0), ("xi", -1)])), 4)
    assert all(A0.d.on_monomial(m) == {} for m in A0.basis())


def test_u_e0t_examples():
    U = u_e0t(H0, 4)
    A = U.alg
    assert U.d(A.parse("x*xi")) == A.parse("c")
    assert U.d(A.parse("x^2*xi")) == A.parse("2*x*c")
    U.check_square_zero()


def test_u_bd_examples():
    U = u_bd(H0, 5)
    A = U.alg
    assert U.d(A.parse("x*xi")) == {A.parse("c").popitem()[0]: hbar}
    assert check_bd_decomposition(U).ok
    U.check_square_zero()


@pytest.mark.parametrize("name,g", corpus())
def test_bd_interpolates_p0_and_e0t(name, g):
    U = u_bd(g, 5)
    P = bind_central(U, {"hbar": 0})
    E = bind_central(U, {"hbar": 1})
    assert P.kind == "P0" and E.kind == "E0t"
    assert P.same_differential(u_p0(g, 5))
    assert E.same_differential(u_e0t(g, 5))


@pytest.mark.parametrize("name,g", corpus())
def test_env_equals_ce(name, g):
    assert compare_env_ce(g, 5)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15)
def test_env_equals_ce_random(seed):
    rng = random.Random(seed)
    for Q in (random_atomic_module(rng, 4), random_cotangent(rng)):
        assert compare_env_ce(heisenberg(Q), 4)
        assert compare_env_ce(abelian(Q.complex), 4)


def test_ce_examples():
    C = build_complex([("a", 0), ("b", 1)], [("a", "b", 1)])
    U = ce_chains(abelian(C), 4)
    assert U.d(U.alg.parse("a^2")) == U.alg.parse("2*a*b")
    assert check_axioms(U).ok
    V = ce_chains(H0, 4)
    # d(x·xi) = (dx)xi + x(dxi) + [x, xi]
    assert V.d(V.alg.parse("x*xi")) == V.alg.parse("c")


def contraction_oracle(g, alg, m):
    """Σ over letter pairs of ±[w_i, w_j]·rest, signs from moving the pair to the front."""
    word = letters_of(alg, m)
    out = {}
    for i, j in itertools.combinations(range(len(word)), 2):
        rest = [word[k] for k in range(len(word)) if k not in (i, j)]
        s, _ = canon(alg, [word[i], word[j]] + rest)
        sw, _ = canon(alg, word)
        # multiplicities: the word already repeats even letters
        for t, c in g.bracket_gens(word[i], word[j]).items():
            st_, mo = canon(alg, [t] + rest)
            if st_:
                out[mo] = out.get(mo, 0) + s * sw * st_ * c
    return {k: v for k, v in out.items() if v}


def test_ce_weight_three_matches_contraction_sum():
    g = heisenberg(oplus(v0(), v0()))
    U = ce_chains(g, 4)
    A = U.alg
    for m in A.basis():
        if sum(m) == 3:
            assert U.d.on_monomial(m) == contraction_oracle(g, A, m), A.format_monomial(m)


def test_bind_central_examples():
    U = bind_central(u_bd(H0, 6), {"hbar": 1, "c": 1})
    A = U.alg
    assert A.names == ("xi", "x")
    lap = extend_operator(SymAlgebra(A.space, 6), {("x", "xi"): {1: 1}})
    assert ops_equal(U.d, lap, A.basis())
    Z = bind_central(u_e0t(H0, 6), {"c": 0})
    assert all(Z.d.on_monomial(m) == {} for m in Z.basis())


def test_bind_central_preconditions():
    U = u_bd(H0, 3)
    with pytest.raises(NotCentral):
        bind_central(U, {"x": 1})
    with pytest.raises(NotDegreeZero):
        bind_central(U, {"xi": 1})
    C = abelian(build_complex([("a", 0), ("b", 1)], [("a", "b", 1)]))
    with pytest.raises(NotClosed):
        bind_central(u_p0(C, 3), {"a": 1})


@pytest.mark.parametrize("name,g", corpus())
@pytest.mark.parametrize("flavour", [u_p0, u_e0t, u_bd, ce_chains])
def test_axioms_hold_on_corpus(name, g, flavour):
    U = flavour(g, 5)
    assert check_axioms(U).ok, str(check_axioms(U))
    assert U.d.preserves_truncation()
    if U.kind == "BD":
        for v in (0, 1, Fraction(1, 2)):
            assert check_axioms(bind_central(U, {"hbar": v})).ok


@pytest.mark.parametrize("flavour", [u_p0, u_e0t, u_bd])
def test_monoidality_of_envelopes(flavour):
    g1 = heisenberg(v0())
    g2 = heisenberg(atom(1, ("a", "b")), central_name="k")
    C = direct_sum(g1.complex, g2.complex)
    table = dict(g1.table)
    table.update(g2.table)
    g = ShiftedLieAlgebra(C, table)
    N = 4
    U, U1, U2 = flavour(g, N), flavour(g1, N), flavour(g2, N)
    A, A1, A2 = U.alg, U1.alg, U2.alg

    def psi(m1, m2):
        e = [0] * A.n
        for j, n in enumerate(A1.names):
            e[A.space.index[n]] = m1[j]
        for j, n in enumerate(A2.names):
            e[A.space.index[n]] = m2[j]
        return e

    def emb(p, left):
        out = {}
        for m, c in p.items():
            e = psi(m, A2.unit) if left else psi(A1.unit, m)
            out[tuple(e)] = c
        return out

    for m1 in A1.basis():
        for m2 in A2.with_cutoff(N - sum(m1)).basis():
            prod = A.mul_elements(emb({m1: 1}, True), emb({m2: 1}, False))
            lhs = U.d(prod)
            rhs = A.mul_elements(emb(U1.d.on_monomial(m1), True), emb({m2: 1}, False))
            s = -1 if A1.degree(m1) % 2 else 1
            for k, v in A.mul_elements(emb({m1: 1}, True), emb(U2.d.on_monomial(m2), False)).items():
                rhs[k] = rhs.get(k, 0) + s * v
            # the bracket term between the two blocks vanishes
            assert lhs == {k: v for k, v in rhs.items() if v}


# mutation suite: each broken construction must be caught with a witness


def caught(U, axiom):
    rep = check_axioms(U)
    assert not rep.ok
    assert axiom in rep.axioms_failed(), str(rep)
    v = rep.first(axiom)
    assert v.witness
    return v.witness


@pytest.mark.parametrize("name,build,axiom", MUTANTS, ids=[m[0] for m in MUTANTS])
def test_mutants_are_caught(name, build, axiom):
    caught(build(), axiom)


def test_mutant_witnesses():
    assert caught(mutants.bd_without_hbar(), "bd-relation") == ("x", "xi")
    assert caught(mutants.e0t_without_bracket(), "second-order") == ("x", "xi")
