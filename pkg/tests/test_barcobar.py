import random
from fractions import Fraction

import pytest

from bvq.barcobar import (
    HeisenbergMorphism,
    bar,
    check_composition,
    cobar,
    counit_map,
    heis_on_morphism,
    weight_cohomology,
)
from bvq.core.complexes import GradedMap, build_complex
from bvq.errors import InvalidMorphism, WeightNotGraded
from bvq.lie1 import (
    QuadraticMorphism,
    abelian,
    compose_morphisms,
    cotangent,
    homotopy_boundary,
    heisenberg,
    identity_morphism,
    v0,
)
from bvq.symalg import is_coderivation
from corpus import random_composable_pair

KX = abelian(build_complex([("x", 0)]))
H0 = heisenberg(v0())


def test_bar_examples():
    B = bar(KX, 3)
    assert B.alg.basis() == [(0,), (1,), (2,), (3,)]
    assert all(B.d.on_monomial(m) == {} for m in B.alg.basis())
    assert B.coproduct({(2,): 1}) == {((0,), (2,)): 1, ((1,), (1,)): 2, ((2,), (0,)): 1}
    assert B.counit(B.coaugmentation(Fraction(5))) == 5
    BH = bar(H0, 2)
    assert BH.d(BH.alg.parse("x*xi")) == BH.alg.parse("c")
    assert is_coderivation(BH.d)


def test_cobar_of_abelian_line():
    Om = cobar(bar(KX, 2), 2)
    i1 = Om.letter_index[(1,)]
    i2 = Om.letter_index[(2,)]
    assert Om.d_letter(i1) == {}
    d2 = Om.d_letter(i2)
    # reduced coproduct of x² is 2 x⊗x, giving a nonzero multiple of ⟦σ⟨x⟩, σ⟨x⟩⟧
    assert set(d2) == {(i1, i1)} and d2[(i1, i1)] != 0
    # 1/2 · 2 · ⟦σ⟨x⟩, σ⟨x⟩⟧ and the commutator of an odd letter with itself is 2·(x,x)
    assert d2 == Om.free.commutator({(i1,): 1}, {(i1,): 1}) == {(i1, i1): 2}


@pytest.mark.parametrize("g,N", [(KX, 4), (H0, 4), (heisenberg(cotangent(build_complex([("a", 0)]))), 3)])
def test_cobar_square_zero_and_filtration(g, N):
    Om = cobar(bar(g, N), N)
    assert Om.check_square_zero().ok
    assert Om.respects_filtration()


def test_weight_grading_detection():
    assert cobar(bar(KX, 3)).is_weight_graded()
    Om = cobar(bar(H0, 3))
    assert not Om.is_weight_graded()
    with pytest.raises(WeightNotGraded):
        weight_cohomology(Om, 2)


def test_weight_cohomology_of_abelian_line():
    Om = cobar(bar(KX, 6), 6)
    assert weight_cohomology(Om, 1) == {0: 1}
    assert sum(weight_cohomology(Om, 2).values()) == 0
    for w in range(3, 7):
        assert all(h == 0 for h in weight_cohomology(Om, w).values()), w


def test_weight_cohomology_of_odd_line():
    # one generator of degree -1: σx is even, free Lie on it is one-dimensional
    g = abelian(build_complex([("y", -1)]))
    Om = cobar(bar(g, 5), 5)
    assert weight_cohomology(Om, 1) == {-1: 1}
    for w in range(2, 6):
        assert sum(weight_cohomology(Om, w).values()) == 0


def test_counit_examples():
    phi = counit_map(KX, 4)
    Om = phi.cobar
    assert phi.on_tree(Om.letter_index[(1,)]) == {"x": 1}
    assert phi.on_tree(Om.letter_index[(2,)]) == {}
    assert phi.is_chain_map() and phi.is_lie_morphism()
    psi = counit_map(H0, 4)
    assert psi.is_chain_map() and psi.is_lie_morphism()


def test_identity_morphism_gives_identity():
    Q = v0()
    phi = heis_on_morphism(identity_morphism(Q), Q, Q, 4)
    assert all(phi.on_monomial(m) == {m: 1} for m in phi.basis())


def test_exact_homotopy_gives_coalgebra_automorphism():
    Q = cotangent(build_complex([("a", 0), ("b", 1)], [("a", "b", 1)]))
    F0 = QuadraticMorphism(GradedMap.identity(Q.space), {("b", "a*"): Fraction(2)})
    from bvq.lie1 import QuadraticModule, homotopy_boundary
    bd = homotopy_boundary(Q.complex, F0.eta)
    R = QuadraticModule(Q.complex, {k: Q.omega.get(k, 0) - bd.get(k, 0)
                                    for k in set(Q.omega) | set(bd)
                                    if Q.omega.get(k, 0) - bd.get(k, 0)}, complete=False)
    H = HeisenbergMorphism(F0, Q, R, 4)
    assert H.hypotheses().ok
    assert H.conjugation_holds()
    assert H.phi.is_coalgebra_map()
    assert H.is_coalgebra_chain_map()
    assert not all(H.phi.on_monomial(m) == {m: 1} for m in H.phi.basis())


def test_invalid_morphism_rejected():
    Q = v0()
    double = QuadraticMorphism(GradedMap.identity(Q.space).scale(Fraction(2)))
    with pytest.raises(InvalidMorphism):
        heis_on_morphism(double, Q, Q, 3)


@pytest.mark.parametrize("seed", range(8))
def test_random_morphisms_and_composition(seed):
    (F, G), (Q, R, S) = random_composable_pair(random.Random(seed))
    for M, A, B in ((F, Q, R), (G, R, S)):
        H = heis_on_morphism(M, A, B, 4).construction
        assert H.hypotheses().ok
        assert H.conjugation_holds()
        assert H.is_coalgebra_chain_map()
    assert check_composition(F, G, Q, R, S, 4)
    assert check_composition(F, identity_morphism(R), Q, R, R, 4)


def test_composition_needs_pulled_back_homotopy():
    for seed in range(40):
        (F, G), (Q, R, S) = random_composable_pair(random.Random(seed))
        GF = compose_morphisms(G, F)
        naive = QuadraticMorphism(GF.f, F.eta, complete=False)
        extra = {k: v for k, v in GF.eta.items() if v != F.eta.get(k, 0)}
        if homotopy_boundary(Q.complex, {k: GF.eta.get(k, 0) - F.eta.get(k, 0) for k in extra}):
            with pytest.raises(InvalidMorphism):
                heis_on_morphism(naive, Q, S, 3)
            return
    pytest.fail("corpus never produced a nonzero f*γ")
