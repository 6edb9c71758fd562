"""Polyvector fields on a vector space, the BV Laplacian and Gaussian moments.

``PV(V) = Q[x_1..x_n, ξ_1..ξ_n]`` with ``x_i`` in degree 0 and ``ξ_i`` in
degree -1.  The Schouten bracket is the biderivation with ``{x_i, ξ_j} =
δ_ij``, the Laplacian is ``Δ = Σ ∂²/∂x_i∂ξ_i``, and for an action
``Q(x) = ½ xᵀAx`` the divergence against ``e^{-Q}`` is

    div = Δ - {Q, -},    so that    div(p ξ_i) = ∂_i p - p ∂_i Q.

Its degree-0 cohomology is one-dimensional and the projection onto it is
the normalized Gaussian expectation.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from .core.complexes import GradedComplex, GradedMap, GradedSpace, add_into, cohomology
from .core.scalars import ONE, to_rational
from .errors import CutoffExceeded, OddDegreeUnreduced, ValidationError
from .symalg import Biderivation, LinearOp, SymAlgebra, extend_operator


class PolyvectorAlgebra:
    """``Sym`` on ``x1..xn`` (degree 0) and ``xi1..xin`` (degree -1), weight-truncated."""

    def __init__(self, n, cutoff=8):
        if n < 1:
            raise ValueError("need at least one variable")
        self.n = n
        self.cutoff = cutoff
        self.xs = [f"x{i}" for i in range(1, n + 1)]
        self.xis = [f"xi{i}" for i in range(1, n + 1)]
        gens = [(x, 0) for x in self.xs] + [(xi, -1) for xi in self.xis]
        self.alg = SymAlgebra(gens, cutoff)
        # {x_i, ξ_i} = {ξ_i, x_i} = 1; the table is read on ordered pairs
        table = {}
        for x, xi in zip(self.xs, self.xis):
            table[(x, xi)] = table[(xi, x)] = {self.alg.unit: ONE}
        self.bracket = Biderivation(self.alg, table)
        self.laplacian = extend_operator(
            self.alg, {(x, xi): {1: ONE} for x, xi in zip(self.xs, self.xis)}, 1, "Δ")
        self._xpos = [self.alg.space.index[x] for x in self.xs]
        self._xipos = [self.alg.space.index[xi] for xi in self.xis]

    def parse(self, text):
        return self.alg.parse(text)

    def x(self, i):
        return self.alg.element(self.xs[i])

    def xi(self, i):
        return self.alg.element(self.xis[i])

    def format(self, p):
        return self.alg.format(p)

    def is_xi_free(self, p):
        return all(not m[j] for m in p for j in self._xipos)

    def x_exponents(self, m):
        return tuple(m[j] for j in self._xpos)

    def x_monomial(self, exps):
        m = [0] * self.alg.n
        for j, e in zip(self._xpos, exps):
            m[j] = e
        return tuple(m)

    def partial(self, i, p):
        """``∂/∂x_i`` on a polynomial."""
        j = self._xpos[i]
        out = {}
        for m, c in p.items():
            if m[j]:
                t = list(m)
                t[j] -= 1
                add_into(out, {tuple(t): c * m[j]})
        return out

    def _check(self, p, what):
        for m in p:
            if sum(m) > self.cutoff:
                raise CutoffExceeded(f"{what} has weight {sum(m)} above cutoff {self.cutoff}")

    def basis(self):
        return self.alg.basis()


def schouten(PV, p, q):
    """``{p, q}`` in the polyvector algebra."""
    PV._check(p, "first argument")
    PV._check(q, "second argument")
    return PV.bracket(p, q)


def bv_laplacian(PV, p):
    return PV.laplacian(p)


def _det(rows):
    """Exact determinant by Gaussian elimination."""
    a = [list(map(Fraction, r)) for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def _inverse(rows):
    n = len(rows)
    a = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c])
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [v - f * w for v, w in zip(a[r], a[c])]
    return [row[n:] for row in a]


class QuadraticAction:
    """``Q(x) = ½ xᵀAx`` for a symmetric matrix ``A``.

    ``require_pd`` certifies positive-definiteness by the leading principal
    minors; pass ``False`` for the degenerate or indefinite forms used by
    :func:`classical_h0`.
    """

    def __init__(self, A, require_pd=True):
        A = [[Fraction(to_rational(v)) for v in row] for row in A]
        n = len(A)
        if any(len(row) != n for row in A):
            raise ValidationError("action matrix must be square")
        for i in range(n):
            for j in range(i):
                if A[i][j] != A[j][i]:
                    raise ValidationError(f"action matrix not symmetric at ({i + 1},{j + 1})",
                                          witness=(i, j))
        self.A = A
        self.n = n
        self.minors = [_det([row[:k] for row in A[:k]]) for k in range(1, n + 1)]
        self.positive_definite = all(m > 0 for m in self.minors)
        if require_pd and not self.positive_definite:
            raise ValidationError("action matrix is not positive definite", witness=self.minors)
        self.covariance = _inverse(A) if self.minors[-1] else None
        self._moments = {}

    @classmethod
    def diagonal(cls, entries):
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def polynomial(self, PV):
        """``Q`` as an element of ``PV``."""
        out = {}
        for i in range(self.n):
            for j in range(self.n):
                if self.A[i][j]:
                    add_into(out, PV.alg.mul_elements(PV.x(i), PV.x(j)), self.A[i][j] / 2)
        return out

    def gradient(self, PV, i):
        """``∂Q/∂x_i = Σ_j A_ij x_j``."""
        out = {}
        for j in range(self.n):
            if self.A[i][j]:
                add_into(out, PV.x(j), self.A[i][j])
        return out


def divergence_op(Qa, PV, classical=False):
    """``Δ - {Q, -}`` on ``PV`` (``-{Q, -}`` alone when ``classical``)."""
    if Qa.n != PV.n:
        raise ValidationError("action and polyvector algebra have different dimensions")
    q = Qa.polynomial(PV)
    alg = PV.alg

    def f(m):
        if sum(m) > PV.cutoff:
            raise CutoffExceeded(f"monomial of weight {sum(m)} above cutoff {PV.cutoff}")
        out = {}
        add_into(out, PV.bracket(q, {m: ONE}), -ONE)
        if not classical:
            add_into(out, PV.laplacian.on_monomial(m))
        return out

    return LinearOp(alg, 1, f, "div")


def divergence(Qa, PV, p):
    return divergence_op(Qa, PV)(p)


def expectation(Qa, PV, p):
    """Normalized expectation of a ξ-free polynomial.

    Rewrites with ``x_k r ≡ Σ_i C_ki ∂_i r`` (``C = A⁻¹``), which holds modulo
    ``div(r ξ_i)`` and lowers the polynomial degree by two.
    """
    if not PV.is_xi_free(p):
        raise ValidationError("expectation takes a ξ-free polynomial")
    PV._check(p, "observable")
    if Qa.covariance is None:
        raise ValidationError("expectation needs a nondegenerate action")
    total = Fraction(0)
    for m, c in p.items():
        total += to_rational(c, "observable") * _moment(Qa, PV.x_exponents(m))
    return total


def _moment(Qa, exps):
    key = tuple(exps)
    hit = Qa._moments.get(key)
    if hit is not None:
        return hit
    if not any(exps):
        val = Fraction(1)
    else:
        k = next(i for i, e in enumerate(exps) if e)
        r = list(exps)
        r[k] -= 1
        if not any(r):
            val = Fraction(0)
        else:
            val = Fraction(0)
            for i, e in enumerate(r):
                if e and Qa.covariance[k][i]:
                    d = list(r)
                    d[i] -= 1
                    val += Qa.covariance[k][i] * e * _moment(Qa, d)
        if sum(exps) % 2 and val:
            raise OddDegreeUnreduced(f"odd monomial {exps} reduced to {val}")
    Qa._moments[key] = val
    return val


def wick_oracle(Qa, PV_or_exps, p=None):
    """Isserlis sum over perfect matchings with covariance ``A⁻¹``.

    Accepts ``(Qa, PV, polynomial)`` or ``(Qa, exponent_tuple)``.  Matchings
    are enumerated by pairing the first remaining point with every other
    point; points carrying the same variable are grouped, so each branch is
    weighted by how many such points remain.
    """
    C = Qa.covariance
    if p is None:
        terms = [(PV_or_exps, Fraction(1))]
    else:
        PV = PV_or_exps
        terms = [(PV.x_exponents(m), to_rational(c)) for m, c in p.items()]

    def pairings(counts):
        first = next((i for i, e in enumerate(counts) if e), None)
        if first is None:
            return Fraction(1)
        counts = list(counts)
        counts[first] -= 1
        out = Fraction(0)
        for j, e in enumerate(counts):
            if e and C[first][j]:
                rest = list(counts)
                rest[j] -= 1
                out += e * C[first][j] * pairings(rest)
        return out

    total = Fraction(0)
    for exps, c in terms:
        if sum(exps) % 2:
            continue
        total += c * pairings(exps)
    return total


def reduction_witness(Qa, PV, p):
    """``w`` with ``p - 𝔼[p] = div(w)``, built from the same rewrites as :func:`expectation`."""
    div = divergence_op(Qa, PV)
    C = Qa.covariance
    alg = PV.alg
    w_total = {}
    todo = dict(p)
    while True:
        m = next((m for m in todo if sum(m)), None)
        if m is None:
            break
        c = todo.pop(m)
        exps = list(PV.x_exponents(m))
        k = next(i for i, e in enumerate(exps) if e)
        exps[k] -= 1
        r = {PV.x_monomial(exps): c}
        # x_k r - Σ_i C_ki ∂_i r = -Σ_i C_ki div(r ξ_i)
        for i in range(PV.n):
            if C[k][i]:
                rxi = alg.mul_elements(r, PV.xi(i))
                add_into(w_total, rxi, -C[k][i])
                add_into(todo, PV.partial(i, r), C[k][i])
    check = dict(p)
    add_into(check, {alg.unit: expectation(Qa, PV, p)}, -ONE)
    add_into(check, div(w_total), -ONE)
    if check:
        raise OddDegreeUnreduced(f"reduction left {PV.format(check)}")
    return w_total


def classical_h0(Qa, N):
    """Dimension of ``H^0`` of ``(PV, -{Q, -})`` on the weight-``<= N`` truncation.

    ``{Q, -}`` preserves weight, so the truncation is a direct summand and
    its cohomology is exact, not an approximation.
    """
    PV = PolyvectorAlgebra(Qa.n, N)
    op = divergence_op(Qa, PV, classical=True)
    alg = PV.alg
    basis = [m for m in alg.basis() if alg.degree(m) in (-1, 0)]
    names = {m: alg.format_monomial(m) for m in basis}
    space = GradedSpace([(names[m], alg.degree(m)) for m in basis])
    entries = {}
    for m in basis:
        for t, c in op.on_monomial(m).items():
            entries[(names[m], names[t])] = c
    C = GradedComplex(space, GradedMap(space, space, 1, entries), check=False)
    return cohomology(C, [0]).dims()[0]


def polynomial_monomials(n, max_degree):
    """Exponent tuples of total degree ``<= max_degree`` in ``n`` variables."""
    out = []
    for deg in range(max_degree + 1):
        for combo in combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out
