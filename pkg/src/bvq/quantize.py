"""Linear quantization ``Q = ev_{hbar=c=1} ∘ U_BD ∘ heisenberg`` on weight truncations.

Truncation.  The quantized differential is ``d_V`` (weight preserving) plus
the BV Laplacian (weight -2).  The span ``F_N`` of monomials of weight
``<= N`` is a subcomplex, but its own cohomology contains spurious top-weight
cycles whose bounding chains have weight ``N + 1`` or ``N + 2``.  Reports
therefore count the classes of ``F_N`` that survive in ``F_{N+2}`` (see
:func:`bvq.core.certified_cohomology`), and every verdict compares the
reports at ``N``, ``N+1`` and ``N+2`` on the degree window of ``F_N``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .core.complexes import GradedComplex, GradedMap, GradedSpace, certified_cohomology
from .core.scalars import ONE, Fraction, format_scalar, to_rational
from .envelope import bind_central, u_bd
from .errors import (
    DegeneratePairing,
    InvalidQuadraticModule,
    InvalidSpecialization,
    NonzeroDifferential,
    Unstable,
    UnspecializedParameter,
)
from .lie1 import (
    QuadraticModule,
    cotangent,
    heisenberg,
    is_nondegenerate,
    oplus,
    validate_quadratic,
)

LOOKAHEAD = 2
DEFAULT_BINDINGS = {"hbar": 1, "c": 1}


def _check_module(Q):
    rep = validate_quadratic(Q)
    if not rep.ok:
        raise InvalidQuadraticModule(str(rep))
    params = Q.parameters()
    if params:
        raise UnspecializedParameter(f"module still depends on {sorted(params)}; bind them first")


def quantized_algebra(Q, cutoff, bindings=None):
    """``bind_central(u_bd(heisenberg(Q)), bindings)`` at the given cutoff."""
    _check_module(Q)
    bindings = dict(DEFAULT_BINDINGS if bindings is None else bindings)
    g = heisenberg(Q)
    if "c" in bindings and g.central != "c":
        bindings[g.central] = bindings.pop("c")
    return bind_central(u_bd(g, cutoff), bindings)


@dataclass
class QuantizationResult:
    cutoff: int
    complex: GradedComplex
    cohomology: object
    raw_cohomology: object
    stabilization: dict = field(default_factory=dict)
    stable: bool = False
    bindings: dict = field(default_factory=dict)

    @property
    def window(self):
        return self.cohomology.window

    @property
    def total(self):
        return self.cohomology.total

    @property
    def det_line(self):
        """``(degree, 1)`` when the stabilized cohomology is one-dimensional."""
        if self.stable and self.total == 1:
            return (self.cohomology.concentrated_in(), 1)
        return None

    def profile(self):
        return self.cohomology.nonzero()

    def to_dict(self):
        return {
            "cutoff": self.cutoff,
            "bindings": {k: format_scalar(v) for k, v in sorted(self.bindings.items())},
            "window": list(self.window),
            "cohomology": {str(d): h for d, h in self.cohomology.dims().items()},
            "total": self.total,
            "detLine": None if self.det_line is None else
            {"degree": self.det_line[0], "dimension": self.det_line[1]},
            "stabilization": {
                "stable": self.stable,
                "cutoffs": {str(n): {str(d): h for d, h in r.items()}
                            for n, r in sorted(self.stabilization.items())},
            },
        }


def _certified(U, N, window=None):
    alg = U.alg.with_cutoff(N + LOOKAHEAD)
    cells = {}
    for m in alg.basis():
        cells.setdefault(alg.degree(m), []).append(m)
    if window is None:
        degs = [alg.degree(m) for m in alg.basis() if sum(m) <= N]
        window = range(min(degs), max(degs) + 1)
    return certified_cohomology(cells, sum, U.d.on_monomial, N, LOOKAHEAD, window)


def _truncated_complex(U, N):
    alg = U.alg.with_cutoff(N)
    basis = alg.basis()
    names = {m: alg.format_monomial(m) for m in basis}
    space = GradedSpace([(names[m], alg.degree(m)) for m in basis])
    entries = {}
    for m in basis:
        for t, c in U.d.on_monomial(m).items():
            entries[(names[m], names[t])] = to_rational(c, "quantized differential")
    return GradedComplex(space, GradedMap(space, space, 1, entries))


def quantize(Q, N=8, bindings=None):
    """Quantize ``Q`` at cutoff ``N`` with a stabilization certificate."""
    bindings = dict(DEFAULT_BINDINGS if bindings is None else bindings)
    U = quantized_algebra(Q, N + 2 + LOOKAHEAD, bindings)
    C = _truncated_complex(U, N)
    rep = _certified(U, N)
    window = list(range(rep.window[0], rep.window[1] + 1))
    stab = {N: rep.dims()}
    for k in (N + 1, N + 2):
        stab[k] = _certified(U, k, window).dims()
    stable = all(stab[k] == stab[N] for k in stab)
    from .core.complexes import cohomology
    raw = cohomology(C, window)
    return QuantizationResult(N, C, rep, raw, stab, stable, bindings)


def predicted_degree(Q):
    """Sum of the degrees of the odd generators (zero differential, nondegenerate)."""
    if not Q.d.is_zero():
        raise NonzeroDifferential("predicted degree needs a zero differential")
    if not is_nondegenerate(Q):
        raise DegeneratePairing("pairing is degenerate")
    return sum(d for d in Q.space.degree.values() if d % 2)


@dataclass
class DetLineVerdict:
    invertible: bool
    degree: object
    total: int
    stable: bool
    predicted: object = None
    result: object = None

    @property
    def prediction_ok(self):
        return self.predicted is None or (self.invertible and self.degree == self.predicted)

    def to_dict(self):
        return {"invertible": self.invertible, "degree": self.degree, "total": self.total,
                "stable": self.stable, "predicted": self.predicted}


def det_line(Q, N=8):
    """Decide invertibility of the quantization from a stabilized computation."""
    res = quantize(Q, N)
    totals = [sum(r.values()) for r in res.stabilization.values()]
    if res.stable:
        invertible = res.total == 1
    elif all(t > 1 for t in totals):
        # cohomology keeps growing with the cutoff, so it is not a line
        invertible = False
    else:
        raise Unstable(f"cohomology not stable across cutoffs {sorted(res.stabilization)}; "
                       f"try a larger cutoff")
    predicted = None
    if Q.d.is_zero() and is_nondegenerate(Q):
        predicted = predicted_degree(Q)
    degree = res.cohomology.concentrated_in() if invertible else None
    return DetLineVerdict(invertible, degree, res.total, res.stable, predicted, res)


def dequantize(Q, N=8):
    """The classical shadow ``u_bd(heisenberg(Q))`` at ``hbar = 0``."""
    _check_module(Q)
    return bind_central(u_bd(heisenberg(Q), N), {"hbar": 0})


def degree_formulas(W):
    """Candidate degrees for the cotangent quantization of a zero-differential ``W``.

    ``d_W = Σ_n (2n+1)(dim W^{2n+1} - dim W^{2n})``.  One reading places the
    line ``det(W)[-d_W]`` in degree ``d_W``; the other reads ``A[d_W]`` and
    places it in degree ``-d_W``.
    """
    dims = Counter(W.space.degree.values())
    d_W = 0
    for deg, k in dims.items():
        if deg % 2:
            d_W += deg * k
        else:
            d_W -= (deg + 1) * k
    return {"det_shift": d_W, "a_shift": -d_W}


@dataclass
class CotangentQuantization:
    result: QuantizationResult
    verdict: DetLineVerdict
    formulas: dict

    @property
    def degree(self):
        return self.verdict.degree

    def matching_formulas(self):
        return sorted(k for k, v in self.formulas.items() if v == self.verdict.degree)


def cotangent_quantize(W, N=8):
    Q = cotangent(W)
    verdict = det_line(Q, N)
    formulas = degree_formulas(W) if W.d.is_zero() else {}
    if W.d.is_zero() and not verdict.invertible:
        raise Unstable("cotangent quantization of a free module should be invertible")
    return CotangentQuantization(verdict.result, verdict, formulas)


class FamilyQuadraticModule(QuadraticModule):
    """A quadratic module whose entries are polynomials in exactly one parameter."""

    def __init__(self, Q):
        super().__init__(Q.complex, Q.omega, complete=False)
        params = sorted(Q.parameters())
        if len(params) != 1:
            raise InvalidSpecialization(f"family must have exactly one parameter, found {params}")
        self.parameter = params[0]


@dataclass
class FamilyScan:
    parameter: str
    profiles: dict
    generic: dict
    jumps: list

    def to_dict(self):
        return {
            "parameter": self.parameter,
            "profiles": {format_scalar(v): {str(d): h for d, h in p.items()}
                         for v, p in self.profiles.items()},
            "generic": {str(d): h for d, h in self.generic.items()},
            "jumps": [format_scalar(v) for v in self.jumps],
        }


def family_scan(FQ, values, N=8, parameter=None):
    """Quantize each specialization and report where the profile jumps.

    The generic profile is the one shared by the most scanned values (ties go
    to the profile seen first).
    """
    if parameter is None:
        parameter = getattr(FQ, "parameter", None) or FamilyQuadraticModule(FQ).parameter
    profiles = {}
    for v in values:
        v = Fraction(v)
        Qv = FQ.specialize({parameter: v})
        rep = validate_quadratic(Qv)
        if not rep.ok:
            raise InvalidSpecialization(f"{parameter}={format_scalar(v)}: {rep}")
        res = quantize(Qv, N)
        if not res.stable:
            raise Unstable(f"{parameter}={format_scalar(v)} did not stabilize")
        profiles[v] = res.profile()
    counts = Counter(tuple(sorted(p.items())) for p in profiles.values())
    best = max(counts.values())
    generic = next(p for p in profiles.values() if counts[tuple(sorted(p.items()))] == best)
    jumps = [v for v, p in profiles.items() if p != generic]
    return FamilyScan(parameter, profiles, generic, jumps)


def monoidality_check(Q, R, N=6, bindings=None):
    """Check ``Sym(V ⊕ V') ≅ Sym(V) ⊗ Sym(V')`` intertwines the quantized differentials.

    The identification sends ``m ⊗ m'`` to the product ``m·m'``; the tensor
    differential is ``d m ⊗ m' + (-1)^|m| m ⊗ d m'``.  Every pair with
    ``weight(m) + weight(m') <= N`` is checked.
    """
    S = oplus(Q, R)
    left, right = S.embeddings
    UQ, UR, US = (quantized_algebra(M, N, bindings) for M in (Q, R, S))
    A, B, C = UQ.alg, UR.alg, US.alg
    posA = [C.space.index[left(n)] for n in A.names]
    posB = [C.space.index[right(n)] for n in B.names]

    def emb(pos, m):
        e = [0] * C.n
        for j, i in enumerate(pos):
            e[i] = m[j]
        return tuple(e)

    def psi(a, b):
        return C.mul_elements({emb(posA, a): ONE}, {emb(posB, b): ONE})

    from .core.complexes import add_into
    for a in A.basis():
        for b in B.with_cutoff(N - sum(a)).basis():
            lhs = US.d(psi(a, b))
            rhs = {}
            for a2, c in UQ.d.on_monomial(a).items():
                add_into(rhs, psi(a2, b), c)
            s = -1 if A.degree(a) % 2 else 1
            for b2, c in UR.d.on_monomial(b).items():
                add_into(rhs, psi(a, b2), s * c)
            if add_into(lhs, rhs, -ONE):
                return False
    return True
