"""Weight-truncated free graded-commutative (co)algebras and their operators.

A monomial is a tuple of exponents indexed by the generator order of the
underlying :class:`~bvq.core.GradedSpace`; odd generators have exponent at
most one.  The product of monomials carries the Koszul sign of the sorting
permutation, and an element is a dict ``{monomial: scalar}``.

Operators are linear maps on the symmetric algebra.  The main constructor,
:func:`extend_operator`, takes corestrictions (values on finitely many
monomials, each a linear or scalar element) and builds the unique
coderivation of ``Sym^c`` with those corestrictions.  Read on the algebra
side the same formula is a linear-coefficient differential operator: for a
monomial ``m`` it sums over sub-monomials ``s <= m`` with a corestriction,

    D(m) = Σ_s  mult(s, m) · ε(s, m - s) · c[s] · (m - s),

where ``mult`` counts the ways of picking ``s`` out of ``m`` and ``ε`` is the
Koszul sign with ``s · (m - s) = ε m``.
"""

from __future__ import annotations

import ast
import os
from itertools import product as _cartesian
from math import comb, factorial

from .core.complexes import GradedSpace, add_into
from .core.scalars import ONE, ZERO, Fraction, format_scalar, parse_scalar, specialize
from .errors import (
    CutoffExceeded,
    CutoffTooLargeForMemory,
    DegreeMismatch,
    NotDegreeZero,
    NotWeightLowering,
    ParseError,
)

DEFAULT_MAX_BASIS = 500_000


def max_basis():
    raw = os.environ.get("BVQ_MAX_BASIS")
    return int(raw) if raw else DEFAULT_MAX_BASIS


class SymAlgebra:
    """Graded-commutative algebra ``Sym(V)`` with an optional weight cutoff.

    The cutoff is enforced by :meth:`multiply` and :meth:`basis`; internal
    operator calculus works on arbitrary monomials so that closure of an
    operator on the truncation can be tested rather than assumed.
    """

    def __init__(self, space, cutoff=None):
        if not isinstance(space, GradedSpace):
            space = GradedSpace(space)
        if cutoff is not None and cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        self.space = space
        self.cutoff = cutoff
        self.names = space.names
        self.n = len(self.names)
        self.degs = tuple(space.degree[x] for x in self.names)
        self.odd = tuple(d % 2 for d in self.degs)
        self.unit = (0,) * self.n
        self._basis = None
        self._mul_cache = {}

    def __repr__(self):
        return f"SymAlgebra({self.space!r}, cutoff={self.cutoff})"

    def with_cutoff(self, cutoff):
        return SymAlgebra(self.space, cutoff)

    # monomials

    def gen(self, name):
        m = [0] * self.n
        m[self.space.index[name]] = 1
        return tuple(m)

    def gen_index(self, i):
        m = [0] * self.n
        m[i] = 1
        return tuple(m)

    def one(self):
        return {self.unit: ONE}

    def element(self, name):
        return {self.gen(name): ONE}

    def degree(self, m):
        return sum(e * d for e, d in zip(m, self.degs) if e)

    def weight(self, m):
        return sum(m)

    def parity(self, m):
        return sum(e for e, o in zip(m, self.odd) if o) % 2

    def is_valid(self, m):
        return all(e >= 0 for e in m) and all(e <= 1 for e, o in zip(m, self.odd) if o)

    def mul_mono(self, a, b):
        """``(sign, a·b)``; sign is 0 when an odd letter repeats."""
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        s = 0
        later_odd_in_a = 0
        # walk generators from last to first, counting odd letters of a that
        # a given odd letter of b must pass
        for i in range(self.n - 1, -1, -1):
            if not self.odd[i]:
                continue
            ea, eb = a[i], b[i]
            if ea and eb:
                hit = (0, None)
                self._mul_cache[key] = hit
                return hit
            if eb:
                s += later_odd_in_a
            later_odd_in_a += ea
        m = tuple(x + y for x, y in zip(a, b))
        hit = (-1 if s % 2 else 1, m)
        if len(self._mul_cache) < 2_000_000:
            self._mul_cache[key] = hit
        return hit

    def mul_elements(self, p, q):
        """Product without cutoff enforcement."""
        out = {}
        for a, ca in p.items():
            for b, cb in q.items():
                s, m = self.mul_mono(a, b)
                if s:
                    x = out.get(m, ZERO) + s * ca * cb
                    if x:
                        out[m] = x
                    else:
                        out.pop(m, None)
        return out

    def multiply(self, p, q):
        """Product in the truncation; terms above the cutoff are an error."""
        out = self.mul_elements(p, q)
        if self.cutoff is not None:
            for m in out:
                if sum(m) > self.cutoff:
                    raise CutoffExceeded(
                        f"product has weight {sum(m)} above cutoff {self.cutoff}")
        return out

    def monomial_of(self, letters):
        """Ordered product of generator names as ``(sign, monomial)``."""
        sign, m = 1, self.unit
        for name in letters:
            s, m = self.mul_mono(m, self.gen(name))
            if not s:
                return 0, None
            sign *= s
        return sign, m

    # basis

    def basis(self):
        """All monomials of weight ``<= cutoff`` sorted by (degree, weight, exponents)."""
        if self.cutoff is None:
            raise ValueError("basis of an untruncated algebra")
        if self._basis is None:
            self._basis = enumerate_monomials(self.odd, self.cutoff, self.degs)
        return self._basis

    def basis_by_degree(self):
        out = {}
        for m in self.basis():
            out.setdefault(self.degree(m), []).append(m)
        return out

    def truncate(self, p, cutoff=None):
        cutoff = self.cutoff if cutoff is None else cutoff
        return {m: c for m, c in p.items() if sum(m) <= cutoff}

    # formatting and parsing

    def format_monomial(self, m):
        parts = []
        for e, name in zip(m, self.names):
            if e == 1:
                parts.append(str(name))
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def format(self, p):
        if not p:
            return "0"
        terms = []
        for m in sorted(p, key=lambda m: (-sum(m), m)):
            c = p[m]
            mono = self.format_monomial(m)
            cs = format_scalar(c)
            if mono == "1":
                terms.append(cs)
            elif cs == "1":
                terms.append(mono)
            elif cs == "-1":
                terms.append("-" + mono)
            else:
                terms.append(f"({cs})*{mono}" if any(ch in cs[1:] for ch in "+-") else f"{cs}*{mono}")
        out = terms[0]
        for t in terms[1:]:
            out += t if t.startswith("-") else "+" + t
        return out

    def parse(self, text, parameters=()):
        """Parse a polynomial in the generators, e.g. ``"x1^2*x2 - 3/2*xi1"``."""
        return parse_element(self, text, parameters)

    def coproduct(self, p):
        return coproduct(self, p)


def enumerate_monomials(odd, cutoff, degs=None):
    """Exponent tuples of weight ``<= cutoff`` with odd exponents capped at 1."""
    n = len(odd)
    limit = max_basis()
    out = []

    def rec(i, left, prefix):
        if i == n:
            out.append(tuple(prefix))
            if len(out) > limit:
                raise CutoffTooLargeForMemory(
                    f"basis exceeds {limit} monomials (set BVQ_MAX_BASIS to raise the ceiling)")
            return
        top = min(left, 1) if odd[i] else left
        for e in range(top + 1):
            prefix.append(e)
            rec(i + 1, left - e, prefix)
            prefix.pop()

    rec(0, cutoff, [])
    if degs is None:
        degs = (0,) * n
    out.sort(key=lambda m: (sum(e * d for e, d in zip(m, degs)), sum(m), m))
    return out


def parse_element(alg, text, parameters=()):
    source = str(text).strip().replace("^", "**")
    if not source:
        raise ParseError("empty polynomial")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse polynomial {text!r}: {exc.msg}") from None
    names = {str(n): n for n in alg.names}
    params = set(parameters)

    def ev(node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ParseError(f"only integer literals allowed in {text!r}")
            return {alg.unit: Fraction(node.value)} if node.value else {}
        if isinstance(node, ast.Name):
            if node.id in names:
                return alg.element(names[node.id])
            if node.id in params:
                return {alg.unit: parse_scalar(node.id, parameters)}
            raise ParseError(f"unknown symbol {node.id!r} in {text!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return {m: -c for m, c in v.items()} if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Add):
                return add_into(ev(node.left), ev(node.right))
            if isinstance(node.op, ast.Sub):
                return add_into(ev(node.left), ev(node.right), -ONE)
            if isinstance(node.op, ast.Mult):
                return alg.mul_elements(ev(node.left), ev(node.right))
            if isinstance(node.op, ast.Div):
                den = ev(node.right)
                if set(den) - {alg.unit}:
                    raise ParseError(f"division by a non-constant in {text!r}")
                c = den.get(alg.unit, ZERO)
                if not c:
                    raise ParseError(f"division by zero in {text!r}")
                return {m: v / c for m, v in ev(node.left).items()}
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)
                        and node.right.value >= 0):
                    raise ParseError(f"exponent must be a non-negative integer in {text!r}")
                base = ev(node.left)
                out = alg.one()
                for _ in range(node.right.value):
                    out = alg.mul_elements(out, base)
                return out
        raise ParseError(f"unsupported syntax in polynomial {text!r}")

    return ev(tree.body)


# sub-monomials and coproduct


def sub_monomials(m):
    ranges = [range(e + 1) for e in m]
    for s in _cartesian(*ranges):
        yield s


def multiplicity(s, m):
    """Number of ways to choose the letters of ``s`` out of ``m``."""
    out = 1
    for a, b in zip(s, m):
        if a:
            out *= comb(b, a)
    return out


def coproduct(alg, p):
    """Unshuffle coproduct ``Δ(m) = Σ_s mult · ε(s, m-s) · s ⊗ (m-s)``."""
    out = {}
    for m, c in p.items():
        for s in sub_monomials(m):
            rest = tuple(b - a for a, b in zip(s, m))
            sign, _ = alg.mul_mono(s, rest)
            if not sign:
                continue
            x = out.get((s, rest), ZERO) + sign * multiplicity(s, m) * c
            if x:
                out[(s, rest)] = x
            else:
                out.pop((s, rest), None)
    return out


def counit(alg, p):
    return p.get(alg.unit, ZERO)


def tensor_apply(alg, left, right, t, right_degree=0):
    """``(left ⊗ right)`` on a tensor element with Koszul sign.

    ``left``/``right`` are linear maps (callables on elements) or ``None`` for
    the identity; ``right_degree`` is the degree of ``right``, which passes the
    left factor.
    """
    out = {}
    for (a, b), c in t.items():
        la = left({a: ONE}) if left else {a: ONE}
        sign = -1 if (right_degree % 2 and alg.parity(a)) else 1
        rb = right({b: ONE}) if right else {b: ONE}
        for a2, ca in la.items():
            for b2, cb in rb.items():
                key = (a2, b2)
                x = out.get(key, ZERO) + sign * c * ca * cb
                if x:
                    out[key] = x
                else:
                    out.pop(key, None)
    return out


# operators


class LinearOp:
    """Linear endomorphism of ``Sym(V)`` of fixed degree, memoized on monomials."""

    def __init__(self, alg, degree, func, name="op"):
        self.alg = alg
        self.degree = degree
        self._func = func
        self._cache = {}
        self.name = name

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

    apply = __call__

    def compose(self, other):
        """``self ∘ other``."""
        return LinearOp(self.alg, self.degree + other.degree,
                        lambda m: self(other.on_monomial(m)), f"{self.name}∘{other.name}")

    def __add__(self, other):
        if other.degree != self.degree:
            raise DegreeMismatch("sum of operators of different degrees")

        def f(m):
            out = dict(self.on_monomial(m))
            return add_into(out, other.on_monomial(m))

        return LinearOp(self.alg, self.degree, f, f"({self.name}+{other.name})")

    def __sub__(self, other):
        return self + other.scale(-ONE)

    def scale(self, c):
        return LinearOp(self.alg, self.degree,
                        lambda m: {k: c * v for k, v in self.on_monomial(m).items() if c * v},
                        f"{format_scalar(c)}*{self.name}")

    def commutator(self, other):
        """Graded commutator ``[A, B] = AB - (-1)^{|A||B|} BA``."""
        sign = -1 if (self.degree * other.degree) % 2 else 1
        return self.compose(other) - other.compose(self).scale(Fraction(sign))

    def specialize(self, values):
        return LinearOp(self.alg, self.degree,
                        lambda m: _specialize_elem(self.on_monomial(m), values),
                        self.name)

    def matrix(self, basis, cutoff=None):
        """Columns of the operator on ``basis``: ``{m: image}``."""
        return {m: self.on_monomial(m) for m in basis}

    def preserves_truncation(self, cutoff=None):
        cutoff = self.alg.cutoff if cutoff is None else cutoff
        for m in self.alg.with_cutoff(cutoff).basis():
            if any(sum(t) > cutoff for t in self.on_monomial(m)):
                return False
        return True


def _specialize_elem(p, values):
    out = {}
    for m, c in p.items():
        c = specialize(c, values)
        if c:
            out[m] = c
    return out


def identity_op(alg):
    return LinearOp(alg, 0, lambda m: {m: ONE}, "id")


def zero_op(alg, degree=0):
    return LinearOp(alg, degree, lambda m: {}, "0")


class Operator(LinearOp):
    """Coderivation / differential operator determined by corestrictions.

    ``corestrictions`` maps a monomial ``s`` (the arity is its weight) to an
    element that is linear in the generators or a scalar multiple of 1.
    """

    def __init__(self, alg, corestrictions, degree=None, name="D"):
        cores = {}
        for s, val in corestrictions.items():
            val = {m: c for m, c in val.items() if c}
            if not val:
                continue
            if not alg.is_valid(s):
                raise DegreeMismatch(f"corestriction source {s} is not a monomial")
            for t in val:
                if sum(t) > 1:
                    raise DegreeMismatch("corestriction values must be linear or scalar")
                r = alg.degree(t) - alg.degree(s)
                if degree is None:
                    degree = r
                elif r != degree:
                    raise DegreeMismatch(
                        f"corestriction {alg.format_monomial(s)} -> {alg.format_monomial(t)} "
                        f"has degree {r}, expected {degree}")
            cores[s] = val
        self.corestrictions = cores
        self.arities = sorted({sum(s) for s in cores})
        super().__init__(alg, degree or 0, self._extend, name)

    def _extend(self, m):
        alg = self.alg
        out = {}
        for s, val in self.corestrictions.items():
            if any(a > b for a, b in zip(s, m)):
                continue
            rest = tuple(b - a for a, b in zip(s, m))
            eps, _ = alg.mul_mono(s, rest)
            if not eps:
                continue
            coef = eps * multiplicity(s, m)
            for t, c in val.items():
                sign, prod = alg.mul_mono(t, rest)
                if sign:
                    x = out.get(prod, ZERO) + coef * sign * c
                    if x:
                        out[prod] = x
                    else:
                        out.pop(prod, None)
        return out

    def weight_drop(self):
        """Range ``(min, max)`` of ``weight(s) - weight(value)`` over corestrictions."""
        drops = [sum(s) - sum(t) for s, val in self.corestrictions.items() for t in val]
        if not drops:
            return (0, 0)
        return (min(drops), max(drops))

    def __add__(self, other):
        if isinstance(other, Operator) and other.alg is self.alg:
            cores = {s: dict(v) for s, v in self.corestrictions.items()}
            for s, v in other.corestrictions.items():
                add_into(cores.setdefault(s, {}), v)
            deg = self.degree if self.corestrictions else other.degree
            return Operator(self.alg, cores, deg, f"({self.name}+{other.name})")
        return LinearOp.__add__(self, other)

    def scale(self, c):
        cores = {s: {t: c * v for t, v in val.items()} for s, val in self.corestrictions.items()}
        return Operator(self.alg, cores, self.degree, f"{format_scalar(c)}*{self.name}")

    def specialize(self, values):
        cores = {s: _specialize_elem(v, values) for s, v in self.corestrictions.items()}
        return Operator(self.alg, cores, self.degree, self.name)


def extend_operator(alg, corestrictions, degree=None, name="D"):
    """Build the operator with the given corestrictions.

    Keys may be monomials or tuples of generator names; values may be
    elements or ``{name_or_monomial: scalar}`` dicts where the key ``1`` (or
    the unit monomial) stands for the scalar part.

    With values in ``V`` the result is a coderivation.  A scalar value breaks
    ``ε∘D = 0``; such operators (for instance the BV Laplacian after binding a
    central element to 1) are coderivations only before the binding.
    """
    cores = {}
    for key, val in corestrictions.items():
        s = _as_monomial(alg, key)
        if s is None:
            continue
        elem = {}
        for t, c in val.items():
            mt = alg.unit if t in (1, "1") else _as_monomial(alg, t)
            elem[mt] = elem.get(mt, ZERO) + c
        # names given in non-canonical order carry a Koszul sign
        if isinstance(key, tuple) and key and not isinstance(key[0], int):
            sign, _ = alg.monomial_of(key)
            elem = {t: sign * c for t, c in elem.items()}
        add_into(cores.setdefault(s, {}), elem)
    return Operator(alg, cores, degree, name)


def _as_monomial(alg, key):
    if isinstance(key, tuple) and len(key) == alg.n and all(isinstance(e, int) for e in key):
        return key
    if isinstance(key, tuple):
        sign, m = alg.monomial_of(key)
        return m if sign else None
    return alg.gen(key)


def multiplication_op(alg, p, degree=None):
    """Left multiplication ``q -> p·q``."""
    if degree is None:
        degs = {alg.degree(m) for m in p}
        degree = degs.pop() if len(degs) == 1 else 0
    return LinearOp(alg, degree, lambda m: alg.mul_elements(p, {m: ONE}), "mult")


def coderivation_defect(D, cutoff=None):
    """First basis monomial where ``Δ∘D = (D⊗1 + 1⊗D)∘Δ`` fails, else ``None``."""
    alg = D.alg
    cutoff = alg.cutoff if cutoff is None else cutoff
    for m in alg.with_cutoff(cutoff).basis():
        lhs = coproduct(alg, D.on_monomial(m))
        dm = coproduct(alg, {m: ONE})
        rhs = tensor_apply(alg, D, None, dm)
        add_into(rhs, tensor_apply(alg, None, D, dm, D.degree))
        if add_into(lhs, rhs, -ONE):
            return m
    return None


def is_coderivation(D, cutoff=None):
    """Check the coderivation law on every basis monomial of the truncation."""
    return coderivation_defect(D, cutoff) is None


def is_coalgebra_map(F, cutoff=None):
    """Check ``Δ∘F = (F⊗F)∘Δ`` and counit preservation on the truncation."""
    alg = F.alg
    cutoff = alg.cutoff if cutoff is None else cutoff
    for m in alg.with_cutoff(cutoff).basis():
        img = F.on_monomial(m)
        lhs = coproduct(alg, img)
        rhs = tensor_apply(alg, F, F, coproduct(alg, {m: ONE}), F.degree)
        if add_into(lhs, rhs, -ONE):
            return False
        if counit(alg, img) != (ONE if m == alg.unit else ZERO):
            return False
    return True


def exp_weight_lowering(D, cutoff=None):
    """``exp(D) = Σ D^k / k!`` for a degree-0 strictly weight-lowering operator."""
    alg = D.alg
    if D.degree != 0:
        raise NotDegreeZero(f"exp needs a degree-0 operator, got degree {D.degree}")
    if isinstance(D, Operator):
        lo, _ = D.weight_drop()
        if D.corestrictions and lo <= 0:
            raise NotWeightLowering("some corestriction does not lower weight")
    else:
        cutoff = alg.cutoff if cutoff is None else cutoff
        for m in alg.with_cutoff(cutoff).basis():
            if any(sum(t) >= sum(m) for t in D.on_monomial(m)):
                raise NotWeightLowering(f"operator does not lower the weight of {m}")

    def f(m):
        out = {m: ONE}
        term = {m: ONE}
        k = 0
        while term:
            k += 1
            term = D(term)
            if term:
                add_into(out, term, Fraction(1, factorial(k)))
        return out

    return LinearOp(alg, 0, f, f"exp({D.name})")


def ops_equal(A, B, basis):
    for m in basis:
        if add_into(dict(A.on_monomial(m)), B.on_monomial(m), -ONE):
            return False
    return True


class Biderivation:
    """Degree +1 bracket on ``Sym(V)`` extending a table on generators.

    Symmetry ``{p, q} = (-1)**(|p||q|) {q, p}`` and the Leibniz rule in the
    second slot ``{a, bc} = {a, b}c + (-1)**((|a|+1)|b|) b{a, c}`` determine
    the bracket of arbitrary monomials.  ``table`` maps generator-name pairs
    to elements (linear or scalar).  ``koszul=False`` drops the Leibniz sign
    and exists only to build deliberately broken structures in tests.
    """

    def __init__(self, alg, table, koszul=True):
        self.alg = alg
        self.koszul = koszul
        self.table = {}
        idx = alg.space.index
        for (a, b), val in table.items():
            if val:
                self.table[(idx[a], idx[b])] = val
        self._right = {}
        self._mono = {}

    def _first(self, m):
        for i, e in enumerate(m):
            if e:
                rest = list(m)
                rest[i] -= 1
                return i, tuple(rest)
        return None, None

    def gen_right(self, i, m):
        """``{x_i, m}`` for a generator index ``i`` and a monomial ``m``."""
        key = (i, m)
        hit = self._right.get(key)
        if hit is not None:
            return hit
        alg = self.alg
        j, rest = self._first(m)
        out = {}
        if j is not None:
            val = self.table.get((i, j))
            if val:
                out = alg.mul_elements(val, {rest: ONE})
            if sum(rest):
                inner = self.gen_right(i, rest)
                if inner:
                    s = -1 if (self.koszul and ((alg.degs[i] + 1) * alg.degs[j]) % 2) else 1
                    add_into(out, alg.mul_elements({alg.gen_index(j): ONE}, inner), Fraction(s))
        self._right[key] = out
        return out

    def mono(self, m1, m2):
        key = (m1, m2)
        hit = self._mono.get(key)
        if hit is not None:
            return hit
        alg = self.alg
        i, rest = self._first(m1)
        if i is None or not sum(m2):
            out = {}
        elif not sum(rest):
            out = self.gen_right(i, m2)
        else:
            # {x·r, q} = (-1)^{|m1||q|}[(-1)^{|q||x|}{x,q}·r + (-1)^{(|q|+1)|x|+|q||r|} x·{r,q}]
            dm1, dq, dx, dr = alg.degree(m1), alg.degree(m2), alg.degs[i], alg.degree(rest)
            s0 = -1 if (dm1 * dq) % 2 else 1
            s1 = -1 if (dq * dx) % 2 else 1
            s2 = -1 if ((dq + 1) * dx + dq * dr) % 2 else 1
            out = {}
            add_into(out, alg.mul_elements(self.gen_right(i, m2), {rest: ONE}), Fraction(s0 * s1))
            add_into(out, alg.mul_elements({alg.gen_index(i): ONE}, self.mono(rest, m2)),
                     Fraction(s0 * s2))
        self._mono[key] = out
        return out

    def __call__(self, p, q):
        out = {}
        for a, ca in p.items():
            for b, cb in q.items():
                add_into(out, self.mono(a, b), ca * cb)
        return out
