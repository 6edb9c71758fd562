"""Exact scalars: rationals and sparse polynomials in named formal parameters.

Rationals are plain :class:`fractions.Fraction` (or ``int``).  A :class:`Poly`
is only produced when a formal parameter such as ``hbar`` or ``t`` actually
appears; arithmetic that cancels every parameter collapses back to a
``Fraction``.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from numbers import Rational

from ..errors import ParseError, UnspecializedParameter, ValidationError

ZERO = Fraction(0)
ONE = Fraction(1)


def _mono_mul(a, b):
    # monomials are sorted tuples of (name, exponent)
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted(exps.items()))


class Poly:
    """Polynomial with rational coefficients in named commuting parameters.

    Immutable; stored as ``{monomial: Fraction}`` where a monomial is a sorted
    tuple of ``(name, exponent)`` pairs.  Zero coefficients are never stored.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[mono] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def var(cls, name):
        return cls({((name, 1),): ONE})

    @staticmethod
    def lift(x):
        if isinstance(x, Poly):
            return x
        return Poly({(): Fraction(x)})

    def params(self):
        return {name for mono in self.terms for name, _ in mono}

    def is_constant(self):
        return all(not mono for mono in self.terms)

    def constant(self):
        return self.terms.get((), ZERO)

    def simplify(self):
        """Return a ``Fraction`` when no parameter survives, else ``self``."""
        if self.is_constant():
            return self.constant()
        return self

    def degree_in(self, name):
        best = 0
        for mono in self.terms:
            for n, e in mono:
                if n == name:
                    best = max(best, e)
        return best

    def coefficient_in(self, name, power):
        """Coefficient of ``name**power`` as a scalar in the other parameters."""
        out = {}
        for mono, c in self.terms.items():
            e = dict(mono).get(name, 0)
            if e == power:
                rest = tuple((n, k) for n, k in mono if n != name)
                out[rest] = out.get(rest, ZERO) + c
        return Poly(out).simplify()

    def evaluate(self, values):
        """Substitute rational values for (some of) the parameters."""
        out = {}
        for mono, c in self.terms.items():
            keep = []
            for name, e in mono:
                if name in values:
                    c = c * Fraction(values[name]) ** e
                else:
                    keep.append((name, e))
            if c:
                key = tuple(keep)
                out[key] = out.get(key, ZERO) + c
        return Poly(out).simplify()

    def __add__(self, other):
        if not isinstance(other, (Poly, Rational)):
            return NotImplemented
        other = Poly.lift(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, ZERO) + c
        return Poly(out).simplify()

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (Poly, Rational)):
            return NotImplemented
        return self + (-Poly.lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Rational):
            if not other:
                return ZERO
            return Poly({m: c * other for m, c in self.terms.items()}).simplify()
        if not isinstance(other, Poly):
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, ZERO) + c1 * c2
        return Poly(out).simplify()

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Poly.lift(ONE)
        for _ in range(n):
            out = Poly.lift(out * self)
        return out.simplify() if isinstance(out, Poly) else out

    def __truediv__(self, other):
        if isinstance(other, Rational) and other:
            return self * (ONE / Fraction(other))
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, Rational):
            return self.terms == Poly.lift(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def is_zero(x):
    return not x


def simplify(x):
    if isinstance(x, Poly):
        return x.simplify()
    return x


def to_rational(x, context=""):
    """Coerce a scalar to ``Fraction``; fail if a formal parameter remains."""
    if isinstance(x, Poly):
        x = x.simplify()
        if isinstance(x, Poly):
            where = f" in {context}" if context else ""
            raise UnspecializedParameter(
                f"scalar {x} still depends on {sorted(x.params())}{where}")
    return Fraction(x)


def specialize(x, values):
    if isinstance(x, Poly):
        return x.evaluate(values)
    return x


def scalar_params(x):
    if isinstance(x, Poly):
        return x.params()
    return set()


def _fmt_frac(c):
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_scalar(x):
    """Canonical string form, parseable by :func:`parse_scalar`."""
    if not isinstance(x, Poly):
        return _fmt_frac(Fraction(x))
    if not x.terms:
        return "0"
    # highest total degree first, then lexicographic
    def key(item):
        mono, _ = item
        return (-sum(e for _, e in mono), mono)

    parts = []
    for mono, c in sorted(x.terms.items(), key=key):
        names = "*".join(n if e == 1 else f"{n}^{e}" for n, e in mono)
        if not names:
            body = _fmt_frac(abs(c))
        elif abs(c) == 1:
            body = names
        else:
            body = f"{_fmt_frac(abs(c))}*{names}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f"{sign}{body}"
    return out


_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def parse_scalar(text, parameters=(), location=None):
    """Parse ``"3/2"``, ``"-4"``, ``"2*t-1"``, ``"t^2"`` into an exact scalar.

    Only names listed in ``parameters`` may appear; floats are rejected.
    """
    if isinstance(text, bool):
        raise ParseError(f"boolean is not a coefficient: {text!r}", location)
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"coefficient must be an integer or string, got {text!r}", location)
    source = text.strip().replace("^", "**")
    if not source:
        raise ParseError("empty coefficient", location)
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse coefficient {text!r}: {exc.msg}", location) from None
    params = set(parameters)

    def ev(node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ParseError(f"only integer literals allowed in {text!r}", location)
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in params:
                raise ValidationError(
                    f"undeclared parameter {node.id!r} in coefficient {text!r}")
            return Poly.var(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                right = simplify(right)
                if isinstance(right, Poly):
                    raise ParseError(f"division by a polynomial in {text!r}", location)
                if right == 0:
                    raise ParseError(f"division by zero in {text!r}", location)
                return left / right
            right = simplify(right)
            if isinstance(right, Poly) or right.denominator != 1 or right < 0:
                raise ParseError(f"exponent must be a non-negative integer in {text!r}", location)
            return Poly.lift(left) ** int(right) if isinstance(left, Poly) else left ** int(right)
        raise ParseError(f"unsupported syntax in coefficient {text!r}", location)

    return simplify(ev(tree.body))
