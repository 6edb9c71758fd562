"""Graded spaces, graded maps and cochain complexes with exact cohomology.

Sign conventions used throughout the package:

* generators are ordered by ``(degree, declaration order)``;
* ``shift(C, n)`` moves a generator of degree ``d`` to ``d - n`` and
  multiplies the differential by ``(-1)**n``;
* ``tensor`` uses ``d(a⊗b) = da⊗b + (-1)**|a| a⊗db``;
* ``dual`` negates degrees and transposes the differential with the sign
  ``(-1)**(|source| + 1)``.  With this sign ``dual(dual(C))`` is identified
  with ``C`` through the twist ``w -> (-1)**|w| w`` (see
  :func:`double_dual_iso`), not through the bare relabeling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DegreeMismatch, DSquaredNonzero, DuplicateGenerator, ValidationError
from .linalg import rank
from .scalars import ONE, ZERO, format_scalar, parse_scalar, specialize, to_rational


def _sign(n):
    return -1 if n % 2 else 1


def add_into(acc, vec, scale=ONE):
    """``acc += scale * vec`` in place, dropping zeros."""
    for k, v in vec.items():
        x = acc.get(k, ZERO) + scale * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)
    return acc


class GradedSpace:
    """Finite graded vector space given by named homogeneous generators."""

    def __init__(self, generators):
        gens = []
        seen = set()
        for item in generators:
            name, deg = item
            if name in seen:
                raise DuplicateGenerator(f"generator {name!r} declared twice")
            if not isinstance(deg, int) or isinstance(deg, bool):
                raise DegreeMismatch(f"degree of {name!r} must be an integer, got {deg!r}")
            seen.add(name)
            gens.append((name, deg))
        order = sorted(range(len(gens)), key=lambda i: (gens[i][1], i))
        self.declared = tuple(gens)
        self.names = tuple(gens[i][0] for i in order)
        self.degree = {name: deg for name, deg in gens}
        self.index = {name: i for i, name in enumerate(self.names)}

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self.degree

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.declared == other.declared

    def __hash__(self):
        return hash(self.declared)

    def __repr__(self):
        body = ", ".join(f"{n}:{self.degree[n]}" for n in self.names)
        return f"GradedSpace({body})"

    @property
    def dim(self):
        return len(self.names)

    def degrees(self):
        return sorted(set(self.degree.values()))

    def in_degree(self, d):
        return [n for n in self.names if self.degree[n] == d]

    def parity(self, name):
        return self.degree[name] % 2


class GradedMap:
    """Sparse linear map of fixed degree between graded spaces.

    ``entries`` maps ``(source_generator, target_generator)`` to a scalar.
    """

    def __init__(self, source, target, degree, entries=None):
        self.source = source
        self.target = target
        self.degree = degree
        self.columns = {}  # source generator -> {target generator: scalar}
        for (s, t), c in (entries or {}).items():
            if not c:
                continue
            if s not in source:
                raise ValidationError(f"unknown source generator {s!r}")
            if t not in target:
                raise ValidationError(f"unknown target generator {t!r}")
            if target.degree[t] != source.degree[s] + degree:
                raise DegreeMismatch(
                    f"entry {s!r} -> {t!r} has degree "
                    f"{target.degree[t] - source.degree[s]}, expected {degree}")
            col = self.columns.setdefault(s, {})
            add_into(col, {t: c})
            if not col:
                del self.columns[s]

    @classmethod
    def from_columns(cls, source, target, degree, columns):
        entries = {}
        for s, col in columns.items():
            for t, c in col.items():
                entries[(s, t)] = c
        return cls(source, target, degree, entries)

    @classmethod
    def identity(cls, space):
        return cls(space, space, 0, {(n, n): ONE for n in space})

    @classmethod
    def zero(cls, source, target, degree=0):
        return cls(source, target, degree, {})

    @property
    def entries(self):
        return {(s, t): c for s, col in self.columns.items() for t, c in col.items()}

    def image(self, name):
        return dict(self.columns.get(name, {}))

    def apply(self, vec):
        out = {}
        for s, a in vec.items():
            col = self.columns.get(s)
            if col:
                add_into(out, col, a)
        return out

    def compose(self, other):
        """``self ∘ other``."""
        if other.target != self.source:
            raise ValidationError("composition of maps with mismatched spaces")
        cols = {s: self.apply(col) for s, col in other.columns.items()}
        return GradedMap.from_columns(other.source, self.target, self.degree + other.degree, cols)

    def __add__(self, other):
        cols = {}
        for m in (self, other):
            for s, col in m.columns.items():
                add_into(cols.setdefault(s, {}), col)
        return GradedMap.from_columns(self.source, self.target, self.degree, cols)

    def scale(self, c):
        cols = {s: {t: c * v for t, v in col.items()} for s, col in self.columns.items()}
        return GradedMap.from_columns(self.source, self.target, self.degree, cols)

    def is_zero(self):
        return not self.columns

    def __eq__(self, other):
        return (isinstance(other, GradedMap) and self.source == other.source
                and self.target == other.target and self.degree == other.degree
                and self.columns == other.columns)

    def specialize(self, values):
        cols = {s: {t: specialize(c, values) for t, c in col.items()}
                for s, col in self.columns.items()}
        return GradedMap.from_columns(self.source, self.target, self.degree, cols)

    def rows_from_degree(self, d):
        """Images of the degree-``d`` source generators as index-keyed rows."""
        idx = self.target.index
        return [{idx[t]: c for t, c in self.columns.get(s, {}).items()}
                for s in self.source.in_degree(d)]


class GradedComplex:
    """A graded space with a degree +1 differential squaring to zero."""

    def __init__(self, space, differential=None, check=True):
        if differential is None:
            differential = GradedMap.zero(space, space, 1)
        if differential.source != space or differential.target != space:
            raise ValidationError("differential must be an endomorphism of the space")
        if differential.degree != 1:
            raise DegreeMismatch(f"differential has degree {differential.degree}, expected 1")
        self.space = space
        self.d = differential
        if check:
            self._check_square_zero()

    def _check_square_zero(self):
        for name in self.space:
            dd = self.d.apply(self.d.image(name))
            if dd:
                raise DSquaredNonzero(f"d(d({name!r})) = {dd} is not zero", witness=name)

    @property
    def dim(self):
        return self.space.dim

    def __eq__(self, other):
        return isinstance(other, GradedComplex) and self.space == other.space and self.d == other.d

    def __repr__(self):
        return f"GradedComplex({self.space!r}, nnz={len(self.d.entries)})"

    def specialize(self, values):
        return GradedComplex(self.space, self.d.specialize(values))

    def cohomology(self, degrees=None):
        return cohomology(self, degrees)


def build_complex(generators, differential=(), parameters=()):
    """Build and validate a complex.

    ``generators`` is a list of ``(name, degree)`` pairs or a ``{name: degree}``
    dict; ``differential`` is a list of ``(source, target, coefficient)``
    triples or a ``{source: {target: coefficient}}`` dict.  Coefficients may
    be strings in the scalar grammar.
    """
    if isinstance(generators, dict):
        generators = list(generators.items())
    space = GradedSpace(generators)
    if isinstance(differential, dict):
        triples = [(s, t, c) for s, col in differential.items() for t, c in col.items()]
    else:
        triples = list(differential)
    entries = {}
    for s, t, c in triples:
        if isinstance(c, str) or isinstance(c, int):
            c = parse_scalar(c, parameters)
        entries[(s, t)] = entries.get((s, t), ZERO) + c
    return GradedComplex(space, GradedMap(space, space, 1, entries))


def shift(C, n):
    """``C[n]``: degrees drop by ``n`` and the differential picks up ``(-1)**n``."""
    space = GradedSpace([(name, deg - n) for name, deg in C.space.declared])
    sign = _sign(n)
    entries = {k: sign * c for k, c in C.d.entries.items()}
    return GradedComplex(space, GradedMap(space, space, 1, entries), check=False)


def tensor(C, D):
    """Tensor product; generators are named by pairs ``(c, d)``."""
    gens = [((a, b), C.space.degree[a] + D.space.degree[b])
            for a, _ in C.space.declared for b, _ in D.space.declared]
    space = GradedSpace(gens)
    entries = {}
    for a in C.space:
        da = C.d.image(a)
        sa = _sign(C.space.degree[a])
        for b in D.space:
            for a2, c in da.items():
                entries[((a, b), (a2, b))] = c
            for b2, c in D.d.image(b).items():
                entries[((a, b), (a, b2))] = sa * c
    return GradedComplex(space, GradedMap(space, space, 1, entries), check=False)


def dual_name(name):
    if isinstance(name, str):
        return name + "*"
    return ("dual", name)


def dual(C):
    """Linear dual with degrees negated and signed transpose differential."""
    space = GradedSpace([(dual_name(name), -deg) for name, deg in C.space.declared])
    entries = {}
    for (s, t), c in C.d.entries.items():
        entries[(dual_name(t), dual_name(s))] = _sign(C.space.degree[s] + 1) * c
    return GradedComplex(space, GradedMap(space, space, 1, entries), check=False)


def double_dual_iso(C):
    """Chain isomorphism ``C -> dual(dual(C))``, ``w -> (-1)**|w| w**``."""
    DD = dual(dual(C))
    entries = {(n, dual_name(dual_name(n))): _sign(C.space.degree[n]) for n in C.space}
    return GradedMap(C.space, DD.space, 0, entries), DD


def direct_sum(C, D, tags=("L", "R")):
    """Block direct sum; generators are tagged unless names are disjoint."""
    clash = any(n in D.space for n in C.space)
    left = (lambda n: (tags[0], n)) if clash else (lambda n: n)
    right = (lambda n: (tags[1], n)) if clash else (lambda n: n)
    gens = [(left(n), d) for n, d in C.space.declared] + [(right(n), d) for n, d in D.space.declared]
    space = GradedSpace(gens)
    entries = {(left(s), left(t)): c for (s, t), c in C.d.entries.items()}
    entries.update({(right(s), right(t)): c for (s, t), c in D.d.entries.items()})
    return GradedComplex(space, GradedMap(space, space, 1, entries), check=False)


def check_chain_map(f, C, D):
    """True iff ``d_D ∘ f = f ∘ d_C`` exactly (f must have degree 0)."""
    if f.source != C.space or f.target != D.space:
        raise ValidationError("chain map spaces do not match the complexes")
    if f.degree != 0:
        raise DegreeMismatch(f"chain map must have degree 0, got {f.degree}")
    for name in C.space:
        lhs = D.d.apply(f.image(name))
        rhs = f.apply(C.d.image(name))
        if add_into(dict(lhs), rhs, -ONE):
            return False
    return True


def cone(f, C, D):
    """Mapping cone ``D ⊕ C[1]`` with ``d(c) = -d_C c + f(c)``."""
    gens = [(("t", n), d) for n, d in D.space.declared] + \
           [(("s", n), d - 1) for n, d in C.space.declared]
    space = GradedSpace(gens)
    entries = {}
    for (s, t), c in D.d.entries.items():
        entries[(("t", s), ("t", t))] = c
    for (s, t), c in C.d.entries.items():
        entries[(("s", s), ("s", t))] = -c
    for (s, t), c in f.entries.items():
        entries[(("s", s), ("t", t))] = entries.get((("s", s), ("t", t)), ZERO) + c
    return GradedComplex(space, GradedMap(space, space, 1, entries))


@dataclass
class CohomologyReport:
    """Per-degree ``(dim kernel, dim image-in, dim H)`` over a degree window."""

    table: dict = field(default_factory=dict)
    window: tuple = (0, -1)

    def __post_init__(self):
        for deg, (ker, img, h) in self.table.items():
            if h != ker - img or h < 0:
                raise ValueError(f"inconsistent cohomology entry in degree {deg}")

    def dims(self):
        return {d: self.table[d][2] for d in sorted(self.table)}

    def nonzero(self):
        return {d: h for d, h in self.dims().items() if h}

    @property
    def total(self):
        return sum(h for _, _, h in self.table.values())

    def concentrated_in(self):
        """The unique degree carrying cohomology, or ``None``."""
        nz = self.nonzero()
        return next(iter(nz)) if len(nz) == 1 else None

    def euler_characteristic(self):
        return sum((-1) ** (d % 2) * h for d, h in self.dims().items())

    def to_dict(self):
        return {
            "window": list(self.window),
            "degrees": {str(d): {"kernel": k, "image": i, "dim": h}
                        for d, (k, i, h) in sorted(self.table.items())},
        }

    @classmethod
    def from_dict(cls, data):
        table = {int(d): (v["kernel"], v["image"], v["dim"]) for d, v in data["degrees"].items()}
        return cls(table, tuple(data["window"]))


def _window(degrees, present):
    if degrees is None:
        if not present:
            return []
        return list(range(min(present), max(present) + 1))
    return list(degrees)


def cohomology(C, degrees=None, backend=None):
    """Exact cohomology dimensions of ``C`` over a finite degree range."""
    present = C.space.degrees()
    window = _window(degrees, present)

    def drank(d):
        rows = C.d.rows_from_degree(d)
        for row in rows:
            for v in row.values():
                to_rational(v, "cohomology")
        return rank(rows, backend)

    ranks = {}
    table = {}
    for d in window:
        for k in (d - 1, d):
            if k not in ranks:
                ranks[k] = drank(k)
        dim = len(C.space.in_degree(d))
        ker = dim - ranks[d]
        table[d] = (ker, ranks[d - 1], ker - ranks[d - 1])
    span = (window[0], window[-1]) if window else (0, -1)
    return CohomologyReport(table, span)


def certified_cohomology(cells, weight, apply_d, cutoff, lookahead, degrees=None, backend=None):
    """Cohomology classes of a weight truncation that survive in the full complex.

    ``cells`` maps each degree to the basis keys of weight ``<= cutoff +
    lookahead``; ``apply_d`` returns the differential of a key as a dict.
    The differential must be weight non-increasing with weight drop at most
    ``lookahead``.  For each degree ``k`` this returns the dimension of
    ``Z(F_N^k) / (Z(F_N^k) ∩ d(F_{N+L}^{k-1}))`` where ``F_N`` is the span of
    keys of weight ``<= N``.  A raw truncation instead reports spurious top
    weight cycles whose bounding chains were cut off.
    """
    present = sorted(d for d, ks in cells.items() if any(weight(k) <= cutoff for k in ks))
    window = _window(degrees, present)
    images = {}

    def image(key):
        v = images.get(key)
        if v is None:
            v = images[key] = apply_d(key)
        return v

    index = {}

    def idx(key):
        i = index.get(key)
        if i is None:
            i = index[key] = len(index)
        return i

    def rows_of(keys, keep=None):
        out = []
        for k in keys:
            row = {}
            for t, c in image(k).items():
                if keep is None or keep(t):
                    row[idx(t)] = to_rational(c, "cohomology")
            out.append(row)
        return out

    table = {}
    high = lambda t: weight(t) > cutoff
    for d in window:
        low_keys = [k for k in cells.get(d, ()) if weight(k) <= cutoff]
        ker = len(low_keys) - rank(rows_of(low_keys), backend)
        prev = list(cells.get(d - 1, ()))
        rD = rank(rows_of(prev), backend)
        rP = rank(rows_of(prev, high), backend)
        img = rD - rP
        table[d] = (ker, img, ker - img)
    span = (window[0], window[-1]) if window else (0, -1)
    return CohomologyReport(table, span)


def complex_to_dict(C):
    """JSON-ready rendering in the module-file schema."""
    return {
        "generators": [{"name": str(n), "degree": d} for n, d in C.space.declared],
        "differential": [{"source": str(s), "target": str(t), "coefficient": format_scalar(c)}
                         for (s, t), c in sorted(C.d.entries.items(),
                                                 key=lambda kv: (C.space.index[kv[0][0]],
                                                                 C.space.index[kv[0][1]]))],
    }
