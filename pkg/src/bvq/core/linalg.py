"""Exact rank, nullspace and coordinate solving over the rationals.

Matrices are passed as sparse rows: a list of ``{column: scalar}`` dicts.
Ranks use integer-preserving elimination: every row is cleared of
denominators, and each elimination step ``p*row - a*pivot`` is followed by
division by the row gcd, so no fraction is ever formed.

A compiled kernel (``bvq.core._rank``) handles rows whose entries fit in
int64; it reports overflow and the pure-Python bigint path takes over.  Set
``BVQ_PURE_PYTHON=1`` to disable the compiled kernel.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import gcd, lcm

from .scalars import to_rational

try:  # pragma: no cover - exercised only when the extension is built
    if os.environ.get("BVQ_PURE_PYTHON"):
        raise ImportError("pure-python mode requested")
    import numpy as _np

    from ._rank import rank_int64 as _rank_int64

    HAVE_KERNEL = True
except ImportError:
    _np = None
    _rank_int64 = None
    HAVE_KERNEL = False

_INT64_SAFE = 1 << 62
# dense kernel only pays off when the block is not absurdly sparse and wide
_DENSE_CELL_LIMIT = 25_000_000


def backend_name():
    return "cython" if HAVE_KERNEL else "python"


def integer_rows(rows):
    """Scale each row by the lcm of its denominators and divide by its gcd."""
    out = []
    for row in rows:
        vals = {}
        den = 1
        for col, v in row.items():
            v = to_rational(v, "rank computation")
            if v:
                vals[col] = v
                den = lcm(den, v.denominator)
        if not vals:
            continue
        ints = {c: (v * den).numerator for c, v in vals.items()}
        g = 0
        for x in ints.values():
            g = gcd(g, x)
        if g > 1:
            ints = {c: x // g for c, x in ints.items()}
        out.append(ints)
    return out


def _rank_python(rows):
    """Incremental fraction-free echelon form on sparse integer rows."""
    pivots = {}  # leading column -> row (dict) with that leading column
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                pivots[lead] = row
                break
            p = prow[lead]
            a = row[lead]
            g = gcd(p, a)
            pg, ag = p // g, a // g
            new = {}
            for c, v in row.items():
                new[c] = pg * v
            for c, v in prow.items():
                x = new.get(c, 0) - ag * v
                if x:
                    new[c] = x
                else:
                    new.pop(c, None)
            g = 0
            for x in new.values():
                g = gcd(g, x)
                if g == 1:
                    break
            if g > 1:
                new = {c: x // g for c, x in new.items()}
            row = new
    return len(pivots)


def _rank_kernel(rows):
    cols = sorted({c for r in rows for c in r})
    if not cols:
        return 0
    if len(rows) * len(cols) > _DENSE_CELL_LIMIT:
        return None
    for r in rows:
        for x in r.values():
            if x >= _INT64_SAFE or x <= -_INT64_SAFE:
                return None
    index = {c: j for j, c in enumerate(cols)}
    # rows shorter than columns keep elimination cheap
    if len(rows) > len(cols):
        mat = _np.zeros((len(cols), len(rows)), dtype=_np.int64)
        for i, r in enumerate(rows):
            for c, x in r.items():
                mat[index[c], i] = x
    else:
        mat = _np.zeros((len(rows), len(cols)), dtype=_np.int64)
        for i, r in enumerate(rows):
            for c, x in r.items():
                mat[i, index[c]] = x
    result = _rank_int64(mat)
    return None if result < 0 else result


def rank(rows, backend=None):
    """Exact rank of a sparse rational matrix given as rows."""
    ints = integer_rows(rows)
    if not ints:
        return 0
    use = backend or ("cython" if HAVE_KERNEL else "python")
    if use == "cython":
        if not HAVE_KERNEL:
            raise RuntimeError("compiled rank kernel is not available")
        r = _rank_kernel(ints)
        if r is not None:
            return r
    return _rank_python(ints)


def transpose(rows):
    cols = {}
    for i, row in enumerate(rows):
        for c, v in row.items():
            cols.setdefault(c, {})[i] = v
    return [cols[c] for c in sorted(cols)]


def rref(rows, ncols=None):
    """Reduced row echelon form over Fraction; returns (rows, pivot_columns)."""
    work = []
    for row in rows:
        r = {c: Fraction(to_rational(v)) for c, v in row.items() if v}
        if r:
            work.append(r)
    pivots = []
    reduced = []
    for row in work:
        for prow, pc in zip(reduced, pivots):
            a = row.get(pc)
            if a:
                for c, v in prow.items():
                    x = row.get(c, 0) - a * v
                    if x:
                        row[c] = x
                    else:
                        row.pop(c, None)
        if not row:
            continue
        lead = min(row)
        inv = 1 / row[lead]
        row = {c: v * inv for c, v in row.items()}
        # back-substitute into earlier rows
        for k, prow in enumerate(reduced):
            a = prow.get(lead)
            if a:
                for c, v in row.items():
                    x = prow.get(c, 0) - a * v
                    if x:
                        prow[c] = x
                    else:
                        prow.pop(c, None)
        reduced.append(row)
        pivots.append(lead)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [reduced[i] for i in order], [pivots[i] for i in order]


def nullspace(rows, ncols):
    """Basis of ``{v : M v = 0}`` for the matrix with the given rows."""
    red, piv = rref(rows, ncols)
    pivset = set(piv)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        vec = {free: Fraction(1)}
        for prow, pc in zip(red, piv):
            a = prow.get(free)
            if a:
                vec[pc] = -a
        basis.append(vec)
    return basis


class CoordinateSolver:
    """Express vectors in the span of a fixed independent family.

    Vectors are ``{key: scalar}`` dicts over an arbitrary hashable key set.
    """

    def __init__(self, family):
        self._keys = {}
        self._reduced = []  # (pivot key, vector, combination over family)
        self.dim = 0
        for idx, vec in enumerate(family):
            comb = {idx: Fraction(1)}
            vec = {k: Fraction(v) for k, v in vec.items() if v}
            vec, comb = self._reduce(vec, comb)
            if not vec:
                raise ValueError(f"family member {idx} is linearly dependent")
            pivot = min(vec, key=self._order)
            inv = 1 / vec[pivot]
            vec = {k: v * inv for k, v in vec.items()}
            comb = {k: v * inv for k, v in comb.items()}
            self._reduced.append((pivot, vec, comb))
            self.dim += 1

    def _order(self, key):
        k = self._keys.get(key)
        if k is None:
            k = self._keys[key] = len(self._keys)
        return k

    def _reduce(self, vec, comb):
        vec = dict(vec)
        comb = dict(comb)
        for pivot, rvec, rcomb in self._reduced:
            a = vec.get(pivot)
            if not a:
                continue
            for k, v in rvec.items():
                x = vec.get(k, 0) - a * v
                if x:
                    vec[k] = x
                else:
                    vec.pop(k, None)
            for k, v in rcomb.items():
                x = comb.get(k, 0) - a * v
                if x:
                    comb[k] = x
                else:
                    comb.pop(k, None)
        return vec, comb

    def coordinates(self, vec):
        """Coordinates of ``vec``; raises ValueError if it is outside the span."""
        vec = {k: Fraction(to_rational(v)) for k, v in vec.items() if v}
        for k in vec:
            self._order(k)
        rest, comb = self._reduce(vec, {})
        if rest:
            raise ValueError("vector is not in the span of the family")
        return {k: -v for k, v in comb.items() if v}
