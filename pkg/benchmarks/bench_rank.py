"""Compare the compiled and pure-Python exact rank backends.

Usage: python3 benchmarks/bench_rank.py [--repeat 3] [--sizes 100,200,300]

Each case is timed on both backends and the ranks are asserted equal.  The
compiled kernel works in int64 with 128-bit intermediates; when entry growth
leaves that range it reports overflow and the Python backend takes over,
which the "kernel" column shows as "fallback".
"""

import argparse
import random
import time

from bvq.core import linalg
from bvq.lie1 import atom, oplus, v0
from bvq.quantize import quantized_algebra


def random_rows(n, m, density, seed, bound=5):
    rng = random.Random(seed)
    rows = []
    for _ in range(n):
        row = {j: rng.randint(-bound, bound) for j in range(m) if rng.random() < density}
        rows.append({j: v for j, v in row.items() if v})
    # force a rank deficiency so elimination does real work
    for i in range(0, n - 2, 3):
        combo = dict(rows[i])
        for j, v in rows[i + 1].items():
            combo[j] = combo.get(j, 0) + 2 * v
        rows[i + 2] = {j: v for j, v in combo.items() if v}
    return rows


def sparse_rows(n, per_row, seed):
    rng = random.Random(seed)
    return [{j: rng.choice((-1, 1)) for j in rng.sample(range(n), per_row)} for _ in range(n)]


def module_rows(N):
    U = quantized_algebra(oplus(v0(), oplus(atom(1), atom(0, ["y", "eta"]))), N)
    basis = U.alg.basis()
    index = {m: i for i, m in enumerate(basis)}
    by_deg = {}
    for m in basis:
        row = {index[t]: c for t, c in U.d.on_monomial(m).items() if t in index}
        by_deg.setdefault(U.alg.degree(m), []).append(row)
    return max(by_deg.values(), key=len)


def timed(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", default="100,200,300")
    args = ap.parse_args()
    if not linalg.HAVE_KERNEL:
        print("compiled kernel unavailable; only the Python backend can run")
    sizes = [int(n) for n in args.sizes.split(",")]
    cases = [(f"sparse {n}x{n}", sparse_rows(n, 3, n)) for n in sizes]
    cases += [(f"dense {n}x{n}", random_rows(n, n, 0.3, n)) for n in sizes[:2]]
    cases += [(f"quantized d, N={N}", module_rows(N)) for N in (8, 12)]
    print(f"{'case':<22} {'rank':>5} {'kernel':>9} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, rows in cases:
        tp, rp = timed(lambda: linalg.rank(rows, "python"), args.repeat)
        if linalg.HAVE_KERNEL:
            status = "ok" if linalg._rank_kernel(linalg.integer_rows(rows)) is not None else "fallback"
            tc, rc = timed(lambda: linalg.rank(rows, "cython"), args.repeat)
            assert rc == rp, (name, rc, rp)
            print(f"{name:<22} {rp:>5} {status:>9} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x")
        else:
            print(f"{name:<22} {rp:>5} {'-':>9} {tp:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
