"""Compare the compiled and interpreted LCS kernels.

Run with ``python benchmarks/bench_lcs.py``. Inputs are pairs of token-id
sequences shaped like method bodies: a random body and a copy with about a
fifth of its tokens edited.
"""

from __future__ import annotations

import argparse
import random
import timeit
from array import array

from tddiff import _lcs_py

try:
    from tddiff import _lcs_ext
except ImportError:
    _lcs_ext = None


def body_pair(rng: random.Random, n: int, vocab: int = 60) -> tuple[array, array]:
    a = [rng.randrange(vocab) for _ in range(n)]
    b = [rng.randrange(vocab) if rng.random() < 0.2 else t for t in a]
    return array("i", a), array("i", b)


def best_of(fn, a, b, repeat: int) -> float:
    number = max(1, 20_000 // (len(a) * len(b)))
    times = timeit.repeat(lambda: fn(a, b), number=number, repeat=repeat)
    return min(times) / number


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[25, 100, 400, 1600])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = random.Random(args.seed)
    print(f"{'tokens':>7} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}")
    for n in args.sizes:
        a, b = body_pair(rng, n)
        py = best_of(_lcs_py.lcs_length, a, b, args.repeat)
        if _lcs_ext is None:
            print(f"{n:>7} {py * 1e3:>12.3f} {'n/a':>12} {'n/a':>8}")
            continue
        assert _lcs_ext.lcs_length(a, b) == _lcs_py.lcs_length(a, b)
        cy = best_of(_lcs_ext.lcs_length, a, b, args.repeat)
        print(f"{n:>7} {py * 1e3:>12.3f} {cy * 1e3:>12.4f} {py / cy:>7.0f}x")
    if _lcs_ext is None:
        print("compiled kernel not built; install with a C compiler and Cython")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
