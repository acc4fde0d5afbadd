"""Time the compiled kernels against their numpy counterparts.

Run with ``python3 benchmarks/bench_kernels.py``; set ``LAMBEKWS_NO_JIT=1``
to time the loop kernels under the interpreter instead.
"""

import argparse
import time

import numpy as np

from lambekws import kernels
from lambekws._accel import backend_name
from lambekws.fields import F2
from lambekws.kalgebra import random_algebra
from lambekws.linalg import add_scale, vector_table
from lambekws.relations import ModalRelation


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def best_of(fn, repeat):
    fn()  # warm-up (compilation)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases(seed):
    rng = np.random.default_rng(seed)
    A = random_algebra(F2, 8, seed)
    V = vector_table(2, 8)
    sc = A.sc_array
    M = rng.integers(0, 2, size=(40, 64), dtype=np.int64)
    inv = F2.inverse_table
    X, Y = V[rng.integers(0, 256, 4000)], V[rng.integers(0, 256, 4000)]
    masks = np.array([0b111000000, 0b111111000, 0b111111111], dtype=np.int64)
    R = ModalRelation.embedding(2, ((True, True), (False, True)))
    rel = R.relation_matrix()
    add, scale = add_scale(2, 4)
    return [
        ("rref_modp 40x64", kernels.rref_modp_loops, kernels.rref_modp_numpy, (M, 2, inv)),
        ("product_table 256x256 d=8", kernels.product_table_loops, kernels.product_table_numpy, (V, V, sc, 2)),
        ("multiple_of 4000 rows", kernels.multiple_of_loops, kernels.multiple_of_numpy, (X, Y, 2)),
        ("coverage_relation n=3", kernels.coverage_relation_loops, kernels.coverage_relation_numpy, (3, masks)),
        ("l1r_violation dim 4", kernels.l1r_violation_loops, kernels.l1r_violation_numpy, (rel, add, scale, 2)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print(f"loop backend: {backend_name()}")
    print(f"{'kernel':<30}{'loops (s)':>12}{'numpy (s)':>12}{'ratio':>9}  agree")
    for name, loops, vec, inputs in cases(args.seed):
        a = loops(*inputs)
        b = vec(*inputs)
        agree = same(a, b)
        tl = best_of(lambda: loops(*inputs), args.repeat)
        tn = best_of(lambda: vec(*inputs), args.repeat)
        print(f"{name:<30}{tl:>12.5f}{tn:>12.5f}{tn / tl:>9.2f}  {agree}")


if __name__ == "__main__":
    main()
