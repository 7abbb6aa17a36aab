"""Benchmark: compiled elimination kernel vs the pure-Python twin.

The hot loop of the whole workbench is sparse exact row reduction; this
script times both backends on representative workloads and prints the
speedup table.  Run as `python benchmarks/bench_kernel.py`."""

import random
import time

from ncomplex import kernel
from ncomplex.fields import QQ, make_cyclotomic
from ncomplex.linalg import ExactMatrix


def random_matrix(field, n, m, density, rng, span=5):
    ent = {}
    for i in range(n):
        for j in range(m):
            if rng.random() < density:
                v = field.from_rat(rng.randint(-span, span))
                if not field.is_zero(v):
                    ent[(i, j)] = v
    return ExactMatrix(n, m, field, ent)


def hochschild_style(field, n_max=6):
    """The d_1 matrix of the Hochschild complex of the dual numbers: the
    realistic sparse structured case."""
    from ncomplex.cosimplicial import BimoduleData, d1, dual_numbers, hochschild

    A = dual_numbers(field)
    E = hochschild(A, BimoduleData.regular(A), n_max)
    C = d1(E, field.zeta(), 3)
    return C.maps[n_max - 1]


def time_backend(M, backend, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        rows = M.rows_sparse()
        t0 = time.perf_counter()
        kernel.row_echelon(rows, M.ncols, M.field, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = random.Random(20240)
    f3 = make_cyclotomic(3)
    f8 = make_cyclotomic(8)
    cases = [
        ("rational dense 60x60", random_matrix(QQ, 60, 60, 0.9, rng)),
        ("rational dense 120x120", random_matrix(QQ, 120, 120, 0.9, rng)),
        ("rational sparse 200x200 (5%)", random_matrix(QQ, 200, 200, 0.05, rng)),
        ("cyclotomic Q(z3) 40x40", random_matrix(f3, 40, 40, 0.8, rng)),
        ("cyclotomic Q(z8) 30x30", random_matrix(f8, 30, 30, 0.8, rng)),
        ("hochschild d1 structured", hochschild_style(f3)),
    ]
    backends = kernel.available_backends()
    print(f"backends available: {', '.join(backends)}")
    header = f"{'case':34s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for name, M in cases:
        times = [time_backend(M, b) for b in backends]
        row = f"{name:34s}" + "".join(f"{t * 1e3:10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
