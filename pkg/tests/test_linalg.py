import random
from fractions import Fraction

import pytest

from ncomplex import kernel
from ncomplex.fields import QQ, make_cyclotomic, rat
from ncomplex.linalg import (
    EchelonSolver,
    ExactMatrix,
    QuotientSpace,
    Subspace,
    image_basis,
    intersection,
    kernel_basis,
    quotient_coordinates,
    rank,
    solve,
    sum_spaces,
)


def dense_rank_oracle(rows):
    """Fraction-based dense Gaussian elimination, independent of the kernel."""
    m = [[Fraction(x) for x in row] for row in rows]
    rk = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = None
        for r in range(rk, len(m)):
            if m[r][c] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        inv = 1 / m[rk][c]
        m[rk] = [v * inv for v in m[rk]]
        for r in range(len(m)):
            if r != rk and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rk])]
        rk += 1
    return rk


def random_int_matrix(rng, nrows, ncols, density=0.6, span=4):
    return [
        [rng.randint(-span, span) if rng.random() < density else 0 for _ in range(ncols)]
        for _ in range(nrows)
    ]


def test_rank_trivial_cases():
    assert rank(ExactMatrix.identity(5, QQ)) == 5
    assert rank(ExactMatrix.zeros(3, 4, QQ)) == 0
    assert kernel_basis(ExactMatrix.zeros(3, 4, QQ)).dim == 4
    assert kernel_basis(ExactMatrix.identity(5, QQ)).dim == 0


def test_jordan_block_rank_profile():
    # single 3x3 block with superdiagonal ones
    D3 = ExactMatrix.from_int_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]], QQ)
    assert rank(D3) == 2
    assert rank(D3 @ D3) == 1
    assert rank(D3 @ D3 @ D3) == 0


@pytest.mark.parametrize("seed", range(12))
def test_rank_against_oracle_and_transpose(seed):
    rng = random.Random(seed)
    rows = random_int_matrix(rng, rng.randint(1, 30), rng.randint(1, 30))
    M = ExactMatrix.from_int_rows(rows, QQ, ncols=len(rows[0]))
    r = rank(M)
    assert r == dense_rank_oracle(rows)
    assert r == rank(M.transpose())


@pytest.mark.parametrize("seed", range(8))
def test_kernel_image_rank_nullity(seed):
    rng = random.Random(100 + seed)
    rows = random_int_matrix(rng, rng.randint(2, 20), rng.randint(2, 20))
    M = ExactMatrix.from_int_rows(rows, QQ, ncols=len(rows[0]))
    K = kernel_basis(M)
    I = image_basis(M)
    assert (M @ K.basis).is_zero()
    assert K.dim + I.dim == M.ncols
    assert rank(K.basis) == K.dim
    assert rank(I.basis) == I.dim


def test_solver_membership():
    rng = random.Random(7)
    rows = random_int_matrix(rng, 9, 6)
    M = ExactMatrix.from_int_rows(rows, QQ, ncols=6)
    x = {0: rat(2), 3: rat(-1, 2), 5: rat(1)}
    b = M.apply(x)
    sol = solve(M, b)
    assert sol is not None
    assert M.apply(sol) == b
    # inconsistent system
    M2 = ExactMatrix.from_int_rows([[1, 0], [1, 0]], QQ)
    assert solve(M2, {0: rat(1), 1: rat(2)}) is None


def test_solver_reuse():
    rng = random.Random(8)
    rows = random_int_matrix(rng, 7, 7, density=0.8)
    M = ExactMatrix.from_int_rows(rows, QQ)
    sol = EchelonSolver(M)
    for k in range(5):
        x = {rng.randint(0, 6): rat(rng.randint(-3, 3)) for _ in range(3)}
        b = M.apply(x)
        got = sol.solve(b)
        assert got is not None and M.apply(got) == b


def test_quotient_coordinates_examples():
    Z = Subspace.full(2, QQ)
    B = Subspace(2, ExactMatrix.from_int_rows([[1], [0]], QQ))
    # v in B -> zero coordinates
    assert quotient_coordinates(Z, B, {0: rat(3)}) == {}
    # v = e2 -> coordinate 1 against complement {e2}
    assert quotient_coordinates(Z, B, {1: rat(1)}) == {0: rat(1)}


def test_quotient_dimension_random():
    rng = random.Random(42)
    A = ExactMatrix.from_int_rows(random_int_matrix(rng, 8, 5), QQ, ncols=5)
    Z = image_basis(A)
    B = image_basis(A.take_columns([0, 1]))
    q = QuotientSpace(Z, B)
    assert q.dim == Z.dim - B.dim
    reps = q.representatives()
    # representatives are independent and lie in Z
    assert rank(B.basis.hstack(reps)) == B.dim + q.dim
    for col in reps.columns():
        assert Z.contains(col)
    # class of any B-vector is zero
    assert q.coordinates(B.basis.column(0)) == {}


def test_quotient_rejects_bad_containment():
    Z = Subspace(3, ExactMatrix.from_int_rows([[1], [0], [0]], QQ))
    B = Subspace(3, ExactMatrix.from_int_rows([[0], [1], [0]], QQ))
    with pytest.raises(ValueError):
        QuotientSpace(Z, B)


def test_intersection_and_sum():
    S1 = Subspace(3, ExactMatrix.from_int_rows([[1, 0], [0, 1], [0, 0]], QQ))
    S2 = Subspace(3, ExactMatrix.from_int_rows([[0, 0], [1, 0], [0, 1]], QQ))
    I = intersection(S1, S2)
    assert I.dim == 1
    assert S1.contains(I.basis.column(0)) and S2.contains(I.basis.column(0))
    assert sum_spaces(S1, S2).dim == 3


def test_cyclotomic_elimination():
    f = make_cyclotomic(3)
    z = f.zeta()
    M = ExactMatrix.from_rows([[z, f.one], [f.one, f.pow(z, 2)]], f)
    assert rank(M) == 1  # rows proportional: z * z^2 = 1
    K = kernel_basis(M)
    assert K.dim == 1
    assert (M @ K.basis).is_zero()


@pytest.mark.parametrize("seed", range(6))
def test_backend_parity(seed):
    """Compiled and pure kernels must agree entry-for-entry."""
    if kernel.available_backends() == ["pure"]:
        pytest.skip("compiled backend not built")
    rng = random.Random(300 + seed)
    for field in (QQ, make_cyclotomic(4)):
        nr, ncols = rng.randint(1, 12), rng.randint(1, 12)
        rows = []
        for _ in range(nr):
            ent = [
                (c, field.from_rat(rng.randint(-3, 3)))
                for c in sorted(rng.sample(range(ncols), rng.randint(0, ncols)))
            ]
            ent = [(c, v) for c, v in ent if not field.is_zero(v)]
            rows.append(([c for c, _ in ent], [v for _, v in ent]))
        import copy

        out_c = kernel.row_echelon(copy.deepcopy(rows), ncols, field, backend="compiled")
        out_p = kernel.row_echelon(copy.deepcopy(rows), ncols, field, backend="pure")
        assert out_c[0] == out_p[0]
        assert out_c[1] == out_p[1]
        assert out_c[2] == out_p[2]


def test_matrix_json_roundtrip():
    f = make_cyclotomic(4)
    M = ExactMatrix.from_rows([[f.zeta(), f.zero], [f.one, f.from_rat(1, 2)]], f)
    obj = M.to_json()
    M2 = ExactMatrix.from_json(obj)
    assert M2 == M
    assert M2.to_json() == obj
