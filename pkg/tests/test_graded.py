import random

import pytest

from ncomplex.fields import QQ, make_cyclotomic, rat
from ncomplex.graded import (
    GradedNComplex,
    WindowError,
    check_graded_q_leibniz,
    graded_homology,
    kunneth_check,
    les_check,
    matrix_algebra_complex,
    q_tensor,
    random_graded_complex,
    random_graded_ses,
)
from ncomplex.linalg import ExactMatrix
from ncomplex.ndiff import homology, homotopy_criterion_lemma4


def two_term_complex(field, mat):
    """0 -> k^a -> k^b -> 0 in degrees 0, 1."""
    return GradedNComplex(
        2, field, {0: mat.ncols, 1: mat.nrows}, {0: mat}
    )


def test_concentrated_complex():
    C = GradedNComplex(3, QQ, {0: 4}, {})
    H = graded_homology(C)
    for m in (1, 2):
        assert H[(0, m)].dim_H == 4


def test_two_term_identity_acyclic():
    C = two_term_complex(QQ, ExactMatrix.identity(3, QQ))
    H = graded_homology(C)
    assert H[(0, 1)].dim_H == 0
    assert H[(1, 1)].dim_H == 0


def test_validity_window_truncated():
    # truncated above: top homology must be absent, not wrong
    C = GradedNComplex(
        3, QQ, {0: 1, 1: 1, 2: 1}, {0: ExactMatrix.zeros(1, 1, QQ), 1: ExactMatrix.zeros(1, 1, QQ)},
        truncated_above=True,
    )
    H = graded_homology(C)
    assert H.valid(0, 1) and H.valid(1, 1)
    assert not H.valid(2, 1)  # d out of degree 2 unknown
    assert not H.valid(2, 2) and H.valid(0, 2)
    with pytest.raises(WindowError):
        H[(2, 1)]


def test_total_module_consistency():
    rng = random.Random(3)
    C = random_graded_complex(QQ, 3, rng, lo=0, hi=5, strings=7)
    E = C.total_module()
    HC = graded_homology(C)
    HE = homology(E)
    for m in (1, 2):
        assert HE.dims()[m] == sum(HC[(n, m)].dim_H for n in C.degrees())


@pytest.mark.parametrize("N", [3, 4, 5])
def test_matrix_algebra_complex(N):
    f = make_cyclotomic(N)
    q = f.zeta()
    lambdas = [f.one] * N
    M = matrix_algebra_complex(N, q, lambdas, f)
    C = M.complex
    # e^N = lambda_1...lambda_N * identity
    assert M.e_power_is_scalar()
    # graded q-Leibniz rule on all basis pairs
    assert check_graded_q_leibniz(C, q)
    # acyclicity when all lambda = 1 and 1 - q invertible
    total = C.total_module()
    assert all(v == 0 for v in homology(total).dims().values())


def test_matrix_algebra_lemma4_homotopy():
    f = make_cyclotomic(3)
    M = matrix_algebra_complex(3, f.zeta(), [f.one] * 3, f)
    total, h = M.lemma4_homotopy()
    assert homotopy_criterion_lemma4(total, h, f.zeta())


def test_matrix_algebra_degenerate_lambda():
    # a zero lambda keeps d^N = 0; homology is computed and reported
    # (frozen from the rank computation: (1,1,0) stays acyclic, (1,0,0) not)
    f = make_cyclotomic(3)
    M = matrix_algebra_complex(3, f.zeta(), [f.one, f.one, f.zero], f)
    total = M.complex.total_module()
    assert total.power(3).is_zero()
    assert homology(total).dims() == {1: 0, 2: 0}
    M2 = matrix_algebra_complex(3, f.zeta(), [f.one, f.zero, f.zero], f)
    total2 = M2.complex.total_module()
    assert total2.power(3).is_zero()
    assert homology(total2).dims() == {1: 4, 2: 4}


def test_q_tensor_classical_sign_rule():
    # N = 2, q = -1 must reproduce the classical tensor differential
    f = QQ
    A = two_term_complex(f, ExactMatrix.from_int_rows([[1, 0], [0, 2]], f))
    B = two_term_complex(f, ExactMatrix.from_int_rows([[3]], f))
    T = q_tensor(A, B, f.neg(f.one))
    # spot entry: d(x ox y) on degree (1,0)-block must carry sign (-1)^1
    # checked globally by the power-formula validation inside q_tensor
    assert T.N == 2
    assert T.dims == {0: 2, 1: 4, 2: 2}


def test_q_tensor_matrix_example():
    f = make_cyclotomic(3)
    q = f.zeta()
    M = matrix_algebra_complex(3, q, [f.one] * 3, f)
    T = q_tensor(M.complex, M.complex, q)  # validates d^3 = 0 + power formula
    assert T.cyclic and T.dims[0] == 27


def test_q_tensor_rejects_weak_assumption():
    with pytest.raises(ValueError):
        q_tensor(
            two_term_complex(QQ, ExactMatrix.identity(1, QQ)),
            two_term_complex(QQ, ExactMatrix.identity(1, QQ)),
            QQ.one,
        )


def test_kunneth_field_factor():
    rng = random.Random(5)
    C = random_graded_complex(QQ, 2, rng, lo=0, hi=4, strings=5)
    point = GradedNComplex(2, QQ, {0: 1}, {})
    rep = kunneth_check(C, point)
    assert rep["ok"]
    HC = graded_homology(C)
    for n, (lhs, rhs) in rep["degrees"].items():
        if HC.valid(n, 1):
            assert lhs == HC[(n, 1)].dim_H


def test_kunneth_contractible_factor():
    C = two_term_complex(QQ, ExactMatrix.identity(1, QQ))
    rep = kunneth_check(C, C)
    assert rep["ok"]
    assert all(lhs == 0 for lhs, _ in rep["degrees"].values())


def test_kunneth_random():
    rng = random.Random(7)
    for _ in range(10):
        A = random_graded_complex(QQ, 2, rng, lo=0, hi=3, strings=4)
        B = random_graded_complex(QQ, 2, rng, lo=0, hi=3, strings=4)
        assert kunneth_check(A, B)["ok"]


def test_les_split():
    rng = random.Random(11)
    ses = random_graded_ses(QQ, 3, rng)
    rep = les_check(ses, 1, 0)
    assert rep["ok"]


def test_les_random():
    rng = random.Random(13)
    for _ in range(4):
        ses = random_graded_ses(QQ, 3, rng)
        for n in (1, 2):
            for p in (0, 1):
                assert les_check(ses, n, p)["ok"]


def test_cyclic_pullback():
    f = make_cyclotomic(3)
    M = matrix_algebra_complex(3, f.zeta(), [f.one] * 3, f)
    Z = M.complex.to_zgraded(-3, 5)
    assert Z.truncated_below and Z.truncated_above
    H = graded_homology(Z)
    for (n, m), slot in H.slots.items():
        assert slot.dim_H == 0  # acyclic example stays acyclic degreewise


def test_graded_json_roundtrip():
    rng = random.Random(17)
    C = random_graded_complex(QQ, 3, rng, lo=0, hi=3, strings=4)
    obj = C.to_json()
    C2 = GradedNComplex.from_json(obj)
    assert C2.dims == C.dims
    assert all(C2.maps[n] == C.maps[n] for n in C.maps)
    assert C2.to_json() == obj


def test_q_tensor_entrywise_matches_classical():
    # q = -1, N = 2: the maps must agree entry-for-entry with the hand-built
    # classical tensor differential d(e ox f) = de ox f + (-1)^deg(e) e ox df
    rng = random.Random(23)
    A = random_graded_complex(QQ, 2, rng, lo=0, hi=2, strings=3)
    B = random_graded_complex(QQ, 2, rng, lo=0, hi=2, strings=3)
    T = q_tensor(A, B, QQ.neg(QQ.one), validate_power_formula=False)
    from ncomplex.graded import TensorIndex

    idx = TensorIndex(A, B, False)
    f = QQ
    for n in sorted(T.maps):
        ent = {}
        for (r, s), off in idx.layout[n].items():
            dA, dB = A.map(r), B.map(s)
            sign = f.one if r % 2 == 0 else f.neg(f.one)
            for i in range(A.dims[r]):
                for j in range(B.dims[s]):
                    col = off + i * B.dims[s] + j
                    if dA is not None and (r + 1, s) in idx.layout.get(n + 1, {}):
                        for i2, v in dA.column(i).items():
                            ent[(idx.pos(n + 1, r + 1, s, i2, j), col)] = v
                    if dB is not None and (r, s + 1) in idx.layout.get(n + 1, {}):
                        for j2, v in dB.column(j).items():
                            key = (idx.pos(n + 1, r, s + 1, i, j2), col)
                            ent[key] = f.mul(sign, v)
        want = ExactMatrix(T.dims.get(n + 1, 0), T.dims[n], QQ, ent)
        assert T.maps[n] == want


def test_les_cone_connecting_isomorphisms():
    # F acyclic (all strings of full length N): the long sequences force the
    # connecting maps to be isomorphisms in every period
    from ncomplex.graded import GradedSES, graded_connecting

    rng = random.Random(29)
    N = 3
    checked_iso = 0
    ses = random_graded_ses(QQ, N, rng, min_len=N)  # F built from N-strings
    HF = graded_homology(ses.F)
    assert all(s.dim_H == 0 for s in HF.slots.values())
    for n in (1, 2):
        for p in (0, 1, 2):
            assert les_check(ses, n, p)["ok"]
    HE = graded_homology(ses.E)
    HG = graded_homology(ses.G)
    for (j, m), slotG in HG.slots.items():
        tgt = (j + m, N - m)
        if tgt not in HE.slots or slotG.dim_H == 0:
            continue
        partial = graded_connecting(ses, HG.slots, HE.slots, j, m)
        from ncomplex.linalg import rank as _rank

        assert _rank(partial) == slotG.dim_H == HE.slots[tgt].dim_H
        checked_iso += 1
    assert checked_iso > 0
