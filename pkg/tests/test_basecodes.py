import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tdpir.basecodes import (
    CodeError,
    LinearCode,
    OrthogonalArray,
    codeword_set,
    codewords,
    decompose_mds2_as_grs,
    dual_code,
    dual_distance,
    golay12_ternary,
    golay24_binary,
    grs,
    is_mds,
    is_p_divisible,
    kernel_fq,
    min_distance,
    mds_q_plus_2,
    oa_from_code,
    parity_check_code,
    puncture,
    rank_fq,
    rm1,
    rref_fq,
    rs,
    same_code,
    scale,
    verify_oa,
    weights,
    zero_code,
)
from tdpir.ff import field_new, field_of_order, vmul, vsum
from tdpir.fileio import read_code, read_oa, write_code, write_oa

from .worked_examples import PARITY3_ARRAY, RS2_F4_ARRAY


def brute_dual_distance(C):
    """Smallest nonzero weight among all vectors orthogonal to G (full scan)."""
    F = C.F
    best = C.length + 1
    for v in itertools.product(range(F.q), repeat=C.length):
        w = sum(1 for x in v if x)
        if 0 < w < best and not np.any(vsum(F, vmul(F, C.G, np.array(v)[None, :]), axis=1)):
            best = w
    return best


def rowset(M):
    return sorted(map(tuple, np.asarray(M).tolist()))


def test_parity_code_array():
    C = parity_check_code(3)
    A = oa_from_code(C)
    assert (A.s, A.ell, A.strength, A.lam) == (2, 3, 2, 1)
    assert rowset(A.rows) == rowset(PARITY3_ARRAY)
    assert verify_oa(A, 2, 1)
    assert not verify_oa(A, 3, 1)
    assert dual_distance(C) == 3 == brute_dual_distance(C)


def test_rs2_f4_array_rows():
    A = oa_from_code(rs(2, field_of_order(4)))
    assert rowset(A.rows) == rowset(RS2_F4_ARRAY)
    assert (A.strength, A.lam) == (2, 1)


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8])
def test_rs2_dual_distance(q):
    F = field_of_order(q)
    for ell in range(3, q + 1):
        assert dual_distance(rs(2, F, np.arange(ell))) == 3


def test_rs3_array_has_strength_three():
    A = oa_from_code(rs(3, field_of_order(4)))
    assert A.strength == 3 and A.lam == 1
    assert verify_oa(A, 3, 1)


def test_rs2_f3_weights():
    C = rs(2, field_of_order(3))
    W = weights(C)
    assert W.size == 9
    assert sorted(W.tolist()) == [0, 2, 2, 2, 2, 2, 2, 3, 3]
    assert min_distance(C) == 2
    assert not is_p_divisible(C, 3)


def test_grs_special_cases():
    F = field_of_order(5)
    x = np.array([0, 1, 3, 4])
    assert same_code(grs(2, x, np.ones(4, dtype=int), F), rs(2, F, x))
    y = np.array([1, 2, 3, 4])
    mult = {tuple(vmul(F, c, y).tolist()) for c in range(5)}
    assert codeword_set(grs(1, x, y, F)) == mult
    with pytest.raises(CodeError):
        grs(2, [1, 1, 2], [1, 1, 1], F)
    with pytest.raises(CodeError):
        grs(2, [0, 1, 2], [1, 0, 1], F)


@given(st.sampled_from([3, 4, 5, 7, 8]), st.data())
def test_grs_is_mds(q, data):
    F = field_of_order(q)
    ell = data.draw(st.integers(2, q))
    k = data.draw(st.integers(1, ell))
    x = data.draw(st.permutations(list(range(q))))[:ell]
    y = data.draw(st.lists(st.integers(1, q - 1), min_size=ell, max_size=ell))
    C = grs(k, x, y, F)
    assert C.k == k and is_mds(C)
    if q**k <= 4096:
        assert min_distance(C) == ell - k + 1


def test_golay_binary():
    C = golay24_binary()
    assert (C.length, C.k) == (24, 12)
    W = weights(C)
    assert W.size == 4096 and min_distance(C) == 8
    assert np.all(W % 4 == 0)
    assert is_p_divisible(C, 2)
    assert dual_distance(C) == 8
    assert sorted(set(W.tolist())) == [0, 8, 12, 16, 24]


def test_golay_ternary():
    C = golay12_ternary()
    assert (C.length, C.k) == (12, 6)
    assert min_distance(C) == 6
    assert is_p_divisible(C, 3)
    assert dual_distance(C) == 6
    assert not np.any((C.G @ C.G.T) % 3)


def test_reed_muller_first_order():
    C = rm1(3)
    assert (C.length, C.k) == (8, 4)
    assert is_p_divisible(C, 2)
    assert dual_distance(C) == 4
    assert sorted(set(weights(C).tolist())) == [0, 4, 8]
    C2 = rm1(2)
    assert (C2.length, C2.k) == (4, 3)
    assert codeword_set(C2) == {v for v in itertools.product((0, 1), repeat=4) if sum(v) % 2 == 0}


def test_reed_muller_four_dual_distance():
    # the dual of RM(1,4) is RM(2,4), whose minimum weight is 4
    C = rm1(4)
    assert (C.length, C.k) == (16, 5)
    assert dual_distance(C) == 4
    # the weight-4 dual word: the indicator of a 2-flat {0, 1, 2, 3}
    v = np.zeros(16, dtype=int)
    v[[0, 1, 2, 3]] = 1
    assert not np.any((C.G @ v) % 2)


@pytest.mark.parametrize("q,d", [(4, 4), (8, 8)])
def test_hyperoval_codes(q, d):
    C = mds_q_plus_2(field_of_order(q))
    assert (C.length, C.k) == (q + 2, 3)
    assert min_distance(C) == d
    assert is_mds(C)
    if q == 4:
        assert dual_distance(C) == 4


def test_hyperoval_needs_even_characteristic():
    with pytest.raises(CodeError):
        mds_q_plus_2(field_of_order(9))
    with pytest.raises(CodeError):
        mds_q_plus_2(field_of_order(2))


def test_zero_code_is_divisible():
    Z = zero_code(field_new(3), 4)
    assert Z.k == 0 and is_p_divisible(Z, 3)
    assert codewords(Z).tolist() == [[0, 0, 0, 0]]
    assert min_distance(Z) == 5


@pytest.mark.parametrize("C", [parity_check_code(4), rs(2, field_of_order(3)), rm1(2),
                               rs(2, field_of_order(4), [0, 1, 2])], ids=str)
def test_dual_distance_against_full_scan(C):
    assert dual_distance(C) == brute_dual_distance(C)


def test_dual_distance_column_search_agrees():
    for C in (golay12_ternary(), rm1(4), rs(2, field_of_order(7))):
        assert dual_distance(C, budget=1) == dual_distance(C)
    full = LinearCode(field_new(2), np.eye(3, dtype=int))
    assert dual_distance(full) == 4


def test_dual_code_orthogonal():
    for C in (golay24_binary(), rs(2, field_of_order(8)), mds_q_plus_2(field_of_order(4))):
        D = dual_code(C)
        assert D.k == C.length - C.k
        if C.F.e == 1:
            assert not np.any((C.G @ D.G.T) % C.F.p)


@pytest.mark.parametrize("C", [parity_check_code(3), rs(2, field_of_order(4)), rs(3, field_of_order(4)),
                               golay12_ternary(), rm1(3), mds_q_plus_2(field_of_order(4))], ids=str)
def test_array_from_code_is_balanced(C):
    A = oa_from_code(C)
    t = dual_distance(C) - 1
    assert A.strength == t and A.lam == C.F.q ** (C.k - t)
    assert verify_oa(A, t, A.lam)


def test_array_rejects_repeats():
    with pytest.raises(CodeError):
        OrthogonalArray(2, 2, 1, 1, [[0, 0], [0, 0]])
    with pytest.raises(CodeError):
        OrthogonalArray(2, 2, 1, 1, [[0, 0], [1, 1]])


@pytest.mark.parametrize("q", [4, 8, 16])
def test_decompose_plain_rs(q):
    F = field_of_order(q)
    C = rs(2, F)
    x, y = decompose_mds2_as_grs(C)
    assert codeword_set(grs(2, x, y, F)) == codeword_set(C)


def test_decompose_random_scaled_codes():
    rng = np.random.default_rng(7)
    F = field_of_order(8)
    for _ in range(20):
        ell = int(rng.integers(2, 9))
        x = rng.permutation(8)[:ell]
        y = rng.integers(1, 8, size=ell)
        C = grs(2, x, y, F)
        x2, y2 = decompose_mds2_as_grs(C)
        assert np.unique(x2).size == ell and np.all(y2 != 0)
        assert codeword_set(grs(2, x2, y2, F)) == codeword_set(C)


def test_decompose_full_space():
    F = field_of_order(4)
    C = LinearCode(F, np.eye(2, dtype=int))
    x, y = decompose_mds2_as_grs(C)
    assert x[0] != x[1]
    assert len(codeword_set(grs(2, x, y, F))) == 16


def test_decompose_rejects_bad_input():
    F = field_of_order(4)
    with pytest.raises(CodeError):
        decompose_mds2_as_grs(rs(3, F))
    with pytest.raises(CodeError):
        decompose_mds2_as_grs(LinearCode(F, np.array([[1, 1, 0], [0, 0, 1]])))


def test_puncture():
    F = field_of_order(5)
    S = [0, 2, 3]
    P = puncture(rs(2, F), [1, 4])
    assert same_code(P, rs(2, F, S))
    with pytest.raises(CodeError):
        puncture(rs(2, F), range(5))
    full = puncture(parity_check_code(3), [0])
    assert codeword_set(full) == set(itertools.product((0, 1), repeat=2))
    with pytest.raises(CodeError):
        puncture(rs(3, F), [0, 1, 2])


def test_scale_keeps_dimension():
    F = field_of_order(4)
    C = scale(rs(2, F), [1, 2, 3, 1])
    assert C.k == 2 and is_mds(C)


@given(st.sampled_from([(2, 1), (3, 1), (2, 2), (2, 3), (3, 2)]), st.data())
def test_field_elimination(pe, data):
    F = field_new(*pe)
    rows = data.draw(st.integers(1, 5))
    cols = data.draw(st.integers(1, 6))
    M = np.array(data.draw(st.lists(st.lists(st.integers(0, F.q - 1), min_size=cols, max_size=cols),
                                    min_size=rows, max_size=rows)))
    r = rank_fq(M, F)
    R, piv = rref_fq(M, F)
    assert len(piv) == r
    K = kernel_fq(M, F)
    assert K.shape[0] == cols - r
    for v in K:
        assert not np.any(vsum(F, vmul(F, M, v[None, :]), axis=1))


def test_code_and_array_files(tmp_path):
    C = mds_q_plus_2(field_of_order(4))
    write_code(C, tmp_path / "c.code")
    C2 = read_code(tmp_path / "c.code")
    assert (C2.F, C2.length, C2.k) == (C.F, C.length, C.k) and same_code(C, C2)
    A = oa_from_code(parity_check_code(3))
    write_oa(A, tmp_path / "a.oa")
    A2 = read_oa(tmp_path / "a.oa")
    assert (A2.s, A2.ell, A2.strength, A2.lam) == (2, 3, 2, 1)
    assert np.array_equal(A2.rows, A.rows)
    assert (tmp_path / "a.oa").read_text().splitlines()[0] == "OA 2 3 2 1 4"
