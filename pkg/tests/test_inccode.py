import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tdpir.basecodes import (
    LinearCode,
    codeword_set,
    dual_distance,
    golay12_ternary,
    golay24_binary,
    oa_from_code,
    parity_check_code,
    rm1,
    rs,
)
from tdpir.design import incidence_matrix, td_affine, td_from_oa, td_projective
from tdpir.ff import field_new, field_of_order
from tdpir.inccode import (
    IncidenceCodeError,
    check_divisibility_bounds,
    check_shortening_lemma,
    code_of_design,
    design_rank,
    encode,
    expected_rate_affine_plane,
    gram_identity_holds,
    group_constancy_expected,
    incidence_code,
    is_groupwise_constant,
    parity_holds,
    rs2_dimension_census,
    shorten_generator,
)
from tdpir.linalg import matmul_mod, naive_rank, rank_p, row_space_equal

from .worked_examples import AG_PLANE_F3_GENERATOR, RS2_F4_IC_GENERATOR


def check_code_invariants(C):
    M = incidence_matrix(C.design)
    assert not np.any(matmul_mod(M, C.generator.T, C.p))
    assert C.k + rank_p(M, C.p) == C.n
    assert rank_p(C.generator, C.p) == C.k
    assert len(C.sigma) == C.k


def test_plane_code_over_f3():
    F = field_of_order(3)
    C = code_of_design(td_affine(2, F), F)
    assert (C.n, C.k) == (9, 3)
    check_code_invariants(C)
    # the fixed generator is written for points ordered (x, y) -> 3x + y
    # while the design groups points by y; reorder its columns to compare
    perm = [3 * (pid % 3) + pid // 3 for pid in range(9)]
    assert row_space_equal(C.generator, AG_PLANE_F3_GENERATOR[:, perm], 3)


def test_plane_over_f8_binary_and_ternary():
    D = td_affine(2, field_of_order(8))
    C2 = code_of_design(D, field_new(2))
    assert (C2.n, C2.k) == (64, 37)
    check_code_invariants(C2)
    C3 = code_of_design(D, field_new(3))
    assert C3.k <= 8
    assert group_constancy_expected(C3) and is_groupwise_constant(C3)
    assert not group_constancy_expected(C2)


def test_rs2_f4_incidence_code():
    C = incidence_code(rs(2, field_of_order(4)))
    assert (C.n, C.k) == (16, 7)
    check_code_invariants(C)
    assert row_space_equal(C.generator, RS2_F4_IC_GENERATOR, 2)


@pytest.mark.parametrize("C0", [parity_check_code(3), rm1(3), golay12_ternary(),
                                rs(2, field_of_order(5)), rs(3, field_of_order(4))], ids=str)
def test_incidence_code_invariants(C0):
    C = incidence_code(C0)
    assert C.t == dual_distance(C0) - 1
    check_code_invariants(C)
    assert parity_holds(C)


def test_ternary_golay_dimension():
    C = incidence_code(golay12_ternary())
    assert (C.n, C.k) == (36, 18)


@pytest.mark.parametrize("C0", [parity_check_code(3), parity_check_code(5), rm1(3), rm1(4),
                                golay24_binary()], ids=str)
def test_binary_two_symbol_dimension(C0):
    # with s = 2 the incidence rows are the all-ones-per-group vector plus the
    # codeword embedding, so the rank is k0 + 1
    C = incidence_code(C0)
    assert C.k == 2 * C0.length - C0.k - 1
    M = incidence_matrix(C.design)
    assert naive_rank(M, 2) == C0.k + 1


@st.composite
def binary_codes(draw):
    """[I | A] with distinct columns of weight >= 2 in A, so that all columns
    of the generator are distinct and nonzero (dual distance >= 3)."""
    k = draw(st.integers(2, 5))
    heavy = [v for v in range(1, 2**k) if bin(v).count("1") >= 2]
    cols = draw(st.lists(st.sampled_from(heavy), min_size=1, max_size=min(5, len(heavy)), unique=True))
    A = np.array([[(v >> i) & 1 for v in cols] for i in range(k)])
    return LinearCode(field_new(2), np.hstack([np.eye(k, dtype=np.int64), A]))


@given(binary_codes())
def test_binary_two_symbol_dimension_random(C0):
    assert dual_distance(C0) >= 3
    C = incidence_code(C0)
    assert C.k == 2 * C0.length - C0.k - 1


def test_encode_is_systematic_and_in_code():
    F = field_of_order(3)
    C = code_of_design(td_affine(2, F), F)
    for msg in itertools.product(range(3), repeat=3):
        c = encode(C, np.array(msg))
        assert c[C.sigma].tolist() == list(msg)
        assert parity_holds(C, c)


def test_encode_extension_field():
    C = incidence_code(rs(2, field_of_order(4)), field_of_order(4))
    rng = np.random.default_rng(0)
    msgs = rng.integers(4, size=(30, C.k))
    cw = encode(C, msgs)
    assert np.array_equal(cw[:, C.sigma], msgs)
    assert all(parity_holds(C, c) for c in cw)
    bad = cw[0].copy()
    bad[0] ^= 1
    assert not parity_holds(C, bad)
    with pytest.raises(IncidenceCodeError):
        encode(C, np.zeros(C.k + 1, dtype=int))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_affine_plane_rate_identity(p):
    F = field_of_order(p)
    C = code_of_design(td_affine(2, F), F)
    n, k = expected_rate_affine_plane(p, 1)
    assert (C.n, C.k) == (n, k)


@pytest.mark.parametrize("q", [4, 8, 9, 16])
def test_affine_plane_rate_identity_extensions(q):
    F = field_of_order(q)
    C = code_of_design(td_affine(2, F), F)
    assert (C.n, C.k) == expected_rate_affine_plane(F.p, F.e)
    assert C.n / C.k == pytest.approx(1 / (1 - ((1 + 1 / F.p) / 2) ** F.e))


def brute_census(F, ell):
    hist = {}
    for x in itertools.combinations(range(F.q), ell):
        D = td_from_oa(oa_from_code(rs(2, F, np.array(x))))
        k = D.npoints - naive_rank(incidence_matrix(D), F.p)
        hist[k] = hist.get(k, 0) + 1
    return hist


@pytest.mark.parametrize("q,ell", [(4, 3), (5, 3), (4, 4)])
def test_census_against_direct_ranks(q, ell):
    F = field_of_order(q)
    assert rs2_dimension_census(F, ell) == brute_census(F, ell)


def test_census_single_class_at_full_length():
    F = field_of_order(8)
    k_plane = code_of_design(td_affine(2, F), field_new(2)).k
    assert rs2_dimension_census(F, 8) == {k_plane: 1}


def test_census_parallel_matches_serial():
    F = field_of_order(8)
    assert rs2_dimension_census(F, 4, workers=2) == rs2_dimension_census(F, 4)
    with pytest.raises(IncidenceCodeError):
        rs2_dimension_census(F, 9)


@pytest.mark.parametrize("C0,positions", [
    (rs(2, field_of_order(4)), [1]),
    (rs(2, field_of_order(4)), [0, 3]),
    (parity_check_code(3), [2]),
    (rs(2, field_of_order(5)), [4]),
    (rm1(3), []),
])
def test_shortening_lemma(C0, positions):
    assert check_shortening_lemma(C0, positions)


def test_shortening_direct_sets():
    # IC(RS_2(F_4)) shortened on group 1 versus IC of the punctured code, as sets
    F = field_of_order(4)
    full = incidence_code(rs(2, F))
    short = shorten_generator(full.generator, range(4, 8), 2)
    small = incidence_code(rs(2, F, np.array([0, 2, 3])))
    assert short.shape[1] == 12
    span = {tuple(matmul_mod(np.array(m), short, 2)) for m in itertools.product((0, 1), repeat=short.shape[0])}
    span_small = {tuple(matmul_mod(np.array(m), small.generator, 2))
                  for m in itertools.product((0, 1), repeat=small.k)}
    assert span == span_small


def test_gram_identity_small():
    assert gram_identity_holds(parity_check_code(3))
    assert gram_identity_holds(rs(2, field_of_order(3)))


@pytest.mark.parametrize("C0,bound", [(rm1(3), 8), (golay12_ternary(), 18)], ids=["rm3", "golay3"])
def test_divisibility_report(C0, bound):
    C = incidence_code(C0)
    rep = check_divisibility_bounds(C, C0)
    assert rep.gram_identity and rep.perp_cap_parity_in_code and rep.perp_in_code
    assert rep.bound == bound and rep.dim_bound_ok and rep.ok


def test_divisibility_rejects_nondivisible():
    C0 = rs(2, field_of_order(3))
    with pytest.raises(IncidenceCodeError):
        check_divisibility_bounds(incidence_code(C0), C0)


def test_design_rank_matches_dense():
    for D in (td_affine(2, field_of_order(4)), td_projective(2, field_of_order(3))):
        for p in (2, 3):
            assert design_rank(D, p) == naive_rank(incidence_matrix(D), p)


def test_group_constant_when_characteristic_misses():
    # 5 does not divide lam * s = 3, so only group-constant words survive
    D = td_affine(2, field_of_order(3))
    C = code_of_design(D, field_new(5))
    assert C.k == 2 and is_groupwise_constant(C)
