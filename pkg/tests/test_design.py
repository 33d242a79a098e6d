import itertools

import numpy as np
import pytest

from tdpir.basecodes import OrthogonalArray, oa_from_code, rs
from tdpir.design import (
    DesignError,
    TransversalDesign,
    ag_line_design,
    check_budget,
    incidence_matrix,
    incidence_packed_chunks,
    iter_block_chunks,
    pg_line_design,
    projective_points,
    td_affine,
    td_curves,
    td_from_oa,
    td_isomorphic_by_identity,
    td_projective,
    verify_t_td,
    verify_td,
)
from tdpir.ff import field_of_order, vadd, vmul
from tdpir.hamada import projective_plane_dim, prime_power
from tdpir.inccode import code_of_design, design_rank
from tdpir.kernels import unpack_bits
from tdpir.linalg import rank_p, right_kernel_basis, row_space_equal

from .worked_examples import PARITY3_ARRAY


def brute_affine_blocks(m, q):
    """Lines of AG(m, q) meeting every hyperplane x_m = c once, as point sets."""
    F = field_of_order(q)
    s = q ** (m - 1)
    pts = list(itertools.product(range(q), repeat=m))

    def pid(v):
        r = 0
        for c in v[:-1]:
            r = r * q + c
        return v[-1] * s + r

    lines = set()
    for a in pts:
        for d in pts:
            if d[-1] == 0:
                continue
            line = frozenset(
                pid(tuple(int(x) for x in vadd(F, a, vmul(F, t, d)))) for t in range(q)
            )
            lines.add(line)
    return lines


@pytest.mark.parametrize("m,q", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (2, 5)])
def test_affine_matches_brute_force(m, q):
    D = td_affine(m, field_of_order(q))
    assert (D.ell, D.s, D.lam, D.strength) == (q, q ** (m - 1), 1, 2)
    assert D.nblocks == q ** (2 * m - 2)
    assert {frozenset(b.tolist()) for b in D.blocks} == brute_affine_blocks(m, q)
    assert verify_td(D)


@pytest.mark.parametrize("m,q", [(2, 2), (2, 3), (2, 4), (3, 2), (2, 5), (3, 3)])
def test_projective_is_td(m, q):
    D = td_projective(m, field_of_order(q))
    assert (D.ell, D.s) == (q + 1, q ** (m - 1))
    assert D.nblocks == q ** (2 * m - 2)
    assert verify_td(D)


def test_projective_blocks_are_lines_missing_infinity():
    q, m = 3, 2
    F = field_of_order(q)
    pts = projective_points(m, F)
    assert len(pts) == q * q + q + 1
    pg = pg_line_design(m, F)
    assert pg.nblocks == q * q + q + 1
    D = td_projective(m, F)
    # map TD points to homogeneous coordinates, then look the block up in PG
    coords = {}
    for u in range(q):
        for y in range(q):
            coords[u * q + y] = (1, u, y)
    for y in range(q):
        coords[q * q + y] = (0, 1, y)
    index = {tuple(v): i for i, v in enumerate(pts)}
    pg_sets = {frozenset(b.tolist()) for b in pg.blocks}
    inf = index[(0, 0, 1)]
    for b in D.blocks:
        pset = frozenset(index[coords[int(x)]] for x in b)
        full = [L for L in pg_sets if pset <= L]
        assert len(full) == 1 and inf not in full[0]


def test_deleting_a_block_breaks_design():
    D = td_affine(2, field_of_order(3))
    broken = TransversalDesign(D.ell, D.s, D.lam, D.strength, D.blocks[1:])
    v = verify_td(broken)
    assert not v and "blocks" in v.detail
    assert not verify_t_td(D, 4)


def test_pair_counts_fail_detected():
    # right number of blocks, but two identical column pairs
    blocks = np.array([[0, 2], [0, 3], [1, 2], [1, 3]])
    good = TransversalDesign(2, 2, 1, 2, blocks)
    assert verify_t_td(good)
    bad = TransversalDesign(2, 2, 1, 2, np.array([[0, 2], [0, 3], [1, 2], [1, 2]]))
    assert not verify_t_td(bad)
    with pytest.raises(DesignError):
        TransversalDesign(3, 2, 1, 2, blocks)


def test_parity_array_design():
    A = OrthogonalArray(2, 3, 2, 1, PARITY3_ARRAY)
    D = td_from_oa(A)
    assert verify_t_td(D)
    M = incidence_matrix(D)
    assert M.shape == (4, 6)
    assert np.all(M.sum(axis=1) == 3)
    assert np.all(M.sum(axis=0) == 2)


def test_single_block_design():
    D = TransversalDesign(2, 1, 1, 2, np.array([[0, 1]]))
    assert verify_td(D)
    assert incidence_matrix(D).tolist() == [[1, 1]]


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8])
def test_rs2_array_gives_affine_plane(q):
    F = field_of_order(q)
    D1 = td_from_oa(oa_from_code(rs(2, F)))
    D2 = td_affine(2, F)
    assert td_isomorphic_by_identity(D1, D2)


def test_identity_check_rejects_different_designs():
    F = field_of_order(3)
    assert not td_isomorphic_by_identity(td_affine(2, F), td_projective(2, F))
    D = td_affine(2, F)
    relabelled = D.blocks.copy()
    relabelled[:, 0] = 2 - relabelled[:, 0] % 3  # reflect the first group
    other = TransversalDesign(3, 3, 1, 2, relabelled)
    assert verify_td(other)
    assert not td_isomorphic_by_identity(D, other)


@pytest.mark.parametrize("m,q", [(2, 3), (2, 4), (3, 3)])
def test_point_block_index(m, q):
    D = td_affine(m, field_of_order(q))
    for point in range(D.npoints):
        through = D.blocks_through(point)
        assert through.size == D.replication() == q ** (m - 1)
        assert np.all(np.any(D.blocks[through] == point, axis=1))


@pytest.mark.parametrize("m,q", [(2, 3), (2, 4), (3, 2), (2, 8)])
def test_code_of_td_equals_code_of_affine_geometry(m, q):
    F = field_of_order(q)
    p = F.p
    ag = ag_line_design(m, F)
    assert ag.nblocks == q ** (m - 1) * (q**m - 1) // (q - 1)
    Mag = incidence_matrix(ag)
    Mtd = incidence_matrix(td_affine(m, F))
    assert row_space_equal(right_kernel_basis(Mag, p), right_kernel_basis(Mtd, p), p)


@pytest.mark.parametrize("t,q", [(2, 3), (3, 4), (3, 5), (4, 5)])
def test_polynomial_curves_design(t, q):
    D = td_curves(t, field_of_order(q))
    assert (D.ell, D.s, D.strength, D.nblocks) == (q, q, t, q**t)
    assert verify_t_td(D)
    assert verify_t_td(D, t - 1)
    assert not verify_t_td(D, t + 1)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_projective_code_dimension_bound(q):
    F = field_of_order(q)
    p, e = prime_power(q)
    k = code_of_design(td_projective(2, F), F).k
    assert k >= projective_plane_dim(p, e)
    # observed: exactly one above the guaranteed value on these cases
    assert k == projective_plane_dim(p, e) + 1


def test_projective_containment_against_pg():
    # projective design code >= plane code minus the removed points
    for q in (2, 3, 4):
        F = field_of_order(q)
        pg = pg_line_design(2, F)
        dim_pg = pg.npoints - rank_p(incidence_matrix(pg), F.p)
        assert code_of_design(td_projective(2, F), F).k >= dim_pg - 1


def test_streaming_blocks_match_materialised():
    F = field_of_order(4)
    D = td_affine(3, F)
    S = td_affine(3, F, streaming=True)
    assert S.nblocks == D.nblocks
    chunks = list(iter_block_chunks(S, 100))
    assert all(c.shape[0] <= 100 for c in chunks)
    streamed = np.concatenate(chunks)
    assert td_isomorphic_by_identity(TransversalDesign(D.ell, D.s, 1, 2, streamed), D)
    assert design_rank(S, 2) == design_rank(D, 2) == rank_p(incidence_matrix(D), 2)


def test_packed_chunks_unpack_to_incidence():
    D = td_affine(2, field_of_order(5))
    words = np.concatenate(list(incidence_packed_chunks(D, 7)))
    assert np.array_equal(unpack_bits(words, D.npoints), incidence_matrix(D))


def test_budget():
    D = td_affine(2, field_of_order(4))
    assert check_budget(D, 2) == 6 * 16
