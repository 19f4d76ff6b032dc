"""Minimal pairs, the polarization-change lattice, and fiber round trips."""

import pytest

from qlat import (
    IntMatrix,
    MinimalPair,
    PLattice,
    PreconditionError,
    Sublattice,
    direct_sum,
    discriminant_group,
    enumerate_index_p_sublattices,
    grow_unique,
    hyperbolic_plane,
    k3_isogeny,
    k3_lattice,
    orthogonal_complement,
    quad_value,
    rank_one,
    restricted_lattice,
    shrink_fiber,
    shrink_set,
    signature,
)

H3 = direct_sum(hyperbolic_plane(), hyperbolic_plane(), hyperbolic_plane())


# ---------------------------------------------------------------------------
# minimal pairs
# ---------------------------------------------------------------------------


def test_minimal_pair_index():
    pair = MinimalPair(rank_one(1), IntMatrix.from_rows([[3]]))
    assert pair.index == 3


def test_minimal_pair_rejects_composite_index():
    with pytest.raises(PreconditionError):
        MinimalPair(rank_one(1), IntMatrix.from_rows([[4]]))


def test_minimal_pair_requires_positive_definite():
    with pytest.raises(PreconditionError):
        MinimalPair(hyperbolic_plane(), IntMatrix.from_rows([[2, 0], [0, 1]]))


@pytest.mark.parametrize(
    "rank,p",
    [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (3, 5), (2, 5)],
)
def test_index_p_sublattice_counts(rank, p):
    lam = direct_sum(*[rank_one(1)] * rank) if rank > 1 else rank_one(1)
    pairs = enumerate_index_p_sublattices(lam, p)
    assert len(pairs) == (p**rank - 1) // (p - 1)
    assert len({pair.tilde_basis for pair in pairs}) == len(pairs)
    for pair in pairs:
        assert pair.index == p


def test_rank_one_unique_sublattice():
    (pair,) = enumerate_index_p_sublattices(rank_one(1), 5)
    assert pair.tilde_basis.entries == ((5,),)


# ---------------------------------------------------------------------------
# polarization change
# ---------------------------------------------------------------------------


def test_degree_one_p_two():
    pol = k3_isogeny(1, 2)
    assert pol.degree == 4
    assert pol.xi == (1, 4) + (0,) * 20


def test_discriminant_of_complement():
    pol = k3_isogeny(3, 2)
    S = Sublattice(pol.lattice, IntMatrix.from_columns([pol.xi]))
    C = restricted_lattice(orthogonal_complement(pol.lattice, S))
    assert discriminant_group(C).torsion == (24,)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("p", [2, 3])
def test_isogeny_laws(d, p):
    pol = k3_isogeny(d, p)
    L = pol.lattice
    assert abs(L.gram().det()) == 1
    assert all(L.gram().entries[i][i] % 2 == 0 for i in range(22))
    assert signature(L) == signature(k3_lattice())
    assert pol.degree == p * p * d
    assert quad_value(L, pol.xi) == p * p * d


def test_twofold_application_scales_by_p4():
    d, p = 2, 3
    once = k3_isogeny(d, p)
    twice = k3_isogeny(once.degree, p)
    assert twice.degree == p**4 * d


def test_isogeny_rejects_bad_input():
    with pytest.raises(PreconditionError):
        k3_isogeny(0, 2)
    with pytest.raises(PreconditionError):
        k3_isogeny(1, 4)


# ---------------------------------------------------------------------------
# shrink fiber and unique growth
# ---------------------------------------------------------------------------


def _embedding_column():
    return IntMatrix.from_columns([(1, 1, 0, 0, 0, 0)])


def _pair(p):
    return MinimalPair(rank_one(1), IntMatrix.from_rows([[p]]))


@pytest.mark.parametrize("p", [2, 3])
def test_shrink_fiber_delegates_to_shrink_set(p):
    emb = _embedding_column()
    fiber = shrink_fiber(H3, emb, _pair(p))
    W = Sublattice(H3, emb)
    Wt = Sublattice(H3, emb.scale(p))
    assert set(fiber) == set(shrink_set(H3, W, Wt, p))
    assert len(fiber) > 0


def test_shrink_fiber_rejects_non_summand():
    emb = IntMatrix.from_columns([(2, 2, 0, 0, 0, 0)])
    with pytest.raises(PreconditionError):
        shrink_fiber(H3, emb, _pair(2))


def test_shrink_fiber_rejects_form_mismatch():
    pair = MinimalPair(rank_one(2), IntMatrix.from_rows([[2]]))
    with pytest.raises(PreconditionError):
        shrink_fiber(H3, _embedding_column(), pair)  # Q(e1+f1) = 1, not 2


def test_shrink_fiber_rejects_oversized_pair():
    H2 = direct_sum(hyperbolic_plane(), hyperbolic_plane())
    emb = IntMatrix.from_columns([(1, 1, 0, 0)])
    with pytest.raises(PreconditionError):
        shrink_fiber(H2, emb, _pair(2))


@pytest.mark.parametrize("p", [2, 3])
def test_grow_recovers_ambient_from_every_member(p):
    emb = _embedding_column()
    pair = _pair(p)
    tilde_embedding = emb @ pair.tilde_basis
    N0 = PLattice(H3, p, 0, IntMatrix.identity(6))
    fiber = shrink_fiber(H3, emb, pair)
    grown = {grow_unique(Nt, tilde_embedding) for Nt in fiber}
    assert grown == {N0}


def test_grow_rejects_dependent_embedding():
    fiber = shrink_fiber(H3, _embedding_column(), _pair(2))
    bad = IntMatrix.from_columns([(2, 2, 0, 0, 0, 0), (4, 4, 0, 0, 0, 0)])
    with pytest.raises(PreconditionError):
        grow_unique(fiber[0], bad)


def test_grow_rejects_oversized_embedding():
    fiber = shrink_fiber(H3, _embedding_column(), _pair(2))
    too_big = IntMatrix.from_columns(
        [(2, 2, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0)]
    )
    with pytest.raises(PreconditionError):
        grow_unique(fiber[0], too_big)
