import itertools

import numpy as np
import pytest

from lambekws.fields import F2, Field, Q, UnsupportedField
from lambekws.linalg import Subspace, Vector, vector_at
from lambekws.relations import (
    COVERAGE,
    PARTITION,
    ModalRelation,
    RelationError,
    random_valid_relations,
    validate_relation,
)

F3 = Field(3)


def vecs(field, d):
    return [Vector.of(field, c) for c in itertools.product(range(field.p), repeat=d)]


def brute_report(R):
    """L1R, L2R, L3R by direct quantifier enumeration."""
    f, d = R.field, R.dim
    V = vecs(f, d)
    S = range(f.p)
    rel = lambda v, u: R.related(v, u)  # noqa: E731
    edges = [(v, u) for v in V for u in V if rel(v, u)]
    l1 = all(
        any(rel(v.scale(g) + z.scale(dd), u.scale(a) + w.scale(b)) for a in S for b in S)
        for (v, u), (z, w) in itertools.product(edges, repeat=2)
        for g in S
        for dd in S
    )
    l2 = True
    for t in V:
        for u in V:
            for v in V:
                for a in S:
                    for b in S:
                        if not rel(t, u.scale(a) + v.scale(b)):
                            continue
                        zs = [z for z in V if rel(z, u)]
                        ws = [w for w in V if rel(w, v)]
                        if not any(
                            z.scale(lam) + w.scale(mu) == t for z in zs for w in ws for lam in S for mu in S
                        ):
                            l2 = False
    zero = Vector.zero(f, d)
    l3 = all(rel(x, zero) == x.is_zero() for x in V)
    return l1, l2, l3


def test_identity_relation_valid():
    for d in (1, 2, 3):
        assert validate_relation(ModalRelation.identity(F2, d)).ok


def test_zero_pair_always_related():
    R = ModalRelation.extensional(F2, 2, [])
    z = Vector.zero(F2, 2)
    assert R.related(z, z)
    rep = validate_relation(R)
    assert rep.L1R[0] and rep.L3R[0]
    # 0 R (0 u + 0 v) demands predecessors for u and v themselves
    assert not rep.L2R[0]


def test_l3r_fails_when_nonzero_relates_to_zero():
    R = ModalRelation.extensional(F2, 2, [((1, 0), (0, 0))])
    rep = validate_relation(R)
    assert not rep.L3R[0]
    assert rep.L3R[1][0].coords == (1, 0)


def test_functional_relation_edges():
    M = [[0, 1], [1, 1]]
    R = ModalRelation.functional(F2, M)
    for u in vecs(F2, 2):
        c = u.coords
        img = Vector.of(F2, [(M[0][0] * c[0] + M[0][1] * c[1]) % 2, (M[1][0] * c[0] + M[1][1] * c[1]) % 2])
        for v in vecs(F2, 2):
            assert R.related(v, u) == (v == img)


def test_graph_relation_matches_functional():
    M = [[1, 1], [0, 1]]
    G = Subspace.from_coords(F2, 4, [(1, 0, 1, 0), (1, 1, 0, 1)])  # (M u, u) for u = e0, e1
    Rg, Rf = ModalRelation.graph_subspace(G), ModalRelation.functional(F2, M)
    for v in vecs(F2, 2):
        for u in vecs(F2, 2):
            assert Rg.related(v, u) == Rf.related(v, u)


@pytest.mark.parametrize("seed", range(15))
def test_validator_matches_brute_force_f2(seed):
    rng = np.random.default_rng(seed)
    pairs = []
    for u in range(1, 4):
        for v in range(4):
            if rng.random() < 0.45:
                pairs.append((vector_at(F2, 2, v), vector_at(F2, 2, u)))
    R = ModalRelation.extensional(F2, 2, pairs)
    rep = validate_relation(R)
    assert (rep.L1R[0], rep.L2R[0], rep.L3R[0]) == brute_report(R)


@pytest.mark.parametrize("seed", range(5))
def test_validator_matches_brute_force_f3(seed):
    rng = np.random.default_rng(100 + seed)
    pairs = [(vector_at(F3, 1, int(rng.integers(3))), vector_at(F3, 1, int(rng.integers(1, 3)))) for _ in range(2)]
    R = ModalRelation.extensional(F3, 1, pairs)
    rep = validate_relation(R)
    assert (rep.L1R[0], rep.L2R[0], rep.L3R[0]) == brute_report(R)


def test_failing_l1r_witness_rechecks():
    # related pairs (e0, e0) and (e1, e1) but nothing relates to e0 + e1
    R = ModalRelation.extensional(F2, 2, [((1, 0), (1, 0)), ((0, 1), (0, 1))])
    rep = validate_relation(R)
    assert not rep.L1R[0]
    v, u, z, w, g, d = rep.L1R[1]
    assert R.related(v, u) and R.related(z, w)
    assert not any(R.related(v.scale(g) + z.scale(d), u.scale(a) + w.scale(b)) for a in range(2) for b in range(2))


def test_random_valid_relations_deterministic():
    a = random_valid_relations(F2, 2, 6, seed=3)
    b = random_valid_relations(F2, 2, 6, seed=3)
    assert all(np.array_equal(x.relation_matrix(), y.relation_matrix()) for x, y in zip(a, b))
    assert all(validate_relation(R).ok for R in a)
    assert any(R.kind == "extensional" for R in a)


def test_embedding_relation_two_chain_valid_both_readings():
    allowed = ((True, True), (False, True))
    assert validate_relation(ModalRelation.embedding(2, allowed)).ok
    R = ModalRelation.embedding(2, allowed, reading=PARTITION)
    assert R.meta["reading"] == PARTITION


def test_embedding_coverage_on_all_two_element_patterns():
    for bits in itertools.product([False, True], repeat=4):
        allowed = (bits[:2], bits[2:])
        if not all(any(row) for row in zip(*allowed)):
            continue  # some row m has no allowed source row
        R = ModalRelation.embedding(2, allowed, reading=COVERAGE)
        assert validate_relation(R).ok, allowed


def test_unknown_reading_rejected():
    with pytest.raises(RelationError):
        ModalRelation.embedding(2, ((True, True), (True, True)), reading="nope")


def test_bounds_and_fields():
    with pytest.raises(UnsupportedField):
        validate_relation(ModalRelation.identity(Q, 2))
    with pytest.raises(RelationError):
        validate_relation(ModalRelation.identity(F2, 6))
