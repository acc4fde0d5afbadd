"""Binary relations on the vector space of a K-algebra (the modal accessibility R).

``v R u`` is read "v is an R-predecessor of u"; the diamond of a subspace
collects predecessors of its elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from . import kernels
from .fields import DimensionMismatch, Field, UnsupportedField
from .linalg import Subspace, Vector, add_scale, index_of, mat_vec, member, vector_table

DEFAULT_RELATION_DIM_BOUND = 16
DEFAULT_VALIDATE_BOUND = 4

EXTENSIONAL = "extensional"
FUNCTIONAL = "functional"
GRAPH = "graph"
EMBEDDING = "embedding"

# readings of the embedding relation: groups of v may be empty, or must be nonempty
COVERAGE = "coverage"
PARTITION = "partition"


class RelationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ModalRelation:
    """A relation ``R`` on ``field^dim`` of one of four kinds.

    * extensional: an explicit set of ``(v, u)`` coordinate pairs;
    * functional: ``v R u`` iff ``v = M u`` for a square matrix ``M``;
    * graph: ``v R u`` iff ``(v, u)`` lies in a subspace of the doubled space;
    * embedding: the relation built for a finite modal residuated poset
      (see :mod:`lambekws.completeness`); ``allowed[k][m]`` says whether
      ``p_k <= dia p_m``.

    ``(0, 0)`` is always related.
    """

    field: Field
    dim: int
    kind: str
    pairs: frozenset = frozenset()
    matrix: tuple = ()
    graph: Subspace | None = None
    allowed: tuple = ()
    meta: dict = dc_field(default_factory=dict, compare=False)

    # -- constructors
    @classmethod
    def extensional(cls, field: Field, dim: int, pairs) -> "ModalRelation":
        zero = (field.zero,) * dim
        ps = {(zero, zero)}
        for v, u in pairs:
            v = tuple(field.coerce(c) for c in (v.coords if isinstance(v, Vector) else v))
            u = tuple(field.coerce(c) for c in (u.coords if isinstance(u, Vector) else u))
            if len(v) != dim or len(u) != dim:
                raise DimensionMismatch("relation pair has wrong length")
            ps.add((v, u))
        return cls(field, dim, EXTENSIONAL, pairs=frozenset(ps))

    @classmethod
    def functional(cls, field: Field, M) -> "ModalRelation":
        M = tuple(tuple(field.coerce(c) for c in row) for row in M)
        dim = len(M)
        if any(len(r) != dim for r in M):
            raise DimensionMismatch("functional relation needs a square matrix")
        return cls(field, dim, FUNCTIONAL, matrix=M)

    @classmethod
    def identity(cls, field: Field, dim: int) -> "ModalRelation":
        return cls.functional(field, [[1 if i == j else 0 for j in range(dim)] for i in range(dim)])

    @classmethod
    def graph_subspace(cls, G: Subspace) -> "ModalRelation":
        if G.ambient_dim % 2:
            raise DimensionMismatch("graph subspace must live in a doubled space")
        return cls(G.field, G.ambient_dim // 2, GRAPH, graph=G)

    @classmethod
    def embedding(cls, n: int, allowed, reading: str = COVERAGE, **meta) -> "ModalRelation":
        """``allowed[k][m]``: row ``k`` basis vectors may relate to row ``m`` ones."""
        from .fields import F2

        if reading not in (COVERAGE, PARTITION):
            raise RelationError(f"unknown embedding reading {reading!r}")
        allowed = tuple(tuple(bool(x) for x in row) for row in allowed)
        return cls(F2, n * n, EMBEDDING, allowed=allowed, meta=dict(meta, n=n, reading=reading))

    # -- queries
    def related(self, v: Vector, u: Vector) -> bool:
        if v.dim != self.dim or u.dim != self.dim or v.field != self.field or u.field != self.field:
            raise DimensionMismatch("vectors do not live in the relation's space")
        if v.is_zero() and u.is_zero():
            return True
        if self.kind == EXTENSIONAL:
            return (v.coords, u.coords) in self.pairs
        if self.kind == FUNCTIONAL:
            return mat_vec(self.field, self.matrix, u.coords) == v.coords
        if self.kind == GRAPH:
            return member(Vector(self.field, v.coords + u.coords), self.graph)
        return bool(self.relation_matrix()[index_of(v), index_of(u)])

    @property
    def N(self) -> int:
        if not self.field.is_finite:
            raise UnsupportedField("relation enumeration needs a finite field")
        return self.field.p**self.dim

    def edge_indices(self, bound: int = DEFAULT_RELATION_DIM_BOUND):
        """Index arrays ``(vs, us)`` of all related pairs (finite fields)."""
        if not self.field.is_finite:
            raise UnsupportedField("relation enumeration needs a finite field")
        if self.dim > bound:
            raise RelationError(f"dimension {self.dim} exceeds enumeration bound {bound}")
        return self._edges

    @cached_property
    def _edges(self):
        p, d = self.field.p, self.dim
        if self.kind == EXTENSIONAL:
            items = sorted((index_of(Vector(self.field, v)), index_of(Vector(self.field, u))) for v, u in self.pairs)
            arr = np.array(items, dtype=np.int64).reshape(-1, 2)
            return arr[:, 0], arr[:, 1]
        if self.kind == FUNCTIONAL:
            V = vector_table(p, d)
            M = np.array(self.matrix, dtype=np.int64)
            images = kernels.encode((V @ M.T) % p, p)
            return images, np.arange(V.shape[0], dtype=np.int64)
        if self.kind == GRAPH:
            idx = self.graph.element_indices()
            N = p**d
            vs, us = np.divmod(idx, N)
            order = np.lexsort((us, vs))
            return vs[order], us[order]
        vs, us = np.nonzero(self.relation_matrix())
        return vs.astype(np.int64), us.astype(np.int64)

    def relation_matrix(self, bound: int = 12) -> np.ndarray:
        """Dense boolean matrix ``rel[v, u]``; limited to ``p**dim`` small enough."""
        if self.dim > bound:
            raise RelationError(f"dense relation matrix limited to dimension {bound}, got {self.dim}")
        return self._matrix

    @cached_property
    def _matrix(self):
        if self.kind == EMBEDDING:
            n = self.meta["n"]
            masks = np.zeros(n, dtype=np.int64)
            d = n * n
            for m in range(n):
                for k in range(n):
                    if self.allowed[k][m]:
                        for ell in range(n):
                            masks[m] |= 1 << (d - 1 - (k * n + ell))
            return kernels.embedding_relation(n, masks, nonempty=self.meta.get("reading") == PARTITION)
        vs, us = self._edges
        rel = np.zeros((self.N, self.N), dtype=bool)
        rel[vs, us] = True
        rel[0, 0] = True
        return rel

    def linear_map(self):
        if self.kind != FUNCTIONAL:
            raise RelationError("not a functional relation")
        return self.matrix


@dataclass
class RelationReport:
    L1R: tuple  # (ok, witness or None)
    L2R: tuple
    L3R: tuple

    @property
    def ok(self) -> bool:
        return self.L1R[0] and self.L2R[0] and self.L3R[0]

    def items(self):
        return [("L1R", self.L1R), ("L2R", self.L2R), ("L3R", self.L3R)]


def validate_relation(R: ModalRelation, bound: int = DEFAULT_VALIDATE_BOUND) -> RelationReport:
    """Check the linearity clauses L1R, L2R and L3R by enumeration.

    L1R: ``v R u`` and ``z R w`` imply, for all ``g, d``, some ``a, b`` with
    ``(g v + d z) R (a u + b w)``.  The scalars ``a, b`` may depend on all of
    ``v, u, z, w, g, d``.
    L2R: ``t R (a u + b v)`` implies ``t = l z + m w`` for some ``z R u``,
    ``w R v`` and scalars ``l, m``.
    L3R: ``x R 0`` iff ``x = 0``.
    Witnesses are reported as tuples of vectors and scalars.
    """
    if not R.field.is_finite:
        raise UnsupportedField("relation validation enumerates a finite field")
    if R.dim > bound:
        raise RelationError(f"dimension {R.dim} exceeds validation bound {bound}")
    p, d, f = R.field.p, R.dim, R.field
    rel = R.relation_matrix()
    add, scale = add_scale(p, d)

    def vec(i):
        return Vector(f, tuple(int(c) for c in vector_table(p, d)[i]))

    bad0 = np.nonzero(rel[:, 0])[0]
    bad0 = bad0[bad0 != 0]
    l3 = (True, None) if bad0.size == 0 and rel[0, 0] else (False, (vec(int(bad0[0])) if bad0.size else vec(0),))

    w1 = kernels.l1r_violation(rel, add, scale, p)
    l1 = (True, None) if w1.size == 0 else (False, tuple(vec(int(i)) for i in w1[:4]) + (int(w1[4]), int(w1[5])))
    w2 = kernels.l2r_violation(rel, add, scale, p)
    l2 = (True, None) if w2.size == 0 else (False, tuple(vec(int(i)) for i in w2[:3]) + (int(w2[3]), int(w2[4])))
    return RelationReport(L1R=l1, L2R=l2, L3R=l3)


def random_functional(field: Field, dim: int, rng: np.random.Generator) -> ModalRelation:
    M = rng.integers(0, field.p, size=(dim, dim))
    return ModalRelation.functional(field, M.tolist())


def random_valid_relations(field: Field, dim: int, count: int, seed: int, attempts: int = 4000):
    """``count`` relations passing :func:`validate_relation`, deterministic in ``seed``.

    Candidates alternate between random linear maps and random extensional
    relations (a random set of predecessors for each nonzero vector); the
    latter are kept only when they validate.
    """
    rng = np.random.default_rng(seed)
    out = []
    N = field.p**dim
    V = vector_table(field.p, dim)
    tries = 0
    while len(out) < count and tries < attempts:
        tries += 1
        if tries % 2:
            cand = random_functional(field, dim, rng)
        else:
            pairs = []
            density = rng.uniform(0.2, 0.9)
            for u in range(1, N):
                for v in range(1, N):
                    if rng.random() < density:
                        pairs.append((tuple(int(c) for c in V[v]), tuple(int(c) for c in V[u])))
            cand = ModalRelation.extensional(field, dim, pairs)
        if validate_relation(cand, bound=max(dim, DEFAULT_VALIDATE_BOUND)).ok:
            out.append(cand)
    if len(out) < count:
        raise RelationError(f"found only {len(out)} valid relations in {attempts} attempts")
    return out
