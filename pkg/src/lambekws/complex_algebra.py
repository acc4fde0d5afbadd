"""The residuated lattice of subspaces of a (modal) K-algebra.

Operations return canonical :class:`~lambekws.linalg.Subspace` values, so
equality of results is plain equality.  Structural connectives evaluate by
the same operations as their operational counterparts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .fields import DimensionMismatch, UnsupportedField
from .kalgebra import KAlgebra, star, unit_scalars
from .linalg import (
    Subspace,
    Vector,
    enumerate_subspaces,
    mat_vec,
    solve_membership_constraints,
    span,
    span_of_indices,
    vector_table,
)
from .relations import DEFAULT_RELATION_DIM_BOUND, EMBEDDING, EXTENSIONAL, FUNCTIONAL, GRAPH, ModalRelation, RelationError
from .terms import Atom, Box, Dia, Formula, Leaf, LRes, RRes, SBox, SDia, Sequent, SFusion, SLRes, SRRes, Tensor

DEFAULT_VPLUS_BOUND = 3


class UnboundAtom(KeyError):
    pass


def _check(A: KAlgebra, *subs: Subspace):
    for S in subs:
        if S.field != A.field or S.ambient_dim != A.dim:
            raise DimensionMismatch("subspace does not live in the algebra's space")


def _products(A: KAlgebra, xs, ys) -> list:
    """Coordinates of all products ``x * y`` for coordinate tuples ``xs``, ``ys``."""
    if not xs or not ys:
        return []
    if A.field.is_finite:
        p = A.field.p
        X = np.array(xs, dtype=np.int64).reshape(len(xs), A.dim)
        Y = np.array(ys, dtype=np.int64).reshape(len(ys), A.dim)
        P = kernels.product_table(X, Y, A.sc_array, p)
        return [tuple(int(c) for c in row) for row in P.reshape(-1, A.dim)]
    return [star(A, Vector(A.field, x), Vector(A.field, y)).coords for x in xs for y in ys]


def tensor(A: KAlgebra, U: Subspace, W: Subspace) -> Subspace:
    """``U ⊗ W``: span of the products of basis vectors."""
    _check(A, U, W)
    return Subspace.from_coords(A.field, A.dim, _products(A, list(U.basis), list(W.basis)))


def _right_mult_matrix(A: KAlgebra, w) -> tuple:
    return A.right_matrix(Vector(A.field, w))


def _left_mult_matrix(A: KAlgebra, u) -> tuple:
    return A.left_matrix(Vector(A.field, u))


def rres(A: KAlgebra, Z: Subspace, W: Subspace) -> Subspace:
    """``Z / W = {u | u * w in Z for all w in W}``."""
    _check(A, Z, W)
    cons = [(_right_mult_matrix(A, w), Z) for w in W.basis]
    return solve_membership_constraints(cons, field=A.field, dim=A.dim)


def lres(A: KAlgebra, U: Subspace, Z: Subspace) -> Subspace:
    """``U \\ Z = {w | u * w in Z for all u in U}``."""
    _check(A, U, Z)
    cons = [(_left_mult_matrix(A, u), Z) for u in U.basis]
    return solve_membership_constraints(cons, field=A.field, dim=A.dim)


def meet(U: Subspace, W: Subspace) -> Subspace:
    return U & W


def join(U: Subspace, W: Subspace) -> Subspace:
    return U | W


def top(A: KAlgebra) -> Subspace:
    return Subspace.full(A.field, A.dim)


def bottom(A: KAlgebra) -> Subspace:
    return Subspace.zero(A.field, A.dim)


# ------------------------------------------------------------------ modal


def _check_rel(A: KAlgebra, R: ModalRelation):
    if R.field != A.field or R.dim != A.dim:
        raise DimensionMismatch("relation does not live on the algebra's space")


def dia(A: KAlgebra, R: ModalRelation, U: Subspace, bound: int = DEFAULT_RELATION_DIM_BOUND) -> Subspace:
    """``◇U``: span of the R-predecessors of elements of ``U``."""
    _check(A, U)
    _check_rel(A, R)
    f, d = A.field, A.dim
    if R.kind == FUNCTIONAL:
        return Subspace.from_coords(f, d, [mat_vec(f, R.matrix, u) for u in U.basis])
    if R.kind == GRAPH:
        # graph ∩ (V × U), projected on the first factor
        VxU = Subspace.from_coords(
            f,
            2 * d,
            [tuple(int(i == j) for j in range(d)) + (f.zero,) * d for i in range(d)]
            + [(f.zero,) * d + tuple(u) for u in U.basis],
        )
        both = R.graph & VxU
        return Subspace.from_coords(f, d, [row[:d] for row in both.basis])
    if not f.is_finite:
        raise UnsupportedField("diamond of a non-linear relation needs a finite field")
    if d > bound:
        raise RelationError(f"dimension {d} exceeds enumeration bound {bound}")
    if R.kind == EMBEDDING:
        rel = R.relation_matrix()
        umask = U.mask()
        preds = np.nonzero(rel[:, umask].any(axis=1))[0]
        return span_of_indices(f, d, preds)
    vs, us = R.edge_indices(bound)
    umask = U.mask()
    return span_of_indices(f, d, vs[umask[us]])


def box(A: KAlgebra, R: ModalRelation, W: Subspace, bound: int = DEFAULT_RELATION_DIM_BOUND) -> Subspace:
    """``■W``: span of the vectors all of whose R-predecessors lie in ``W``."""
    _check(A, W)
    _check_rel(A, R)
    f, d = A.field, A.dim
    if R.kind == FUNCTIONAL:
        return solve_membership_constraints([(R.matrix, W)], field=f, dim=d)
    if not f.is_finite:
        raise UnsupportedField("box of a non-functional relation needs a finite field")
    if d > bound:
        raise RelationError(f"dimension {d} exceeds enumeration bound {bound}")
    wmask = W.mask()
    N = f.p**d
    if R.kind == EMBEDDING:
        rel = R.relation_matrix()
        ok = ~np.any(rel & ~wmask[:, None], axis=0)
    else:
        vs, us = R.edge_indices(bound)
        ok = np.ones(N, dtype=bool)
        ok[us[~wmask[vs]]] = False
    return span_of_indices(f, d, np.nonzero(ok)[0])


# --------------------------------------------------------- V+ properties


@dataclass(frozen=True)
class ResiduatedWitness:
    property: str
    holds: bool
    counterexample: tuple | None = None
    unit: Subspace | None = None


def _subspaces(A: KAlgebra, bound: int):
    if not A.field.is_finite:
        raise UnsupportedField("V+ properties are checked by subspace enumeration over finite fields")
    if A.dim > bound:
        raise RelationError(f"dimension {A.dim} exceeds subspace enumeration bound {bound}")
    return list(enumerate_subspaces(A.field, A.dim, max_dim=bound))


class _TensorTable:
    """Memoised ``⊗`` over the enumerated subspaces."""

    def __init__(self, A: KAlgebra):
        self.A = A
        self.memo = {}

    def __call__(self, U, W):
        k = (U, W)
        r = self.memo.get(k)
        if r is None:
            r = self.memo[k] = tensor(self.A, U, W)
        return r


VPLUS_PROPERTIES = (
    "associative",
    "commutative",
    "unital",
    "contractive",
    "expansive",
    "monoidal",
    "right_associative",
    "left_commutative",
)


def check_vplus_property(
    A: KAlgebra, prop: str, R: ModalRelation | None = None, bound: int = DEFAULT_VPLUS_BOUND
) -> ResiduatedWitness:
    """Check a property of the subspace lattice by enumerating all subspace tuples.

    * commutative: ``U ⊗ W = W ⊗ U``;
    * associative: ``(U ⊗ W) ⊗ Z = U ⊗ (W ⊗ Z)``;
    * unital: some 1-dimensional ``I`` with ``U ⊗ I = U = I ⊗ U``;
    * contractive: ``U ⊆ U ⊗ U``;  expansive: ``U ⊗ U ⊆ U``;
    * monoidal: associative and unital;
    * right_associative: ``(U ⊗ W) ⊗ ◇Z ⊆ U ⊗ (W ⊗ ◇Z)``;
    * left_commutative: ``(U ⊗ Z) ⊗ ◇W ⊆ (U ⊗ ◇W) ⊗ Z``.
    """
    if prop not in VPLUS_PROPERTIES:
        raise ValueError(f"unknown property {prop!r}")
    subs = _subspaces(A, bound)
    t = _TensorTable(A)
    if prop == "commutative":
        for U, W in itertools.product(subs, repeat=2):
            if t(U, W) != t(W, U):
                return ResiduatedWitness(prop, False, (U, W))
        return ResiduatedWitness(prop, True)
    if prop == "associative":
        for U, W, Z in itertools.product(subs, repeat=3):
            if t(t(U, W), Z) != t(U, t(W, Z)):
                return ResiduatedWitness(prop, False, (U, W, Z))
        return ResiduatedWitness(prop, True)
    if prop == "unital":
        refuters = []
        for I in subs:
            if I.dim != 1:
                continue
            bad = next((U for U in subs if t(U, I) != U or t(I, U) != U), None)
            if bad is None:
                return ResiduatedWitness(prop, True, unit=I)
            refuters.append((I, bad))
        return ResiduatedWitness(prop, False, tuple(x for pair in refuters for x in pair))
    if prop == "contractive":
        for U in subs:
            if not U <= t(U, U):
                return ResiduatedWitness(prop, False, (U,))
        return ResiduatedWitness(prop, True)
    if prop == "expansive":
        for U in subs:
            if not t(U, U) <= U:
                return ResiduatedWitness(prop, False, (U,))
        return ResiduatedWitness(prop, True)
    if prop == "monoidal":
        a = check_vplus_property(A, "associative", bound=bound)
        if not a.holds:
            return ResiduatedWitness(prop, False, a.counterexample)
        u = check_vplus_property(A, "unital", bound=bound)
        return ResiduatedWitness(prop, u.holds, u.counterexample, u.unit)
    if R is None:
        raise ValueError(f"{prop} needs a modal relation")
    dias = {Z: dia(A, R, Z) for Z in subs}
    if prop == "right_associative":
        for U, W, Z in itertools.product(subs, repeat=3):
            dz = dias[Z]
            if not t(t(U, W), dz) <= t(U, t(W, dz)):
                return ResiduatedWitness(prop, False, (U, W, Z))
        return ResiduatedWitness(prop, True)
    for U, Z, W in itertools.product(subs, repeat=3):
        dw = dias[W]
        if not t(t(U, Z), dw) <= t(t(U, dw), Z):
            return ResiduatedWitness(prop, False, (U, Z, W))
    return ResiduatedWitness(prop, True)


def unit_subspace(A: KAlgebra, one: Vector) -> Subspace | None:
    """``[one]`` if it is a unit of the subspace lattice (decided by the scalar-map test)."""
    if unit_scalars(A, one) is None:
        return None
    return span([one])


# ------------------------------------------------------------ evaluation


@dataclass(frozen=True)
class Model:
    algebra: KAlgebra
    relation: ModalRelation | None = None
    bound: int = DEFAULT_RELATION_DIM_BOUND


def eval_term(A: KAlgebra, R: ModalRelation | None, valuation: dict, s, bound: int = DEFAULT_RELATION_DIM_BOUND) -> Subspace:
    """Interpret a formula or structure as a subspace."""
    memo = {}

    def need_R():
        if R is None:
            raise ValueError("modal connective evaluated without a relation")
        return R

    def go(x):
        hit = memo.get(x)
        if hit is not None:
            return hit
        if isinstance(x, Atom):
            if x.name not in valuation:
                raise UnboundAtom(x.name)
            r = valuation[x.name]
            _check(A, r)
        elif isinstance(x, Leaf):
            r = go(x.formula)
        elif isinstance(x, (Tensor, SFusion)):
            r = tensor(A, go(x.left), go(x.right))
        elif isinstance(x, (LRes, SLRes)):
            r = lres(A, go(x.left), go(x.right))
        elif isinstance(x, (RRes, SRRes)):
            r = rres(A, go(x.left), go(x.right))
        elif isinstance(x, (Dia, SDia)):
            r = dia(A, need_R(), go(x.body), bound)
        elif isinstance(x, (Box, SBox)):
            r = box(A, need_R(), go(x.body), bound)
        else:
            raise TypeError(f"cannot evaluate {x!r}")
        memo[x] = r
        return r

    return go(s)


# the public name used throughout
eval = eval_term


def holds(A: KAlgebra, R: ModalRelation | None, valuation: dict, seq: Sequent, bound: int = DEFAULT_RELATION_DIM_BOUND) -> bool:
    """``⟦lhs⟧ ⊆ ⟦rhs⟧``."""
    return eval_term(A, R, valuation, seq.lhs, bound) <= eval_term(A, R, valuation, seq.rhs, bound)


def random_subspace(A: KAlgebra, rng: np.random.Generator, max_gens: int | None = None) -> Subspace:
    """Span of a few random vectors (finite fields)."""
    if not A.field.is_finite:
        raise UnsupportedField("random subspaces are drawn over finite fields")
    k = int(rng.integers(0, (max_gens or A.dim) + 1))
    gens = rng.integers(0, A.field.p, size=(k, A.dim))
    return Subspace.from_coords(A.field, A.dim, [tuple(int(c) for c in g) for g in gens])


def pointwise_products(A: KAlgebra, X, Y) -> list:
    """The literal product set ``{x * y}`` for finite sets of vectors."""
    return [Vector(A.field, c) for c in _products(A, [x.coords for x in X], [y.coords for y in Y])]


def pointwise_dia(R: ModalRelation, X) -> list:
    """All R-predecessors of the vectors in ``X`` (finite fields)."""
    V = vector_table(R.field.p, R.dim)
    from .linalg import index_of

    targets = {index_of(x) for x in X}
    if R.kind == EMBEDDING:
        rel = R.relation_matrix()
        idx = sorted({int(v) for t in targets for v in np.nonzero(rel[:, t])[0]})
    else:
        vs, us = R.edge_indices()
        idx = sorted({int(v) for v, u in zip(vs, us) if int(u) in targets})
    return [Vector(R.field, tuple(int(c) for c in V[i])) for i in idx]
