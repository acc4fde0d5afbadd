"""Algebras over a field given by structure constants, and pseudo-property checkers.

A pseudo-property is a first-order condition on vectors, such as
``u * v`` being a scalar multiple of ``v * u``.  Over a finite field every
checker is exhaustive.  Over Q the universally quantified ones are refuted
by searching a fixed, documented sample grid, and otherwise come back as
``unknown``; see :func:`sample_grid`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .fields import DimensionMismatch, F2, Field, Q, UnsupportedField
from .linalg import Subspace, Vector, _rref_coords, add_scale, index_of, member, nullspace, vector_table

DEFAULT_ALGEBRA_DIM_BOUND = 8
DEFAULT_EXHAUSTIVE_BOUND = 4096  # vectors; p**dim must not exceed this
HOLDS, FAILS, UNKNOWN = "holds", "fails", "unknown"


@dataclass(frozen=True, eq=False)
class KAlgebra:
    """``field^dim`` with product ``e_i * e_j = sc[i][j]`` extended bilinearly."""

    field: Field
    dim: int
    basis_names: tuple
    sc: tuple  # sc[i][j] is a coordinate tuple of length dim

    def __post_init__(self):
        if len(self.basis_names) != self.dim:
            raise DimensionMismatch("one basis name per dimension")
        if len(self.sc) != self.dim or any(len(r) != self.dim for r in self.sc):
            raise DimensionMismatch("structure constants must be dim x dim")
        if any(len(c) != self.dim for r in self.sc for c in r):
            raise DimensionMismatch("each structure constant must be a vector of length dim")

    @classmethod
    def from_products(cls, field: Field, names: Sequence[str], products: dict) -> "KAlgebra":
        """``products[(i, j)]`` is the coordinate list of ``e_i * e_j``; missing pairs are 0."""
        d = len(names)
        zero = (field.zero,) * d
        sc = tuple(
            tuple(tuple(field.coerce(c) for c in products[(i, j)]) if (i, j) in products else zero for j in range(d))
            for i in range(d)
        )
        return cls(field, d, tuple(names), sc)

    @classmethod
    def from_array(cls, field: Field, sc, names=None) -> "KAlgebra":
        sc = np.asarray(sc)
        d = sc.shape[0]
        names = tuple(names) if names else tuple(f"e{i}" for i in range(d))
        return cls(field, d, names, tuple(tuple(tuple(field.coerce(int(c)) for c in sc[i, j]) for j in range(d)) for i in range(d)))

    def __eq__(self, other):
        return isinstance(other, KAlgebra) and (self.field, self.dim, self.basis_names, self.sc) == (
            other.field,
            other.dim,
            other.basis_names,
            other.sc,
        )

    def __hash__(self):
        return hash((self.field, self.dim, self.sc))

    @cached_property
    def sc_array(self) -> np.ndarray:
        if not self.field.is_finite:
            raise UnsupportedField("integer structure-constant array only over F_p")
        return np.array(self.sc, dtype=np.int64).reshape(self.dim, self.dim, self.dim)

    def vector(self, coords) -> Vector:
        if len(coords) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} coordinates")
        return Vector.of(self.field, coords)

    def basis_vector(self, i) -> Vector:
        if isinstance(i, str):
            i = self.basis_names.index(i)
        return Vector.unit(self.field, self.dim, i)

    def zero(self) -> Vector:
        return Vector.zero(self.field, self.dim)

    @cached_property
    def product_index_table(self) -> np.ndarray:
        """``T[a, b]`` = index of ``v_a * v_b`` over all vectors (finite fields)."""
        p = self.field.p
        if p**self.dim > DEFAULT_EXHAUSTIVE_BOUND:
            raise UnsupportedField(f"{p}^{self.dim} vectors exceeds the exhaustive bound")
        V = vector_table(p, self.dim)
        return kernels.encode(kernels.product_table(V, V, self.sc_array, p), p)

    def left_matrix(self, a: Vector):
        """Matrix of ``x -> a * x`` (column i is ``a * e_i``)."""
        cols = [star(self, a, self.basis_vector(i)).coords for i in range(self.dim)]
        return tuple(tuple(cols[j][i] for j in range(self.dim)) for i in range(self.dim))

    def right_matrix(self, b: Vector):
        """Matrix of ``x -> x * b``."""
        cols = [star(self, self.basis_vector(i), b).coords for i in range(self.dim)]
        return tuple(tuple(cols[j][i] for j in range(self.dim)) for i in range(self.dim))

    def format_vector(self, v: Vector) -> str:
        terms = []
        for c, name in zip(v.coords, self.basis_names):
            if c != 0:
                terms.append(f"{c}{name}" if c != 1 else name)
        return " + ".join(terms) if terms else "0"


def star(A: KAlgebra, u: Vector, v: Vector) -> Vector:
    """Bilinear product ``sum_ij u_i v_j sc[i][j]``."""
    if u.dim != A.dim or v.dim != A.dim or u.field != A.field or v.field != A.field:
        raise DimensionMismatch("vectors are not in the algebra's space")
    f = A.field
    out = [f.zero] * A.dim
    for i, ui in enumerate(u.coords):
        if ui == 0:
            continue
        for j, vj in enumerate(v.coords):
            if vj == 0:
                continue
            c = f.mul(ui, vj)
            for k, s in enumerate(A.sc[i][j]):
                if s != 0:
                    out[k] = f.add(out[k], f.mul(c, s))
    return Vector(f, tuple(out))


# ------------------------------------------------------------ builtins

_QUATERNION_TABLE = [
    # rows: left factor 1, i, j, k; entries (sign, index)
    [(1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0)],
]

_OCTONION_TABLE = """
 e0  e1  e2  e3  e4  e5  e6  e7
 e1 -e0  e3 -e2  e5 -e4 -e7  e6
 e2 -e3 -e0  e1  e6  e7 -e4 -e5
 e3  e2 -e1 -e0  e7 -e6  e5 -e4
 e4 -e5 -e6 -e7 -e0  e1  e2  e3
 e5  e4 -e7  e6 -e1 -e0 -e3  e2
 e6  e7  e4 -e5 -e2  e3 -e0 -e1
 e7 -e6  e5  e4 -e3 -e2  e1 -e0
"""


def _signed_table(field: Field, names, table) -> KAlgebra:
    d = len(names)
    products = {}
    for i in range(d):
        for j in range(d):
            sign, k = table[i][j]
            c = [0] * d
            c[k] = sign
            products[(i, j)] = c
    return KAlgebra.from_products(field, names, products)


def builtin_quaternions(field: Field = Q) -> KAlgebra:
    """Hamilton quaternions on the basis ``e1, i, j, k``."""
    return _signed_table(field, ("e1", "i", "j", "k"), _QUATERNION_TABLE)


def builtin_octonions(field: Field = Q) -> KAlgebra:
    """Octonions on ``e0 .. e7`` with ``e0`` the unit."""
    table = []
    for line in _OCTONION_TABLE.strip().splitlines():
        row = []
        for tok in line.split():
            sign = -1 if tok.startswith("-") else 1
            row.append((sign, int(tok.lstrip("-")[1:])))
        table.append(row)
    return _signed_table(field, tuple(f"e{i}" for i in range(8)), table)


def random_algebra(field: Field, dim: int, seed: int, max_dim: int = DEFAULT_ALGEBRA_DIM_BOUND) -> KAlgebra:
    """Seeded structure constants: uniform over F_p, or integers in [-3, 3] over Q."""
    if dim < 1 or dim > max_dim:
        raise DimensionMismatch(f"dimension must be in 1..{max_dim}")
    rng = np.random.default_rng(seed)
    if field.is_finite:
        sc = rng.integers(0, field.p, size=(dim, dim, dim))
    else:
        sc = rng.integers(-3, 4, size=(dim, dim, dim))
    return KAlgebra.from_array(field, sc)


def zero_algebra(field: Field, dim: int) -> KAlgebra:
    return KAlgebra.from_products(field, [f"e{i}" for i in range(dim)], {})


def idempotent_algebra(field: Field, dim: int) -> KAlgebra:
    """``e_i * e_i = e_i`` and all mixed products zero."""
    prods = {}
    for i in range(dim):
        c = [0] * dim
        c[i] = 1
        prods[(i, i)] = c
    return KAlgebra.from_products(field, [f"e{i}" for i in range(dim)], prods)


# ------------------------------------------------------------ verdicts


@dataclass(frozen=True)
class PseudoVerdict:
    """Outcome of a pseudo-property check.

    ``witness`` holds the refuting vectors when ``status == "fails"``; for a
    successful unital check it holds the unit.  ``exhaustive`` records
    whether the whole space was enumerated.
    """

    property: str
    status: str
    witness: tuple | None = None
    scalars: tuple | None = None
    exhaustive: bool = False
    checked: int = 0

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS


def multiple_scalar(x: Vector, y: Vector):
    """A scalar ``a`` with ``x = a y``, or None.  If ``y = 0`` this needs ``x = 0``."""
    f = x.field
    if x.is_zero():
        return f.zero
    k = next((i for i, c in enumerate(y.coords) if c != 0), None)
    if k is None:
        return None
    a = f.mul(x.coords[k], f.inv(y.coords[k]))
    return a if y.scale(a) == x else None


def span2_scalars(x: Vector, u: Vector, v: Vector):
    """Scalars ``(a, b)`` with ``x = a u + b v``, or None."""
    f = x.field
    d = x.dim
    # solve [u v] (a, b)^T = x: columns u, v
    rows = [(u.coords[i], v.coords[i], x.coords[i]) for i in range(d)]
    aug = _rref_coords(f, 3, rows)
    for r in aug:
        if r[0] == 0 and r[1] == 0 and r[2] != 0:
            return None
    a = b = f.zero
    for r in aug:
        if r[0] != 0:
            a = r[2]
        elif r[1] != 0:
            b = r[2]
    # free variables set to zero; re-verify
    if u.scale(a) + v.scale(b) == x:
        return a, b
    return None


# ----------------------------------------------- rational sample grid

_SEED_VECTORS = (
    (2, 3, 4, 2),
    (3, 8, 1, 4),
    (1, 2, 3, 5, 7, 8, 11, 12),
)
_TWO_TERM_COEFFS = (1, 2, 3)
_RANDOM_GRID_SIZE = 12
GRID_TUPLE_BUDGET = 250_000


def sample_grid(A: KAlgebra, seed: int = 0) -> list[list[Vector]]:
    """Sample phases used to refute universal claims over Q.

    1. the basis vectors;
    2. the seed vectors ``(2,3,4,2)``, ``(3,8,1,4)``, ``(1,2,3,5,7,8,11,12)``
       whose length equals the dimension;
    3. two-term combinations ``e_i + c e_j`` (i < j, c in {1, 2, 3});
    4. seeded random vectors with entries ``n/m``, n in [-5, 5], m in [1, 3].

    Tuples are tried over phase 1 alone, then phase 2 alone, then over the
    union of all phases in prefix order.
    """
    f = A.field
    d = A.dim
    basis = [A.basis_vector(i) for i in range(d)]
    seeds = [Vector.of(f, s) for s in _SEED_VECTORS if len(s) == d]
    two = []
    for i, j in itertools.combinations(range(d), 2):
        for c in _TWO_TERM_COEFFS:
            two.append(basis[i] + basis[j].scale(c))
    rng = np.random.default_rng(seed)
    rand = []
    for _ in range(_RANDOM_GRID_SIZE):
        nums = rng.integers(-5, 6, size=d)
        dens = rng.integers(1, 4, size=d)
        rand.append(Vector(f, tuple(Fraction(int(a), int(b)) if not f.is_finite else f.coerce(Fraction(int(a), int(b))) for a, b in zip(nums, dens))))
    return [basis, seeds, two, rand]


def _grid_tuples(A: KAlgebra, arity: int, seed: int = 0):
    phases = sample_grid(A, seed)
    seen = set()
    budget = GRID_TUPLE_BUDGET

    def emit(tup):
        nonlocal budget
        key = tuple(v.coords for v in tup)
        if key in seen:
            return None
        seen.add(key)
        budget -= 1
        return tup

    for group in phases[:2]:
        for tup in itertools.product(group, repeat=arity):
            if budget <= 0:
                return
            t = emit(tup)
            if t is not None:
                yield t
    pool = []
    for group in phases:
        for v in group:
            pool.append(v)
            k = len(pool) - 1
            # tuples over pool[:k+1] that use pool[k]
            for tup in itertools.product(range(k + 1), repeat=arity):
                if k not in tup:
                    continue
                if budget <= 0:
                    return
                t = emit(tuple(pool[i] for i in tup))
                if t is not None:
                    yield t


# ------------------------------------------------------- finite helpers


def _finite_setup(A: KAlgebra):
    p = A.field.p
    if p**A.dim > DEFAULT_EXHAUSTIVE_BOUND:
        raise UnsupportedField(f"{p}^{A.dim} vectors exceeds the exhaustive bound {DEFAULT_EXHAUSTIVE_BOUND}")
    return p, vector_table(p, A.dim), A.product_index_table


def _vec(A: KAlgebra, idx) -> Vector:
    return Vector(A.field, tuple(int(c) for c in vector_table(A.field.p, A.dim)[int(idx)]))


# ------------------------------------------------------------ checkers


def check_pseudo_commutative(A: KAlgebra, seed: int = 0) -> PseudoVerdict:
    """Every ``u * v`` is a scalar multiple of ``v * u``."""
    name = "pseudo_commutative"
    if A.field.is_finite:
        p, V, T = _finite_setup(A)
        N = V.shape[0]
        ok = kernels.multiple_of(V[T.ravel()], V[T.T.ravel()], p).reshape(N, N)
        bad = np.argwhere(~ok)
        if bad.size:
            a, b = bad[0]
            return PseudoVerdict(name, FAILS, (_vec(A, a), _vec(A, b)), exhaustive=True, checked=N * N)
        return PseudoVerdict(name, HOLDS, exhaustive=True, checked=N * N)
    n = 0
    for u, v in _grid_tuples(A, 2, seed):
        n += 1
        if multiple_scalar(star(A, u, v), star(A, v, u)) is None:
            return PseudoVerdict(name, FAILS, (u, v), checked=n)
    return PseudoVerdict(name, UNKNOWN, checked=n)


def check_pseudo_associative(A: KAlgebra, seed: int = 0) -> PseudoVerdict:
    """``(u*v)*w`` and ``u*(v*w)`` are scalar multiples of each other, both ways."""
    name = "pseudo_associative"
    if A.field.is_finite:
        p, V, T = _finite_setup(A)
        N = V.shape[0]
        left = T[T[:, :, None], np.arange(N)[None, None, :]]  # (a*b)*c
        right = T[np.arange(N)[:, None, None], T[None, :, :]]  # a*(b*c)
        L = V[left.ravel()]
        R = V[right.ravel()]
        ok = (kernels.multiple_of(L, R, p) & kernels.multiple_of(R, L, p)).reshape(N, N, N)
        bad = np.argwhere(~ok)
        if bad.size:
            a, b, c = bad[0]
            return PseudoVerdict(name, FAILS, (_vec(A, a), _vec(A, b), _vec(A, c)), exhaustive=True, checked=N**3)
        return PseudoVerdict(name, HOLDS, exhaustive=True, checked=N**3)
    n = 0
    for u, v, w in _grid_tuples(A, 3, seed):
        n += 1
        lt = star(A, star(A, u, v), w)
        rt = star(A, u, star(A, v, w))
        if multiple_scalar(lt, rt) is None or multiple_scalar(rt, lt) is None:
            return PseudoVerdict(name, FAILS, (u, v, w), checked=n)
    return PseudoVerdict(name, UNKNOWN, checked=n)


def _scalar_map(M, field: Field):
    """The scalar ``c`` if ``M = c I``, else None."""
    d = len(M)
    c = M[0][0] if d else field.zero
    for i in range(d):
        for j in range(d):
            if M[i][j] != (c if i == j else 0):
                return None
    return c


def unit_scalars(A: KAlgebra, one: Vector):
    """Exact test of a unit candidate: ``x*one = b x`` and ``one*x = d x`` with ``b, d != 0``.

    For dim >= 2 "every vector is a multiple of its image" forces the linear
    map to be a scalar; in dim 1 every map is scalar.  Returns ``(b, d)`` or
    None.
    """
    b = _scalar_map(A.right_matrix(one), A.field)
    d = _scalar_map(A.left_matrix(one), A.field)
    if b is None or d is None or b == 0 or d == 0:
        return None
    return b, d


def check_pseudo_unital(A: KAlgebra, candidate: Vector | None = None) -> PseudoVerdict:
    """Some ``1`` with ``u`` and ``u*1`` (and ``1*u``) multiples of each other for all ``u``.

    Over F_p: exhaustive over all ``u`` and, without a candidate, over all
    candidates.  A failing verdict without a candidate lists, for every
    candidate in index order, a vector ``u`` refuting it.
    Over Q: a supplied candidate is decided exactly through the scalar-map
    criterion of :func:`unit_scalars`; without one, the linear system
    ``x*c = b x, c*x = d x`` in ``(c, b, d)`` is solved and a solution with
    ``b, d`` both nonzero is searched for.
    """
    name = "pseudo_unital"
    if A.field.is_finite:
        p, V, T = _finite_setup(A)
        N = V.shape[0]
        cands = range(N) if candidate is None else [index_of(candidate)]
        refuters = []
        for c in cands:
            ur = T[:, c]
            ul = T[c, :]
            ok = (
                kernels.multiple_of(V, V[ur], p)
                & kernels.multiple_of(V[ur], V, p)
                & kernels.multiple_of(V, V[ul], p)
                & kernels.multiple_of(V[ul], V, p)
            )
            bad = np.nonzero(~ok)[0]
            if bad.size == 0:
                return PseudoVerdict(name, HOLDS, (_vec(A, c),), exhaustive=True, checked=N * len(cands))
            refuters.append(_vec(A, bad[0]))
        if candidate is not None:
            return PseudoVerdict(name, FAILS, (candidate, refuters[0]), exhaustive=True, checked=N)
        return PseudoVerdict(name, FAILS, tuple(refuters), exhaustive=True, checked=N * N)
    if candidate is not None:
        sc = unit_scalars(A, candidate)
        if sc is None:
            return PseudoVerdict(name, FAILS, (candidate,), exhaustive=True)
        return PseudoVerdict(name, HOLDS, (candidate,), scalars=sc, exhaustive=True)
    found = _solve_unit(A)
    if found is None:
        return PseudoVerdict(name, FAILS, (), exhaustive=True)
    return PseudoVerdict(name, HOLDS, (found,), scalars=unit_scalars(A, found), exhaustive=True)


def _solve_unit(A: KAlgebra):
    """A unit candidate over an infinite field, or None if none exists."""
    f, d = A.field, A.dim
    # unknowns: c_0..c_{d-1}, b, dd.  Equations: (x*c)_i = b x_i for x = e_j,
    # i.e. sum_k c_k sc[j][k][i] - b [i==j] = 0, and similarly on the left.
    eqs = []
    for j in range(d):
        for i in range(d):
            eqs.append(tuple(A.sc[j][k][i] for k in range(d)) + ((f.neg(f.one) if i == j else f.zero), f.zero))
            eqs.append(tuple(A.sc[k][j][i] for k in range(d)) + (f.zero, (f.neg(f.one) if i == j else f.zero)))
    sol = nullspace(f, d + 2, eqs)
    if not any(s[d] != 0 for s in sol) or not any(s[d + 1] != 0 for s in sol):
        return None
    # a generic combination avoids both hyperplanes b = 0 and dd = 0
    for coeffs in itertools.product(range(1, len(sol) + 2), repeat=len(sol)):
        vec = [f.zero] * (d + 2)
        for a, s in zip(coeffs, sol):
            vec = [f.add(x, f.mul(f.coerce(a), y)) for x, y in zip(vec, s)]
        if vec[d] != 0 and vec[d + 1] != 0:
            return Vector(f, tuple(vec[:d]))
    return None


def check_pseudo_contractive(A: KAlgebra, seed: int = 0) -> PseudoVerdict:
    """Every ``u`` is a scalar multiple of ``u * u``."""
    name = "pseudo_contractive"
    if A.field.is_finite:
        p, V, T = _finite_setup(A)
        N = V.shape[0]
        ok = kernels.multiple_of(V, V[np.diag(T)], p)
        bad = np.nonzero(~ok)[0]
        if bad.size:
            return PseudoVerdict(name, FAILS, (_vec(A, bad[0]),), exhaustive=True, checked=N)
        return PseudoVerdict(name, HOLDS, exhaustive=True, checked=N)
    n = 0
    for (u,) in _grid_tuples(A, 1, seed):
        n += 1
        if multiple_scalar(u, star(A, u, u)) is None:
            return PseudoVerdict(name, FAILS, (u,), checked=n)
    return PseudoVerdict(name, UNKNOWN, checked=n)


def check_pseudo_expansive(A: KAlgebra, seed: int = 0) -> PseudoVerdict:
    """Every ``u * v`` lies in the span of ``u`` and ``v``."""
    name = "pseudo_expansive"
    if A.field.is_finite:
        p, V, T = _finite_setup(A)
        N = V.shape[0]
        ia, ib = np.indices((N, N))
        ok = kernels.in_span2(V[T.ravel()], V[ia.ravel()], V[ib.ravel()], p).reshape(N, N)
        bad = np.argwhere(~ok)
        if bad.size:
            a, b = bad[0]
            return PseudoVerdict(name, FAILS, (_vec(A, a), _vec(A, b)), exhaustive=True, checked=N * N)
        return PseudoVerdict(name, HOLDS, exhaustive=True, checked=N * N)
    n = 0
    for u, v in _grid_tuples(A, 2, seed):
        n += 1
        if span2_scalars(star(A, u, v), u, v) is None:
            return PseudoVerdict(name, FAILS, (u, v), checked=n)
    return PseudoVerdict(name, UNKNOWN, checked=n)


def check_pseudo_monoidal(A: KAlgebra, candidate: Vector | None = None, seed: int = 0) -> PseudoVerdict:
    a = check_pseudo_associative(A, seed)
    if a.status != HOLDS:
        return PseudoVerdict("pseudo_monoidal", a.status, a.witness, exhaustive=a.exhaustive, checked=a.checked)
    u = check_pseudo_unital(A, candidate)
    return PseudoVerdict("pseudo_monoidal", u.status, u.witness, u.scalars, exhaustive=a.exhaustive and u.exhaustive)


PSEUDO_CHECKERS = {
    "commutative": check_pseudo_commutative,
    "associative": check_pseudo_associative,
    "unital": check_pseudo_unital,
    "contractive": check_pseudo_contractive,
    "expansive": check_pseudo_expansive,
    "monoidal": check_pseudo_monoidal,
}


def check_pseudo(A: KAlgebra, prop: str, **kw) -> PseudoVerdict:
    prop = prop.removeprefix("pseudo_").removeprefix("pseudo-")
    if prop not in PSEUDO_CHECKERS:
        raise ValueError(f"unknown pseudo-property {prop!r}")
    return PSEUDO_CHECKERS[prop](A, **kw)


def check_pseudo_modal(A: KAlgebra, R, which: str) -> PseudoVerdict:
    """Pseudo right-associativity or pseudo left-commutativity w.r.t. ``R``.

    For all ``u, w, z, v`` with ``v R z`` there must be ``a, b`` and ``v'``
    with ``v' R (b z)`` and
    ``(u*w)*v = a (u*(w*v'))`` (``which="right_assoc"``) or
    ``(u*w)*v = a ((u*v')*w)`` (``which="left_comm"``).
    Exhaustive over the finite field; the first failing ``(u, w, z, v)`` in
    index order is the witness.
    """
    if which not in ("right_assoc", "left_comm"):
        raise ValueError("which must be 'right_assoc' or 'left_comm'")
    if not A.field.is_finite:
        raise UnsupportedField("modal pseudo-properties are checked over finite fields only")
    if R.field != A.field or R.dim != A.dim:
        raise DimensionMismatch("relation does not live on the algebra's space")
    p, V, T = _finite_setup(A)
    N = V.shape[0]
    rel = R.relation_matrix()
    _, scale = add_scale(p, A.dim)
    # cand[z]: all v' with v' R (b z) for some b
    cand = np.zeros((N, N), dtype=bool)
    for b in range(p):
        cand |= rel[:, scale[b]].T
    ar = np.arange(N)
    bad = np.zeros((N, N, N, N), dtype=bool)  # (u, w, z, v)
    targets = T[T[:, :, None], ar[None, None, :]]  # (u, w, v) -> (u*w)*v
    for z in range(N):
        vs = np.nonzero(rel[:, z])[0]
        if vs.size == 0:
            continue
        primes = np.nonzero(cand[z])[0]
        if which == "right_assoc":
            # s[u, w, v'] = u*(w*v')
            s = T[ar[:, None, None], T[None, :, primes][..., :]]
        else:
            # s[u, w, v'] = (u*v')*w
            s = T[T[:, primes][:, None, :], ar[None, :, None]]
        for v in vs:
            t = targets[:, :, v]  # (u, w)
            if primes.size == 0:
                ok = np.zeros((N, N), dtype=bool)
            else:
                X = np.broadcast_to(t[:, :, None], s.shape).reshape(-1)
                ok = kernels.multiple_of(V[X], V[s.reshape(-1)], p).reshape(s.shape).any(axis=2)
            bad[:, :, z, v] = ~ok
    hits = np.argwhere(bad)
    name = f"pseudo_{which}"
    if hits.size:
        u, w, z, v = hits[0]
        return PseudoVerdict(name, FAILS, tuple(_vec(A, i) for i in (u, w, z, v)), exhaustive=True, checked=int(rel.sum()) * N * N)
    return PseudoVerdict(name, HOLDS, exhaustive=True, checked=int(rel.sum()) * N * N)
