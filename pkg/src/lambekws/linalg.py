"""Exact linear algebra over F_p and Q.

Subspaces are stored by their canonical reduced row-echelon basis, so two
``Subspace`` objects are equal exactly when they denote the same subspace.
Prime-field elimination runs through :mod:`lambekws.kernels`; rational
elimination uses :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .fields import DimensionMismatch, Field, UnsupportedField

DEFAULT_ENUM_DIM = 5


@dataclass(frozen=True)
class Vector:
    field: Field
    coords: tuple

    @classmethod
    def of(cls, field: Field, coords: Iterable) -> "Vector":
        return cls(field, tuple(field.coerce(c) for c in coords))

    @classmethod
    def zero(cls, field: Field, dim: int) -> "Vector":
        return cls(field, (field.zero,) * dim)

    @classmethod
    def unit(cls, field: Field, dim: int, i: int) -> "Vector":
        c = [field.zero] * dim
        c[i] = field.one
        return cls(field, tuple(c))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def _check(self, other: "Vector"):
        if self.field != other.field or self.dim != other.dim:
            raise DimensionMismatch(f"{self.field.name}^{self.dim} vs {other.field.name}^{other.dim}")

    def __add__(self, other: "Vector") -> "Vector":
        self._check(other)
        f = self.field
        return Vector(f, tuple(f.add(a, b) for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Vector") -> "Vector":
        self._check(other)
        f = self.field
        return Vector(f, tuple(f.sub(a, b) for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Vector":
        return Vector(self.field, tuple(self.field.neg(a) for a in self.coords))

    def scale(self, alpha) -> "Vector":
        f = self.field
        alpha = f.coerce(alpha)
        return Vector(f, tuple(f.mul(alpha, a) for a in self.coords))

    def __rmul__(self, alpha) -> "Vector":
        return self.scale(alpha)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def _check_rows(rows: Sequence[Vector], field: Field | None = None, dim: int | None = None):
    for r in rows:
        if field is None:
            field, dim = r.field, r.dim
        elif r.field != field or r.dim != dim:
            raise DimensionMismatch("rows do not share field and dimension")
    return field, dim


def _rref_coords(field: Field, dim: int, rows: Sequence[tuple]) -> list[tuple]:
    """Canonical RREF basis (as coordinate tuples) of the span of ``rows``."""
    rows = [r for r in rows if any(c != 0 for c in r)]
    if not rows:
        return []
    if field.is_finite:
        R, rank = kernels.rref_modp(np.array(rows, dtype=np.int64), field.p, field.inverse_table)
        return [tuple(int(c) for c in R[i]) for i in range(rank)]
    M = [list(r) for r in rows]
    m = len(M)
    row = 0
    for col in range(dim):
        if row >= m:
            break
        piv = next((r for r in range(row, m) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        s = 1 / M[row][col]
        M[row] = [s * c for c in M[row]]
        for r in range(m):
            if r != row and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[row])]
        row += 1
    return [tuple(M[i]) for i in range(row)]


def rref(rows: Sequence[Vector]) -> tuple[list[Vector], int]:
    """Canonical reduced row-echelon basis of the row span, and its rank."""
    if not rows:
        return [], 0
    field, dim = _check_rows(rows)
    basis = _rref_coords(field, dim, [r.coords for r in rows])
    return [Vector(field, b) for b in basis], len(basis)


def pivots(basis: Sequence[tuple]) -> list[int]:
    return [next(i for i, c in enumerate(b) if c != 0) for b in basis]


@dataclass(frozen=True)
class Subspace:
    field: Field
    ambient_dim: int
    basis: tuple  # tuple of coordinate tuples in canonical RREF

    @classmethod
    def from_coords(cls, field: Field, dim: int, rows: Iterable[Sequence]) -> "Subspace":
        rows = [tuple(field.coerce(c) for c in r) for r in rows]
        for r in rows:
            if len(r) != dim:
                raise DimensionMismatch(f"row of length {len(r)} in ambient dimension {dim}")
        return cls(field, dim, tuple(_rref_coords(field, dim, rows)))

    @classmethod
    def zero(cls, field: Field, dim: int) -> "Subspace":
        return cls(field, dim, ())

    @classmethod
    def full(cls, field: Field, dim: int) -> "Subspace":
        return cls(field, dim, tuple(Vector.unit(field, dim, i).coords for i in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def vectors(self) -> tuple:
        return tuple(Vector(self.field, b) for b in self.basis)

    def _check(self, other):
        if self.field != other.field or self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("subspaces live in different spaces")

    def __contains__(self, v: Vector) -> bool:
        return member(v, self)

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return all(Vector(self.field, b) in other for b in self.basis)

    def __lt__(self, other: "Subspace") -> bool:
        return self <= other and self.dim < other.dim

    def __and__(self, other):
        return intersect(self, other)

    def __or__(self, other):
        return join(self, other)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def elements(self) -> Iterator[Vector]:
        """Every vector of the subspace (finite fields only)."""
        if not self.field.is_finite:
            raise UnsupportedField("cannot enumerate a subspace over Q")
        for coeffs in itertools.product(range(self.field.p), repeat=self.dim):
            v = Vector.zero(self.field, self.ambient_dim)
            for a, b in zip(coeffs, self.basis):
                if a:
                    v = v + Vector(self.field, b).scale(a)
            yield v

    def element_indices(self) -> np.ndarray:
        """Sorted base-p indices of all elements (finite fields only)."""
        if not self.field.is_finite:
            raise UnsupportedField("cannot enumerate a subspace over Q")
        p = self.field.p
        if not self.basis:
            return np.zeros(1, dtype=np.int64)
        B = np.array(self.basis, dtype=np.int64)
        C = kernels.all_vectors(p, self.dim)
        return np.sort(kernels.encode((C @ B) % p, p))

    def mask(self) -> np.ndarray:
        """Boolean membership mask over all ``p**ambient_dim`` vectors."""
        out = np.zeros(self.field.p**self.ambient_dim, dtype=bool)
        out[self.element_indices()] = True
        return out

    def __repr__(self):
        rows = ", ".join("(" + ",".join(str(c) for c in b) + ")" for b in self.basis)
        return f"Subspace[{self.field.name}^{self.ambient_dim}]<{rows}>"


def span(vs: Sequence[Vector], field: Field | None = None, dim: int | None = None) -> Subspace:
    """Smallest subspace containing ``vs``; ``field``/``dim`` are needed when ``vs`` is empty."""
    if not vs:
        if field is None or dim is None:
            raise DimensionMismatch("span of no vectors needs an explicit field and dimension")
        return Subspace.zero(field, dim)
    f, d = _check_rows(vs, field, dim)
    return Subspace(f, d, tuple(_rref_coords(f, d, [v.coords for v in vs])))


def member(v: Vector, S: Subspace) -> bool:
    if v.field != S.field or v.dim != S.ambient_dim:
        raise DimensionMismatch("vector and subspace live in different spaces")
    if v.is_zero():
        return True
    f = S.field
    # reduce v against the RREF basis
    r = list(v.coords)
    for b, piv in zip(S.basis, pivots(S.basis)):
        c = r[piv]
        if c != 0:
            r = [f.sub(x, f.mul(c, y)) for x, y in zip(r, b)]
    return all(x == 0 for x in r)


def intersect(S: Subspace, T: Subspace) -> Subspace:
    S._check(T)
    if S.is_zero() or T.is_zero():
        return Subspace.zero(S.field, S.ambient_dim)
    # S ∩ T = { x : x ⊥ ann(S) and x ⊥ ann(T) }
    eqs = list(annihilator(S)) + list(annihilator(T))
    return Subspace(S.field, S.ambient_dim, tuple(nullspace(S.field, S.ambient_dim, eqs)))


def join(S: Subspace, T: Subspace) -> Subspace:
    S._check(T)
    return Subspace(S.field, S.ambient_dim, tuple(_rref_coords(S.field, S.ambient_dim, list(S.basis) + list(T.basis))))


def nullspace(field: Field, dim: int, rows: Sequence[tuple]) -> list[tuple]:
    """Canonical basis of ``{x : r . x = 0 for every r in rows}``."""
    R = _rref_coords(field, dim, list(rows))
    piv = pivots(R)
    free = [c for c in range(dim) if c not in set(piv)]
    gens = []
    for fcol in free:
        x = [field.zero] * dim
        x[fcol] = field.one
        for row, pc in zip(R, piv):
            x[pc] = field.neg(row[fcol])
        gens.append(tuple(x))
    return _rref_coords(field, dim, gens)


def annihilator(S: Subspace) -> list[tuple]:
    """Rows ``c`` with ``S = {x : c . x = 0 for all c}``."""
    return nullspace(S.field, S.ambient_dim, S.basis)


def mat_vec(field: Field, M: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(_dot(field, row, v) for row in M)


def _dot(field: Field, a: Sequence, b: Sequence):
    s = field.zero
    for x, y in zip(a, b):
        if x != 0 and y != 0:
            s = field.add(s, field.mul(x, y))
    return s


def solve_membership_constraints(
    constraints: Sequence[tuple], field: Field | None = None, dim: int | None = None
) -> Subspace:
    """``{u : M_i u in S_i for all i}`` for square matrices ``M_i`` and subspaces ``S_i``.

    Each preimage is expressed through the annihilator ``C_i`` of ``S_i``:
    ``M_i u in S_i`` iff ``C_i M_i u = 0``.
    """
    if not constraints:
        if field is None or dim is None:
            raise DimensionMismatch("no constraints: explicit field and dimension required")
        return Subspace.full(field, dim)
    field = field or constraints[0][1].field
    dim = dim if dim is not None else constraints[0][1].ambient_dim
    eqs = []
    for M, S in constraints:
        if S.field != field or S.ambient_dim != dim or len(M) != dim or any(len(r) != dim for r in M):
            raise DimensionMismatch("constraint map/subspace does not match ambient space")
        for c in annihilator(S):
            # row vector c^T M
            eqs.append(tuple(_dot(field, c, [M[i][j] for i in range(dim)]) for j in range(dim)))
    return Subspace(field, dim, tuple(nullspace(field, dim, eqs)))


def enumerate_subspaces(field: Field, dim: int, max_dim: int = DEFAULT_ENUM_DIM) -> Iterator[Subspace]:
    """Every subspace of F_p^dim exactly once, by rank then pivot set then entries."""
    if not field.is_finite:
        raise UnsupportedField("subspace enumeration needs a finite field")
    if dim > max_dim:
        raise DimensionMismatch(f"dimension {dim} exceeds enumeration bound {max_dim}")
    yield from _subspaces_cached(field.p, dim)


@lru_cache(maxsize=None)
def _subspaces_cached(p: int, dim: int) -> tuple:
    field = Field(p)
    out = []
    for r in range(dim + 1):
        for piv in itertools.combinations(range(dim), r):
            # free slots: (row i, column c) with c > piv[i] and c not a pivot
            slots = [(i, c) for i in range(r) for c in range(piv[i] + 1, dim) if c not in piv]
            for vals in itertools.product(range(p), repeat=len(slots)):
                rows = [[0] * dim for _ in range(r)]
                for i, c in enumerate(piv):
                    rows[i][c] = 1
                for (i, c), a in zip(slots, vals):
                    rows[i][c] = a
                out.append(Subspace(field, dim, tuple(tuple(row) for row in rows)))
    return tuple(out)


def count_subspaces(p: int, dim: int) -> int:
    """Sum of Gaussian binomials; independent of :func:`enumerate_subspaces`."""
    total = 0
    for k in range(dim + 1):
        num = den = 1
        for i in range(k):
            num *= p ** (dim - i) - 1
            den *= p ** (k - i) - 1
        total += num // den
    return total


@lru_cache(maxsize=None)
def vector_table(p: int, d: int) -> np.ndarray:
    V = kernels.all_vectors(p, d)
    V.flags.writeable = False
    return V


@lru_cache(maxsize=None)
def add_scale(p: int, d: int):
    return kernels.add_scale_tables(p, d)


def index_of(v: Vector) -> int:
    p = v.field.p
    idx = 0
    for c in v.coords:
        idx = idx * p + int(c)
    return idx


def vector_at(field: Field, dim: int, idx: int) -> Vector:
    return Vector(field, tuple(int(c) for c in vector_table(field.p, dim)[idx]))


def span_of_indices(field: Field, dim: int, idxs) -> Subspace:
    """Span of the vectors with the given base-p indices."""
    idxs = np.unique(np.asarray(idxs, dtype=np.int64))
    idxs = idxs[idxs != 0]
    if idxs.size == 0:
        return Subspace.zero(field, dim)
    rows = vector_table(field.p, dim)[idxs]
    R, rank = kernels.rref_modp(rows, field.p, field.inverse_table)
    return Subspace(field, dim, tuple(tuple(int(c) for c in R[i]) for i in range(rank)))
