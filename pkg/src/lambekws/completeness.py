"""Finite modal residuated posets and their embedding into subspace lattices of F2-algebras.

For a poset ``p_0 .. p_{n-1}`` the algebra lives on ``F2^(n*n)`` with basis
``e^k_m`` at coordinate ``k*n + m``.  The element ``p_k`` is sent to the span
of all ``e^m_j`` with ``p_m <= p_k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from . import complex_algebra as ca
from .fields import F2
from .kalgebra import KAlgebra
from .linalg import Subspace
from .relations import COVERAGE, PARTITION, ModalRelation
from .terms import Atom, Box, Dia, Leaf, LRes, RRes, SBox, SDia, Sequent, SFusion, SLRes, SRRes, Tensor

DEFAULT_EMBED_BOUND = 4
DEFAULT_MODAL_CLAUSE_BOUND = 3
DEFAULT_COUNTERMODEL_SIZE = 3


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class ModalResiduatedPoset:
    """Tables over ``range(n)``: ``lres[x][z] = x\\z`` and ``rres[z][y] = z/y``."""

    n: int
    leq: tuple
    otimes: tuple
    lres: tuple
    rres: tuple
    dia: tuple
    box: tuple

    def le(self, a: int, b: int) -> bool:
        return bool(self.leq[a][b])


@dataclass
class PosetReport:
    ok: bool
    violations: list = dc_field(default_factory=list)  # (law, witness tuple)

    @property
    def first(self):
        return self.violations[0] if self.violations else None


def validate_poset(P: ModalResiduatedPoset, all_violations: bool = False) -> PosetReport:
    """Order axioms, residuation of ``⊗`` and the adjunction ``◇ ⊣ ■``, exhaustively."""
    n = P.n
    viol = []

    def bad(law, *w):
        viol.append((law, w))
        return not all_violations

    R = range(n)
    shapes = [
        ("leq", P.leq, (n, n)),
        ("otimes", P.otimes, (n, n)),
        ("lres", P.lres, (n, n)),
        ("rres", P.rres, (n, n)),
    ]
    for name, tab, (r, c) in shapes:
        if len(tab) != r or any(len(row) != c for row in tab):
            return PosetReport(False, [("shape", (name,))])
    if len(P.dia) != n or len(P.box) != n:
        return PosetReport(False, [("shape", ("dia/box",))])
    for name, tab in (("otimes", P.otimes), ("lres", P.lres), ("rres", P.rres)):
        for row in tab:
            if any(not (0 <= x < n) for x in row):
                return PosetReport(False, [("range", (name,))])
    if any(not (0 <= x < n) for x in P.dia + P.box):
        return PosetReport(False, [("range", ("dia/box",))])
    le = P.le
    for x in R:
        if not le(x, x) and bad("reflexivity", x):
            return PosetReport(False, viol)
    for x, y in itertools.product(R, R):
        if x != y and le(x, y) and le(y, x) and bad("antisymmetry", x, y):
            return PosetReport(False, viol)
    for x, y, z in itertools.product(R, R, R):
        if le(x, y) and le(y, z) and not le(x, z) and bad("transitivity", x, y, z):
            return PosetReport(False, viol)
    for x, y, z in itertools.product(R, R, R):
        a = le(P.otimes[x][y], z)
        b = le(x, P.rres[z][y])
        c = le(y, P.lres[x][z])
        if not (a == b == c) and bad("residuation", x, y, z):
            return PosetReport(False, viol)
    for x, y in itertools.product(R, R):
        if le(P.dia[x], y) != le(x, P.box[y]) and bad("adjunction", x, y):
            return PosetReport(False, viol)
    return PosetReport(not viol, viol)


# ------------------------------------------------------------ small posets


def trivial_poset() -> ModalResiduatedPoset:
    return ModalResiduatedPoset(1, ((True,),), ((0,),), ((0,),), ((0,),), (0,), (0,))


def chain_poset(n: int, dia=None) -> ModalResiduatedPoset:
    """``0 < 1 < ... < n-1`` with meet as fusion and relative implication as residuals.

    ``dia`` (default identity) must preserve joins; the box is its right adjoint.
    """
    leq = tuple(tuple(i <= j for j in range(n)) for i in range(n))
    otimes = tuple(tuple(min(i, j) for j in range(n)) for i in range(n))
    imp = tuple(tuple(n - 1 if i <= j else j for j in range(n)) for i in range(n))
    lres = imp  # lres[x][z] = x -> z
    rres = tuple(tuple(imp[y][z] for y in range(n)) for z in range(n))  # rres[z][y] = y -> z
    d = tuple(range(n)) if dia is None else tuple(dia)
    box = tuple(max(x for x in range(n) if d[x] <= y) if any(d[x] <= y for x in range(n)) else 0 for y in range(n))
    return ModalResiduatedPoset(n, leq, otimes, lres, rres, d, box)


def lukasiewicz_chain(n: int, dia=None) -> ModalResiduatedPoset:
    """Chain ``0 < ... < n-1`` with the truncated sum ``x ⊗ y = max(0, x + y - (n-1))``."""
    top = n - 1
    leq = tuple(tuple(i <= j for j in range(n)) for i in range(n))
    otimes = tuple(tuple(max(0, x + y - top) for y in range(n)) for x in range(n))
    P = from_fusion(leq, otimes, tuple(range(n)) if dia is None else tuple(dia))
    if P is None:
        raise EmbeddingError("diamond table has no right adjoint")
    return P


def handcrafted_three() -> ModalResiduatedPoset:
    """Three-element Lukasiewicz chain with ``◇ = (0, 0, 2)`` and ``■ = (1, 1, 2)``.

    The Goedel chain (fusion = meet) is not used here: its residual clauses
    fail under the row-major ``nu`` (see :func:`verify_embedding`).
    """
    return lukasiewicz_chain(3, dia=(0, 0, 2))


def _principal_max(leq, members):
    """The maximum of ``members`` if they form exactly its down-set, else None."""
    n = len(leq)
    for m in range(n):
        if all((x in members) == bool(leq[x][m]) for x in range(n)):
            return m
    return None


def from_fusion(leq, otimes, dia) -> ModalResiduatedPoset | None:
    """Complete a fusion and diamond table with residuals and box, if they exist."""
    n = len(leq)
    rres = [[0] * n for _ in range(n)]
    lres = [[0] * n for _ in range(n)]
    for y in range(n):
        for z in range(n):
            m = _principal_max(leq, {x for x in range(n) if leq[otimes[x][y]][z]})
            if m is None:
                return None
            rres[z][y] = m
    for x in range(n):
        for z in range(n):
            m = _principal_max(leq, {y for y in range(n) if leq[otimes[x][y]][z]})
            if m is None:
                return None
            lres[x][z] = m
    box = []
    for y in range(n):
        m = _principal_max(leq, {x for x in range(n) if leq[dia[x]][y]})
        if m is None:
            return None
        box.append(m)
    return ModalResiduatedPoset(
        n,
        tuple(tuple(bool(v) for v in r) for r in leq),
        tuple(map(tuple, otimes)),
        tuple(map(tuple, lres)),
        tuple(map(tuple, rres)),
        tuple(dia),
        tuple(box),
    )


# ---------------------------------------------------------------- embedding


@dataclass(frozen=True, eq=False)
class Embedding:
    source: ModalResiduatedPoset
    algebra: KAlgebra
    h: tuple  # Subspace per element
    nu: tuple  # nu[k][m][r] = (row, col) of the basis image
    R: ModalRelation

    def coord(self, k: int, m: int) -> int:
        return k * self.source.n + m

    def valuation(self, val: dict) -> dict:
        """Compose a poset valuation (atom -> element) with ``h``."""
        return {a: self.h[x] for a, x in val.items()}


def nu_table(P: ModalResiduatedPoset, k: int) -> tuple:
    """Surjection ``n x n -> {e^m_j | p_m <= p_k}`` with ``(m, m) -> e^k_m``.

    Off-diagonal cells are filled in row-major order with the codomain
    elements not hit by the diagonal (in coordinate order), cycling once
    those run out; if the diagonal already covers the codomain the cycle
    runs over the whole codomain.
    """
    n = P.n
    codomain = [(m, j) for m in range(n) if P.le(m, k) for j in range(n)]
    diag = {(k, m) for m in range(n)}
    rest = [c for c in codomain if c not in diag] or codomain
    table = [[None] * n for _ in range(n)]
    i = 0
    for m in range(n):
        for r in range(n):
            if m == r:
                table[m][r] = (k, m)
            else:
                table[m][r] = rest[i % len(rest)]
                i += 1
    return tuple(tuple(row) for row in table)


def embed(P: ModalResiduatedPoset, bound: int = DEFAULT_EMBED_BOUND, reading: str = COVERAGE) -> Embedding:
    if P.n > bound:
        raise EmbeddingError(f"poset size {P.n} exceeds embedding bound {bound}")
    rep = validate_poset(P)
    if not rep.ok:
        raise EmbeddingError(f"invalid poset: {rep.first}")
    n = P.n
    d = n * n
    nu = tuple(nu_table(P, k) for k in range(n))
    sc = np.zeros((d, d, d), dtype=np.int64)
    for k, m, ell, r in itertools.product(range(n), repeat=4):
        t = P.otimes[k][ell]
        row, col = nu[t][m][r]
        sc[k * n + m, ell * n + r, row * n + col] = 1
    names = [f"e{k}_{m}" for k in range(n) for m in range(n)]
    A = KAlgebra.from_array(F2, sc, names)
    h = tuple(
        Subspace.from_coords(
            F2, d, [tuple(int(c == m * n + j) for c in range(d)) for m in range(n) if P.le(m, k) for j in range(n)]
        )
        for k in range(n)
    )
    allowed = tuple(tuple(P.le(kk, P.dia[m]) for m in range(n)) for kk in range(n))
    R = ModalRelation.embedding(n, allowed, reading=reading)
    return Embedding(P, A, h, nu, R)


def nu_surjective(E: Embedding) -> bool:
    P = E.source
    for k in range(P.n):
        image = {c for row in E.nu[k] for c in row}
        codomain = {(m, j) for m in range(P.n) if P.le(m, k) for j in range(P.n)}
        if image != codomain:
            return False
    return True


CLAUSES = ("order", "tensor", "lres", "rres", "dia", "box")


@dataclass
class EmbeddingReport:
    results: dict  # clause -> (ok, witness or None); skipped clauses are absent

    @property
    def ok(self) -> bool:
        return all(ok for ok, _ in self.results.values())

    def items(self):
        return [(c, self.results[c]) for c in CLAUSES if c in self.results]


def verify_embedding(E: Embedding, modal_bound: int = DEFAULT_MODAL_CLAUSE_BOUND, clauses=CLAUSES) -> EmbeddingReport:
    """Check the six homomorphism/order clauses for all elements and pairs.

    Clause witnesses are the offending element indices.
    """
    P, A, h = E.source, E.algebra, E.h
    n = P.n
    res = {}
    pairs = list(itertools.product(range(n), repeat=2))

    def first(pred, items):
        return next((it for it in items if not pred(*it)), None)

    if "order" in clauses:
        w = first(lambda p, q: P.le(p, q) == (h[p] <= h[q]), pairs)
        res["order"] = (w is None, w)
    if "tensor" in clauses:
        w = first(lambda p, q: h[P.otimes[p][q]] == ca.tensor(A, h[p], h[q]), pairs)
        res["tensor"] = (w is None, w)
    if "lres" in clauses:
        w = first(lambda p, q: h[P.lres[p][q]] == ca.lres(A, h[p], h[q]), pairs)
        res["lres"] = (w is None, w)
    if "rres" in clauses:
        w = first(lambda p, q: h[P.rres[p][q]] == ca.rres(A, h[p], h[q]), pairs)
        res["rres"] = (w is None, w)
    if ("dia" in clauses or "box" in clauses) and n > modal_bound:
        raise EmbeddingError(f"modal clauses enumerate 2^{n * n} vectors; limited to n <= {modal_bound}")
    if "dia" in clauses:
        w = next((k for k in range(n) if h[P.dia[k]] != ca.dia(A, E.R, h[k])), None)
        res["dia"] = (w is None, None if w is None else (w,))
    if "box" in clauses:
        w = next((k for k in range(n) if h[P.box[k]] != ca.box(A, E.R, h[k])), None)
        res["box"] = (w is None, None if w is None else (w,))
    return EmbeddingReport(res)


# --------------------------------------------------------- countermodels


def eval_in_poset(P: ModalResiduatedPoset, val: dict, s) -> int:
    if isinstance(s, Atom):
        return val[s.name]
    if isinstance(s, Leaf):
        return eval_in_poset(P, val, s.formula)
    if isinstance(s, (Tensor, SFusion)):
        return P.otimes[eval_in_poset(P, val, s.left)][eval_in_poset(P, val, s.right)]
    if isinstance(s, (LRes, SLRes)):
        return P.lres[eval_in_poset(P, val, s.left)][eval_in_poset(P, val, s.right)]
    if isinstance(s, (RRes, SRRes)):
        return P.rres[eval_in_poset(P, val, s.left)][eval_in_poset(P, val, s.right)]
    if isinstance(s, (Dia, SDia)):
        return P.dia[eval_in_poset(P, val, s.body)]
    if isinstance(s, (Box, SBox)):
        return P.box[eval_in_poset(P, val, s.body)]
    raise TypeError(f"cannot evaluate {s!r}")


def holds_in_poset(P: ModalResiduatedPoset, val: dict, seq: Sequent) -> bool:
    return P.le(eval_in_poset(P, val, seq.lhs), eval_in_poset(P, val, seq.rhs))


def _orders(n: int) -> list:
    """Partial orders on ``range(n)`` up to isomorphism, as boolean tables."""
    cells = [(i, j) for i in range(n) for j in range(n) if i != j]
    seen = set()
    out = []
    for bits in itertools.product((False, True), repeat=len(cells)):
        leq = [[i == j for j in range(n)] for i in range(n)]
        for (i, j), b in zip(cells, bits):
            leq[i][j] = b
        if any(leq[i][j] and leq[j][i] for i, j in cells):
            continue
        if any(leq[i][j] and leq[j][k] and not leq[i][k] for i in range(n) for j in range(n) for k in range(n)):
            continue
        canon = min(
            tuple(leq[perm[i]][perm[j]] for i in range(n) for j in range(n)) for perm in itertools.permutations(range(n))
        )
        if canon in seen:
            continue
        seen.add(canon)
        out.append(tuple(tuple(canon[i * n + j] for j in range(n)) for i in range(n)))
    return out


def _residuated_fusions(leq) -> list:
    """All fusion tables on ``leq`` admitting both residuals, in table-index order."""
    n = len(leq)
    L = np.array(leq, dtype=bool)
    T = np.array(list(itertools.product(range(n), repeat=n * n)), dtype=np.int64).reshape(-1, n, n)
    # S[k, x, y, z] = T[k, x, y] <= z
    S = L[T]  # (K, x, y, z)
    # right residual in x for each (y, z): set over x must equal a principal down-set
    down = L  # down[x, m] = x <= m
    okx = np.zeros(T.shape[0], dtype=bool) | True
    oky = okx.copy()
    for y in range(n):
        for z in range(n):
            sx = S[:, :, y, z]  # (K, x)
            okx &= (sx[:, :, None] == down[None, :, :]).all(axis=1).any(axis=1)
    for x in range(n):
        for z in range(n):
            sy = S[:, x, :, z]  # (K, y)
            oky &= (sy[:, :, None] == down[None, :, :]).all(axis=1).any(axis=1)
    good = np.nonzero(okx & oky)[0]
    return [tuple(tuple(int(v) for v in row) for row in T[k]) for k in good]


@lru_cache(maxsize=None)
def modal_residuated_posets(n: int) -> tuple:
    """Every modal residuated poset of size ``n`` (orders up to isomorphism), deterministic order."""
    out = []
    for leq in _orders(n):
        fusions = _residuated_fusions(leq)
        for otimes in fusions:
            for dia in itertools.product(range(n), repeat=n):
                P = from_fusion(leq, otimes, dia)
                if P is not None:
                    out.append(P)
    return tuple(out)


def search_countermodel(seq: Sequent, max_size: int = DEFAULT_COUNTERMODEL_SIZE):
    """First ``(P, valuation)`` with ``P`` of size ``<= max_size`` refuting ``seq``, or None.

    Best effort: None says nothing about derivability.
    """
    if max_size > DEFAULT_COUNTERMODEL_SIZE:
        raise EmbeddingError(f"countermodel search is limited to size {DEFAULT_COUNTERMODEL_SIZE}")
    atoms = sorted(seq.atoms())
    for n in range(1, max_size + 1):
        for P in modal_residuated_posets(n):
            for vals in itertools.product(range(n), repeat=len(atoms)):
                val = dict(zip(atoms, vals))
                if not holds_in_poset(P, val, seq):
                    return P, val
    return None
