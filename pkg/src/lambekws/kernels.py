"""Hot inner loops over prime fields.

Every kernel exists twice: a loop version written for ``numba.njit`` (suffix
``_loops``) and a vectorised numpy version (suffix ``_numpy``).  The public
name dispatches to the loop version when numba is active and to the numpy
version otherwise, so ``LAMBEKWS_NO_JIT=1`` never falls back to interpreted
scalar loops.  ``benchmarks/bench_kernels.py`` times both paths.

Vectors of F_p^d are int64 rows with entries in ``range(p)``; a vector is
identified with its base-p index (most significant coordinate first), which
makes index order coincide with lexicographic order.
"""

import numpy as np

from ._accel import HAS_NUMBA, jit

# ---------------------------------------------------------------- rref


@jit
def rref_modp_loops(M, p, inv):
    R = M.copy() % p
    m, n = R.shape
    row = 0
    for col in range(n):
        if row >= m:
            break
        piv = -1
        for r in range(row, m):
            if R[r, col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != row:
            for c in range(n):
                tmp = R[row, c]
                R[row, c] = R[piv, c]
                R[piv, c] = tmp
        s = inv[R[row, col]]
        for c in range(n):
            R[row, c] = (R[row, c] * s) % p
        for r in range(m):
            if r != row and R[r, col] != 0:
                f = R[r, col]
                for c in range(n):
                    R[r, c] = (R[r, c] - f * R[row, c]) % p
        row += 1
    return R, row


def rref_modp_numpy(M, p, inv):
    R = np.array(M, dtype=np.int64) % p
    m, n = R.shape
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        R[row] = (R[row] * inv[R[row, col]]) % p
        f = R[:, col].copy()
        f[row] = 0
        R -= np.outer(f, R[row])
        R %= p
        row += 1
    return R, row


def rref_modp(M, p, inv):
    M = np.ascontiguousarray(M, dtype=np.int64)
    if M.size == 0:
        return M.copy(), 0
    if HAS_NUMBA:
        return rref_modp_loops(M, p, inv)
    return rref_modp_numpy(M, p, inv)


# ------------------------------------------------------ enumeration helpers


def all_vectors(p, d):
    """All p**d vectors of F_p^d, row i being the vector with index i."""
    n = p**d
    idx = np.arange(n, dtype=np.int64)
    out = np.empty((n, d), dtype=np.int64)
    for k in range(d - 1, -1, -1):
        out[:, k] = idx % p
        idx //= p
    return out


def encode(X, p):
    X = np.asarray(X, dtype=np.int64)
    d = X.shape[-1]
    weights = p ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return X @ weights


# ------------------------------------------------------- products


@jit
def product_table_loops(A, B, sc, p):
    na, d = A.shape
    nb = B.shape[0]
    out = np.zeros((na, nb, d), dtype=np.int64)
    for a in range(na):
        for b in range(nb):
            for i in range(d):
                ai = A[a, i]
                if ai == 0:
                    continue
                for j in range(d):
                    c = ai * B[b, j]
                    if c == 0:
                        continue
                    for k in range(d):
                        out[a, b, k] += c * sc[i, j, k]
            for k in range(d):
                out[a, b, k] %= p
    return out


def product_table_numpy(A, B, sc, p):
    # (a,i),(b,j),(i,j,k) -> (a,b,k); reduce once per stage to keep int64 small
    tmp = np.einsum("ai,ijk->ajk", A, sc) % p
    return np.einsum("ajk,bj->abk", tmp, B) % p


def product_table(A, B, sc, p):
    """``out[a, b] = A[a] * B[b]`` under structure constants ``sc`` mod p."""
    A = np.ascontiguousarray(A, dtype=np.int64)
    B = np.ascontiguousarray(B, dtype=np.int64)
    sc = np.ascontiguousarray(sc, dtype=np.int64)
    if HAS_NUMBA:
        return product_table_loops(A, B, sc, p)
    return product_table_numpy(A, B, sc, p)


@jit
def pairwise_products_loops(A, B, sc, p):
    n, d = A.shape
    out = np.zeros((n, d), dtype=np.int64)
    for a in range(n):
        for i in range(d):
            ai = A[a, i]
            if ai == 0:
                continue
            for j in range(d):
                c = ai * B[a, j]
                if c == 0:
                    continue
                for k in range(d):
                    out[a, k] += c * sc[i, j, k]
        for k in range(d):
            out[a, k] %= p
    return out


def pairwise_products_numpy(A, B, sc, p):
    return np.einsum("ni,nj,ijk->nk", A, B, sc) % p


def pairwise_products(A, B, sc, p):
    """Row-wise products ``A[n] * B[n]``."""
    A = np.ascontiguousarray(A, dtype=np.int64)
    B = np.ascontiguousarray(B, dtype=np.int64)
    sc = np.ascontiguousarray(sc, dtype=np.int64)
    if HAS_NUMBA:
        return pairwise_products_loops(A, B, sc, p)
    return pairwise_products_numpy(A, B, sc, p)


# ---------------------------------------------------- dependence tests


@jit
def multiple_of_loops(X, Y, p):
    n, d = X.shape
    out = np.zeros(n, dtype=np.bool_)
    for r in range(n):
        for a in range(p):
            ok = True
            for k in range(d):
                if (X[r, k] - a * Y[r, k]) % p != 0:
                    ok = False
                    break
            if ok:
                out[r] = True
                break
    return out


def multiple_of_numpy(X, Y, p):
    alphas = np.arange(p, dtype=np.int64)[:, None, None]
    diff = (X[None, :, :] - alphas * Y[None, :, :]) % p
    return np.any(np.all(diff == 0, axis=2), axis=0)


def multiple_of(X, Y, p):
    """Row-wise test ``exists a in F_p: X[r] = a * Y[r]``."""
    X = np.ascontiguousarray(X, dtype=np.int64)
    Y = np.ascontiguousarray(Y, dtype=np.int64)
    if HAS_NUMBA:
        return multiple_of_loops(X, Y, p)
    return multiple_of_numpy(X, Y, p)


@jit
def in_span2_loops(X, U, V, p):
    n, d = X.shape
    out = np.zeros(n, dtype=np.bool_)
    for r in range(n):
        found = False
        for a in range(p):
            for b in range(p):
                ok = True
                for k in range(d):
                    if (X[r, k] - a * U[r, k] - b * V[r, k]) % p != 0:
                        ok = False
                        break
                if ok:
                    found = True
                    break
            if found:
                break
        out[r] = found
    return out


def in_span2_numpy(X, U, V, p):
    a = np.arange(p, dtype=np.int64)
    A = a[:, None, None, None]
    B = a[None, :, None, None]
    diff = (X[None, None] - A * U[None, None] - B * V[None, None]) % p
    return np.any(np.all(diff == 0, axis=3), axis=(0, 1))


def in_span2(X, U, V, p):
    """Row-wise test ``exists a, b: X[r] = a U[r] + b V[r]``."""
    X = np.ascontiguousarray(X, dtype=np.int64)
    U = np.ascontiguousarray(U, dtype=np.int64)
    V = np.ascontiguousarray(V, dtype=np.int64)
    if HAS_NUMBA:
        return in_span2_loops(X, U, V, p)
    return in_span2_numpy(X, U, V, p)


# ------------------------------------------- embedding relation (F_2)


@jit
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@jit
def embedding_relation_loops(n, allowed_mask):
    """Relation matrix of the poset embedding over F_2^(n*n).

    Basis vector ``e^k_l`` is coordinate ``c = k*n + l``, stored in bit
    ``d-1-c`` of the vector index.
    ``allowed_mask[m]`` is the bitmask of coordinates ``e^k_l`` with
    ``p_k <= dia(p_m)``.  ``rel[v, u]`` holds iff ``u = v = 0`` or every
    support element of ``v`` can be assigned to a support element of ``u``
    it is allowed for, each element of ``u`` receiving at least one.
    """
    d = n * n
    N = 1 << d
    rel = np.zeros((N, N), dtype=np.bool_)
    rel[0, 0] = True
    nsub = 1 << n
    for u in range(1, N):
        # row masks of u's support, and per row-subset requirements
        cover = 0
        counts = np.zeros(n, dtype=np.int64)
        for c in range(d):
            if (u >> (d - 1 - c)) & 1:
                m = c // n
                counts[m] += 1
                cover |= allowed_mask[m]
        need = np.zeros(nsub, dtype=np.int64)
        nbr = np.zeros(nsub, dtype=np.int64)
        active = np.zeros(nsub, dtype=np.bool_)
        for s in range(1, nsub):
            tot = 0
            msk = 0
            ok = True
            for m in range(n):
                if (s >> m) & 1:
                    if counts[m] == 0:
                        ok = False
                        break
                    tot += counts[m]
                    msk |= allowed_mask[m]
            if ok:
                active[s] = True
                need[s] = tot
                nbr[s] = msk
        for v in range(1, N):
            if v & ~cover:
                continue
            good = True
            for s in range(1, nsub):
                if active[s] and _popcount(v & nbr[s]) < need[s]:
                    good = False
                    break
            if good:
                rel[v, u] = True
    return rel


def embedding_relation_numpy(n, allowed_mask):
    d = n * n
    N = 1 << d
    rel = np.zeros((N, N), dtype=bool)
    rel[0, 0] = True
    vs = np.arange(N, dtype=np.int64)
    pop = np.array([bin(x).count("1") for x in range(N)], dtype=np.int64)
    for u in range(1, N):
        counts = [0] * n
        cover = 0
        for c in range(d):
            if (u >> (d - 1 - c)) & 1:
                counts[c // n] += 1
                cover |= int(allowed_mask[c // n])
        ok = ((vs & ~cover) == 0) & (vs != 0)
        rows = [m for m in range(n) if counts[m]]
        for s in range(1, 1 << len(rows)):
            tot = 0
            msk = 0
            for t, m in enumerate(rows):
                if (s >> t) & 1:
                    tot += counts[m]
                    msk |= int(allowed_mask[m])
            ok &= pop[vs & msk] >= tot
        rel[:, u] = ok
    return rel


@jit
def coverage_relation_loops(n, allowed_mask):
    """Like :func:`embedding_relation_loops` but groups may be empty.

    ``rel[v, u]`` holds iff ``u = v = 0``, or ``u != 0`` and every support
    element of ``v`` is allowed for some support row of ``u``.
    """
    d = n * n
    N = 1 << d
    rel = np.zeros((N, N), dtype=np.bool_)
    rel[0, 0] = True
    for u in range(1, N):
        cover = 0
        for c in range(d):
            if (u >> (d - 1 - c)) & 1:
                cover |= allowed_mask[c // n]
        for v in range(N):
            if (v & ~cover) == 0:
                rel[v, u] = True
    return rel


def coverage_relation_numpy(n, allowed_mask):
    d = n * n
    N = 1 << d
    vs = np.arange(N, dtype=np.int64)
    bits = (vs[:, None] >> (d - 1 - np.arange(d, dtype=np.int64))[None, :]) & 1  # (N, d)
    rows = np.zeros((N, n), dtype=bool)
    for m in range(n):
        rows[:, m] = bits[:, m * n : (m + 1) * n].any(axis=1)
    cover = np.zeros(N, dtype=np.int64)
    for m in range(n):
        cover |= np.where(rows[:, m], int(allowed_mask[m]), 0)
    rel = (vs[:, None] & ~cover[None, :]) == 0
    rel[:, 0] = False
    rel[0, 0] = True
    return rel


def embedding_relation(n, allowed_mask, nonempty=False):
    """Relation matrix of the poset embedding; ``nonempty`` selects the partition reading."""
    allowed_mask = np.ascontiguousarray(allowed_mask, dtype=np.int64)
    if nonempty:
        if HAS_NUMBA:
            return embedding_relation_loops(n, allowed_mask)
        return embedding_relation_numpy(n, allowed_mask)
    if HAS_NUMBA:
        return coverage_relation_loops(n, allowed_mask)
    return coverage_relation_numpy(n, allowed_mask)


# ------------------------------------------- relation clause checks


@jit
def l1r_violation_loops(rel, add, scale, p):
    N = rel.shape[0]
    src = np.nonzero(rel)
    vs = src[0]
    us = src[1]
    K = vs.shape[0]
    for e1 in range(K):
        v = vs[e1]
        u = us[e1]
        for e2 in range(K):
            z = vs[e2]
            w = us[e2]
            for g in range(p):
                for dl in range(p):
                    left = add[scale[g, v], scale[dl, z]]
                    found = False
                    for a in range(p):
                        for b in range(p):
                            if rel[left, add[scale[a, u], scale[b, w]]]:
                                found = True
                                break
                        if found:
                            break
                    if not found:
                        return np.array([v, u, z, w, g, dl], dtype=np.int64)
    return np.zeros(0, dtype=np.int64)


def l1r_violation_numpy(rel, add, scale, p):
    vs, us = np.nonzero(rel)
    K = vs.size
    best = None
    for g in range(p):
        for dl in range(p):
            left = add[scale[g, vs][:, None], scale[dl, vs][None, :]]
            found = np.zeros((K, K), dtype=bool)
            for a in range(p):
                for b in range(p):
                    tgt = add[scale[a, us][:, None], scale[b, us][None, :]]
                    found |= rel[left, tgt]
            bad = np.argwhere(~found)
            if bad.size:
                key = (bad[0][0], bad[0][1], g, dl)
                if best is None or key < best:
                    best = key
    if best is None:
        return np.zeros(0, dtype=np.int64)
    e1, e2, g, dl = best
    return np.array([vs[e1], us[e1], vs[e2], us[e2], g, dl], dtype=np.int64)


def l1r_violation(rel, add, scale, p):
    """First ``(v, u, z, w, gamma, delta)`` breaking closure under combination."""
    if HAS_NUMBA:
        return l1r_violation_loops(rel, add, scale, p)
    return l1r_violation_numpy(rel, add, scale, p)


@jit
def l2r_violation_loops(rel, add, scale, p):
    N = rel.shape[0]
    # reach[u, v, t]: t = l z + m w for some z R u, w R v
    reach = np.zeros((N, N, N), dtype=np.bool_)
    for z in range(N):
        for u in range(N):
            if not rel[z, u]:
                continue
            for w in range(N):
                for v in range(N):
                    if not rel[w, v]:
                        continue
                    for lam in range(p):
                        for mu in range(p):
                            reach[u, v, add[scale[lam, z], scale[mu, w]]] = True
    for t in range(N):
        for u in range(N):
            for v in range(N):
                for a in range(p):
                    for b in range(p):
                        if rel[t, add[scale[a, u], scale[b, v]]] and not reach[u, v, t]:
                            return np.array([t, u, v, a, b], dtype=np.int64)
    return np.zeros(0, dtype=np.int64)


def l2r_violation_numpy(rel, add, scale, p):
    N = rel.shape[0]
    R = rel.astype(np.int64)
    reach = np.zeros((N, N, N), dtype=bool)
    for lam in range(p):
        for mu in range(p):
            T = add[scale[lam][:, None], scale[mu][None, :]]  # (z, w) -> t
            onehot = np.zeros((N, N, N), dtype=np.int64)
            zi, wi = np.indices((N, N))
            onehot[zi, wi, T] = 1
            reach |= np.einsum("zu,wv,zwt->uvt", R, R, onehot) > 0
    best = None
    for a in range(p):
        for b in range(p):
            tgt = add[scale[a][:, None], scale[b][None, :]]  # (u, v)
            ante = rel[:, tgt]  # (t, u, v)
            bad = ante & ~np.transpose(reach, (2, 0, 1))
            hits = np.argwhere(bad)
            if hits.size:
                t, u, v = hits[0]
                key = (t, u, v, a, b)
                if best is None or key < best:
                    best = key
    if best is None:
        return np.zeros(0, dtype=np.int64)
    return np.array(best, dtype=np.int64)


def l2r_violation(rel, add, scale, p):
    """First ``(t, u, v, alpha, beta)`` breaking decomposition of predecessors."""
    if HAS_NUMBA:
        return l2r_violation_loops(rel, add, scale, p)
    return l2r_violation_numpy(rel, add, scale, p)


def add_scale_tables(p, d):
    """Index tables: ``add[i, j]`` and ``scale[a, i]`` over F_p^d."""
    V = all_vectors(p, d)
    N = V.shape[0]
    add = encode((V[:, None, :] + V[None, :, :]) % p, p)
    scale = np.empty((p, N), dtype=np.int64)
    for a in range(p):
        scale[a] = encode((a * V) % p, p)
    return add, scale
