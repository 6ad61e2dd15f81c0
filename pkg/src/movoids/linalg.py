"""Small dense linear algebra over F_p and helpers for F_q vectors."""
from __future__ import annotations

import numpy as np


def rref_mod_p(m, p: int):
    """Reduced row echelon form over F_p; returns (matrix, pivot columns)."""
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + nz[0]
        a[[r, k]] = a[[k, r]]
        a[r] = a[r] * pow(int(a[r, c]), p - 2, p) % p
        others = np.nonzero(a[:, c])[0]
        for i in others:
            if i != r:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank_mod_p(m, p: int) -> int:
    return len(rref_mod_p(m, p)[1])


def nullspace_mod_p(m, p: int) -> np.ndarray:
    """Basis (rows) of {x : m x = 0} over F_p."""
    m = np.atleast_2d(np.array(m, dtype=np.int64))
    a, piv = rref_mod_p(m, p)
    n = m.shape[1]
    free = [c for c in range(n) if c not in piv]
    out = np.zeros((len(free), n), dtype=np.int64)
    for t, fc in enumerate(free):
        out[t, fc] = 1
        for i, pc in enumerate(piv):
            out[t, pc] = (-a[i, fc]) % p
    return out


def normalized_vectors(q: int, d: int) -> np.ndarray:
    """All vectors of F_q^d (local indices) whose first nonzero entry is 1,
    in lexicographic order."""
    blocks = []
    for lead in range(d - 1, -1, -1):
        tail = d - 1 - lead
        n = q ** tail
        blk = np.zeros((n, d), dtype=np.int64)
        blk[:, lead] = 1
        idx = np.arange(n, dtype=np.int64)
        for j in range(d - 1, lead, -1):
            blk[:, j] = idx % q
            idx //= q
        blocks.append(blk)
    return np.concatenate(blocks)


def vector_keys(vecs, q: int) -> np.ndarray:
    """Base-q integer keys; monotone in lexicographic order."""
    vecs = np.asarray(vecs, dtype=np.int64)
    key = np.zeros(vecs.shape[:-1], dtype=np.int64)
    for j in range(vecs.shape[-1]):
        key = key * q + vecs[..., j]
    return key


def normalize_rows(vecs, sub):
    """Scale each row so its first nonzero entry is 1 (local indices).

    Zero rows stay zero.
    """
    vecs = np.asarray(vecs, dtype=np.int64)
    nz = vecs != 0
    has = nz.any(axis=1)
    first = np.argmax(nz, axis=1)
    lead = vecs[np.arange(len(vecs)), first]
    scale = sub.inv_table[lead]
    out = sub.mul_table[scale[:, None], vecs]
    out[~has] = 0
    return out


def matvec_rows(vecs, mat, sub):
    """Row vectors times a matrix over F_q, all in local indices."""
    vecs = np.asarray(vecs, dtype=np.int64)
    mat = np.asarray(mat, dtype=np.int64)
    n, d = vecs.shape
    out = np.zeros((n, mat.shape[1]), dtype=np.int64)
    if sub.q == sub.p:
        return (vecs @ mat) % sub.p
    for j in range(mat.shape[1]):
        acc = np.zeros(n, dtype=np.int64)
        for i in range(d):
            if mat[i, j]:
                acc = sub.add_table[acc, sub.mul_table[vecs[:, i], mat[i, j]]]
        out[:, j] = acc
    return out
