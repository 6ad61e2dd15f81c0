"""Additive characters, Kloosterman sums and related exact character sums.

psi_F(x) = zeta_p^Tr(x), Tr the absolute trace of the subfield F.  Every sum
is accumulated as a histogram over exponents mod p and converted once.
"""
from __future__ import annotations

import math

import numpy as np

from .cyclo import CycloInt, counts_to_integers, embed_counts
from .errors import PreconditionError
from .gf import FieldTower

WEIL_SLACK = 1e-6


def _level(tower: FieldTower, level):
    level = tower.n if level is None else level
    if tower.n % level:
        raise PreconditionError(f"GF({tower.p}^{level}) is not a subfield of {tower}")
    return level


def _member(tower, x, level):
    tower.check(x)
    if not tower.in_subfield(x, level):
        raise PreconditionError(f"{x} is not in GF({tower.p}^{level})")


def psi(tower: FieldTower, x: int, level: int | None = None) -> CycloInt:
    level = _level(tower, level)
    _member(tower, x, level)
    return CycloInt.zeta_power(tower.p, tower.abs_trace(x, level))


def kloosterman(tower: FieldTower, a1: int, a2: int, level: int | None = None) -> CycloInt:
    """K(psi_F, a1, a2) = sum over x in F^* of psi_F(a1 x + a2 / x)."""
    level = _level(tower, level)
    _member(tower, a1, level)
    _member(tower, a2, level)
    p = tower.p
    counts = [0] * p
    for x in tower.subfield_elements(level)[1:]:
        y = tower.add(tower.mul(a1, x), tower.mul(a2, tower.inv(x)))
        counts[tower.abs_trace(y, level)] += 1
    return CycloInt.from_counts(p, counts)


def weil_bound_holds(value: CycloInt, q: int) -> bool:
    return value.approx_abs() <= 2 * math.sqrt(q) + WEIL_SLACK


def trace_product_matrix(tower: FieldTower, level: int | None = None):
    """(elements, M) with M[i, j] = Tr_F(e_i e_j) over the subfield F."""
    sub = tower.subfield(_level(tower, level))
    return sub.elements, sub.trace_products.astype(np.int64)


def kloosterman_counts(tower: FieldTower, level: int | None = None, rows=None, cols=None) -> np.ndarray:
    """Exponent histograms of K(a1, a2) for a1 in rows, a2 in cols.

    rows and cols are local indices of the subfield (default: all); the
    result has shape (len(rows), len(cols), p).
    """
    level = _level(tower, level)
    p = tower.p
    sub = tower.subfield(level)
    e, tr = trace_product_matrix(tower, level)
    rows = np.arange(sub.q) if rows is None else np.asarray(rows)
    cols = np.arange(sub.q) if cols is None else np.asarray(cols)
    inv_idx = sub.vlocal(tower.vinv(e[1:]))
    a = tr[rows][:, 1:]
    b = tr[cols][:, inv_idx]
    nx = sub.q - 1
    if p == 2:
        sa = 1 - 2 * a.astype(np.float64)
        sb = 1 - 2 * b.astype(np.float64)
        val = np.rint(sa @ sb.T).astype(np.int64)
        out = np.empty((len(rows), len(cols), 2), dtype=np.int64)
        out[..., 0] = (nx + val) // 2
        out[..., 1] = (nx - val) // 2
        return out
    out = np.empty((len(rows), len(cols), p), dtype=np.int64)
    offs = (np.arange(len(cols)) * p)[:, None]
    for i in range(len(rows)):
        r = (a[i][None, :] + b) % p + offs
        out[i] = np.bincount(r.ravel(), minlength=len(cols) * p).reshape(len(cols), p)
    return out


def hermitian_gauss_residual(tower: FieldTower, lam: int, a: int, level: int | None = None) -> CycloInt:
    """Residual of the quadratic-extension Gauss identity.

    With E = GF(p^level), F its subfield of half degree and Q = |F|:
        sum_{x in E} psi_F(lam x^(Q+1)) psi_E(a^Q x) + Q psi_F(-a^(1+Q) / lam)
    which vanishes for lam in F^* and a in E.
    """
    level = _level(tower, level)
    if level % 2:
        raise PreconditionError("the extension degree must be even")
    half = level // 2
    _member(tower, lam, half)
    _member(tower, a, level)
    if lam == 0:
        raise PreconditionError("lambda must be nonzero")
    p = tower.p
    big_q = p ** half
    aq = tower.pow(a, big_q)
    counts = [0] * p
    for x in tower.subfield_elements(level):
        t1 = tower.abs_trace(tower.mul(lam, tower.pow(x, big_q + 1)), half)
        t2 = tower.abs_trace(tower.mul(aq, x), level)
        counts[(t1 + t2) % p] += 1
    arg = tower.neg(tower.div(tower.pow(a, 1 + big_q), lam))
    counts[tower.abs_trace(arg, half)] += big_q
    return CycloInt.from_counts(p, counts)


def hermitian_gauss_residual_all(tower: FieldTower, level: int | None = None) -> np.ndarray:
    """Residual histograms for every lam in F^* and a in E; shape (|F|-1, |E|, p).

    A residual vanishes exactly when its histogram is constant.
    """
    level = _level(tower, level)
    if level % 2:
        raise PreconditionError("the extension degree must be even")
    half = level // 2
    p = tower.p
    big_q = p ** half
    E = tower.subfield(level)
    F = tower.subfield(half)
    x = E.elements
    lam_idx = np.arange(1, F.q)
    norm_idx = F.vlocal(tower.vpow(x, big_q + 1))
    t1 = F.trace_products[lam_idx][:, norm_idx].astype(np.int64)
    aq_idx = E.vlocal(tower.vpow(x, big_q))
    t2 = E.trace_products[aq_idx].astype(np.int64)
    lam = F.elements[1:]
    n_l, n_a = len(lam), len(x)
    out = np.empty((n_l, n_a, p), dtype=np.int64)
    if p == 2:
        s1 = 1 - 2 * t1.astype(np.float64)
        s2 = 1 - 2 * t2.astype(np.float64)
        val = np.rint(s1 @ s2.T).astype(np.int64)
        out[..., 0] = (n_a + val) // 2
        out[..., 1] = (n_a - val) // 2
    else:
        offs = (np.arange(n_a) * p)[:, None]
        for i in range(n_l):
            r = (t1[i][None, :] + t2) % p + offs
            out[i] = np.bincount(r.ravel(), minlength=n_a * p).reshape(n_a, p)
    norm_a = tower.vpow(x, 1 + big_q)
    arg = tower.vneg(tower.vmul(norm_a[None, :], tower.vinv(lam)[:, None]))
    tr = tower.vtrace(arg, 1, half)
    li, ai = np.indices(tr.shape)
    np.add.at(out, (li, ai, tr), big_q)
    return out


def char_sum_over_vectors(space, pointset, a) -> CycloInt:
    """psi_a(D) = sum over x in D of psi(f(a, x)), D = F_q^* . M.

    `a` is a vector (local indices over the base field of the space).
    """
    from .polar import trace_pairing_histograms
    vec = np.asarray(a, dtype=np.int64)[None, :]
    hist = trace_pairing_histograms(space, vec, pointset.indices)
    return CycloInt.from_counts(space.p, hist[0])


def char_sums_for_points(space, pointset, rows=None) -> np.ndarray:
    """Exponent histograms of psi_a(D) for each point a of the space (or rows)."""
    from .polar import trace_pairing_histograms
    rows = np.arange(space.num_points) if rows is None else np.asarray(rows)
    return trace_pairing_histograms(space, space.vectors[rows], pointset.indices)


__all__ = [
    "psi", "kloosterman", "weil_bound_holds", "kloosterman_counts",
    "hermitian_gauss_residual", "hermitian_gauss_residual_all",
    "char_sum_over_vectors", "char_sums_for_points", "embed_counts",
    "counts_to_integers",
]
