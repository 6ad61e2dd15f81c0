"""Finite classical polar spaces: parameters, points, generators, point sets."""
from __future__ import annotations

import json
import math
from functools import cached_property
import numpy as np

from .errors import PreconditionError, ResourceCapError
from .forms import FormSpec
from .linalg import normalize_rows, normalized_vectors, vector_keys

POINT_CAP = 1_000_000
GENERATOR_POINT_CAP = 100_000
GENERATOR_RANK_CAP = 4
DENSE_ORTH_CAP = 6000
RAW_TABLE_CAP = 1 << 24
ORDER_TAG = "lex-normalized-v1"


def _half_power(q: int, k: int) -> int:
    """q^(k/2) for integer k, exact (q must be a square when k is odd)."""
    if k % 2 == 0:
        return q ** (k // 2)
    s = math.isqrt(q)
    if s * s != q:
        raise PreconditionError(f"q^({k}/2) is irrational for q = {q}")
    return s ** k


def space_kind(form: FormSpec) -> str:
    if form.kind == "symplectic":
        return "W"
    if form.kind == "hermitian":
        return "H"
    return {"plus": "Q+", "minus": "Q-", "parabolic": "Q"}[form.quad_type]


def parameters(kind: str, d: int, q: int) -> dict:
    """Rank r, ovoid number theta_r, and the least e with theta_r | q^e - 1."""
    if kind == "W":
        if d % 2:
            raise PreconditionError("W needs even d")
        r, theta = d // 2, q ** (d // 2) + 1
    elif kind == "Q+":
        if d % 2:
            raise PreconditionError("Q+ needs even d")
        r, theta = d // 2, q ** (d // 2 - 1) + 1
    elif kind == "Q-":
        if d % 2:
            raise PreconditionError("Q- needs even d")
        r, theta = d // 2 - 1, q ** (d // 2) + 1
    elif kind == "Q":
        if d % 2 == 0:
            raise PreconditionError("Q needs odd d")
        r, theta = (d - 1) // 2, q ** ((d - 1) // 2) + 1
    elif kind == "H":
        if math.isqrt(q) ** 2 != q:
            raise PreconditionError("hermitian spaces need square q")
        if d % 2:
            r, theta = (d - 1) // 2, _half_power(q, d) + 1
        else:
            r, theta = d // 2, _half_power(q, d - 1) + 1
    else:
        raise PreconditionError(f"unknown space kind {kind}")
    e = None
    if math.gcd(theta, q) == 1:
        e = 1
        while (q ** e - 1) % theta:
            e += 1
    num_points = theta * (q ** r - 1) // (q - 1)
    theta_prev = (theta - 1) // q + 1
    return {"kind": kind, "d": d, "q": q, "r": r, "theta": theta, "e": e,
            "num_points": num_points, "theta_prev": theta_prev}


_SPACE_CACHE: dict = {}


class PolarSpace:
    """Points of the polar space of a form, in canonical lexicographic order."""

    def __init__(self, form: FormSpec, cap: int = POINT_CAP):
        self.form = form
        self.kind = space_kind(form)
        self.d = form.dim
        self.q = form.q
        self.p = form.p
        self.f = form.level
        self.sub = form.field
        self.params = parameters(self.kind, self.d, self.q)
        n_all = (self.q ** self.d - 1) // (self.q - 1)
        if n_all > cap:
            raise ResourceCapError(f"{n_all} projective points exceed the cap {cap}")
        cand = normalized_vectors(self.q, self.d)
        if self.kind == "W":
            keep = np.ones(len(cand), dtype=bool)
        else:
            keep = self.form.evaluate_many(self.sub.elements[cand]) == 0
        self.vectors = cand[keep]
        self.keys = vector_keys(self.vectors, self.q)
        self.num_points = len(self.vectors)
        if self.num_points != self.params["num_points"]:
            raise PreconditionError(
                f"{form.label()} has {self.num_points} points, expected {self.params['num_points']}")
        self._orth_rows: dict[int, np.ndarray] = {}
        self._generators = None

    @classmethod
    def of(cls, form: FormSpec, cap: int = POINT_CAP) -> "PolarSpace":
        n_all = (form.q ** form.dim - 1) // (form.q - 1)
        if n_all > cap:
            raise ResourceCapError(f"{n_all} projective points exceed the cap {cap}")
        key = json.dumps(form.to_json(), sort_keys=True)
        if key not in _SPACE_CACHE:
            _SPACE_CACHE[key] = cls(form, cap)
        return _SPACE_CACHE[key]

    def __repr__(self):
        return f"<PolarSpace {self.form.label()} {self.num_points} points>"

    @property
    def rank(self) -> int:
        return self.params["r"]

    @property
    def theta(self) -> int:
        return self.params["theta"]

    @property
    def label(self) -> str:
        return self.form.label()

    # -- coordinates ---------------------------------------------------

    @cached_property
    def vectors_enc(self) -> np.ndarray:
        return self.sub.elements[self.vectors]

    @cached_property
    def vectors_fp(self) -> np.ndarray:
        c = self.sub.coords_table[self.vectors]
        return c.reshape(self.num_points, self.d * self.f)

    def lookup(self, vecs) -> np.ndarray:
        """Point indices of (unnormalised) local vectors; -1 where not a point."""
        vecs = normalize_rows(np.atleast_2d(vecs), self.sub)
        keys = vector_keys(vecs, self.q)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, self.num_points - 1)
        ok = (self.keys[pos] == keys) & (vecs != 0).any(axis=1)
        return np.where(ok, pos, -1)

    def index_of(self, vec) -> int:
        i = int(self.lookup(np.asarray(vec, dtype=np.int64)[None, :])[0])
        if i < 0:
            raise PreconditionError(f"{list(vec)} is not a point of {self.label}")
        return i

    def from_encodings(self, vecs) -> np.ndarray:
        """Point indices of vectors given by tower encodings."""
        vecs = self.sub.vlocal(np.atleast_2d(np.asarray(vecs, dtype=np.int64)))
        return self.lookup(vecs)

    # -- orthogonality -------------------------------------------------

    @cached_property
    def _gram_float(self):
        g = self.form.gram_fp.astype(np.float64)
        x = self.vectors_fp.astype(np.float64)
        return [gk @ x.T for gk in g]

    def pairing_traces(self, a_fp, cols=None):
        """Tr(c_k f(a, x)) mod p for rows a (F_p coords) and points x; list over k."""
        a = np.asarray(a_fp, dtype=np.float64)
        out = []
        for gx in self._gram_float:
            m = gx if cols is None else gx[:, cols]
            out.append(np.rint(a @ m).astype(np.int64) % self.p)
        return out

    def orth_block(self, rows, cols=None) -> np.ndarray:
        """Boolean matrix: point rows[i] is orthogonal to point cols[j]."""
        rows = np.asarray(rows)
        traces = self.pairing_traces(self.vectors_fp[rows], cols)
        z = traces[0] == 0
        for t in traces[1:]:
            z &= t == 0
        return z

    def orth_row(self, i: int) -> np.ndarray:
        row = self._orth_rows.get(i)
        if row is None:
            row = self.orth_block([i])[0]
            self._orth_rows[i] = row
        return row

    @cached_property
    def orth_matrix(self) -> np.ndarray:
        if self.num_points > DENSE_ORTH_CAP:
            raise ResourceCapError("dense orthogonality matrix too large")
        return self.orth_block(np.arange(self.num_points))

    def perp_counts(self, indices, chunk: int = 2048) -> np.ndarray:
        """|P^perp cap M| for every point P."""
        indices = np.asarray(indices, dtype=np.int64)
        out = np.zeros(self.num_points, dtype=np.int64)
        if len(indices) == 0:
            return out
        for s in range(0, self.num_points, chunk):
            rows = np.arange(s, min(s + chunk, self.num_points))
            out[rows] = self.orth_block(rows, indices).sum(axis=1)
        return out

    # -- generators ----------------------------------------------------

    @cached_property
    def _qpow(self) -> np.ndarray:
        return self.q ** np.arange(self.d - 1, -1, -1, dtype=np.int64)

    @cached_property
    def _raw_table(self) -> np.ndarray:
        """Point index of every nonzero vector (by raw key), -1 off the space."""
        size = self.q ** self.d
        if size > RAW_TABLE_CAP:
            raise ResourceCapError("vector table too large")
        t = np.full(size, -1, dtype=np.int32)
        idx = np.arange(self.num_points)
        for lam in range(1, self.q):
            scaled = self.sub.mul_table[lam, self.vectors]
            t[scaled @ self._qpow] = idx
        return t

    def lookup_raw(self, vecs) -> np.ndarray:
        return self._raw_table[np.asarray(vecs) @ self._qpow]

    def enumerate_generators(self, cap: int = GENERATOR_POINT_CAP):
        """Maximal totally isotropic subspaces, as sorted tuples of point indices."""
        if self._generators is not None:
            return self._generators
        if self.rank > GENERATOR_RANK_CAP or self.num_points > cap:
            raise ResourceCapError(f"generator enumeration is limited to rank <= {GENERATOR_RANK_CAP}"
                                   f" and at most {cap} points")
        dense = self.num_points <= DENSE_ORTH_CAP
        orth = self.orth_matrix if dense else None
        use_raw = self.q ** self.d <= RAW_TABLE_CAP
        add, mul = self.sub.add_table, self.sub.mul_table
        zero = np.zeros((1, self.d), dtype=np.int64)
        # each subspace keeps the array of all its vectors
        level = {(i,): np.concatenate([zero, mul[1:][:, self.vectors[i]]])
                 for i in range(self.num_points)}
        for _ in range(self.rank - 1):
            nxt = {}
            for pts, vecs in level.items():
                rows = np.array(pts)
                if dense:
                    mask = orth[rows].all(axis=0)
                else:
                    mask = np.logical_and.reduce([self.orth_row(i) for i in pts])
                mask[rows] = False
                remaining = set(np.nonzero(mask)[0].tolist())
                while remaining:
                    c = min(remaining)
                    shifted = add[vecs, self.vectors[c][None, :]]
                    new = self.lookup_raw(shifted) if use_raw else self.lookup(shifted)
                    if (new < 0).any():
                        raise AssertionError("span left the polar space")
                    new_l = new.tolist()
                    remaining.difference_update(new_l)
                    key = tuple(sorted(set(pts).union(new_l)))
                    if key not in nxt:
                        parts = [vecs] + [add[vecs, mul[lam, self.vectors[c]][None, :]]
                                          for lam in range(1, self.q)]
                        nxt[key] = np.concatenate(parts)
            level = nxt
        self._generators = sorted(level)
        return self._generators

    @cached_property
    def generator_matrix(self) -> np.ndarray:
        return np.array(self.enumerate_generators(), dtype=np.int64)


def expected_generator_count(kind: str, d: int, q: int) -> int:
    """Number of generators of a classical polar space."""
    r = parameters(kind, d, q)["r"]
    if kind == "W":
        return math.prod(q ** i + 1 for i in range(1, r + 1))
    if kind == "Q":
        return math.prod(q ** i + 1 for i in range(1, r + 1))
    if kind == "Q+":
        return 2 * math.prod(q ** i + 1 for i in range(1, r))
    if kind == "Q-":
        return math.prod(q ** i + 1 for i in range(2, r + 2))
    if kind == "H":
        if d % 2:
            return math.prod(_half_power(q, 2 * i + 1) + 1 for i in range(1, r + 1))
        return math.prod(_half_power(q, 2 * i - 1) + 1 for i in range(1, r + 1))
    raise PreconditionError(kind)


def enumerate_points(form: FormSpec, cap: int = POINT_CAP) -> PolarSpace:
    return PolarSpace.of(form, cap)


def trace_pairing_histograms(space: PolarSpace, a_vecs, m_indices) -> np.ndarray:
    """For each row a: histogram over x in F_q^* . M of Tr(f(a, x)) mod p."""
    p, q = space.p, space.q
    sub = space.sub
    a_fp = sub.coords_table[np.asarray(a_vecs, dtype=np.int64)].reshape(len(a_vecs), -1)
    m_indices = np.asarray(m_indices, dtype=np.int64)
    out = np.zeros((len(a_fp), p), dtype=np.int64)
    if len(m_indices) == 0:
        return out
    traces = space.pairing_traces(a_fp, m_indices)
    lam_coords = sub.coords_table[1:]
    for lc in lam_coords:
        r = np.zeros_like(traces[0])
        for k, c in enumerate(lc):
            if c:
                r = r + int(c) * traces[k]
        r %= p
        for c in range(p):
            out[:, c] += (r == c).sum(axis=1)
    return out


class PointSet:
    """A subset of the points of a polar space."""

    def __init__(self, space: PolarSpace, mask):
        self.space = space
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (space.num_points,):
            raise PreconditionError("mask length differs from the point count")
        self.mask = mask

    @classmethod
    def from_indices(cls, space: PolarSpace, indices) -> "PointSet":
        mask = np.zeros(space.num_points, dtype=bool)
        idx = np.asarray(list(indices), dtype=np.int64)
        if len(idx) and (idx.min() < 0 or idx.max() >= space.num_points):
            raise PreconditionError("point index out of range")
        mask[idx] = True
        return cls(space, mask)

    @classmethod
    def from_vectors(cls, space: PolarSpace, vectors) -> "PointSet":
        """Vectors in tower encodings; each must span a point of the space."""
        vectors = np.asarray(vectors, dtype=np.int64)
        if vectors.size == 0:
            return cls(space, np.zeros(space.num_points, dtype=bool))
        vectors = np.atleast_2d(vectors)
        idx = space.from_encodings(vectors)
        bad = np.nonzero(idx < 0)[0]
        if len(bad):
            raise PreconditionError(f"vector {vectors[bad[0]].tolist()} is not a point of {space.label}")
        return cls.from_indices(space, idx)

    @property
    def indices(self) -> np.ndarray:
        return np.nonzero(self.mask)[0]

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    def __len__(self):
        return self.size

    def __eq__(self, other):
        return isinstance(other, PointSet) and other.space is self.space and bool((other.mask == self.mask).all())

    def _check(self, other):
        if other.space is not self.space:
            raise PreconditionError("point sets live in different spaces")

    def complement(self) -> "PointSet":
        return PointSet(self.space, ~self.mask)

    def difference(self, other) -> "PointSet":
        self._check(other)
        return PointSet(self.space, self.mask & ~other.mask)

    def union(self, other) -> "PointSet":
        self._check(other)
        return PointSet(self.space, self.mask | other.mask)

    def issubset(self, other) -> bool:
        self._check(other)
        return not (self.mask & ~other.mask).any()

    def to_json(self, vectors: bool = False) -> dict:
        out = {"space": self.space.form.to_json(), "order": ORDER_TAG}
        if vectors:
            out["vectors"] = self.space.vectors_enc[self.indices].tolist()
        else:
            out["indices"] = self.indices.tolist()
        return out

    @classmethod
    def from_json(cls, obj, cap: int = POINT_CAP) -> "PointSet":
        form = FormSpec.from_json(obj["space"])
        space = PolarSpace.of(form, cap)
        if "indices" in obj:
            if obj.get("order", ORDER_TAG) != ORDER_TAG:
                raise PreconditionError(f"unknown point order {obj.get('order')}")
            return cls.from_indices(space, obj["indices"])
        if "vectors" in obj:
            return cls.from_vectors(space, obj["vectors"])
        raise PreconditionError("point set needs indices or vectors")
