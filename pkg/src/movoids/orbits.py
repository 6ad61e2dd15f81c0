"""Orbits of matrix groups on polar-space points, and tensor products of forms."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import PreconditionError, ResourceCapError
from .forms import FormSpec, quadratic_from_matrix, symplectic_from_matrix
from .gf import FieldTower
from .intriguing import Verdict, verify_by_perp
from .linalg import matvec_rows, rank_mod_p
from .polar import PointSet, PolarSpace

UNION_ORBIT_CAP = 20


@dataclass
class GeneratorSet:
    """Matrices acting on row vectors, entries as tower encodings."""
    tower: FieldTower
    level: int
    matrices: list
    claimed_property: str | None = None

    def __post_init__(self):
        self.matrices = [np.array(m, dtype=np.int64) for m in self.matrices]
        sub = self.tower.subfield(self.level)
        for m in self.matrices:
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise PreconditionError("generators must be square matrices")
            if not _invertible(m, sub):
                raise PreconditionError("generator is singular")

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0] if self.matrices else 0

    def to_json(self) -> dict:
        return {"field": self.tower.to_json(), "level": self.level, "dim": self.dim,
                "matrices": [m.tolist() for m in self.matrices]}

    @classmethod
    def from_json(cls, obj) -> "GeneratorSet":
        tower = FieldTower.from_json(obj["field"])
        gens = cls(tower, obj.get("level", tower.n), obj["matrices"])
        if gens.matrices and gens.dim != obj.get("dim", gens.dim):
            raise PreconditionError("matrix size differs from the declared dimension")
        return gens


def _invertible(m, sub) -> bool:
    local = sub.vlocal(m)
    if sub.q == sub.p:
        return rank_mod_p(local, sub.p) == m.shape[0]
    # Gaussian elimination with field tables
    a = local.copy()
    n = a.shape[0]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r, c]), None)
        if piv is None:
            return False
        a[[c, piv]] = a[[piv, c]]
        inv = sub.inv_table[a[c, c]]
        a[c] = sub.mul_table[inv, a[c]]
        for r in range(n):
            if r != c and a[r, c]:
                a[r] = sub.add_table[a[r], sub.neg_table[sub.mul_table[a[r, c], a[c]]]]
    return True


@dataclass
class OrbitPartition:
    space: PolarSpace
    orbit_id: np.ndarray  # smallest point index of each point's orbit

    @property
    def labels(self) -> list[int]:
        return sorted(set(self.orbit_id.tolist()))

    @property
    def orbit_sizes(self) -> list[int]:
        return sorted(np.bincount(self.orbit_id)[self.labels].tolist())

    def orbits(self) -> list[PointSet]:
        return [PointSet(self.space, self.orbit_id == lab) for lab in self.labels]

    def to_json(self) -> dict:
        return {"space": self.space.label, "orbits": [
            {"label": lab, "size": int((self.orbit_id == lab).sum())} for lab in self.labels]}


def point_images(space: PolarSpace, matrix_local: np.ndarray) -> np.ndarray:
    img = space.lookup(matvec_rows(space.vectors, matrix_local, space.sub))
    bad = np.nonzero(img < 0)[0]
    if len(bad):
        v = space.vectors_enc[bad[0]].tolist()
        raise PreconditionError(f"generator maps point {v} outside {space.label}")
    return img


def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def orbit_partition(space: PolarSpace, gens: GeneratorSet) -> OrbitPartition:
    if gens.matrices and gens.dim != space.d:
        raise PreconditionError("generator size differs from the space dimension")
    if gens.level != space.f or gens.tower.p != space.p:
        raise PreconditionError("generators live over a different field")
    n = space.num_points
    parent = list(range(n))
    for m in gens.matrices:
        img = point_images(space, space.sub.vlocal(m))
        for i, j in enumerate(img.tolist()):
            a, b = _find(parent, i), _find(parent, j)
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
    labels = np.array([_find(parent, i) for i in range(n)], dtype=np.int64)
    return OrbitPartition(space, labels)


def classify_orbit_unions(partition: OrbitPartition, k: int, threads: int = 1) -> list[tuple[tuple, Verdict]]:
    """verify_by_perp on every nonempty proper union of at most k orbits."""
    labs = partition.labels
    if len(labs) > UNION_ORBIT_CAP:
        raise ResourceCapError(f"{len(labs)} orbits exceed the union cap {UNION_ORBIT_CAP}")
    out = []
    for size in range(1, min(k, len(labs) - 1) + 1):
        for combo in combinations(labs, size):
            mask = np.isin(partition.orbit_id, combo)
            out.append((combo, verify_by_perp(PointSet(partition.space, mask), threads)))
    return out


def check_isometry(form: FormSpec, gens: GeneratorSet, sample: int | None = 256) -> bool:
    """kappa(xg) = kappa(x) on the first `sample` standard-ordered vectors (all if None)."""
    from .linalg import normalized_vectors
    sub = form.field
    vecs = normalized_vectors(sub.q, form.dim)
    if sample is not None:
        vecs = vecs[:sample]
    x = sub.elements[vecs]
    base = form.evaluate_many(x) if form.kind == "quadratic" else None
    for m in gens.matrices:
        y = sub.elements[matvec_rows(vecs, sub.vlocal(m), sub)]
        if form.kind == "quadratic":
            if not (form.evaluate_many(y) == base).all():
                return False
        else:
            z = sub.elements[np.roll(vecs, 1, axis=0)]
            zy = sub.elements[matvec_rows(np.roll(vecs, 1, axis=0), sub.vlocal(m), sub)]
            if not (form.polar_many(x, z) == form.polar_many(y, zy)).all():
                return False
    return True


# -- tensor products ----------------------------------------------------------

def tensor_matrix(a, b, tower: FieldTower, level: int) -> np.ndarray:
    """Kronecker product over GF(p^level) in tower encodings."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    sub = tower.subfield(level)
    la, lb = sub.vlocal(a), sub.vlocal(b)
    prod = sub.mul_table[la[:, None, :, None], lb[None, :, None, :]]
    n = a.shape[0] * b.shape[0]
    return sub.elements[prod.reshape(n, a.shape[1] * b.shape[1])]


def _is_alternating(m, tower) -> bool:
    n = m.shape[0]
    return all(m[i, i] == 0 for i in range(n)) and all(
        m[i, j] == tower.neg(int(m[j, i])) for i in range(n) for j in range(i))


def _is_symmetric(m) -> bool:
    return bool((m == m.T).all())


def tensor_form(g1, g2, tower: FieldTower, level: int) -> FormSpec:
    """Form whose Gram matrix is g1 (x) g2; alternating x symmetric is alternating.

    A symmetric product (odd q) becomes the quadratic form Q(x) = B(x, x)/2.
    """
    g1 = np.asarray(g1, dtype=np.int64)
    g2 = np.asarray(g2, dtype=np.int64)
    for g in (g1, g2):
        if not (_is_symmetric(g) or _is_alternating(g, tower)):
            raise PreconditionError("tensor factors must be symmetric or alternating")
    gram = tensor_matrix(g1, g2, tower, level)
    if _is_alternating(gram, tower):
        return symplectic_from_matrix(tower, level, gram, name="tensor")
    if tower.p == 2:
        raise PreconditionError("a symmetric product in characteristic 2 defines no quadratic form here")
    half = tower.inv(2 % tower.p)
    n = gram.shape[0]
    upper = np.zeros_like(gram)
    for i in range(n):
        upper[i, i] = tower.mul(half, int(gram[i, i]))
        for j in range(i + 1, n):
            upper[i, j] = gram[i, j]
    return quadratic_from_matrix(tower, level, upper, name="tensor")


def matrix_order(m, tower: FieldTower, level: int, limit: int = 10_000) -> int:
    sub = tower.subfield(level)
    loc = sub.vlocal(np.asarray(m, dtype=np.int64))
    n = loc.shape[0]
    ident = np.eye(n, dtype=np.int64)
    cur = loc.copy()
    for k in range(1, limit + 1):
        if (cur == ident).all():
            return k
        cur = matvec_rows(cur, loc, sub)
    raise ResourceCapError("matrix order exceeds the limit")


# Matrices over GF(3) of the dihedral and quaternion representations, with
# the forms they preserve (entries as field encodings, so -1 = 2).
D8_A = [[0, 1], [2, 0]]
D8_B = [[0, 1], [1, 0]]
Q8_X = [[0, 1], [2, 0]]
Q8_Y = [[1, 1], [1, 2]]
F_D = [[1, 0], [0, 1]]
F_Q = [[0, 1], [2, 0]]


def extraspecial_w33_generators(tower: FieldTower) -> GeneratorSet:
    """The four products g (x) I and I (x) h acting on GF(3)^2 (x) GF(3)^2."""
    ident = [[1, 0], [0, 1]]
    mats = [tensor_matrix(D8_A, ident, tower, 1), tensor_matrix(D8_B, ident, tower, 1),
            tensor_matrix(ident, Q8_X, tower, 1), tensor_matrix(ident, Q8_Y, tower, 1)]
    return GeneratorSet(tower, 1, mats, "isometry")
