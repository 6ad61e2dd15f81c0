"""Reflexive sesquilinear and quadratic forms, including field reduction.

A form lives on F_q^dim with F_q = GF(p^level) inside a FieldTower.  Vectors
handed to the evaluators hold tower encodings.  Standard forms carry an
upper-triangular (quadratic) or full (alternating, hermitian) coefficient
matrix; reduced forms carry their parent, the reduction row and the scalar.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import PreconditionError, ResourceCapError
from .gf import FieldTower, field_create
from .linalg import normalized_vectors, nullspace_mod_p

KINDS = ("symplectic", "hermitian", "quadratic")
QUAD_TYPES = ("plus", "minus", "parabolic")
ENUM_CAP = 2_000_000

# row -> (parent kind, parent quad type, result kind, result quad type)
REDUCTION_ROWS = {
    1: ("symplectic", None, "symplectic", None),
    2: ("quadratic", "plus", "quadratic", "plus"),
    3: ("quadratic", "minus", "quadratic", "minus"),
    4: ("quadratic", "parabolic", "quadratic", "parabolic"),
    5: ("hermitian", None, "hermitian", None),
    6: ("hermitian", None, "hermitian", None),
    7: ("hermitian", None, "symplectic", None),
    8: ("hermitian", None, "symplectic", None),
    9: ("hermitian", None, "quadratic", "minus"),
    10: ("hermitian", None, "quadratic", "plus"),
    11: ("quadratic", "parabolic", "quadratic", "plus"),
    12: ("quadratic", "parabolic", "quadratic", "minus"),
}


class FormSpec:
    def __init__(self, kind, tower: FieldTower, level: int, dim: int, quad_type=None,
                 matrix=None, name="matrix", params=None, parent=None, row=None, b=None,
                 scalar=None):
        if kind not in KINDS:
            raise PreconditionError(f"unknown form kind {kind}")
        if tower.n % level:
            raise PreconditionError("level must divide the tower degree")
        if kind == "hermitian" and level % 2:
            raise PreconditionError("hermitian forms need a square field order")
        self.kind = kind
        self.quad_type = quad_type
        self.tower = tower
        self.level = level
        self.dim = dim
        self.name = name
        self.params = dict(params or {})
        self.parent = parent
        self.row = row
        self.b = b
        self.scalar = scalar
        self.matrix = None if matrix is None else np.array(matrix, dtype=np.int64)

    # -- basic data ----------------------------------------------------

    @property
    def p(self) -> int:
        return self.tower.p

    @property
    def q(self) -> int:
        return self.tower.p ** self.level

    @property
    def field(self):
        return self.tower.subfield(self.level)

    @property
    def is_reduced(self) -> bool:
        return self.parent is not None

    def conj_exponent(self) -> int:
        return self.p ** (self.level // 2)

    def label(self) -> str:
        d, q = self.dim, self.q
        if self.kind == "symplectic":
            return f"W({d - 1},{q})"
        if self.kind == "hermitian":
            return f"H({d - 1},{q})"
        return {"plus": "Q+", "minus": "Q-", "parabolic": "Q"}[self.quad_type] + f"({d - 1},{q})"

    def __repr__(self):
        return f"<FormSpec {self.label()} {self.name}>"

    # -- evaluation ----------------------------------------------------

    def _conj(self, y):
        return self.tower.vpow(y, self.conj_exponent())

    def evaluate_many(self, x) -> np.ndarray:
        """Q(x), H(x) = kappa(x, x), or 0 for alternating forms; rows of x."""
        x = np.asarray(x, dtype=np.int64)
        t = self.tower
        n = x.shape[0]
        if self.kind == "symplectic":
            return np.zeros(n, dtype=np.int64)
        if self.is_reduced:
            xp = self._lift(x)
            if self.row in (9, 10):
                h = self.parent.evaluate_many(xp)
                return t.vtrace(h, self.level, self.parent.level // 2)
            v = self.parent.evaluate_many(xp)
            if self.scalar is not None:
                v = t.vmul(self.scalar, v)
            return t.vtrace(v, self.level, self.parent.level)
        if self.kind == "hermitian":
            return self.polar_many(x, x)
        acc = np.zeros(n, dtype=np.int64)
        c = self.matrix
        for i in range(self.dim):
            for j in range(i, self.dim):
                if c[i, j]:
                    acc = t.vadd(acc, t.vmul(c[i, j], t.vmul(x[:, i], x[:, j])))
        return acc

    def polar_many(self, x, y) -> np.ndarray:
        """The (sesqui)bilinear form on paired rows of x and y."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        t = self.tower
        n = x.shape[0]
        if self.is_reduced:
            xp, yp = self._lift(x), self._lift(y)
            v = self.parent.polar_many(xp, yp)
            if self.scalar is not None and self.row not in (9, 10):
                v = t.vmul(self.scalar, v)
            return t.vtrace(v, self.level, self.parent.level)
        c = self.matrix
        acc = np.zeros(n, dtype=np.int64)
        if self.kind == "quadratic":
            for i in range(self.dim):
                for j in range(i, self.dim):
                    if c[i, j]:
                        s = t.vadd(t.vmul(x[:, i], y[:, j]), t.vmul(x[:, j], y[:, i]))
                        acc = t.vadd(acc, t.vmul(c[i, j], s))
            return acc
        yc = self._conj(y) if self.kind == "hermitian" else y
        for i in range(self.dim):
            for j in range(self.dim):
                if c[i, j]:
                    acc = t.vadd(acc, t.vmul(c[i, j], t.vmul(x[:, i], yc[:, j])))
        return acc

    def evaluate(self, x) -> int:
        return int(self.evaluate_many(np.asarray(x, dtype=np.int64)[None, :])[0])

    def polar(self, x, y) -> int:
        return int(self.polar_many(np.asarray(x, dtype=np.int64)[None, :],
                                   np.asarray(y, dtype=np.int64)[None, :])[0])

    # -- field reduction coordinates -----------------------------------

    @cached_property
    def reduction_basis(self) -> list[int]:
        """F_q-basis 1, beta, ..., beta^(b-1) of the parent field."""
        beta = self.tower.primitive_element(self.parent.level)
        return [self.tower.pow(beta, k) for k in range(self.b)]

    def _lift(self, x):
        """F_q coordinates (length dim) to parent coordinates (length dim/b)."""
        t = self.tower
        b = self.b
        out = np.zeros((x.shape[0], self.dim // b), dtype=np.int64)
        for i in range(self.dim // b):
            acc = np.zeros(x.shape[0], dtype=np.int64)
            for k, w in enumerate(self.reduction_basis):
                acc = t.vadd(acc, t.vmul(x[:, i * b + k], w))
            out[:, i] = acc
        return out

    def lift(self, x) -> np.ndarray:
        return self._lift(np.asarray(x, dtype=np.int64))

    # -- F_p structure -------------------------------------------------

    @cached_property
    def gram_fp(self) -> np.ndarray:
        """Stack of F_p Gram matrices B_k[(i,s),(j,t)] = Tr(c_k f(b_s e_i, b_t e_j)).

        Shape (f, d f, d f), f = level; c_k and b_s run over the F_p-basis
        of F_q.  f(x, y) = 0 exactly when every B_k pairing vanishes, and
        B_0 (c_0 = 1) gives the absolute trace of f.
        """
        sub = self.field
        f, d = self.level, self.dim
        basis = np.array(sub.basis, dtype=np.int64)
        n = d * f
        vecs = np.zeros((n, d), dtype=np.int64)
        for i in range(d):
            for s in range(f):
                vecs[i * f + s, i] = basis[s]
        xi = np.repeat(np.arange(n), n)
        yi = np.tile(np.arange(n), n)
        vals = self.polar_many(vecs[xi], vecs[yi])
        t = self.tower
        out = np.empty((f, n, n), dtype=np.int64)
        for k in range(f):
            out[k] = t.vtrace(t.vmul(basis[k], vals), 1, self.level).reshape(n, n)
        return out

    @cached_property
    def gram(self) -> np.ndarray:
        """Gram matrix over F_q (tower encodings), f(e_i, e_j)."""
        d = self.dim
        eye = np.eye(d, dtype=np.int64)
        xi = np.repeat(np.arange(d), d)
        yi = np.tile(np.arange(d), d)
        return self.polar_many(eye[xi], eye[yi]).reshape(d, d)

    def radical_fp(self) -> np.ndarray:
        """F_p basis of the radical of the polar form, in F_p coordinates."""
        g = self.gram_fp
        stacked = np.concatenate(list(g), axis=1)
        return nullspace_mod_p(stacked.T, self.p)

    def fp_to_vector(self, coords) -> np.ndarray:
        """F_p coordinates (length d f) back to tower encodings over F_q."""
        sub = self.field
        f = self.level
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, self.dim, f)
        t = self.tower
        out = np.zeros(coords.shape[:2], dtype=np.int64)
        for s, w in enumerate(sub.basis):
            out = t.vadd(out, t.vmul(coords[..., s], w))
        return out

    def check_nondegenerate(self):
        rad = self.radical_fp()
        if len(rad) == 0:
            return
        if self.kind != "quadratic":
            raise PreconditionError(f"{self.label()} form is degenerate")
        p = self.p
        k = len(rad)
        if p ** k > ENUM_CAP:
            raise ResourceCapError("radical too large to inspect")
        combos = np.array(np.meshgrid(*[np.arange(p)] * k, indexing="ij")).reshape(k, -1).T
        vecs = (combos @ rad) % p
        vals = self.evaluate_many(self.fp_to_vector(vecs))
        if (vals[1:] == 0).any() or (vals == 0).sum() > 1:
            raise PreconditionError("quadratic form has a singular radical vector")

    # -- serialisation -------------------------------------------------

    def to_json(self) -> dict:
        out = {"kind": self.kind, "quad_type": self.quad_type, "field": self.tower.to_json(),
               "level": self.level, "dim": self.dim}
        if self.is_reduced:
            out["model"] = {"name": "reduced", "row": self.row, "b": self.b,
                            "scalar": self.scalar, "parent": self.parent.to_json()}
        else:
            out["model"] = {"name": self.name, "params": self.params,
                            "matrix": self.matrix.tolist()}
        return out

    @classmethod
    def from_json(cls, obj) -> "FormSpec":
        tower = FieldTower.from_json(obj["field"])
        model = obj["model"]
        if model["name"] == "reduced":
            parent = cls.from_json(model["parent"])
            return field_reduce(parent, model["row"], model["b"], model.get("scalar"))
        form = cls(obj["kind"], tower, obj["level"], obj["dim"], obj.get("quad_type"),
                   matrix=model["matrix"], name=model.get("name", "matrix"),
                   params=model.get("params"))
        form.check_nondegenerate()
        return form


# -- standard models ------------------------------------------------------

def symplectic_standard(tower: FieldTower, level: int, dim: int) -> FormSpec:
    if dim % 2 or dim < 2:
        raise PreconditionError("alternating forms need even dimension")
    m = np.zeros((dim, dim), dtype=np.int64)
    minus_one = tower.neg(1)
    for i in range(0, dim, 2):
        m[i, i + 1] = 1
        m[i + 1, i] = minus_one
    return FormSpec("symplectic", tower, level, dim, matrix=m, name="symplectic_standard")


def hermitian_standard(tower: FieldTower, level: int, dim: int) -> FormSpec:
    """sum x_i y_i^sqrt(q)."""
    if dim < 1:
        raise PreconditionError("dimension must be positive")
    return FormSpec("hermitian", tower, level, dim, matrix=np.eye(dim, dtype=np.int64),
                    name="hermitian_standard")


def hyperbolic_standard(tower: FieldTower, level: int, dim: int) -> FormSpec:
    if dim % 2 or dim < 2:
        raise PreconditionError("hyperbolic quadrics need even dimension")
    m = np.zeros((dim, dim), dtype=np.int64)
    for i in range(0, dim, 2):
        m[i, i + 1] = 1
    return FormSpec("quadratic", tower, level, dim, "plus", matrix=m, name="hyperbolic_standard")


def parabolic_standard(tower: FieldTower, level: int, dim: int) -> FormSpec:
    """x_1^2 + x_2 x_3 + x_4 x_5 + ..."""
    if dim % 2 == 0:
        raise PreconditionError("parabolic quadrics need odd dimension")
    m = np.zeros((dim, dim), dtype=np.int64)
    m[0, 0] = 1
    for i in range(1, dim, 2):
        m[i, i + 1] = 1
    form = FormSpec("quadratic", tower, level, dim, "parabolic", matrix=m, name="parabolic_standard")
    form.check_nondegenerate()
    return form


def irreducible_tail(tower: FieldTower, level: int) -> tuple[int, int]:
    """Least (a0, a1), by encodings, with x^2 + a0 x + a1 irreducible over F_q."""
    elems = tower.subfield_elements(level)
    for a0 in elems:
        for a1 in elems:
            if a1 == 0:
                continue
            if all(tower.add(tower.add(tower.mul(t, t), tower.mul(a0, t)), a1) for t in elems):
                return a0, a1
    raise AssertionError("no irreducible quadratic")


def elliptic_quadratic_standard(tower: FieldTower, level: int, dim: int, variant="least") -> FormSpec:
    """x1x2 + ... + x_{n-1}^2 + a0 x_{n-1} x_n + a1 x_n^2 with an irreducible tail.

    variant "least" takes the least irreducible (a0, a1); "nonsquare" (odd q)
    takes a0 = 0, a1 = -gamma for the least nonsquare gamma.
    """
    if dim % 2 or dim < 2:
        raise PreconditionError("elliptic quadrics need even dimension")
    if variant == "least":
        a0, a1 = irreducible_tail(tower, level)
    elif variant == "nonsquare":
        if tower.p == 2:
            raise PreconditionError("nonsquare variant needs odd q")
        a0, a1 = 0, tower.neg(tower.least_nonsquare(level))
    else:
        raise PreconditionError(f"unknown variant {variant}")
    m = np.zeros((dim, dim), dtype=np.int64)
    for i in range(0, dim - 2, 2):
        m[i, i + 1] = 1
    m[dim - 2, dim - 2] = 1
    m[dim - 2, dim - 1] = a0
    m[dim - 1, dim - 1] = a1
    return FormSpec("quadratic", tower, level, dim, "minus", matrix=m,
                    name="elliptic_standard", params={"a0": a0, "a1": a1, "variant": variant})


def quadratic_from_matrix(tower: FieldTower, level: int, upper, quad_type=None, name="matrix") -> FormSpec:
    """Q(x) = sum_{i<=j} upper[i][j] x_i x_j; the type is classified when omitted."""
    m = np.triu(np.array(upper, dtype=np.int64))
    dim = m.shape[0]
    form = FormSpec("quadratic", tower, level, dim, quad_type or "parabolic", matrix=m, name=name)
    form.check_nondegenerate()
    if quad_type is None:
        form.quad_type = classify_quadratic_type(form)
    return form


def symplectic_from_matrix(tower: FieldTower, level: int, mat, name="matrix") -> FormSpec:
    m = np.array(mat, dtype=np.int64)
    if m.shape[0] % 2:
        raise PreconditionError("alternating forms need even dimension")
    for i in range(m.shape[0]):
        if m[i, i]:
            raise PreconditionError("matrix is not alternating")
        for j in range(i):
            if m[i, j] != tower.neg(int(m[j, i])):
                raise PreconditionError("matrix is not alternating")
    form = FormSpec("symplectic", tower, level, m.shape[0], matrix=m, name=name)
    form.check_nondegenerate()
    return form


def polar_form(form: FormSpec) -> FormSpec:
    """The alternating polar form of a quadratic form in characteristic 2."""
    if form.kind != "quadratic" or form.p != 2:
        raise PreconditionError("polar form as a symplectic space needs a char-2 quadratic form")
    return symplectic_from_matrix(form.tower, form.level, form.gram, name="polar")


# -- field reduction ------------------------------------------------------

def field_reduce(parent: FormSpec, row: int, b: int, scalar=None) -> FormSpec:
    """Reduce a form over GF(q^b) to one over GF(q) by the given table row.

    Rows 7-8 take lam with lam^(q^(b/2)) + lam = 0 (default: the least such),
    rows 11-12 take lam in GF(q^b)^* (required).  Rows 9-10 use
    Q = Tr_{q^(b/2)/q} o H' whose polar form is Tr_{q^b/q} o kappa'.
    """
    if row not in REDUCTION_ROWS:
        raise PreconditionError(f"no reduction row {row}")
    pk, pt, rk, rt = REDUCTION_ROWS[row]
    if parent.kind != pk or (pt is not None and parent.quad_type != pt):
        raise PreconditionError(f"row {row} needs a {pk} {pt or ''} parent, got {parent.label()}")
    if b < 2 or parent.level % b:
        raise PreconditionError(f"b = {b} must be >= 2 and divide the parent level")
    t = parent.tower
    f = parent.level // b
    q = t.p ** f
    n1 = parent.dim
    d = n1 * b
    odd_q = q % 2 == 1
    even_b = b % 2 == 0
    conds = {
        1: True, 2: True, 3: True,
        4: odd_q and d % 2 == 1,
        5: d % 2 == 1 and f % 2 == 0,
        6: n1 % 2 == 0 and not even_b and f % 2 == 0,
        7: n1 % 2 == 1 and even_b,
        8: n1 % 2 == 0 and even_b,
        9: n1 % 2 == 1 and even_b,
        10: n1 % 2 == 0 and even_b,
        11: odd_q and n1 % 2 == 1 and even_b,
        12: odd_q and n1 % 2 == 1 and even_b,
    }
    if not conds[row]:
        raise PreconditionError(f"row {row} conditions fail for d={d}, b={b}, q={q}")
    if row in (7, 8):
        half = q ** (b // 2)
        if scalar is None:
            scalar = next(x for x in t.subfield_elements(parent.level)
                          if x and t.add(t.pow(x, half), x) == 0)
        if scalar == 0 or not t.in_subfield(scalar, parent.level) or t.add(t.pow(scalar, half), scalar):
            raise PreconditionError("scalar must satisfy lam^(q^(b/2)) + lam = 0, lam != 0")
    elif row in (11, 12):
        if scalar is None or scalar == 0 or not t.in_subfield(scalar, parent.level):
            raise PreconditionError("rows 11 and 12 need a nonzero scalar in GF(q^b)")
    elif scalar not in (None, 1):
        raise PreconditionError(f"row {row} takes no scalar")
    else:
        scalar = None
    form = FormSpec(rk, t, f, d, rt, name="reduced", parent=parent, row=row, b=b, scalar=scalar)
    form.check_nondegenerate()
    if rk == "quadratic" and rt != "parabolic":
        got = classify_quadratic_type(form)
        if got != rt:
            raise PreconditionError(f"row {row} produced a {got} quadric, expected {rt}")
    return form


def parabolic_reduction_scalar(parent: FormSpec, b: int, want: str) -> int:
    """Least lam for which row 11 (want='plus') or 12 ('minus') applies."""
    row = 11 if want == "plus" else 12
    t = parent.tower
    for lam in t.subfield_elements(parent.level)[1:]:
        try:
            return field_reduce(parent, row, b, lam).scalar
        except PreconditionError:
            continue
    raise PreconditionError(f"no scalar gives a {want} quadric")


# -- classification -------------------------------------------------------

def quadric_point_count(kind: str, d: int, q: int) -> int:
    if kind == "plus":
        return (q ** (d // 2 - 1) + 1) * (q ** (d // 2) - 1) // (q - 1)
    if kind == "minus":
        return (q ** (d // 2) + 1) * (q ** (d // 2 - 1) - 1) // (q - 1)
    if kind == "parabolic":
        return (q ** (d - 1) - 1) // (q - 1)
    raise PreconditionError(kind)


def count_singular_points(form: FormSpec, cap: int = ENUM_CAP) -> int:
    q, d = form.q, form.dim
    if (q ** d - 1) // (q - 1) > cap:
        raise ResourceCapError("too many projective points to count")
    vecs = form.field.elements[normalized_vectors(q, d)]
    return int((form.evaluate_many(vecs) == 0).sum())


def classify_quadratic_type(form: FormSpec) -> str:
    if form.kind != "quadratic":
        raise PreconditionError("only quadratic forms have a type")
    n = count_singular_points(form)
    d, q = form.dim, form.q
    if d % 2:
        kinds = ["parabolic"]
    else:
        kinds = ["plus", "minus"]
    for k in kinds:
        if quadric_point_count(k, d, q) == n:
            return k
    raise PreconditionError(f"{n} singular points match no nondegenerate quadric")
