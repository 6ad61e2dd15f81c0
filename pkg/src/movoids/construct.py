"""Explicit point sets: field-reduction sets M1 and M2, T-set sets, the
elliptic quadric inside W(d-1, q) and fully deleted permutation modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import PreconditionError, ResourceCapError
from .forms import (FormSpec, elliptic_quadratic_standard, field_reduce, hermitian_standard,
                    parabolic_reduction_scalar, parabolic_standard, polar_form, quadratic_from_matrix)
from .gf import field_create
from .intriguing import qminus_into_w
from .polar import POINT_CAP, PointSet, PolarSpace
from .tsets import TSet

ENUM_CAP = 1 << 22


@dataclass
class Construction:
    label: str  # M1, M2, TSET, CLASSICAL_QW, COMPLEMENT, DIFFERENCE
    pointset: PointSet
    predicted_m: Fraction | None
    inputs: dict = field(default_factory=dict)

    @property
    def space(self) -> PolarSpace:
        return self.pointset.space

    def predicted_size(self):
        if self.predicted_m is None:
            return None
        return self.predicted_m * self.space.theta

    def to_json(self) -> dict:
        m = self.predicted_m
        return {"label": self.label, "inputs": self.inputs,
                "predicted_m": None if m is None else (int(m) if m.denominator == 1 else str(m)),
                "pointset": self.pointset.to_json()}


def parent_values(space: PolarSpace) -> np.ndarray:
    """kappa'(v, v) (or Q'(v)) of the lifted vector for every point of a reduced space."""
    form = space.form
    if not form.is_reduced:
        raise PreconditionError("the space does not come from field reduction")
    lifted = form.lift(space.vectors_enc)
    return form.parent.evaluate_many(lifted)


def _reduction_m(form: FormSpec) -> Fraction:
    row, b, d, q = form.row, form.b, form.dim, form.q
    n1 = d // b
    if row == 5:
        if d % 2 == 0 or n1 < 3:
            raise PreconditionError("H from H needs d odd and d/b >= 3")
        e = (d - b) // 2
    elif row == 3:
        if n1 % 2 or n1 < 4:
            raise PreconditionError("Q- from Q- needs d/b >= 4 even")
        e = d // 2 - b
    elif row in (7, 9):
        if b % 2 or n1 % 2 == 0 or n1 < 3:
            raise PreconditionError("W or Q- from H needs b even and d/b >= 3 odd")
        e = (d - b) // 2
    elif row == 11:
        if b != 2 or n1 % 2 == 0 or n1 < 3:
            raise PreconditionError("Q+ from Q needs b = 2 and d/2 >= 3 odd")
        e = d // 2 - 1
    else:
        raise PreconditionError(f"reduction row {row} gives no m-ovoid of this kind")
    return Fraction(q ** e - 1, q - 1)


def build_M1(form: FormSpec, cap: int = POINT_CAP) -> Construction:
    """Points whose lift is singular (isotropic) for the parent form."""
    if not form.is_reduced:
        raise PreconditionError("M1 needs a form obtained by field reduction")
    m = _reduction_m(form)
    space = PolarSpace.of(form, cap)
    mask = parent_values(space) == 0
    return Construction("M1", PointSet(space, mask), m,
                        {"row": form.row, "b": form.b, "parent": form.parent.label()})


def m1_form(kind: str, p: int, f: int, b: int, d: int) -> FormSpec:
    """Reduced form for one of the extension-field rows: kind is the pair
    of space names such as "Q-<-Q-", "H<-H", "Q-<-H", "W<-H", "Q+<-Q"."""
    if d % b:
        raise PreconditionError("b must divide d")
    t = field_create(p, b * f)
    lvl, n1 = b * f, d // b
    if kind == "H<-H":
        return field_reduce(hermitian_standard(t, lvl, n1), 5, b)
    if kind == "Q-<-Q-":
        return field_reduce(elliptic_quadratic_standard(t, lvl, n1), 3, b)
    if kind == "Q-<-H":
        return field_reduce(hermitian_standard(t, lvl, n1), 9, b)
    if kind == "W<-H":
        return field_reduce(hermitian_standard(t, lvl, n1), 7, b)
    if kind == "Q+<-Q":
        parent = parabolic_standard(t, lvl, n1)
        return field_reduce(parent, 11, b, parabolic_reduction_scalar(parent, b, "plus"))
    raise PreconditionError(f"unknown extension-field kind {kind}")


def build_M2(p: int, f: int, d: int, cap: int = POINT_CAP) -> Construction:
    """Points of Q-(d-1, q) from Q-(d/4-1, q^4) with Tr_{q^4/q^2}(Q'(v)) = 0."""
    if d % 4 or d // 4 < 2 or (d // 4) % 2:
        raise PreconditionError("M2 needs b = 4 and d/4 even")
    t = field_create(p, 4 * f)
    form = field_reduce(elliptic_quadratic_standard(t, 4 * f, d // 4), 3, 4)
    space = PolarSpace.of(form, cap)
    vals = parent_values(space)
    mask = t.vtrace(vals, 2 * f, 4 * f) == 0
    return Construction("M2", PointSet(space, mask), None, {"p": p, "f": f, "d": d})


def tset_form(context, d: int, strict: bool = True) -> FormSpec:
    """The reduced form on which the T-set of the given case lives."""
    context.check_dimension(d, strict)
    t = context.tower
    lvl, b, n1 = context.b * context.f, context.b, d // context.b
    case = context.case
    if case == "HH":
        return field_reduce(hermitian_standard(t, lvl, n1), 5, b)
    if case == "QQ":
        return field_reduce(elliptic_quadratic_standard(t, lvl, n1), 3, b)
    if case == "HQ":
        return field_reduce(hermitian_standard(t, lvl, n1), 9, b)
    if case == "HW":
        return field_reduce(hermitian_standard(t, lvl, n1), 7, b, context.lam)
    q_parent = elliptic_quadratic_standard(t, lvl, n1)
    return field_reduce(polar_form(q_parent), 1, b)


def tset_values(context, form: FormSpec, space: PolarSpace) -> np.ndarray:
    if context.case != "WW":
        return parent_values(space)
    # the symplectic parent is the polar form of this quadratic form
    t = context.tower
    q_parent = elliptic_quadratic_standard(t, context.b * context.f, form.dim // context.b)
    return q_parent.evaluate_many(form.lift(space.vectors_enc))


def build_tset_pointset(tset: TSet, d: int, strict: bool = True, cap: int = POINT_CAP) -> Construction:
    """{<v> : kappa'(v, v) in calT}; strict=False admits d/b = 2 for QQ and WW."""
    c = tset.context
    form = tset_form(c, d, strict)
    space = PolarSpace.of(form, cap)
    vals = tset_values(c, form, space)
    mask = np.isin(vals, np.array(sorted(tset.elements), dtype=np.int64))
    n = len(tset.elements)
    m = Fraction(n * c.q ** c.ovoid_exponent(d), c.q - 1) if c.ovoid_exponent(d) >= 0 else None
    return Construction("TSET", PointSet(space, mask), m,
                        {"tset": tset.to_json(), "d": d})


def classical_pair(d: int, q: int, cap: int = POINT_CAP) -> tuple[Construction, Construction]:
    """Points of Q-(d-1, q) and their complement inside W(d-1, q), q even."""
    if q % 2 or d % 2 or d < 4:
        raise PreconditionError("needs q even and d even, d >= 4")
    f = q.bit_length() - 1
    if 2 ** f != q:
        raise PreconditionError("q must be a power of 2")
    t = field_create(2, f)
    qm = PolarSpace.of(elliptic_quadratic_standard(t, f, d), cap)
    inner = qminus_into_w(PointSet(qm, np.ones(qm.num_points, dtype=bool)))
    h = d // 2 - 1
    a = Construction("CLASSICAL_QW", inner, Fraction(q ** h - 1, q - 1), {"d": d, "q": q})
    b = Construction("COMPLEMENT", inner.complement(), Fraction(q ** h), {"d": d, "q": q})
    return a, b


def hermitian_level_count(p: int, f: int, b: int, d: int, value: int = 1) -> tuple[int, int]:
    """(#{x in F_{q^b}^{d/b} : H'(x) = value}, q^((d-b)/2) (q^(d/2) + 1)) by enumeration."""
    if b % 2 or d % b:
        raise PreconditionError("needs b even and b | d")
    t = field_create(p, b * f)
    n1 = d // b
    qb = p ** (b * f)
    if qb ** n1 > ENUM_CAP:
        raise ResourceCapError("too many vectors to enumerate")
    h = hermitian_standard(t, b * f, n1)
    elems = np.array(t.subfield_elements(b * f), dtype=np.int64)
    grid = np.array(list(product(range(qb), repeat=n1)), dtype=np.int64)
    vals = h.evaluate_many(elems[grid])
    q = p ** f
    return int((vals == value).sum()), q ** ((d - b) // 2) * (q ** (d // 2) + 1)


# -- fully deleted permutation module ---------------------------------------

def _fdm_coords(c, n: int, p: int, quotient: bool) -> list[int]:
    """Coordinates in the basis u_k = e_k - e_{k+1} of a vector with zero sum."""
    x = list(np.cumsum(c)[: n - 1] % p)
    if quotient:
        top = x[-1]
        x = [(x[k] + top * (k + 1)) % p for k in range(n - 2)]
    return [int(v) for v in x]


def fdm_matrix(perm, n: int, p: int) -> np.ndarray:
    """Matrix (row convention) of a permutation of {0..n-1} on the module."""
    quotient = n % p == 0
    dim = n - 2 if quotient else n - 1
    rows = []
    for k in range(dim):
        c = np.zeros(n, dtype=np.int64)
        c[perm[k]] += 1
        c[perm[k + 1]] -= 1
        rows.append(_fdm_coords(c, n, p, quotient))
    return np.array(rows, dtype=np.int64)


def alternating_generators(n: int) -> list[list[int]]:
    """(1 2 3) and an n- or (n-1)-cycle, which generate A_n."""
    three = list(range(n))
    three[0], three[1], three[2] = 1, 2, 0
    if n % 2:
        cyc = [(i + 1) % n for i in range(n)]
    else:
        cyc = [0] + [1 + (i % (n - 1)) for i in range(1, n)]
    return [three, cyc]


def fully_deleted_pointset_inputs(n: int, p: int):
    """(dimension, quadratic form, generator matrices of A_n) on the module."""
    if n < 5:
        raise PreconditionError("needs n >= 5")
    if p == 2 and n % 4 == 2:
        raise PreconditionError("the quadratic form is degenerate when n = 2 mod 4")
    dim = n - 2 if n % p == 0 else n - 1
    upper = np.zeros((dim, dim), dtype=np.int64)
    for k in range(dim):
        upper[k, k] = 1
        if k + 1 < dim:
            upper[k, k + 1] = (-1) % p
    form = quadratic_from_matrix(field_create(p, 1), 1, upper, name="fully_deleted")
    form.params = {"n": n}
    gens = [fdm_matrix(g, n, p) for g in alternating_generators(n)]
    return dim, form, gens
