import numpy as np
import pytest

from movoids.errors import PreconditionError
from movoids.forms import (FormSpec, classify_quadratic_type, count_singular_points,
                           elliptic_quadratic_standard, field_reduce, hermitian_standard,
                           hyperbolic_standard, parabolic_reduction_scalar, parabolic_standard,
                           polar_form, quadratic_from_matrix, quadric_point_count,
                           symplectic_standard)
from movoids.gf import field_create


@pytest.mark.parametrize("p,f,d", [(2, 1, 4), (2, 1, 6), (3, 1, 4), (2, 2, 4), (5, 1, 4)])
def test_standard_quadrics_have_expected_types(p, f, d):
    t = field_create(p, f)
    assert classify_quadratic_type(hyperbolic_standard(t, f, d)) == "plus"
    assert classify_quadratic_type(elliptic_quadratic_standard(t, f, d)) == "minus"
    assert classify_quadratic_type(parabolic_standard(t, f, d + 1)) == "parabolic"


def test_nonsquare_elliptic_variant():
    t = field_create(3, 1)
    assert classify_quadratic_type(elliptic_quadratic_standard(t, 1, 4, "nonsquare")) == "minus"


@pytest.mark.parametrize("row,parent,b,want,points", [
    (3, ("minus", 2, 2, 4), 2, "Q-(7,2)", 119),
    (11, ("parabolic", 3, 2, 3), 2, "Q+(5,3)", 130),
    (3, ("minus", 2, 3, 2), 3, "Q-(5,2)", 27),
    (2, ("plus", 2, 2, 4), 2, "Q+(7,2)", 135),
])
def test_quadratic_reductions(row, parent, b, want, points):
    kind, p, lvl, dim = parent
    t = field_create(p, lvl)
    make = {"minus": elliptic_quadratic_standard, "plus": hyperbolic_standard,
            "parabolic": parabolic_standard}[kind]
    par = make(t, lvl, dim)
    scalar = parabolic_reduction_scalar(par, b, "plus") if row == 11 else None
    red = field_reduce(par, row, b, scalar)
    assert red.label() == want
    assert count_singular_points(red) == points


def test_hermitian_reductions():
    t = field_create(2, 2)
    w = field_reduce(hermitian_standard(t, 2, 3), 7, 2)
    assert w.kind == "symplectic" and w.label() == "W(5,2)"
    q = field_reduce(hermitian_standard(t, 2, 3), 9, 2)
    assert q.label() == "Q-(5,2)"
    q4 = field_reduce(hermitian_standard(t, 2, 2), 10, 2)
    assert q4.label() == "Q+(3,2)"
    t = field_create(2, 6)
    h = field_reduce(hermitian_standard(t, 6, 3), 5, 3)
    assert h.label() == "H(8,4)"


def test_reduction_scalar_conditions():
    t = field_create(3, 2)
    with pytest.raises(PreconditionError):
        field_reduce(hermitian_standard(t, 2, 3), 7, 2, scalar=1)
    lam = field_reduce(hermitian_standard(t, 2, 3), 7, 2).scalar
    assert t.add(t.pow(lam, 3), lam) == 0
    with pytest.raises(PreconditionError):
        field_reduce(hermitian_standard(t, 2, 3), 3, 2)


def test_reduced_form_is_trace_of_parent():
    t = field_create(2, 2)
    par = elliptic_quadratic_standard(t, 2, 4)
    red = field_reduce(par, 3, 2)
    rng = np.random.default_rng(3)
    x = rng.integers(0, 2, size=(50, 8))
    lifted = red.lift(x)
    assert (red.evaluate_many(x) == t.vtrace(par.evaluate_many(lifted), 1)).all()


def test_point_count_formula():
    assert quadric_point_count("minus", 8, 2) == 119
    assert quadric_point_count("plus", 6, 3) == 130
    assert quadric_point_count("parabolic", 7, 3) == 364


def test_degenerate_rejected():
    t = field_create(3, 1)
    with pytest.raises(PreconditionError):
        quadratic_from_matrix(t, 1, [[1, 0, 0], [0, 1, 0], [0, 0, 0]])


def test_polar_form_needs_char_two():
    t = field_create(3, 1)
    with pytest.raises(PreconditionError):
        polar_form(elliptic_quadratic_standard(t, 1, 4))
    t = field_create(2, 1)
    assert polar_form(elliptic_quadratic_standard(t, 1, 4)).label() == "W(3,2)"


def test_json_roundtrip():
    t = field_create(2, 2)
    red = field_reduce(hermitian_standard(t, 2, 3), 9, 2)
    back = FormSpec.from_json(red.to_json())
    assert back.to_json() == red.to_json()
    s = symplectic_standard(t, 1, 4)
    assert FormSpec.from_json(s.to_json()).to_json() == s.to_json()
