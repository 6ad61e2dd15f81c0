import numpy as np
import pytest

from movoids.construct import (alternating_generators, build_M1, build_M2, build_tset_pointset,
                               classical_pair, fully_deleted_pointset_inputs, hermitian_level_count,
                               m1_form)
from movoids.errors import PreconditionError
from movoids.gf import field_create
from movoids.intriguing import verify
from movoids.tsets import TSetContext, frobenius_orbit_tset, make_tset, search, trace_zero_candidates


@pytest.mark.parametrize("kind,p,f,b,d,label,m", [
    ("Q-<-Q-", 2, 1, 2, 8, "Q-(7,2)", 3),
    ("W<-H", 3, 1, 2, 6, "W(5,3)", 4),
    ("Q+<-Q", 3, 1, 2, 6, "Q+(5,3)", 4),
    ("Q-<-H", 2, 1, 2, 6, "Q-(5,2)", 3),
    ("W<-H", 2, 1, 2, 6, "W(5,2)", 3),
])
def test_m1_rows(kind, p, f, b, d, label, m):
    c = build_M1(m1_form(kind, p, f, b, d))
    assert c.space.label == label and c.predicted_m == m
    assert c.pointset.size == c.predicted_size()
    assert verify(c.pointset).ovoid_m() == m


def test_m1_condition_violation():
    with pytest.raises(PreconditionError):
        build_M1(m1_form("Q-<-Q-", 2, 1, 2, 4))


def test_qq_tset_tiles_complement_of_m1():
    c = TSetContext("QQ", 2, 1, 3)
    pieces = [build_tset_pointset(make_tset(c, [x]), 12) for x in trace_zero_candidates(c)]
    m1 = build_M1(pieces[0].space.form).pointset
    union = m1
    for piece in pieces:
        assert not (piece.pointset.mask & union.mask).any()
        union = union.union(piece.pointset)
    assert union.size == m1.space.num_points
    full = build_tset_pointset(search(c, 3)[0], 12)
    assert full.pointset == m1.complement()
    assert full.pointset.size == 1560


def test_m2_identity():
    m2 = build_M2(2, 1, 8)
    assert m2.pointset.size == 51
    c = TSetContext("QQ", 2, 1, 4)
    orbit = next(frobenius_orbit_tset(c, g) for g in trace_zero_candidates(c)
                 if frobenius_orbit_tset(c, g).size == 4)
    built = build_tset_pointset(orbit, 8, strict=False)
    assert built.pointset == m2.pointset.complement()
    with pytest.raises(PreconditionError):
        build_tset_pointset(orbit, 8)


def test_trace_fibre_size():
    t = field_create(2, 8)
    assert sum(t.rel_trace(x, 4) == 0 for x in range(t.order)) == 16


def test_hermitian_count():
    assert hermitian_level_count(2, 1, 2, 6) == (36, 36)
    got, want = hermitian_level_count(3, 1, 2, 6, value=2)
    assert got == want


def test_classical_pair():
    a, b = classical_pair(8, 2)
    assert (a.pointset.size, b.pointset.size) == (119, 136)
    assert (a.predicted_m, b.predicted_m) == (7, 8)
    assert not (a.pointset.mask & b.pointset.mask).any()
    with pytest.raises(PreconditionError):
        classical_pair(8, 3)


@pytest.mark.parametrize("n,p,dim,label", [(8, 3, 7, "Q(6,3)"), (9, 3, 7, "Q(6,3)"),
                                           (5, 5, 3, "Q(2,5)"), (8, 2, 6, None), (7, 2, 6, None)])
def test_fully_deleted_dimensions(n, p, dim, label):
    d, form, gens = fully_deleted_pointset_inputs(n, p)
    assert d == dim == form.dim
    if label:
        assert form.label() == label
    assert len(gens) == 2 and all(g.shape == (dim, dim) for g in gens)


def test_fully_deleted_degenerate():
    with pytest.raises(PreconditionError):
        fully_deleted_pointset_inputs(6, 2)
    with pytest.raises(PreconditionError):
        fully_deleted_pointset_inputs(4, 3)


def test_alternating_generators_are_even():
    def parity(perm):
        seen, sign = set(), 0
        for i in range(len(perm)):
            j, length = i, 0
            while j not in seen:
                seen.add(j)
                j = perm[j]
                length += 1
            if length:
                sign += length - 1
        return sign % 2
    for n in range(5, 11):
        assert all(parity(g) == 0 for g in alternating_generators(n))


def test_fully_deleted_form_is_invariant():
    from movoids.linalg import normalized_vectors
    _, form, gens = fully_deleted_pointset_inputs(8, 3)
    x = normalized_vectors(3, 7)
    for g in gens:
        y = (x @ g) % 3
        assert (form.evaluate_many(x) == form.evaluate_many(y)).all()
