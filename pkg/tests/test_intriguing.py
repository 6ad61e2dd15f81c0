import numpy as np
import pytest

from movoids.construct import build_M1, classical_pair, m1_form
from movoids.errors import PreconditionError
from movoids.forms import elliptic_quadratic_standard, symplectic_standard
from movoids.gf import field_create
from movoids.intriguing import (difference_movoid, movoid_intersections, tight_intersections, verify,
                                verify_by_charsum, verify_by_generators, verify_by_perp)
from movoids.polar import PointSet, PolarSpace


def test_h_values():
    sp = PolarSpace.of(symplectic_standard(field_create(3, 1), 1, 4))
    assert movoid_intersections(sp, 2) == (5, 8)
    sp = PolarSpace.of(elliptic_quadratic_standard(field_create(2, 1), 1, 8))
    assert movoid_intersections(sp, 3) == (19, 27)
    sp = PolarSpace.of(symplectic_standard(field_create(2, 1), 1, 6))
    assert tight_intersections(sp, 1) == (7, 3)


def test_classical_pair_all_methods():
    a, b = classical_pair(8, 2)
    for c, m in ((a, 7), (b, 8)):
        for method in ("perp", "generators", "charsum"):
            assert verify(c.pointset, method).ovoid_m() == m
    assert a.pointset.size + b.pointset.size == a.space.num_points


def test_small_classical_pair_is_elliptic_ovoid():
    a, b = classical_pair(4, 4)
    assert verify(a.pointset).ovoid_m() == 1
    assert verify(b.pointset).ovoid_m() == 4


def test_generator_is_one_tight():
    sp = PolarSpace.of(symplectic_standard(field_create(2, 1), 1, 6))
    g = sp.generator_matrix[0]
    v = verify_by_perp(PointSet.from_indices(sp, g))
    assert v.kind == "i_tight" and v.value == 1


def test_whole_space_and_empty():
    sp = PolarSpace.of(symplectic_standard(field_create(2, 1), 1, 4))
    full = PointSet(sp, np.ones(sp.num_points, dtype=bool))
    assert verify_by_perp(full).ovoid_m() == 3
    assert verify_by_perp(full.complement()).kind == "neither"


def test_witness_is_reported():
    c = build_M1(m1_form("Q-<-Q-", 2, 1, 2, 8))
    ps = c.pointset
    out_pt = int(np.nonzero(~ps.mask)[0][0])
    in_pt = int(ps.indices[0])
    mask = ps.mask.copy()
    mask[in_pt], mask[out_pt] = False, True
    bad = PointSet(ps.space, mask)
    for method in ("perp", "generators", "charsum"):
        v = verify(bad, method)
        assert v.kind == "neither" and v.witness


def test_rank_one_rejected():
    sp = PolarSpace.of(elliptic_quadratic_standard(field_create(2, 1), 1, 4))
    with pytest.raises(PreconditionError):
        verify_by_perp(PointSet.from_indices(sp, [0]))


def test_charsum_scope():
    from movoids.forms import hyperbolic_standard
    sp = PolarSpace.of(hyperbolic_standard(field_create(3, 1), 1, 6))
    with pytest.raises(PreconditionError):
        verify_by_charsum(PointSet.from_indices(sp, [0]))


def test_difference():
    a, b = classical_pair(8, 2)
    whole = a.pointset.union(b.pointset)
    diff, m = difference_movoid(whole, a.pointset, 15, 7)
    assert diff == b.pointset and m == 8
    assert verify_by_generators(diff).ovoid_m() == 8
