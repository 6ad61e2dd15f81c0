import cmath
import math

import numpy as np
import pytest

from movoids.charsum import (hermitian_gauss_residual, hermitian_gauss_residual_all, kloosterman,
                             kloosterman_counts, psi, weil_bound_holds)
from movoids.cyclo import CycloInt, counts_to_integers
from movoids.gf import field_create


def brute_kloosterman(t, a1, a2):
    w = cmath.exp(2j * math.pi / t.p)
    total = 0
    for x in range(1, t.order):
        total += w ** t.abs_trace(t.add(t.mul(a1, x), t.mul(a2, t.inv(x))))
    return total


def test_known_values():
    t = field_create(2, 2)
    assert kloosterman(t, 1, 1).as_integer() == 3
    for p, n in [(2, 3), (3, 2), (5, 1), (7, 1)]:
        t = field_create(p, n)
        assert kloosterman(t, 0, 0).as_integer() == t.order - 1
        assert kloosterman(t, 1, 0).as_integer() == -1
        assert kloosterman(t, 0, 1).as_integer() == -1


@pytest.mark.parametrize("p,n", [(2, 4), (3, 2), (5, 1), (7, 1), (3, 3)])
def test_against_complex_brute_force(p, n):
    t = field_create(p, n)
    for a1 in range(0, t.order, 3):
        for a2 in range(1, t.order, 4):
            k = kloosterman(t, a1, a2)
            assert abs(k.to_complex() - brute_kloosterman(t, a1, a2)) < 1e-7


def test_counts_table_matches_scalar():
    t = field_create(3, 2)
    counts = kloosterman_counts(t, 2)
    for a1 in range(9):
        for a2 in range(9):
            assert CycloInt.from_counts(3, counts[a1, a2]) == kloosterman(t, a1, a2)


def test_weil_bound_and_symmetry():
    t = field_create(2, 6)
    vals = counts_to_integers(kloosterman_counts(t))
    assert vals[1:, 1:].max() <= 2 * 8 and vals[1:, 1:].min() >= -16
    assert (vals == vals.T).all()
    assert weil_bound_holds(kloosterman(t, 5, 9), 64)


def test_psi_values():
    t = field_create(3, 1)
    assert psi(t, 0).as_integer() == 1
    assert psi(t, 1).counts() == [0, 1, 0]


@pytest.mark.parametrize("p,n", [(2, 4), (3, 2), (2, 6)])
def test_gauss_residual_vanishes(p, n):
    t = field_create(p, n)
    for lam in range(1, t.order, 5):
        if not t.in_subfield(lam, n // 2):
            continue
        for a in range(0, t.order, 3):
            assert hermitian_gauss_residual(t, lam, a).is_zero()


def test_bulk_residual_agrees():
    t = field_create(3, 2)
    hist = hermitian_gauss_residual_all(t)
    assert (hist == hist[..., :1]).all()
