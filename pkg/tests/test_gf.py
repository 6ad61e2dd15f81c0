import numpy as np
import pytest
from hypothesis import given, strategies as st

from movoids.conway import CONWAY
from movoids.errors import PreconditionError
from movoids.gf import (FieldTower, default_modulus, field_create, is_irreducible, is_primitive,
                        least_primitive_polynomial)

SMALL = [(2, 4), (2, 6), (3, 4), (5, 2), (7, 2), (2, 8), (3, 3)]


def brute_mul(t, a, b):
    """Schoolbook polynomial product reduced by the modulus."""
    p, n = t.p, t.n
    da = [(a // p ** i) % p for i in range(n)]
    db = [(b // p ** i) % p for i in range(n)]
    prod = [0] * (2 * n)
    for i, x in enumerate(da):
        for j, y in enumerate(db):
            prod[i + j] = (prod[i + j] + x * y) % p
    mod = list(t.modulus)
    for k in range(2 * n - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i, m in enumerate(mod):
                prod[k - n + i] = (prod[k - n + i] - c * m) % p
    return sum(c * p ** i for i, c in enumerate(prod[:n]))


@pytest.mark.parametrize("p,n", SMALL)
def test_multiplication_against_schoolbook(p, n):
    t = field_create(p, n)
    rng = np.random.default_rng(1)
    for a, b in rng.integers(0, t.order, size=(200, 2)):
        assert t.mul(int(a), int(b)) == brute_mul(t, int(a), int(b))


@pytest.mark.parametrize("p,n", SMALL)
@given(data=st.data())
def test_field_axioms(p, n, data):
    t = field_create(p, n)
    el = st.integers(0, t.order - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert t.mul(a, t.add(b, c)) == t.add(t.mul(a, b), t.mul(a, c))
    assert t.add(a, t.neg(a)) == 0
    if a:
        assert t.mul(a, t.inv(a)) == 1
    assert t.frobenius(t.mul(a, b)) == t.mul(t.frobenius(a), t.frobenius(b))
    assert t.frobenius(a, n) == a


@pytest.mark.parametrize("p,n", [(2, 6), (3, 4), (2, 12), (5, 4)])
def test_trace_and_norm_land_in_subfield(p, n):
    t = field_create(p, n)
    for s in [d for d in range(1, n + 1) if n % d == 0]:
        for a in range(0, t.order, max(1, t.order // 97)):
            assert t.in_subfield(t.rel_trace(a, s), s)
            assert t.in_subfield(t.rel_norm(a, s), s)


def test_trace_is_surjective_with_equal_fibres():
    t = field_create(3, 4)
    counts = np.bincount([t.abs_trace(a) for a in range(t.order)], minlength=3)
    assert counts.tolist() == [27, 27, 27]


def test_subfield_structure():
    t = field_create(2, 6)
    for s, size in [(1, 2), (2, 4), (3, 8), (6, 64)]:
        els = t.subfield_elements(s)
        assert len(els) == size and els[0] == 0 and els[1] == 1
    assert set(t.subfield_elements(2)) & set(t.subfield_elements(3)) == {0, 1}


@pytest.mark.parametrize("p,n", [(p, n) for p in (2, 3, 5) for n in range(2, 13)
                                 if (p, n) in CONWAY and n <= 10 and p ** n <= 10 ** 6])
def test_conway_compatibility(p, n):
    """x^((p^n-1)/(p^m-1)) satisfies the Conway polynomial of degree m."""
    t = field_create(p, n)
    assert t.modulus == CONWAY[(p, n)]
    for m in range(1, n):
        if n % m:
            continue
        z = t.pow(p, (p ** n - 1) // (p ** m - 1))  # the encoding p is the root x
        coeffs = CONWAY[(p, m)]
        acc = 0
        for k, c in enumerate(coeffs):
            acc = t.add(acc, t.mul(c % p, t.pow(z, k)))
        assert acc == 0


def test_least_primitive_outside_conway_range():
    f = default_modulus(7, 3)
    assert is_primitive(f, 7) and is_irreducible(f, 7)
    assert f == least_primitive_polynomial(7, 3)


def test_vectorised_matches_scalar():
    t = field_create(2, 8)
    a = np.arange(t.order)
    b = (a * 37 + 11) % t.order
    assert t.vmul(a, b).tolist() == [t.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert t.vtrace(a, 2).tolist() == [t.rel_trace(int(x), 2) for x in a]


def test_json_roundtrip():
    t = field_create(3, 4)
    assert FieldTower.from_json(t.to_json()) == t


def test_bad_levels():
    t = field_create(2, 6)
    with pytest.raises(PreconditionError):
        t.subfield(4)
