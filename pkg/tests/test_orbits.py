import numpy as np
import pytest

from movoids.construct import fully_deleted_pointset_inputs
from movoids.errors import PreconditionError
from movoids.forms import quadratic_from_matrix, symplectic_standard
from movoids.gf import field_create
from movoids.intriguing import verify_by_perp
from movoids.orbits import (D8_A, F_D, F_Q, Q8_X, GeneratorSet, check_isometry,
                            classify_orbit_unions, extraspecial_w33_generators, matrix_order,
                            orbit_partition, tensor_form, tensor_matrix)
from movoids.polar import PointSet, PolarSpace

T3 = field_create(3, 1)


def perm_matrix(s):
    m = np.zeros((len(s), len(s)), dtype=np.int64)
    for i, j in enumerate(s):
        m[i, j] = 1
    return m


def brute_perm_orbits(space, perms):
    """Orbits from permuting coordinates directly, then rescaling by hand."""
    q = space.q
    key = {tuple(v): i for i, v in enumerate(space.vectors.tolist())}

    def norm(v):
        lead = next(x for x in v if x)
        inv = pow(lead, q - 2, q)
        return tuple(x * inv % q for x in v)

    seen, sizes = set(), []
    for start in range(space.num_points):
        if start in seen:
            continue
        stack, orbit = [start], {start}
        while stack:
            v = space.vectors[stack.pop()].tolist()
            for s in perms:
                w = [0] * len(v)
                for i, j in enumerate(s):
                    w[j] = v[i]
                k = key[norm(w)]
                if k not in orbit:
                    orbit.add(k)
                    stack.append(k)
        seen |= orbit
        sizes.append(len(orbit))
    return sorted(sizes)


def test_s5_on_parabolic_quadric():
    form = quadratic_from_matrix(T3, 1, np.eye(5, dtype=np.int64))
    sp = PolarSpace.of(form)
    assert sp.label == "Q(4,3)" and sp.num_points == 40
    perms = [[1, 0, 2, 3, 4], [1, 2, 3, 4, 0]]
    part = orbit_partition(sp, GeneratorSet(T3, 1, [perm_matrix(s) for s in perms]))
    assert part.orbit_sizes == brute_perm_orbits(sp, perms) == [10, 30]


def test_identity_gives_singletons():
    sp = PolarSpace.of(symplectic_standard(T3, 1, 4))
    part = orbit_partition(sp, GeneratorSet(T3, 1, [np.eye(4, dtype=np.int64)]))
    assert part.orbit_sizes == [1] * 40


def test_a8_orbits_and_unions():
    _, form, gens = fully_deleted_pointset_inputs(8, 3)
    sp = PolarSpace.of(form)
    part = orbit_partition(sp, GeneratorSet(T3, 1, gens))
    assert part.orbit_sizes == [28, 56, 280]
    res = classify_orbit_unions(part, 2)
    assert len(res) == 6
    singles = sorted(v.ovoid_m() for c, v in res if len(c) == 1)
    assert singles == [1, 2, 10]
    for combo, v in res:
        direct = verify_by_perp(PointSet(sp, np.isin(part.orbit_id, combo)))
        assert direct.kind == v.kind and direct.value == v.value


def test_order_independence():
    _, form, gens = fully_deleted_pointset_inputs(9, 3)
    sp = PolarSpace.of(form)
    a = orbit_partition(sp, GeneratorSet(T3, 1, gens))
    b = orbit_partition(sp, GeneratorSet(T3, 1, gens[::-1]))
    assert (a.orbit_id == b.orbit_id).all() and a.orbit_sizes == [84, 280]


def test_escaping_generator_reported():
    form = quadratic_from_matrix(T3, 1, np.eye(5, dtype=np.int64))
    sp = PolarSpace.of(form)
    g = np.eye(5, dtype=np.int64)
    g[0, 1] = 1
    with pytest.raises(PreconditionError, match="outside"):
        orbit_partition(sp, GeneratorSet(T3, 1, [g]))


def test_singular_generator_rejected():
    with pytest.raises(PreconditionError):
        GeneratorSet(T3, 1, [np.zeros((3, 3), dtype=np.int64)])


def test_generator_json_roundtrip():
    g = extraspecial_w33_generators(T3)
    back = GeneratorSet.from_json(g.to_json())
    assert all((x == y).all() for x, y in zip(g.matrices, back.matrices))


def test_tensor_basics():
    ident = np.eye(2, dtype=np.int64)
    assert (tensor_matrix(ident, ident, T3, 1) == np.eye(4, dtype=np.int64)).all()
    gram = tensor_matrix(F_D, F_Q, T3, 1)
    # basis e00, e01, e10, e11
    assert gram[0, 3] == T3.mul(F_D[0][1], F_Q[0][1])
    assert gram[0, 1] == T3.mul(F_D[0][0], F_Q[0][1])
    f = tensor_form(F_D, F_Q, T3, 1)
    assert f.kind == "symplectic" and f.label() == "W(3,3)"
    assert tensor_form(F_D, F_D, T3, 1).kind == "quadratic"


def test_dihedral_quaternion_product():
    """Each factor has order 4 and squares to -I, so the product has order 2."""
    assert matrix_order(D8_A, T3, 1) == 4 and matrix_order(Q8_X, T3, 1) == 4
    m = tensor_matrix(D8_A, Q8_X, T3, 1)
    assert matrix_order(m, T3, 1) == 2
    f = tensor_form(F_D, F_Q, T3, 1)
    assert check_isometry(f, GeneratorSet(T3, 1, [m]), None)


def test_extraspecial_group_on_w33():
    f = tensor_form(F_D, F_Q, T3, 1)
    g = extraspecial_w33_generators(T3)
    assert check_isometry(f, g, None)
    part = orbit_partition(PolarSpace.of(f), g)
    assert sum(part.orbit_sizes) == 40
