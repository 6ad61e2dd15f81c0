from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from movoids.construct import build_tset_pointset
from movoids.errors import PreconditionError, ResourceCapError
from movoids.intriguing import verify_by_perp
from movoids.tsets import (TSetContext, condition_holds, feasibility_filters, frobenius_orbit_tset,
                           inversion_condition, make_tset, min_m_bound, modular_condition, search,
                           trace_zero_candidates, transitive_divisor)

CONTEXTS = [("QQ", 2, 1, 3, None), ("QQ", 2, 1, 4, None), ("HH", 2, 2, 3, None),
            ("HW", 3, 1, 2, None), ("HW", 3, 1, 4, None), ("WW", 2, 2, 2, None),
            ("HQ", 2, 1, 4, None), ("QQ", 3, 1, 3, None), ("HW", 2, 1, 4, 1)]


def ctx(case, p, f, b, lam=None):
    return TSetContext(case, p, f, b, lam)


def test_trace_zero_candidates():
    assert len(trace_zero_candidates(ctx("HH", 2, 2, 3))) == 3
    assert len(trace_zero_candidates(ctx("QQ", 2, 1, 3))) == 3
    with pytest.raises(PreconditionError):
        trace_zero_candidates(ctx("HW", 2, 1, 4))
    c = ctx("HW", 2, 1, 4)
    assert len(c.domain) == 4 and c.lam == 1


def test_context_preconditions():
    with pytest.raises(PreconditionError):
        ctx("HH", 2, 1, 3)
    with pytest.raises(PreconditionError):
        ctx("HQ", 2, 1, 3)
    with pytest.raises(PreconditionError):
        ctx("WW", 3, 1, 2)
    with pytest.raises(PreconditionError):
        ctx("QQ", 2, 1, 3, 1)
    with pytest.raises(PreconditionError):
        ctx("HW", 3, 1, 2, 1)


def test_qq_trace_zero_triple():
    c = ctx("QQ", 2, 1, 3)
    ok, rep = condition_holds(make_tset(c, trace_zero_candidates(c)))
    assert ok and rep["failing"] == []
    ok, rep = condition_holds(make_tset(c, trace_zero_candidates(c)[:1]))
    assert not ok and rep["failing"]
    assert {r["expected"] for r in rep["failing"]} <= {7, -1}


def test_search_qq_q2b3():
    c = ctx("QQ", 2, 1, 3)
    assert search(c, 1) == [] and search(c, 2) == []
    found = search(c, 3)
    assert len(found) == 1
    assert set(found[0].elements) == set(trace_zero_candidates(c))


def test_search_hh_q4b3():
    c = ctx("HH", 2, 2, 3)
    found = search(c, 3)
    assert found
    orbit = frobenius_orbit_tset(c, trace_zero_candidates(c)[0])
    assert orbit in found and condition_holds(orbit)[0]
    assert search(c, 3, mode="frobenius") == found


def test_search_cap():
    with pytest.raises(ResourceCapError):
        search(ctx("QQ", 2, 1, 4), 3, cap=1)


def test_frobenius_orbits():
    c = ctx("QQ", 2, 1, 3)
    g = trace_zero_candidates(c)[0]
    assert frobenius_orbit_tset(c, g).size == 3
    c = ctx("QQ", 2, 1, 4)
    sizes = {frobenius_orbit_tset(c, g).size for g in trace_zero_candidates(c)}
    assert 4 in sizes
    assert frobenius_orbit_tset(ctx("WW", 2, 1, 2), 1).size == 1
    with pytest.raises(PreconditionError):
        frobenius_orbit_tset(ctx("QQ", 2, 1, 3), 1)  # 1 has trace 1


def test_inversion_examples():
    c = ctx("WW", 2, 1, 2)
    t = c.tower
    assert inversion_condition(make_tset(c, [1]))
    omega = next(x for x in c.domain if x not in (0, 1))
    assert not inversion_condition(make_tset(c, [omega]))
    c = ctx("WW", 2, 2, 2)
    t = c.tower
    g = t.gen
    elems = [g, t.pow(g, 4), t.inv(g), t.inv(t.pow(g, 4))]
    assert inversion_condition(make_tset(c, elems))
    with pytest.raises(PreconditionError):
        inversion_condition(make_tset(ctx("QQ", 2, 1, 3), trace_zero_candidates(ctx("QQ", 2, 1, 3))))


@pytest.mark.parametrize("case,b", [("WW", 2), ("HW", 4)])
def test_inversion_criterion_q2(case, b):
    c = ctx(case, 2, 1, b)
    units = [x for x in c.domain if x]
    for k in range(1, len(units) + 1):
        for sub in combinations(units, k):
            ts = make_tset(c, sub)
            assert condition_holds(ts)[0] == inversion_condition(ts)


def test_hw_odd_q_b4_invariant_sets():
    """Passing F_q^*-invariant sets satisfy the twisted inversion and mix squares."""
    c = ctx("HW", 3, 1, 4)
    t = c.tower
    units = [x for x in c.domain if x]
    invariant = []
    for k in range(1, len(units)):
        for sub in combinations(units, k):
            s = set(sub)
            if all(t.neg(x) in s for x in s):
                invariant.append(sub)
    passing = 0
    for sub in invariant:
        ts = make_tset(c, sub)
        if condition_holds(ts)[0]:
            passing += 1
            assert inversion_condition(ts)
            sq = [t.is_square(x, 2) for x in ts.elements]
            assert 0 < sum(sq) < len(sq)
    assert passing > 0


def test_hw_odd_q_b4_twist_is_inverse_square():
    """At q = 3 the twist lam^2 picks the wrong sets; lam^-2 matches the condition."""
    c = ctx("HW", 3, 1, 4)
    t = c.tower
    lam2 = t.mul(c.lam, c.lam)
    passing = [make_tset(c, els) for els in ([1, 2, 36, 72], [37, 38, 73, 74])]
    for ts in passing:
        assert condition_holds(ts)[0] and inversion_condition(ts)
        assert ts.elements != frozenset(t.mul(lam2, t.inv(x)) for x in ts.elements)


def test_hw_q5_b4_criterion_exhaustive():
    c = ctx("HW", 5, 1, 4)
    t = c.tower
    fq = t.subfield_elements(1)[1:]
    classes, seen = [], set()
    for x in c.domain[1:]:
        if x not in seen:
            cl = frozenset(t.mul(a, x) for a in fq)
            seen |= cl
            classes.append(cl)
    for k in range(1, len(classes)):
        for sub in combinations(classes, k):
            ts = make_tset(c, set().union(*sub))
            assert condition_holds(ts)[0] == inversion_condition(ts)


def _random_subset(c, data):
    k = len(c.cosets)
    idx = data.draw(st.sets(st.integers(0, k - 1), min_size=1, max_size=k))
    return make_tset(c, [c.cosets[i][0] for i in sorted(idx)])


@pytest.mark.parametrize("spec", CONTEXTS)
@given(data=st.data())
def test_condition_invariant_under_symmetries(spec, data):
    c = ctx(*spec)
    ts = _random_subset(c, data)
    base = condition_holds(ts)[0]
    for sym in c.symmetries:
        img = make_tset(c, [c.apply(sym, x) for x in ts.elements])
        assert condition_holds(img)[0] == base


@pytest.mark.parametrize("spec", CONTEXTS)
@given(data=st.data())
def test_coset_table_matches_direct_sums(spec, data):
    import numpy as np
    from movoids.cyclo import counts_to_integers
    c = ctx(*spec)
    ts = _random_subset(c, data)
    idx = [c.coset_of[r] for r in ts.reps]
    direct = c.sums_for(ts.elements)
    assert (counts_to_integers(c.coset_table[idx].sum(axis=0)) == direct).all()


@pytest.mark.parametrize("spec,d", [(("WW", 2, 1, 2, None), 8), (("QQ", 2, 1, 3, None), 12),
                                    (("HQ", 2, 1, 4, None), 12), (("HW", 3, 1, 2, None), 6)])
def test_condition_iff_geometric_movoid(spec, d):
    c = ctx(*spec)
    units = [r[0] for r in c.cosets]
    for k in range(1, len(units) + 1):
        for sub in combinations(units, k):
            ts = make_tset(c, sub)
            built = build_tset_pointset(ts, d)
            v = verify_by_perp(built.pointset)
            holds = condition_holds(ts)[0]
            assert v.is_m_ovoid == holds
            if holds:
                assert v.value == ts.predicted_m(d) == built.predicted_m
                assert built.pointset.size == built.predicted_size()
                assert feasibility_filters(d=d, tset=ts)["passed"]


def test_min_m_bound_examples():
    ell, m = min_m_bound("W", 6, 2)
    assert abs(ell - 1.7015621187) < 1e-9 and m == 2
    assert not feasibility_filters("W", 6, 2, m=1)["passed"]
    assert modular_condition("Q-", 6, 3, 2) is True
    assert feasibility_filters("Q-", 6, 3, m=2)["passed"]
    assert min_m_bound("Q+", 6, 3) is None


def test_divisibility_filter():
    c = ctx("HW", 2, 1, 8)
    units = [r[0] for r in c.cosets][:5]
    rep = feasibility_filters(tset=make_tset(c, units), transitive=True)
    named = {f["name"]: f for f in rep["filters"]}
    assert transitive_divisor(c) == 4
    assert not named["transitive_divides"]["passed"]


def test_divisibility_is_transitive_only():
    """T = F_4^* passes the HW condition at q = 2, b = 4 but 3 does not divide 2."""
    c = ctx("HW", 2, 1, 4)
    ts = make_tset(c, [x for x in c.domain if x])
    assert condition_holds(ts)[0]
    assert feasibility_filters(tset=ts)["passed"]
    assert not feasibility_filters(tset=ts, transitive=True)["passed"]



def test_hw_q3_b4_geometry_sampled():
    """Sampled perp counts in W(11,3): {+-1, +-lam^2} is fixed by u -> lam^2/u
    yet is no m-ovoid, while a set fixed by u -> 1/(lam^2 u) is one."""
    import numpy as np
    c = ctx("HW", 3, 1, 4)
    t = c.tower
    lam2 = t.mul(c.lam, c.lam)
    good = make_tset(c, [1, 2, 36, 72])
    bad = make_tset(c, {1, t.neg(1), lam2, t.neg(lam2)})
    assert bad.elements == frozenset(t.mul(lam2, t.inv(x)) for x in bad.elements)
    rng = np.random.default_rng(0)
    for ts, expect in ((good, True), (bad, False)):
        built = build_tset_pointset(ts, 12)
        ps, sp = built.pointset, built.space
        m = int(built.predicted_m)
        tp = sp.params["theta_prev"]
        h1, h2 = (m - 1) * tp + 1, m * tp
        ins = rng.choice(ps.indices, 60, replace=False)
        outs = rng.choice(np.nonzero(~ps.mask)[0], 60, replace=False)
        cnt = sp.orth_block(np.concatenate([ins, outs]), ps.indices).sum(axis=1)
        consistent = bool((cnt[:60] == h1).all() and (cnt[60:] == h2).all())
        assert consistent is expect
        assert condition_holds(ts)[0] is expect
