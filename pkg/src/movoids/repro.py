"""Bundled reproductions: each target runs a pipeline and compares with
the expected values recorded here."""
from __future__ import annotations

from itertools import combinations

from . import construct as C
from . import tsets as T
from .errors import PreconditionError
from .intriguing import charsum_applicable, verify
from .orbits import GeneratorSet, classify_orbit_unions, orbit_partition
from .polar import PolarSpace


def _qq_q2b3f1(threads):
    ctx = T.TSetContext("QQ", 2, 1, 3)
    found = T.search(ctx, 3, threads=threads)
    built = C.build_tset_pointset(found[0], 12)
    v = verify(built.pointset, "perp", threads)
    m1 = C.build_M1(built.space.form)
    return {"tsets_found": len(found), "space": built.space.label, "m": v.ovoid_m(),
            "equals_complement_of_M1": built.pointset == m1.pointset.complement()}


def _hh_q4b3(threads):
    ctx = T.TSetContext("HH", 2, 2, 3)
    found = T.search(ctx, 3, threads=threads)
    orbit_sets = {T.frobenius_orbit_tset(ctx, g).reps for g in ctx.domain if g}
    return {"nonempty": bool(found), "contains_frobenius_orbit": any(t.reps in orbit_sets for t in found),
            "predicted_m_d9": found[0].predicted_m(9) if found else None}


def _classical_w7q2(threads):
    a, b = C.classical_pair(8, 2)
    return {"m": [verify(x.pointset, "generators").ovoid_m() for x in (a, b)],
            "sizes": [a.pointset.size, b.pointset.size]}


def _fdm(n):
    def run(threads):
        dim, form, gens = C.fully_deleted_pointset_inputs(n, 3)
        space = PolarSpace.of(form)
        part = orbit_partition(space, GeneratorSet(form.tower, 1, gens))
        ms = sorted(v.ovoid_m() for _, v in classify_orbit_unions(part, 1, threads))
        return {"space": space.label, "orbit_sizes": part.orbit_sizes, "m": ms}
    return run


def _m1(kind, p, f, b, d):
    def run(threads):
        c = C.build_M1(C.m1_form(kind, p, f, b, d))
        methods = ["perp", "generators"] + (["charsum"] if charsum_applicable(c.space) else [])
        ms = {m: verify(c.pointset, m, threads).ovoid_m() for m in methods}
        return {"space": c.space.label, "m": sorted(set(ms.values()), key=str),
                "predicted_m": int(c.predicted_m)}
    return run


def _inversion(case, b, d):
    def run(threads):
        ctx = T.TSetContext(case, 2, 1, b)
        units = [x for x in ctx.domain if x]
        agree = True
        for k in range(1, len(units) + 1):
            for sub in combinations(units, k):
                ts = T.make_tset(ctx, sub)
                agree &= T.condition_holds(ts)[0] == T.inversion_condition(ts)
        built = C.build_tset_pointset(T.make_tset(ctx, [1]), d)
        v = verify(built.pointset, "perp", threads)
        return {"criterion_matches": agree, "space": built.space.label, "m": v.ovoid_m()}
    return run


def _hermitian_count(threads):
    got, want = C.hermitian_level_count(2, 1, 2, 6)
    return {"count": got, "formula": want}


def _m2_identity(threads):
    ctx = T.TSetContext("QQ", 2, 1, 4)
    orbit = next(T.frobenius_orbit_tset(ctx, g) for g in ctx.domain
                 if g and T.frobenius_orbit_tset(ctx, g).size == 4)
    built = C.build_tset_pointset(orbit, 8, strict=False)
    m2 = C.build_M2(2, 1, 8)
    return {"m2_size": m2.pointset.size, "complement_is_tset": built.pointset == m2.pointset.complement()}


MANIFEST = {
    "qq-q2b3f1": {
        "description": "QQ search at (p,b,f,|T|) = (2,3,1,3), 24-ovoid of Q-(11,2) equal to P minus M1",
        "expected": {"tsets_found": 1, "space": "Q-(11,2)", "m": 24, "equals_complement_of_M1": True},
        "run": _qq_q2b3f1},
    "hh-q4b3": {
        "description": "HH search at (p,b,f,|T|) = (2,3,2,3) finds a Frobenius orbit",
        "expected": {"nonempty": True, "contains_frobenius_orbit": True, "predicted_m_d9": 64},
        "run": _hh_q4b3},
    "classical-w7q2": {
        "description": "Q-(7,2) and its complement in W(7,2) by the generator count",
        "expected": {"m": [7, 8], "sizes": [119, 136]},
        "run": _classical_w7q2},
    "fdm-a8-q63": {
        "description": "A8 on the fully deleted module over GF(3)",
        "expected": {"space": "Q(6,3)", "orbit_sizes": [28, 56, 280], "m": [1, 2, 10]},
        "run": _fdm(8)},
    "fdm-a9-q63": {
        "description": "A9 on the fully deleted module over GF(3)",
        "expected": {"space": "Q(6,3)", "orbit_sizes": [84, 280], "m": [3, 10]},
        "run": _fdm(9)},
    "m1-qminus-q2b2d8": {
        "description": "M1 in Q-(7,2) from Q-(3,4)",
        "expected": {"space": "Q-(7,2)", "m": [3], "predicted_m": 3},
        "run": _m1("Q-<-Q-", 2, 1, 2, 8)},
    "m1-w-from-h-q3b2d6": {
        "description": "M1 in W(5,3) from H(2,9)",
        "expected": {"space": "W(5,3)", "m": [4], "predicted_m": 4},
        "run": _m1("W<-H", 3, 1, 2, 6)},
    "m1-qplus-q3b2d6": {
        "description": "M1 in Q+(5,3) from Q(2,9)",
        "expected": {"space": "Q+(5,3)", "m": [4], "predicted_m": 4},
        "run": _m1("Q+<-Q", 3, 1, 2, 6)},
    "ww-q2b2": {
        "description": "WW, q = 2, b = 2: condition iff T = T^-1; T = {1} in W(7,2)",
        "expected": {"criterion_matches": True, "space": "W(7,2)", "m": 4},
        "run": _inversion("WW", 2, 8)},
    "hw-q2b4": {
        "description": "HW, q = 2, b = 4, lambda = 1: condition iff T = T^-1; T = {1} in W(11,2)",
        "expected": {"criterion_matches": True, "space": "W(11,2)", "m": 16},
        "run": _inversion("HW", 4, 12)},
    "hermitian-count-q2b2d6": {
        "description": "#{x in GF(4)^3 : H'(x) = 1}",
        "expected": {"count": 36, "formula": 36},
        "run": _hermitian_count},
    "m2-identity-q2b4d8": {
        "description": "P minus M2 is the T-set of a size-4 Frobenius orbit at d = 8",
        "expected": {"m2_size": 51, "complement_is_tset": True},
        "run": _m2_identity},
}


def run_target(target: str, threads: int = 1) -> dict:
    if target not in MANIFEST:
        raise PreconditionError(f"unknown target {target}")
    entry = MANIFEST[target]
    observed = entry["run"](threads)
    return {"id": target, "passed": observed == entry["expected"],
            "observed": observed, "expected": entry["expected"]}
