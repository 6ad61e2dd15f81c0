"""Command line interface: `movoids <command> ...`, JSON on stdout.

Exit codes: 0 success, 2 verification failed (witness printed),
3 precondition violated, 4 resource cap hit.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import construct as C
from . import tsets as T
from .charsum import kloosterman, weil_bound_holds
from .errors import PreconditionError, ResourceCapError, VerificationError
from .gf import field_create
from .intriguing import charsum_applicable, verify
from .orbits import GeneratorSet, classify_orbit_unions, orbit_partition
from .polar import POINT_CAP, PointSet, PolarSpace, parameters
from .forms import FormSpec

EXIT_OK, EXIT_VERIFY, EXIT_PRE, EXIT_CAP = 0, 2, 3, 4


class VerificationFailed(Exception):
    def __init__(self, payload):
        super().__init__("verification failed")
        self.payload = payload


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _space_spec(s: str):
    """Parse KIND(D-1,Q), e.g. W(5,2), Q-(7,2), H(4,4)."""
    s = s.replace(" ", "")
    kind, rest = s.split("(", 1)
    n, q = rest.rstrip(")").split(",")
    return kind, int(n) + 1, int(q)


# -- commands ------------------------------------------------------------------

def cmd_kloosterman(a):
    t = field_create(a.p, a.n)
    level = a.level or a.n
    val = kloosterman(t, a.a1, a.a2, level)
    q = a.p ** level
    try:
        exact = val.as_integer()
    except ArithmeticError:
        exact = None
    return {"field": f"GF({a.p}^{level})", "a1": a.a1, "a2": a.a2, "integer": exact,
            "zeta_coeffs": list(val.coeffs), "approx": round(val.to_complex().real, 12),
            "weil_bound_holds": weil_bound_holds(val, q) if a.a1 or a.a2 else None}


def _context(a):
    if not a.case:
        raise PreconditionError("--case is required")
    return T.TSetContext(a.case, a.p, a.f, a.b, a.lam)


def cmd_search(a):
    ctx = _context(a)
    found = T.search(ctx, a.size, cap=a.cap_candidates, threads=a.threads, mode=a.mode)
    out = []
    for ts in found:
        e = ctx.ovoid_exponent(a.d) if a.d else None
        row = {"reps": list(ts.reps), "closure_size": len(ts.elements),
               "predicted_m_formula": T.predicted_m_formula(ctx)}
        if e is not None:
            row["predicted_m"] = ts.predicted_m(a.d)
        out.append(row)
    return {"context": repr(ctx), "count": len(out), "tsets": out}


def _construction_json(c, verify_method=None, threads=1):
    out = c.to_json()
    out["space_label"] = c.space.label
    out["size"] = c.pointset.size
    if verify_method:
        v = verify(c.pointset, verify_method, threads)
        out["verdict"] = v.to_json()
        if c.predicted_m is not None and v.ovoid_m() != c.predicted_m:
            raise VerificationFailed(out)
    return out


def cmd_construct(a):
    r = a.recipe
    if r == "m1":
        c = C.build_M1(C.m1_form(a.kind, a.p, a.f, a.b, a.d), cap=a.cap_points)
        return _construction_json(c, a.verify, a.threads)
    if r == "m2":
        return _construction_json(C.build_M2(a.p, a.f, a.d, cap=a.cap_points), None)
    if r == "tset":
        ctx = _context(a)
        ts = T.make_tset(ctx, _ints(a.T))
        c = C.build_tset_pointset(ts, a.d, strict=not a.allow_small, cap=a.cap_points)
        return _construction_json(c, a.verify, a.threads)
    if r == "classical":
        pair = C.classical_pair(a.d, a.q, cap=a.cap_points)
        return {"pair": [_construction_json(c, a.verify, a.threads) for c in pair]}
    if r == "fdm":
        dim, form, gens = C.fully_deleted_pointset_inputs(a.n, a.p)
        return {"dim": dim, "form": form.to_json(), "space_label": form.label(),
                "generators": GeneratorSet(form.tower, 1, gens).to_json()}
    raise PreconditionError(f"unknown recipe {r}")


def cmd_verify(a):
    obj = _load(a.pointset)
    ps = PointSet.from_json(obj.get("pointset", obj), cap=a.cap_points)
    methods = ["perp", "generators"] + (["charsum"] if charsum_applicable(ps.space) else []) \
        if a.method == "all" else [a.method]
    verdicts = {m: verify(ps, m, a.threads).to_json() for m in methods}
    out = {"space": ps.space.label, "size": ps.size, "verdicts": verdicts}
    if any(v["kind"] == "neither" for v in verdicts.values()):
        raise VerificationFailed(out)
    return out


def cmd_orbits(a):
    form = FormSpec.from_json(_load(a.space))
    space = PolarSpace.of(form, a.cap_points)
    gens = GeneratorSet.from_json(_load(a.generators))
    part = orbit_partition(space, gens)
    out = part.to_json()
    if a.classify_unions:
        out["unions"] = [{"orbits": list(c), "verdict": v.to_json()}
                         for c, v in classify_orbit_unions(part, a.classify_unions, a.threads)]
    return out


def cmd_feasible(a):
    rep = _feasible(a)
    if not rep["passed"]:
        raise VerificationFailed(rep)
    return rep


def _feasible(a):
    if a.case:
        ctx = _context(a)
        ts = T.make_tset(ctx, _ints(a.T))
        return T.feasibility_filters(d=a.d, m=a.m, tset=ts, transitive=a.transitive)
    if not a.space or a.m is None:
        raise PreconditionError("give --space and --m, or --case and --T")
    kind, d, q = _space_spec(a.space)
    return T.feasibility_filters(kind, d, q, m=a.m)


def cmd_params(a):
    kind, d, q = _space_spec(a.space)
    par = parameters(kind, d, q)
    if par["r"] >= 2:
        tp = par["theta_prev"]
        par["m_ovoid_h"] = "h1 = (m-1)*%d + 1, h2 = m*%d" % (tp, tp)
    return par


def cmd_reproduce(a):
    from .repro import MANIFEST, run_target
    if a.list or not a.target:
        return {"targets": [{"id": k, "description": v["description"], "expected": v["expected"]}
                            for k, v in MANIFEST.items()]}
    rep = run_target(a.target, threads=a.threads)
    if not rep["passed"]:
        raise VerificationFailed(rep)
    return rep


COMMANDS = {"kloosterman": cmd_kloosterman, "search-tsets": cmd_search, "construct": cmd_construct,
            "verify": cmd_verify, "orbits": cmd_orbits, "feasible": cmd_feasible,
            "reproduce": cmd_reproduce, "params": cmd_params}


def _tset_args(sp):
    sp.add_argument("--case", choices=T.CASES)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--f", type=int, default=1)
    sp.add_argument("--b", type=int, default=2)
    sp.add_argument("--lam", type=int, default=None, help="lambda for HW (field encoding)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--cap-points", type=int, default=POINT_CAP)
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("--seed-free", action="store_true",
                        help="accepted for compatibility; nothing here uses randomness")
    ap = argparse.ArgumentParser(prog="movoids",
                                 description="m-ovoids of finite classical polar spaces")
    sub = ap.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kloosterman", parents=[common], help="exact Kloosterman sum")
    k.add_argument("--p", type=int, required=True)
    k.add_argument("--n", type=int, required=True, help="tower degree")
    k.add_argument("--level", type=int, default=None)
    k.add_argument("--a1", type=int, required=True)
    k.add_argument("--a2", type=int, required=True)

    s = sub.add_parser("search-tsets", parents=[common], help="search value sets T")
    _tset_args(s)
    s.add_argument("--size", type=int, required=True, help="number of cosets |T|")
    s.add_argument("--mode", choices=("exhaustive", "frobenius"), default="exhaustive")
    s.add_argument("--d", type=int, default=None, help="also report m for this dimension")
    s.add_argument("--cap-candidates", type=int, default=T.SEARCH_CAP)

    c = sub.add_parser("construct", parents=[common], help="build a point set")
    c.add_argument("--recipe", choices=("m1", "m2", "tset", "classical", "fdm"), required=True)
    c.add_argument("--kind", choices=("H<-H", "Q-<-Q-", "Q-<-H", "W<-H", "Q+<-Q"))
    _tset_args(c)
    c.add_argument("--d", type=int)
    c.add_argument("--q", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--T", default="", help="comma separated elements of calT")
    c.add_argument("--allow-small", action="store_true")
    c.add_argument("--verify", choices=("perp", "generators", "charsum"))

    v = sub.add_parser("verify", parents=[common], help="test a point set")
    v.add_argument("--pointset", required=True)
    v.add_argument("--method", choices=("perp", "generators", "charsum", "all"), default="perp")

    o = sub.add_parser("orbits", parents=[common], help="orbits of a matrix group")
    o.add_argument("--space", required=True, help="form JSON file")
    o.add_argument("--generators", required=True, help="generator JSON file")
    o.add_argument("--classify-unions", type=int, default=0)

    f = sub.add_parser("feasible", parents=[common], help="necessary conditions")
    f.add_argument("--space", help="e.g. W(5,2), Q-(7,2), H(4,4)")
    f.add_argument("--m", type=int)
    f.add_argument("--d", type=int)
    _tset_args(f)
    f.add_argument("--T", default="")
    f.add_argument("--transitive", action="store_true")

    p = sub.add_parser("params", parents=[common], help="rank, theta and point count")
    p.add_argument("--space", required=True)

    r = sub.add_parser("reproduce", parents=[common], help="run a bundled reproduction")
    r.add_argument("target", nargs="?")
    r.add_argument("--list", action="store_true")
    return ap


def _pretty(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            return pad + ", ".join(map(str, obj))
        return "\n".join(_pretty(x, indent) + ("\n" + pad + "-" if i < len(obj) - 1 else "")
                         for i, x in enumerate(obj))
    return pad + str(obj)


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def emit(obj, pretty: bool):
    if pretty:
        print(_pretty(json.loads(json.dumps(obj, default=_default))))
    else:
        print(json.dumps(obj, default=_default, sort_keys=True))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = COMMANDS[args.command](args)
    except VerificationFailed as e:
        emit(e.payload, args.pretty)
        return EXIT_VERIFY
    except VerificationError as e:
        emit({"error": "verification", "message": str(e)}, args.pretty)
        return EXIT_VERIFY
    except ResourceCapError as e:
        emit({"error": "resource_cap", "message": str(e)}, args.pretty)
        return EXIT_CAP
    except (PreconditionError, ValueError, KeyError, OSError) as e:
        emit({"error": "precondition", "message": str(e)}, args.pretty)
        return EXIT_PRE
    emit(out, args.pretty)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
