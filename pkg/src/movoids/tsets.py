"""Value sets T of a form on V' that cut out m-ovoids, and their search.

For a case X in {HH, QQ, HQ, HW, WW} the set M = {<v> : kappa'(v) in calT}
is an m-ovoid exactly when, for every u in the domain,

    sum_{t in calT} K(psi, t, arg(u)) = C - |calT|  if u in calT,  -|calT| otherwise,

with C = |value field|.  calT is a union of cosets of a scalar group.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .charsum import kloosterman_counts
from .cyclo import counts_to_integers
from .errors import PreconditionError, ResourceCapError
from .gf import FieldTower, field_create
from .numtheory import is_prime

CASES = ("HH", "QQ", "HQ", "HW", "WW")
SEARCH_CAP = 1 << 24
TABLE_CELL_CAP = 1 << 26


class TSetContext:
    def __init__(self, case: str, p: int, f: int, b: int, lam: int | None = None):
        if case not in CASES:
            raise PreconditionError(f"unknown case {case}")
        if not is_prime(p) or f < 1 or b < 1:
            raise PreconditionError("bad (p, f, b)")
        if case == "HH" and (f % 2 or b % 2 == 0 or b < 3):
            raise PreconditionError("HH needs f even and b odd, b >= 3")
        if case == "QQ" and b < 2:
            raise PreconditionError("QQ needs b >= 2")
        if case in ("HQ", "HW") and b % 2:
            raise PreconditionError(f"{case} needs b even")
        if case == "WW" and (p != 2 or b < 2):
            raise PreconditionError("WW needs q even and b >= 2")
        self.case = case
        self.p, self.f, self.b = p, f, b
        self.q = p ** f
        self.tower: FieldTower = field_create(p, b * f)
        t = self.tower
        half = case in ("HH", "HQ", "HW")
        self.value_level = b * f // 2 if half else b * f
        self.group_level = f // 2 if case == "HH" else f
        self.trace_level = {"HH": f // 2, "QQ": f, "HQ": f}.get(case)
        self.constant = p ** self.value_level
        if case == "HW":
            big = self.q ** (b // 2)
            if lam is None:
                lam = next(x for x in t.subfield_elements(b * f) if x and t.add(t.pow(x, big), x) == 0)
            if lam == 0 or t.add(t.pow(lam, big), lam) != 0:
                raise PreconditionError("lambda must satisfy lam^(q^(b/2)) + lam = 0, lam != 0")
            self.arg_scale = t.neg(t.mul(lam, lam))
        elif lam is not None:
            raise PreconditionError(f"case {case} takes no lambda")
        else:
            self.arg_scale = 1
        self.lam = lam
        self.epsilon = 1 if p == 2 else 0.5

    def __repr__(self):
        return f"TSetContext({self.case}, p={self.p}, f={self.f}, b={self.b}, lam={self.lam})"

    def key(self) -> tuple:
        return (self.case, self.p, self.f, self.b, self.lam)

    # -- structure -----------------------------------------------------

    @cached_property
    def value_field(self):
        return self.tower.subfield(self.value_level)

    @cached_property
    def group(self) -> list[int]:
        """The scalar group calT is invariant under."""
        t = self.tower
        nz = t.subfield_elements(self.group_level)[1:]
        if self.case == "HH" or self.p == 2:
            return nz
        return sorted({t.mul(x, x) for x in nz})

    @cached_property
    def domain(self) -> list[int]:
        """Elements u where the condition is imposed (value field or trace-zero part)."""
        t = self.tower
        elems = self.value_field.elements_list
        if self.trace_level is None:
            return elems
        return [x for x in elems if t.rel_trace(x, self.trace_level, self.value_level) == 0]

    @cached_property
    def cosets(self) -> list[tuple[int, ...]]:
        """Partition of the nonzero domain into group cosets, ordered by least element."""
        t = self.tower
        seen, out = set(), []
        for x in self.domain:
            if x == 0 or x in seen:
                continue
            c = tuple(sorted({t.mul(g, x) for g in self.group}))
            seen.update(c)
            out.append(c)
        return sorted(out)

    @cached_property
    def coset_of(self) -> dict[int, int]:
        return {x: i for i, c in enumerate(self.cosets) for x in c}

    def arg(self, u: int) -> int:
        return self.tower.mul(self.arg_scale, u)

    @cached_property
    def symmetries(self) -> list:
        """Maps x -> c x^(p^j) that carry solutions to solutions.

        Frobenius powers must fix the twist -lam^2; scalars c range over
        F_q^* modulo the group (only when F_q lies in the value field).
        """
        t = self.tower
        vl = self.value_level
        js = [j for j in range(vl) if t.frobenius(self.arg_scale, j) == self.arg_scale]
        scalars = [1]
        if self.case != "HH" and self.p != 2 and vl % self.f == 0:
            scalars.append(t.least_nonsquare(self.f))
        return [(c, j) for c in scalars for j in js]

    def apply(self, sym, x: int) -> int:
        c, j = sym
        return self.tower.mul(c, self.tower.frobenius(x, j))

    @cached_property
    def coset_perms(self) -> np.ndarray:
        """Action of each symmetry on coset indices."""
        out = []
        for s in self.symmetries:
            out.append([self.coset_of[self.apply(s, c[0])] for c in self.cosets])
        return np.array(out, dtype=np.int64)

    # -- Kloosterman data ----------------------------------------------

    @cached_property
    def _arg_cols(self) -> np.ndarray:
        vf = self.value_field
        return vf.vlocal(self.tower.vmul(self.arg_scale, np.array(self.domain, dtype=np.int64)))

    @cached_property
    def coset_table(self) -> np.ndarray:
        """Histogram of sum_{t in coset} K(t, arg(u)), shape (cosets, domain, p)."""
        n_el = sum(len(c) for c in self.cosets)
        if n_el * len(self.domain) * self.p > TABLE_CELL_CAP:
            raise ResourceCapError("Kloosterman table too large for this context")
        vf = self.value_field
        out = np.zeros((len(self.cosets), len(self.domain), self.p), dtype=np.int64)
        for i, c in enumerate(self.cosets):
            rows = vf.vlocal(np.array(c, dtype=np.int64))
            out[i] = kloosterman_counts(self.tower, self.value_level, rows, self._arg_cols).sum(axis=0)
        return out

    def sums_for(self, elements) -> np.ndarray:
        """Integer values sum_{t in calT} K(t, arg(u)) for u in the domain."""
        vf = self.value_field
        rows = vf.vlocal(np.array(sorted(elements), dtype=np.int64))
        if len(rows) == 0:
            return np.zeros(len(self.domain), dtype=np.int64)
        hist = kloosterman_counts(self.tower, self.value_level, rows, self._arg_cols).sum(axis=0)
        return counts_to_integers(hist)

    def expected_sums(self, elements) -> np.ndarray:
        s = set(elements)
        n = len(s)
        return np.array([self.constant - n if u in s else -n for u in self.domain], dtype=np.int64)

    # -- sizes ---------------------------------------------------------

    def ovoid_exponent(self, d: int) -> int:
        """Exponent e with m = |calT| / (q - 1) * q^e."""
        if self.case in ("HH", "HQ", "HW"):
            return (d - self.b) // 2
        return d // 2 - self.b

    def check_dimension(self, d: int, strict: bool = True):
        b = self.b
        if d % b:
            raise PreconditionError(f"b = {b} must divide d = {d}")
        n1 = d // b
        if self.case == "HH":
            ok = d % 2 == 1 and n1 >= 3
        elif self.case in ("QQ", "WW"):
            ok = n1 % 2 == 0 and n1 >= (4 if strict else 2)
        else:
            ok = n1 % 2 == 1 and n1 >= 3
        if not ok:
            raise PreconditionError(f"d = {d} is not admissible for {self.case} with b = {b}")


@dataclass(frozen=True)
class TSet:
    context: TSetContext
    reps: tuple[int, ...]

    @cached_property
    def elements(self) -> frozenset:
        t = self.context.tower
        return frozenset(t.mul(g, r) for r in self.reps for g in self.context.group)

    @property
    def closure(self) -> frozenset:
        return self.elements

    @property
    def size(self) -> int:
        return len(self.reps)

    def __hash__(self):
        return hash((self.context.key(), self.reps))

    def __eq__(self, other):
        return isinstance(other, TSet) and other.context.key() == self.context.key() and other.reps == self.reps

    def to_json(self) -> dict:
        c = self.context
        return {"case": c.case, "p": c.p, "f": c.f, "b": c.b, "lam": c.lam,
                "T": list(self.reps), "elements": sorted(self.elements)}

    def predicted_m(self, d: int) -> int:
        c = self.context
        n = len(self.elements)
        e = c.ovoid_exponent(d)
        num = n * c.q ** e
        if num % (c.q - 1):
            raise PreconditionError("predicted m is not an integer")
        return num // (c.q - 1)


def make_tset(context: TSetContext, elements) -> TSet:
    """TSet from any elements; they are closed under the group and reduced to coset reps."""
    reps = set()
    for x in elements:
        if x not in context.coset_of:
            raise PreconditionError(f"{x} is not a nonzero element of the domain")
        reps.add(context.cosets[context.coset_of[x]][0])
    return TSet(context, tuple(sorted(reps)))


def condition_holds(tset: TSet) -> tuple[bool, dict]:
    c = tset.context
    got = c.sums_for(tset.elements)
    want = c.expected_sums(tset.elements)
    bad = np.nonzero(got != want)[0]
    failing = [{"u": c.domain[i], "observed": int(got[i]), "expected": int(want[i])} for i in bad]
    return len(failing) == 0, {"checked": len(c.domain), "failing": failing}


def _canonical(combo, perms) -> bool:
    key = tuple(combo)
    for perm in perms:
        if tuple(sorted(perm[list(combo)])) < key:
            return False
    return True


def trace_zero_candidates(context: TSetContext) -> list[int]:
    if context.trace_level is None:
        raise PreconditionError(f"case {context.case} has no trace condition")
    return [x for x in context.domain if x]


def predicted_m_formula(context: TSetContext) -> str:
    if context.case in ("HH", "HQ", "HW"):
        return "|calT| / (q - 1) * q^((d - b)/2)"
    return "|calT| / (q - 1) * q^(d/2 - b)"


def _frobenius_search(context: TSetContext, size: int) -> list[TSet]:
    seen, out = set(), []
    for g in context.domain:
        if g == 0:
            continue
        ts = frobenius_orbit_tset(context, g)
        if ts.size != size or ts.reps in seen:
            continue
        seen.add(ts.reps)
        combo = tuple(sorted(context.coset_of[r] for r in ts.reps))
        if _canonical(combo, context.coset_perms) and condition_holds(ts)[0]:
            out.append(ts)
    return sorted(out, key=lambda t: t.reps)


def search(context: TSetContext, size: int, cap: int = SEARCH_CAP, threads: int = 1,
           mode: str = "exhaustive") -> list[TSet]:
    """All canonical TSets with `size` cosets satisfying the condition.

    mode "frobenius" only tries closures of single Frobenius orbits.
    """
    n = len(context.cosets)
    if size < 1 or size > n:
        return []
    if mode == "frobenius":
        return _frobenius_search(context, size)
    if mode != "exhaustive":
        raise PreconditionError(f"unknown search mode {mode}")
    total = math.comb(n, size)
    group_order = max(1, len({tuple(p) for p in context.coset_perms.tolist()}))
    if total / group_order > cap:
        raise ResourceCapError(f"about {total // group_order} candidates exceed the cap {cap}")
    table = context.coset_table
    perms = context.coset_perms
    n_el = len(context.cosets[0])
    const = context.constant
    dom_index = {u: i for i, u in enumerate(context.domain)}
    coset_cols = [np.array([dom_index[x] for x in c]) for c in context.cosets]

    def check(combo):
        hist = table[list(combo)].sum(axis=0)
        vals = counts_to_integers(hist)
        k = n_el * size
        want = np.full(len(vals), -k, dtype=np.int64)
        for i in combo:
            want[coset_cols[i]] = const - k
        return bool((vals == want).all())

    combos = [c for c in combinations(range(n), size) if _canonical(c, perms)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            flags = list(ex.map(check, combos))
    else:
        flags = [check(c) for c in combos]
    return [TSet(context, tuple(context.cosets[i][0] for i in c)) for c, ok in zip(combos, flags) if ok]


def frobenius_orbit_tset(context: TSetContext, gamma: int) -> TSet:
    """calT spanned by the Frobenius images gamma^(p^i) under the group."""
    t = context.tower
    orbit = {t.frobenius(gamma, i) for i in range(context.value_level)}
    return make_tset(context, orbit)


def inversion_condition(tset: TSet) -> bool:
    """The inversion criterion for (WW, b = 2) and (HW, b = 4).

    Odd q: calT = {lam^-2 t^-1}; even q (lam = 1): calT = {t^-1}.
    """
    c = tset.context
    t = c.tower
    el = tset.elements
    if c.case == "WW" and c.b == 2:
        return el == frozenset(t.inv(x) for x in el)
    if c.case == "HW" and c.b == 4:
        if c.p == 2:
            if c.lam != 1:
                raise PreconditionError("the even-q criterion is stated for lam = 1")
            return el == frozenset(t.inv(x) for x in el)
        fq = t.subfield_elements(c.f)[1:]
        if any(t.mul(a, x) not in el for a in fq for x in el):
            raise PreconditionError("the odd-q criterion needs an F_q^*-invariant calT")
        # u in calT iff (lam^2 u)^-1 in calT: the two trace-zero conditions
        # multiply to lam^2 u t in F_q^*
        twist = t.inv(t.mul(c.lam, c.lam))
        return el == frozenset(t.mul(twist, t.inv(x)) for x in el)
    raise PreconditionError("inversion criterion applies to (WW, b=2) and (HW, b=4) only")


# -- feasibility filters ----------------------------------------------------

def _isqrt_exact(n: int) -> int | None:
    s = math.isqrt(n)
    return s if s * s == n else None


def min_m_bound(kind: str, d: int, q: int):
    """(l, least integer m >= l) for H(2r,q), Q-(2r+1,q), W(2r-1,q); None otherwise."""
    if kind == "H" and d % 2 == 1:
        r = (d - 1) // 2
        s = _isqrt_exact(q)
        if s is None:
            raise PreconditionError("hermitian spaces need square q")
        x = q ** r * s
    elif kind == "Q-" and d % 2 == 0:
        r = (d - 2) // 2
        x = q ** (r + 1)
    elif kind == "W" and d % 2 == 0:
        r = d // 2
        x = q ** r
    else:
        return None
    ell = (-3 + math.sqrt(9 + 4 * x)) / (2 * q - 2)
    m = max(1, math.floor(ell))
    while (2 * (q - 1) * m + 3) ** 2 < 9 + 4 * x:
        m += 1
    while m > 1 and (2 * (q - 1) * (m - 1) + 3) ** 2 >= 9 + 4 * x:
        m -= 1
    return ell, m


def modular_condition(kind: str, d: int, q: int, m: int):
    """F(m) mod (q + 1) == 0 for Q-(2r+1, q); None for other spaces."""
    if kind != "Q-" or d % 2:
        return None
    r = (d - 2) // 2
    if r % 2:
        val = m * m - m
    elif q % 2 == 0:
        val = m * m
    else:
        val = m * m + (q + 1) // 2 * m
    return val % (q + 1) == 0


def tset_size_bound(context: TSetContext) -> float:
    q, b, eps = context.q, context.b, context.epsilon
    case = context.case
    if case == "HH":
        return q ** (b / 2) / ((q ** 0.5 - 1) * (2 * q ** (b / 4) + 1))
    if case in ("QQ", "WW"):
        return q ** b / (eps * (q - 1) * (2 * q ** (b / 2) + 1))
    return q ** (b / 2) / (eps * (q - 1) * (2 * q ** (b / 4) + 1))


def transitive_divisor(context: TSetContext) -> int:
    """|T| must divide this when a group is transitive on M."""
    bf = context.b * context.f
    odd = context.p != 2
    return {
        "HH": bf // 2,
        "QQ": bf * (2 if odd else 1),
        "HQ": bf // 2 * (2 if odd else 1),
        "HW": bf if odd else bf // 2,
        "WW": bf,
    }[context.case]


def feasibility_filters(kind: str | None = None, d: int | None = None, q: int | None = None,
                        m: int | None = None, tset: TSet | None = None, transitive: bool = False) -> dict:
    """Necessary conditions for an m-ovoid; each entry records what was tested."""
    report = []
    if tset is not None:
        c = tset.context
        if d is not None:
            kind = kind or {"HH": "H", "QQ": "Q-", "HQ": "Q-", "HW": "W", "WW": "W"}[c.case]
            q = q or c.q
            if m is None:
                try:
                    m = tset.predicted_m(d)
                    report.append({"name": "integral_m", "passed": True, "value": m})
                except PreconditionError:
                    report.append({"name": "integral_m", "passed": False})
        size = tset.size
        bound = tset_size_bound(c)
        report.append({"name": "tset_size_bound", "passed": size >= bound - 1e-9,
                       "value": size, "bound": bound})
        fq = c.tower.subfield_elements(c.f)[1:]
        invariant = c.value_level % c.f == 0 and all(
            c.tower.mul(a, x) in tset.elements for a in fq for x in tset.elements)
        if c.case == "HW" and c.b == 6 and invariant:
            need = c.q if c.p == 2 else 2 * c.q
            report.append({"name": "b6_invariant_bound", "passed": size >= need, "value": size, "bound": need})
        if c.case == "HW" and c.b == 4 and c.p != 2:
            t = c.tower
            sq = [t.is_square(x, c.value_level) for x in tset.elements]
            report.append({"name": "b4_mixed_squares", "passed": 0 < sum(sq) < len(sq)})
        if transitive:
            div = transitive_divisor(c)
            report.append({"name": "transitive_divides", "passed": div % size == 0,
                           "value": size, "divisor": div})
    if m is not None and kind is not None:
        mb = min_m_bound(kind, d, q)
        if mb is not None:
            ell, least = mb
            report.append({"name": "min_m_bound", "passed": m >= least, "value": m, "bound": ell,
                           "least": least})
        mc = modular_condition(kind, d, q, m)
        if mc is not None:
            report.append({"name": "modular_condition", "passed": mc, "value": m})
    return {"passed": all(r["passed"] for r in report), "filters": report}


def space_filter_table(q_values=(2, 3, 4, 5, 7, 8, 9), r_max: int = 4) -> list[dict]:
    """Minimum m and the admissible residues for every space kind, q and rank."""
    from .polar import parameters
    rows = []
    for q in q_values:
        for kind in ("W", "Q+", "Q-", "Q", "H"):
            for d in range(2, 2 * r_max + 3):
                try:
                    par = parameters(kind, d, q)
                except PreconditionError:
                    continue
                if par["r"] < 1 or par["r"] > r_max:
                    continue
                try:
                    mb = min_m_bound(kind, d, q)
                except PreconditionError:
                    continue
                max_m = (q ** par["r"] - 1) // (q - 1)
                admissible = [mm for mm in range(1, max_m + 1)
                              if modular_condition(kind, d, q, mm) in (None, True)
                              and (mb is None or mm >= mb[1])]
                rows.append({"kind": kind, "d": d, "q": q, "r": par["r"],
                             "least_m": None if mb is None else mb[1], "admissible_m": admissible})
    return rows
