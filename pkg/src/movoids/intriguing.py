"""m-ovoids and i-tight sets, checked three independent ways.

perp:       counts |P^perp cap M| for every point P (the production check).
generators: counts |G cap M| over every generator G.
charsum:    evaluates psi_a(D), D = F_q^* . M, against its closed form.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cyclo import counts_to_integers
from .errors import PreconditionError
from .forms import polar_form
from .polar import PointSet, PolarSpace, _half_power, trace_pairing_histograms


@dataclass
class Verdict:
    kind: str  # "m_ovoid", "i_tight" or "neither"
    value: int | None = None
    witness: dict | None = None
    method: str = ""
    details: dict = field(default_factory=dict)

    @property
    def is_m_ovoid(self) -> bool:
        return self.kind == "m_ovoid"

    def ovoid_m(self):
        return self.value if self.kind == "m_ovoid" else None

    def to_json(self) -> dict:
        return {"kind": self.kind, "value": self.value, "witness": self.witness, "method": self.method}


def _require_rank(space: PolarSpace):
    if space.rank < 2:
        raise PreconditionError(f"{space.label} has rank 1; intriguing sets are not defined")


def movoid_intersections(space: PolarSpace, m: int) -> tuple[int, int]:
    tp = space.params["theta_prev"]
    return (m - 1) * tp + 1, m * tp


def tight_intersections(space: PolarSpace, i: int) -> tuple[int, int]:
    q, r = space.q, space.rank
    base = (q ** (r - 1) - 1) // (q - 1)
    return q ** (r - 1) + i * base, i * base


def _point_witness(space, idx, inside, observed, expected):
    return {"point": int(idx), "vector": space.vectors_enc[idx].tolist(), "in_set": bool(inside),
            "observed": int(observed), "expected": int(expected)}


def _first_deviation(space, mask, values, want_in, want_out):
    expected = np.where(mask, want_in, want_out)
    bad = np.nonzero(values != expected)[0]
    if len(bad) == 0:
        return None
    i = bad[0]
    return _point_witness(space, i, mask[i], values[i], expected[i])


def _size_witness(pointset, what):
    return {"size": pointset.size, "reason": f"size is not a multiple of {what}"}


def verify_by_perp(pointset: PointSet, threads: int = 1) -> Verdict:
    space = pointset.space
    _require_rank(space)
    n = pointset.size
    if n == 0:
        return Verdict("neither", witness={"size": 0, "reason": "empty set"}, method="perp")
    idx = pointset.indices
    if threads > 1:
        chunks = np.array_split(np.arange(space.num_points), threads)
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda rows: space.orth_block(rows, idx).sum(axis=1), chunks))
        counts = np.concatenate(parts)
    else:
        counts = space.perp_counts(idx)
    mask = pointset.mask
    witness = None
    theta = space.theta
    if n % theta == 0:
        m = n // theta
        h1, h2 = movoid_intersections(space, m)
        witness = _first_deviation(space, mask, counts, h1, h2)
        if witness is None:
            return Verdict("m_ovoid", m, method="perp", details={"h1": h1, "h2": h2})
    q, r = space.q, space.rank
    gen_size = (q ** r - 1) // (q - 1)
    if (n * (q - 1)) % (q ** r - 1) == 0:
        i = n // gen_size
        h1, h2 = tight_intersections(space, i)
        tw = _first_deviation(space, mask, counts, h1, h2)
        if tw is None:
            return Verdict("i_tight", i, method="perp", details={"h1": h1, "h2": h2})
        witness = witness or tw
    return Verdict("neither", witness=witness or _size_witness(pointset, f"theta_r = {theta}"),
                   method="perp")


def verify_by_generators(pointset: PointSet) -> Verdict:
    space = pointset.space
    _require_rank(space)
    gens = space.generator_matrix
    counts = pointset.mask[gens].sum(axis=1)
    if pointset.size == 0:
        return Verdict("neither", witness={"size": 0, "reason": "empty set"}, method="generators")
    bad = np.nonzero(counts != counts[0])[0]
    if len(bad) == 0:
        return Verdict("m_ovoid", int(counts[0]), method="generators")
    g = int(bad[0])
    return Verdict("neither", method="generators",
                   witness={"generator": g, "points": gens[g].tolist(),
                            "observed": int(counts[g]), "expected": int(counts[0])})


def charsum_expected(space: PolarSpace, m: int) -> tuple[int, int]:
    """psi_a(D) for a in D and for a outside D, when M is an m-ovoid."""
    q = space.q
    return -_half_power(q, space.d) + m * (q - 1), m * (q - 1)


def verify_by_charsum(pointset: PointSet) -> Verdict:
    space = pointset.space
    _require_rank(space)
    if not (space.kind in ("W", "Q-") or (space.kind == "H" and space.d % 2 == 1)):
        raise PreconditionError(f"character sum test needs W, Q- or H with odd d, got {space.label}")
    n = pointset.size
    if n == 0:
        return Verdict("neither", witness={"size": 0, "reason": "empty set"}, method="charsum")
    if n % space.theta:
        return Verdict("neither", witness=_size_witness(pointset, f"theta_r = {space.theta}"),
                       method="charsum")
    m = n // space.theta
    hist = trace_pairing_histograms(space, space.vectors, pointset.indices)
    values = counts_to_integers(hist)
    inside, outside = charsum_expected(space, m)
    witness = _first_deviation(space, pointset.mask, values, inside, outside)
    if witness is None:
        return Verdict("m_ovoid", m, method="charsum")
    return Verdict("neither", witness=witness, method="charsum")


VERIFIERS = {"perp": verify_by_perp, "generators": verify_by_generators, "charsum": verify_by_charsum}


def verify(pointset: PointSet, method: str = "perp", threads: int = 1) -> Verdict:
    if method not in VERIFIERS:
        raise PreconditionError(f"unknown method {method}")
    if method == "perp":
        return verify_by_perp(pointset, threads)
    return VERIFIERS[method](pointset)


def charsum_applicable(space: PolarSpace) -> bool:
    return space.kind in ("W", "Q-") or (space.kind == "H" and space.d % 2 == 1)


def difference_movoid(big: PointSet, small: PointSet, m: int, m_small: int) -> tuple[PointSet, int]:
    """M \\ M' for an m-ovoid M containing an m'-ovoid M'."""
    if not small.issubset(big):
        raise PreconditionError("the smaller set is not contained in the larger one")
    if m - m_small <= 0:
        raise PreconditionError("the difference is not a proper m-ovoid")
    return big.difference(small), m - m_small


def qminus_into_w(pointset: PointSet) -> PointSet:
    """The same vectors read as points of W(d-1, q), q even, via the polar form."""
    space = pointset.space
    if space.kind != "Q-" or space.q % 2:
        raise PreconditionError("needs an elliptic quadric over a field of even order")
    w = PolarSpace.of(polar_form(space.form))
    return PointSet.from_indices(w, w.from_encodings(space.vectors_enc[pointset.indices]))
