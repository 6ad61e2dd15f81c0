"""Finite fields GF(p^n) with every subfield realised inside one top field.

Elements are plain ints: the polynomial sum c_i x^i is stored as sum c_i p^i.
When the field has at most 2^20 elements, log/antilog tables back both the
scalar operations and the numpy-vectorised ones.
"""
from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from .conway import CONWAY
from .errors import PreconditionError, ResourceCapError
from .numtheory import factorint, is_prime

MAX_DEGREE = 24
TABLE_LIMIT = 1 << 20
SUBFIELD_TABLE_LIMIT = 1 << 12


# polynomials over F_p as ascending coefficient lists

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, f, p):
    a = list(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(_trim(a)) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
    return a


def _pmulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, f, p)


def _ppowmod(a, e, f, p):
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return result


def _psub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _trim(_pmod(a, b, p))
    return a


def is_irreducible(f, p) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    f = _trim(list(f))
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p ** n, f, p), x, p):
        return False
    for r in factorint(n):
        h = _psub(_ppowmod(x, p ** (n // r), f, p), x, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return True


def is_primitive(f, p) -> bool:
    f = _trim(list(f))
    n = len(f) - 1
    if n < 1 or f[0] == 0:
        return False
    order = p ** n - 1
    x = [0, 1]
    if _ppowmod(x, order, f, p) != [1]:
        return False
    return all(_ppowmod(x, order // r, f, p) != [1] for r in factorint(order))


def least_primitive_polynomial(p: int, n: int) -> list[int]:
    """Monic primitive polynomial whose lower coefficients, read as the
    base-p integer sum c_i p^i, are least."""
    for code in range(1, p ** n):
        low = [(code // p ** i) % p for i in range(n)]
        if low[0] == 0:
            continue
        f = low + [1]
        if is_primitive(f, p):
            return f
    raise AssertionError("no primitive polynomial found")


def default_modulus(p: int, n: int) -> list[int]:
    if (p, n) in CONWAY:
        return list(CONWAY[(p, n)])
    return least_primitive_polynomial(p, n)


class FieldTower:
    """GF(p^n) together with all of its subfields."""

    def __init__(self, p: int, n: int, modulus=None):
        if not is_prime(p):
            raise PreconditionError(f"{p} is not prime")
        if not 1 <= n <= MAX_DEGREE:
            raise PreconditionError(f"degree must lie in 1..{MAX_DEGREE}")
        if p ** n > 1 << 64:
            raise PreconditionError("field too large")
        if modulus is None:
            modulus = default_modulus(p, n)
        modulus = [int(c) % p for c in modulus]
        if len(modulus) != n + 1 or modulus[-1] != 1:
            raise PreconditionError("modulus must be monic of degree n")
        if not is_irreducible(modulus, p):
            raise PreconditionError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.n = n
        self.order = p ** n
        self.modulus = modulus
        self._pw = [p ** i for i in range(n)]
        self.has_tables = self.order <= TABLE_LIMIT
        self._subfields: dict[int, Subfield] = {}
        self.gen = self._find_generator()
        if self.has_tables:
            self._build_tables()

    # -- construction --------------------------------------------------

    def _digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.n):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def _from_digits(self, d) -> int:
        return sum(int(c) * w for c, w in zip(d, self._pw))

    def _poly_mul(self, a: int, b: int) -> int:
        return self._from_digits(_pmulmod(_trim(self._digits(a)), _trim(self._digits(b)), self.modulus, self.p))

    def _poly_pow(self, a: int, e: int) -> int:
        return self._from_digits(_ppowmod(_trim(self._digits(a)), e, self.modulus, self.p))

    def _find_generator(self) -> int:
        x = self._from_digits(_pmod([0, 1], self.modulus, self.p))
        if is_primitive(self.modulus, self.p):
            return x
        order = self.order - 1
        primes = list(factorint(order))
        for g in range(2, self.order):
            if all(self._poly_pow(g, order // r) != 1 for r in primes):
                return g
        raise AssertionError("no generator")

    def _build_tables(self):
        q1 = self.order - 1
        exp = np.zeros(2 * q1 + 1, dtype=np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        x = 1
        p, n = self.p, self.n
        g_digits = self._digits(self.gen)
        g_is_x = g_digits == [0, 1] + [0] * (n - 2) if n > 1 else False
        top = p ** (n - 1)
        for k in range(q1):
            exp[k] = x
            log[x] = k
            if g_is_x:
                # multiply by x: shift digits and reduce the overflow
                hi = x // top
                x = (x - hi * top) * p
                if hi:
                    x = self._from_digits(
                        (c - hi * m) % p for c, m in zip(self._digits(x), self.modulus))
            else:
                x = self._poly_mul(x, self.gen)
        if x != 1 or (log[1:] < 0).any():
            raise AssertionError("generator tables inconsistent")
        exp[q1:2 * q1] = exp[:q1]
        exp[2 * q1] = exp[0]
        self._exp = exp
        self._log = log
        self._exp_l = exp.tolist()
        self._log_l = log.tolist()
        if p != 2:
            powers = np.arange(self.order, dtype=np.int64)
            digits = np.empty((self.order, n), dtype=np.int64)
            for i in range(n):
                digits[:, i] = powers % p
                powers //= p
            self._digit_table = digits
            self._pw_np = np.array(self._pw, dtype=np.int64)

    # -- serialisation -------------------------------------------------

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, obj) -> "FieldTower":
        return field_create(obj["p"], obj["n"], obj.get("modulus"))

    def __repr__(self):
        return f"GF({self.p}^{self.n})"

    def __eq__(self, other):
        return isinstance(other, FieldTower) and (self.p, self.n, self.modulus) == (other.p, other.n, other.modulus)

    def __hash__(self):
        return hash((self.p, self.n, tuple(self.modulus)))

    # -- scalar arithmetic ---------------------------------------------

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise PreconditionError(f"{a} is not an element of {self}")
        return a

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        out, w = 0, 1
        while a or b:
            a, x = divmod(a, p)
            b, y = divmod(b, p)
            out += ((x + y) % p) * w
            w *= p
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        p = self.p
        out, w = 0, 1
        while a:
            a, x = divmod(a, p)
            out += ((-x) % p) * w
            w *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.has_tables:
            return self._exp_l[self._log_l[a] + self._log_l[b]]
        return self._poly_mul(a, b)

    def log(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("log of zero")
        if self.has_tables:
            return self._log_l[a]
        raise ResourceCapError("discrete log needs tables")

    def exp(self, k: int) -> int:
        if self.has_tables:
            return self._exp_l[k % (self.order - 1)]
        return self._poly_pow(self.gen, k % (self.order - 1))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero has no inverse")
            return 1 if e == 0 else 0
        q1 = self.order - 1
        if self.has_tables:
            return self._exp_l[(self._log_l[a] * e) % q1]
        return self._poly_pow(a, e % q1)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.pow(a, -1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def scalar(self, c: int) -> int:
        """Image of the integer c in the prime field."""
        return c % self.p

    def sum(self, xs) -> int:
        out = 0
        for x in xs:
            out = self.add(out, x)
        return out

    # -- Galois structure ----------------------------------------------

    def _check_level(self, s: int) -> int:
        if s < 1 or self.n % s:
            raise PreconditionError(f"{s} does not divide {self.n}")
        return s

    def frobenius(self, a: int, j: int = 1) -> int:
        return self.pow(a, self.p ** (j % self.n))

    def in_subfield(self, a: int, s: int) -> bool:
        return self.frobenius(a, s) == a

    def rel_trace(self, a: int, s: int, top: int | None = None) -> int:
        """Trace from GF(p^top) down to GF(p^s); top defaults to n."""
        top = self.n if top is None else top
        self._check_level(top)
        if top % s:
            raise PreconditionError(f"{s} does not divide {top}")
        out, x = 0, a
        for _ in range(top // s):
            out = self.add(out, x)
            x = self.frobenius(x, s)
        return out

    def rel_norm(self, a: int, s: int, top: int | None = None) -> int:
        top = self.n if top is None else top
        if top % s:
            raise PreconditionError(f"{s} does not divide {top}")
        if a == 0:
            return 0
        qs = self.p ** s
        return self.pow(a, (self.p ** top - 1) // (qs - 1))

    def abs_trace(self, a: int, level: int | None = None) -> int:
        """Absolute trace of a, regarded as an element of GF(p^level)."""
        return self.rel_trace(a, 1, level)

    def is_square(self, a: int, level: int | None = None) -> bool:
        level = self.n if level is None else level
        if self.p == 2 or a == 0:
            return True
        qs = self.p ** level
        return self.pow(a, (qs - 1) // 2) == 1

    def least_nonsquare(self, level: int | None = None) -> int:
        level = self.n if level is None else level
        if self.p == 2:
            raise PreconditionError("every element is a square in characteristic 2")
        for x in self.subfield(level).elements_list:
            if x and not self.is_square(x, level):
                return x
        raise AssertionError

    def squares_coset_reps(self, level: int | None = None) -> list[int]:
        level = self.n if level is None else level
        if self.p == 2:
            return [1]
        return [1, self.least_nonsquare(level)]

    def subfield(self, s: int) -> "Subfield":
        self._check_level(s)
        if s not in self._subfields:
            self._subfields[s] = Subfield(self, s)
        return self._subfields[s]

    def subfield_elements(self, s: int) -> list[int]:
        return self.subfield(s).elements_list

    def primitive_element(self, s: int) -> int:
        """A generator of GF(p^s)^*, namely gen^((p^n-1)/(p^s-1))."""
        self._check_level(s)
        return self.pow(self.gen, (self.order - 1) // (self.p ** s - 1))

    # -- vectorised arithmetic -----------------------------------------

    def _need_tables(self):
        if not self.has_tables:
            raise ResourceCapError(f"{self} is too large for vectorised arithmetic")

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        self._need_tables()
        d = (self._digit_table[a] + self._digit_table[b]) % self.p
        return d @ self._pw_np

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        self._need_tables()
        return ((-self._digit_table[a]) % self.p) @ self._pw_np

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        self._need_tables()
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la, lb = self._log[a], self._log[b]
        out = self._exp[np.maximum(la, 0) + np.maximum(lb, 0)]
        return np.where((la < 0) | (lb < 0), 0, out)

    def vpow(self, a, e: int):
        self._need_tables()
        a = np.asarray(a, dtype=np.int64)
        la = self._log[a]
        if e == 0:
            return np.ones_like(a)
        if e < 0 and (la < 0).any():
            raise ZeroDivisionError("zero has no inverse")
        out = self._exp[(np.maximum(la, 0) * (e % (self.order - 1))) % (self.order - 1)]
        return np.where(la < 0, 0, out)

    def vinv(self, a):
        return self.vpow(a, -1)

    def vfrobenius(self, a, j: int = 1):
        return self.vpow(a, self.p ** (j % self.n))

    def vtrace(self, a, s: int, top: int | None = None):
        top = self.n if top is None else top
        if top % s or self.n % top:
            raise PreconditionError(f"bad trace levels {s} | {top} | {self.n}")
        x = np.asarray(a, dtype=np.int64)
        out = np.zeros_like(x)
        for _ in range(top // s):
            out = self.vadd(out, x)
            x = self.vfrobenius(x, s)
        return out

    def vnorm(self, a, s: int, top: int | None = None):
        top = self.n if top is None else top
        return self.vpow(a, (self.p ** top - 1) // (self.p ** s - 1))

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Absolute trace of every element of the top field."""
        self._need_tables()
        return self.vtrace(np.arange(self.order), 1)


class Subfield:
    """GF(p^s) inside a tower, with local indices 0..q-1 ordered by encoding."""

    def __init__(self, tower: FieldTower, s: int):
        self.tower = tower
        self.level = s
        self.p = tower.p
        self.q = tower.p ** s
        q = self.q
        if tower.has_tables:
            step = (tower.order - 1) // (q - 1)
            elems = [0] + [tower._exp_l[k * step] for k in range(q - 1)]
        else:
            beta = tower.primitive_element(s)
            elems, x = [0], 1
            for _ in range(q - 1):
                elems.append(x)
                x = tower.mul(x, beta)
        self.elements_list = sorted(elems)
        self.elements = np.array(self.elements_list, dtype=np.int64)
        self._index = {e: i for i, e in enumerate(self.elements_list)}
        self.beta = tower.primitive_element(s)

    def __repr__(self):
        return f"GF({self.p}^{self.level}) in {self.tower}"

    def __contains__(self, a):
        return a in self._index

    def local(self, a: int) -> int:
        try:
            return self._index[a]
        except KeyError:
            raise PreconditionError(f"{a} is not in {self}") from None

    def vlocal(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.tower.has_tables:
            out = self.index_table[a]
            if (out < 0).any():
                raise PreconditionError(f"values outside {self}")
            return out
        return np.vectorize(self.local, otypes=[np.int64])(a)

    @cached_property
    def index_table(self) -> np.ndarray:
        t = np.full(self.tower.order, -1, dtype=np.int64)
        t[self.elements] = np.arange(self.q)
        return t

    def _local_table(self, op) -> np.ndarray:
        if self.q > SUBFIELD_TABLE_LIMIT:
            raise ResourceCapError(f"{self} too large for local tables")
        e = self.elements
        a = np.repeat(e, self.q)
        b = np.tile(e, self.q)
        return self.vlocal(op(a, b)).reshape(self.q, self.q)

    @cached_property
    def add_table(self) -> np.ndarray:
        return self._local_table(self.tower.vadd)

    @cached_property
    def mul_table(self) -> np.ndarray:
        return self._local_table(self.tower.vmul)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self.vlocal(self.tower.vneg(self.elements))

    @cached_property
    def inv_table(self) -> np.ndarray:
        out = np.zeros(self.q, dtype=np.int64)
        out[1:] = self.vlocal(self.tower.vinv(self.elements[1:]))
        return out

    @cached_property
    def basis(self) -> list[int]:
        """F_p-basis 1, beta, ..., beta^(s-1)."""
        return [self.tower.pow(self.beta, i) for i in range(self.level)]

    @cached_property
    def coords_table(self) -> np.ndarray:
        """F_p coordinates of each local element in the basis above."""
        p, s = self.p, self.level
        out = np.zeros((self.q, s), dtype=np.int64)
        for combo in itertools.product(range(p), repeat=s):
            x = 0
            for c, b in zip(combo, self.basis):
                if c:
                    x = self.tower.add(x, self.tower.mul(c, b))
            out[self._index[x]] = combo
        return out

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Absolute trace (to F_p) of each local element, as an int mod p."""
        return self.tower.vtrace(self.elements, 1, self.level)

    @cached_property
    def trace_gram(self) -> np.ndarray:
        """Tr(b_i b_j) for the F_p-basis b."""
        t = self.tower
        return np.array([[t.abs_trace(t.mul(x, y), self.level) for y in self.basis]
                         for x in self.basis], dtype=np.int64)

    @cached_property
    def trace_products(self) -> np.ndarray:
        """Tr(e_i e_j) for all local indices i, j (uint8)."""
        c = self.coords_table.astype(np.float64)
        m = c @ self.trace_gram.astype(np.float64) @ c.T
        return (np.rint(m).astype(np.int64) % self.p).astype(np.uint8)


_CACHE: dict = {}


def field_create(p: int, n: int, modulus=None) -> FieldTower:
    key = (p, n, None if modulus is None else tuple(int(c) for c in modulus))
    if key not in _CACHE:
        _CACHE[key] = FieldTower(p, n, modulus)
    return _CACHE[key]
