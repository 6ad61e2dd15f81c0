"""Integer factorisation and primitive prime divisors of n^k - 1."""
from __future__ import annotations

import math
import random

# Miller-Rabin with these bases is exact below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_EXACT_LIMIT = 3_317_044_064_679_887_385_961_981
_MR_EXTRA = (43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)

TRIAL_LIMIT = 1 << 20
WIDTH_BITS = 128

_small_primes: list[int] = []


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i, v in enumerate(flags) if v]


def small_primes() -> list[int]:
    global _small_primes
    if not _small_primes:
        _small_primes = _sieve(TRIAL_LIMIT)
    return _small_primes


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES if n < _MR_EXACT_LIMIT else _MR_BASES + _MR_EXTRA
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorint(n: int) -> dict[int, int]:
    """Prime factorisation of a positive integer as {prime: exponent}."""
    if n < 1:
        raise ValueError("factorint needs a positive integer")
    out: dict[int, int] = {}
    for p in small_primes():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    rng = random.Random(0x5EED)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m, rng)
        stack.extend((d, m // d))
    return dict(sorted(out.items()))


def prime_divisors(n: int) -> list[int]:
    return list(factorint(n))


def multiplicative_order(n: int, r: int) -> int:
    """Order of n modulo the prime r."""
    if n % r == 0:
        raise ValueError("n is not a unit mod r")
    order = r - 1
    for s, e in factorint(r - 1).items():
        for _ in range(e):
            if pow(n, order // s, r) == 1:
                order //= s
            else:
                break
    return order


def primitive_part(n: int, k: int) -> int:
    """Largest divisor of n^k - 1 coprime to every n^i - 1 with 1 <= i < k.

    A prime r | n^k - 1 survives exactly when n has order k modulo r.
    """
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    if k * math.log2(n) >= WIDTH_BITS:
        raise OverflowError(f"{n}^{k} - 1 exceeds {WIDTH_BITS} bits")
    value = n ** k - 1
    out = 1
    for r, e in factorint(value).items():
        if multiplicative_order(n, r) == k:
            out *= r ** e
    return out


def has_primitive_prime_divisor(n: int, k: int) -> bool:
    return primitive_part(n, k) > 1
