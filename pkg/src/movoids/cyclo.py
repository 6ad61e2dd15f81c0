"""Exact elements of Z[zeta_p] in the basis 1, zeta, ..., zeta^(p-2)."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .numtheory import is_prime


@dataclass(frozen=True)
class CycloInt:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != max(self.p - 1, 1):
            raise PreconditionError("wrong coefficient count")

    @classmethod
    def zero(cls, p: int) -> "CycloInt":
        return cls(p, (0,) * max(p - 1, 1))

    @classmethod
    def from_int(cls, p: int, n: int) -> "CycloInt":
        return cls(p, (n,) + (0,) * (max(p - 1, 1) - 1))

    @classmethod
    def from_counts(cls, p: int, counts) -> "CycloInt":
        """sum_k counts[k] zeta^k, reduced with zeta^(p-1) = -(1 + ... + zeta^(p-2))."""
        if not is_prime(p):
            raise PreconditionError(f"{p} is not prime")
        counts = [int(c) for c in counts]
        if len(counts) != p:
            raise PreconditionError(f"need {p} counts")
        top = counts[p - 1]
        if p == 2:
            return cls(2, (counts[0] - top,))
        return cls(p, tuple(c - top for c in counts[:p - 1]))

    @classmethod
    def zeta_power(cls, p: int, k: int) -> "CycloInt":
        counts = [0] * p
        counts[k % p] = 1
        return cls.from_counts(p, counts)

    def counts(self) -> list[int]:
        """A length-p representative: coefficients with a trailing zero."""
        if self.p == 2:
            return [self.coeffs[0], 0]
        return list(self.coeffs) + [0]

    def _same(self, other):
        if isinstance(other, int):
            return CycloInt.from_int(self.p, other)
        if not isinstance(other, CycloInt) or other.p != self.p:
            raise PreconditionError("mismatched cyclotomic rings")
        return other

    def __add__(self, other):
        other = self._same(other)
        return CycloInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloInt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return self._same(other) - self

    def scale(self, n: int) -> "CycloInt":
        return CycloInt(self.p, tuple(n * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def as_integer(self) -> int:
        if any(self.coeffs[1:]):
            raise ArithmeticError(f"{self} is not a rational integer")
        return self.coeffs[0]

    def conjugate(self) -> "CycloInt":
        if self.p == 2:
            return self
        c = self.counts()
        return CycloInt.from_counts(self.p, [c[(-k) % self.p] for k in range(self.p)])

    def to_complex(self) -> complex:
        if self.p == 2:
            return complex(self.coeffs[0])
        w = cmath.exp(2j * math.pi / self.p)
        return sum(c * w ** k for k, c in enumerate(self.coeffs))

    def approx_abs(self) -> float:
        return abs(self.to_complex())

    def __str__(self):
        terms = [f"{c}*z^{k}" if k else str(c) for k, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


def embed_counts(p: int, counts) -> np.ndarray:
    """Complex values of sum_k counts[..., k] zeta^k, vectorised over leading axes."""
    counts = np.asarray(counts)
    w = np.exp(2j * np.pi * np.arange(p) / p)
    return counts @ w


def counts_are_integral(counts) -> np.ndarray:
    """True where a count vector represents a rational integer (entries 1..p-1 equal)."""
    counts = np.asarray(counts)
    return (counts[..., 1:] == counts[..., 1:2]).all(axis=-1)


def counts_to_integers(counts) -> np.ndarray:
    """Integer values of count vectors; raises if any is irrational."""
    counts = np.asarray(counts)
    if not counts_are_integral(counts).all():
        raise ArithmeticError("character sum is not a rational integer")
    return counts[..., 0] - counts[..., 1]
