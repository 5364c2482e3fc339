"""Vilenkin group G_p: elements, the lambda map, norm, dilation and characters.

An element is a two-sided digit sequence with finitely many nonzero digits.
Position ``j`` contributes ``x_j * p**(-j-1)`` to ``lam(x)``, so negative
positions carry the integer part and nonnegative positions the fraction.
Sequences ending in an infinite tail of ``p-1`` digits are not representable;
``lambda_inv`` always returns the finite expansion.

Lambda coordinates are :class:`fractions.Fraction` values whose denominator
divides a power of ``p``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .scalars import BackendError, CRational, i_power


def check_p(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise ValueError(f"group parameter p must be an integer >= 2, got {p!r}")
    return int(p)


# ----------------------------------------------------------------------
# p-adic rationals
# ----------------------------------------------------------------------

def p_adic_exponent(q, p: int) -> int:
    """Smallest e >= 0 with q * p**e an integer.

    Raises ValueError when no such e exists (q has an infinite p-ary expansion).
    """
    q = Fraction(q)
    d = q.denominator
    rest = d
    while (g := math.gcd(rest, p)) > 1:
        rest //= g
    if rest != 1:
        raise ValueError(f"{q} has no finite base-{p} expansion")
    e, pe = 0, 1
    while pe % d:
        e += 1
        pe *= p
    return e


def is_p_adic(q, p: int) -> bool:
    try:
        return Fraction(q) >= 0 and p_adic_exponent(q, p) >= 0
    except ValueError:
        return False


def parse_fraction(s) -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise TypeError(f"expected an exact fraction string, got {s!r}")


# ----------------------------------------------------------------------
# group elements
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    p: int
    digits: tuple[tuple[int, int], ...] = ()  # sorted (position, nonzero digit)

    def __post_init__(self):
        check_p(self.p)
        last = None
        for pos, d in self.digits:
            if not 0 < d < self.p:
                raise ValueError(f"digit {d} at position {pos} not in 1..{self.p - 1}")
            if last is not None and pos <= last:
                raise ValueError("digit positions must be strictly increasing")
            last = pos

    @classmethod
    def from_digits(cls, p: int, digits: Mapping[int, int]) -> "GroupElement":
        items = sorted((int(j), int(d) % p) for j, d in digits.items())
        return cls(p, tuple((j, d) for j, d in items if d))

    @classmethod
    def zero(cls, p: int) -> "GroupElement":
        return cls(p)

    def digit_map(self) -> dict[int, int]:
        return dict(self.digits)

    def digit(self, j: int) -> int:
        for pos, d in self.digits:
            if pos == j:
                return d
        return 0

    def is_zero(self) -> bool:
        return not self.digits

    @property
    def N(self) -> int:
        """Position of the leading nonzero digit."""
        if not self.digits:
            raise ValueError("N(x) is undefined for the zero element")
        return self.digits[0][0]

    def _check(self, other: "GroupElement"):
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.p != self.p:
            raise ValueError(f"group mismatch: p={self.p} vs p={other.p}")
        return None

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if self._check(other) is NotImplemented:
            return NotImplemented
        acc = self.digit_map()
        for j, d in other.digits:
            acc[j] = (acc.get(j, 0) + d) % self.p
        return GroupElement.from_digits(self.p, acc)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.p, tuple((j, self.p - d) for j, d in self.digits))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def lam(self) -> Fraction:
        return lam(self)

    def __repr__(self):
        return f"GroupElement(p={self.p}, lam={lam(self)})"


def lam(x: GroupElement) -> Fraction:
    """lambda(x) = sum_j x_j p**(-j-1)."""
    p = x.p
    return sum((Fraction(d) * Fraction(p) ** (-j - 1) for j, d in x.digits), Fraction(0))


def lambda_inv(q, p: int) -> GroupElement:
    """The finite preimage of q under lambda."""
    p = check_p(p)
    q = Fraction(q)
    if q < 0:
        raise ValueError(f"lambda takes values in [0, inf); got {q}")
    e = p_adic_exponent(q, p)
    a = q.numerator * (p**e // q.denominator)
    digits = []
    t = 0
    while a:
        a, r = divmod(a, p)
        if r:
            digits.append((e - t - 1, r))
        t += 1
    digits.sort()
    return GroupElement(p, tuple(digits))


def add(x: GroupElement, y: GroupElement) -> GroupElement:
    return x + y


def sub(x: GroupElement, y: GroupElement) -> GroupElement:
    return x - y


def neg(x: GroupElement) -> GroupElement:
    return -x


def norm_G(x: GroupElement) -> Fraction:
    """p**(-N(x)), and 0 for the zero element."""
    if x.is_zero():
        return Fraction(0)
    return Fraction(x.p) ** (-x.N)


def dist_G(x: GroupElement, y: GroupElement) -> Fraction:
    return norm_G(x - y)


def dist_lambda(x: GroupElement, y: GroupElement) -> Fraction:
    return lam(x - y)


def dilate(x: GroupElement, k: int = 1) -> GroupElement:
    """D^k x, where (Dx)_j = x_{j+1}; lam scales by p**k."""
    return GroupElement(x.p, tuple((j - k, d) for j, d in x.digits))


def ball_index(q, p: int) -> int:
    """The s with p**s <= q < p**(s+1), for q > 0."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("ball_index needs a positive argument")
    s = 0
    pw = Fraction(1)
    while pw > q:
        pw /= p
        s -= 1
    while pw * p <= q:
        pw *= p
        s += 1
    return s


# ----------------------------------------------------------------------
# roots of unity and characters
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RootOfUnity:
    """exp(2 pi i exponent / order), held exactly."""

    order: int
    exponent: int = 0

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        object.__setattr__(self, "exponent", self.exponent % self.order)

    def _as_fraction(self) -> Fraction:
        return Fraction(self.exponent, self.order)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        if not isinstance(other, RootOfUnity):
            return NotImplemented
        n = math.lcm(self.order, other.order)
        return RootOfUnity(n, self.exponent * (n // self.order) + other.exponent * (n // other.order))

    def __pow__(self, k: int) -> "RootOfUnity":
        return RootOfUnity(self.order, self.exponent * k)

    def conjugate(self) -> "RootOfUnity":
        return RootOfUnity(self.order, -self.exponent)

    def __eq__(self, other):
        if isinstance(other, RootOfUnity):
            return self._as_fraction() == other._as_fraction()
        if other == 1:
            return self.exponent == 0
        if other == -1:
            return self._as_fraction() == Fraction(1, 2)
        return NotImplemented

    def __hash__(self):
        return hash(self._as_fraction())

    def is_one(self) -> bool:
        return self.exponent == 0

    def __complex__(self):
        if (4 * self.exponent) % self.order == 0:
            return complex(i_power(4 * self.exponent // self.order))
        return cmath.exp(2j * math.pi * self.exponent / self.order)

    def to_exact(self) -> CRational:
        """The value as a Gaussian rational; only quarter turns qualify."""
        if (4 * self.exponent) % self.order:
            raise BackendError(
                f"exp(2*pi*i*{self.exponent}/{self.order}) is not a Gaussian rational"
            )
        return i_power(4 * self.exponent // self.order)

    def value(self, backend: str):
        return self.to_exact() if backend == "exact" else complex(self)


def character(x: GroupElement, xi: GroupElement) -> RootOfUnity:
    """chi(x, xi) = exp(2 pi i / p * sum_j x_j xi_{-1-j})."""
    if x.p != xi.p:
        raise ValueError(f"group mismatch: p={x.p} vs p={xi.p}")
    other = xi.digit_map()
    s = sum(d * other.get(-1 - j, 0) for j, d in x.digits)
    return RootOfUnity(x.p, s)


def walsh(n: int, x: GroupElement) -> RootOfUnity:
    """Generalized Walsh function w_n(x) = chi(lambda^{-1}(n), x)."""
    if n < 0:
        raise ValueError("Walsh index must be nonnegative")
    return character(lambda_inv(n, x.p), x)


# ----------------------------------------------------------------------
# exact sums of roots of unity
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for k, bk in enumerate(b):
            a[i + k] -= c * bk
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return q


def _reduce_mod_monic(a: list, m: tuple[int, ...]) -> list:
    a = list(a)
    deg = len(m) - 1
    for i in range(len(a) - 1, deg - 1, -1):
        c = a[i]
        if c:
            for k in range(deg + 1):
                a[i - deg + k] -= c * m[k]
    return a[:deg]


def root_sum(terms: Iterable[tuple[object, RootOfUnity]]) -> tuple[int, tuple]:
    """Canonical form of sum c * root in Q(zeta_n).

    Returns (n, coefficients in the power basis 1, zeta, ..., zeta**(phi(n)-1)).
    Two sums are equal iff their canonical forms agree at a common n.
    """
    terms = list(terms)
    n = 1
    for _, r in terms:
        n = math.lcm(n, r.order)
    poly = [Fraction(0)] * n
    for c, r in terms:
        poly[(r.exponent * (n // r.order)) % n] += Fraction(c)
    return n, tuple(_reduce_mod_monic(poly, cyclotomic_poly(n)))


def root_sum_equals(terms: Iterable[tuple[object, RootOfUnity]], value) -> bool:
    """Exact test of sum c * root == value for a rational value."""
    terms = list(terms) + [(-Fraction(value), RootOfUnity(1, 0))]
    _, coeffs = root_sum(terms)
    return not any(coeffs)


# ----------------------------------------------------------------------
# digitwise arithmetic on cell indices
# ----------------------------------------------------------------------
# A cell index k at resolution m stands for lambda^{-1}(k p**-m); the group
# law on such points is digitwise addition of the base-p expansions of k.

def digit_add(a: int, b: int, p: int) -> int:
    out, place = 0, 1
    while a or b:
        a, da = divmod(a, p)
        b, db = divmod(b, p)
        out += ((da + db) % p) * place
        place *= p
    return out


def digit_neg(a: int, p: int) -> int:
    out, place = 0, 1
    while a:
        a, da = divmod(a, p)
        out += ((p - da) % p) * place
        place *= p
    return out


def digit_sub(a: int, b: int, p: int) -> int:
    return digit_add(a, digit_neg(b, p), p)


def digits_of(k: int, p: int, n: int) -> list[int]:
    """Base-p digits of k, least significant first, padded to n."""
    out = []
    for _ in range(n):
        k, d = divmod(k, p)
        out.append(d)
    if k:
        raise ValueError("index too large for the requested width")
    return out


def digit_reverse(k: int, p: int, n: int) -> int:
    out = 0
    for d in digits_of(k, p, n):
        out = out * p + d
    return out


def digit_add_array(a: np.ndarray, b, p: int, n: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    place = 1
    for _ in range(n):
        out += ((a // place + b // place) % p) * place
        place *= p
    return out


def digit_neg_array(a: np.ndarray, p: int, n: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros_like(a)
    place = 1
    for _ in range(n):
        out += ((p - (a // place) % p) % p) * place
        place *= p
    return out


@lru_cache(maxsize=64)
def digit_reverse_table(p: int, n: int) -> np.ndarray:
    k = np.arange(p**n, dtype=np.int64)
    out = np.zeros_like(k)
    for _ in range(n):
        out = out * p + k % p
        k = k // p
    out.setflags(write=False)
    return out


def walsh_exponent(k: int, s: int, p: int, n: int) -> int:
    """Exponent e with w_k(lambda^{-1}(s / p**n)) = exp(2 pi i e / p)."""
    kd = digits_of(k, p, n)
    sd = digits_of(s, p, n)
    return sum(kd[t] * sd[n - 1 - t] for t in range(n)) % p
