"""Scalar backends.

Two backends carry every vector in the package:

* ``exact``: numpy object arrays of :class:`CRational` (Gaussian rationals),
* ``f64``: numpy ``complex128`` arrays.

The exact backend is closed under the twiddles ``{1, i, -1, -i}`` only, so
transforms that need other roots of unity refuse it (see :class:`BackendError`).
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

import numpy as np

EXACT = "exact"
FLOAT = "f64"
BACKENDS = (EXACT, FLOAT)


class BackendError(ValueError):
    """Raised when the exact backend is asked for a non-Gaussian-rational result."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class CRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "CRational":
        if isinstance(x, CRational):
            return x
        if isinstance(x, complex):
            raise TypeError("float complex values cannot enter the exact backend")
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return cls(x[0], x[1])
        return cls(x)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, CRational):
            return CRational(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return CRational(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return CRational(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, CRational):
            return CRational(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return CRational(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return CRational(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, CRational):
            return CRational(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            return CRational(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CRational(self.re / other, self.im / other)
        if isinstance(other, CRational):
            d = other.abs2()
            return self * other.conjugate() / d
        return NotImplemented

    def conjugate(self) -> "CRational":
        return CRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # comparison / conversion ------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"CRational({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = CRational(0, 1)
ONE = CRational(1)
ZERO = CRational(0)

Scalar = Union[CRational, complex]


def i_power(e: int) -> CRational:
    """Exact value of i**e."""
    return (ONE, I, -ONE, -I)[e % 4]


def exact_array(values: Iterable) -> np.ndarray:
    vals = [CRational.coerce(v) for v in values]
    out = np.empty(len(vals), dtype=object)
    out[:] = vals
    return out


def float_array(values: Iterable) -> np.ndarray:
    return np.asarray([complex(v) for v in values], dtype=np.complex128)


def as_backend(values: Iterable, backend: str) -> np.ndarray:
    if backend == EXACT:
        return exact_array(values)
    if backend == FLOAT:
        return float_array(values)
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def backend_of(arr: np.ndarray) -> str:
    return EXACT if arr.dtype == object else FLOAT


def zeros(n: int, backend: str) -> np.ndarray:
    if backend == EXACT:
        out = np.empty(n, dtype=object)
        out[:] = [ZERO] * n
        return out
    return np.zeros(n, dtype=np.complex128)


def abs2(arr: np.ndarray) -> np.ndarray:
    """Elementwise squared modulus; Fractions (object) or float64."""
    if arr.dtype == object:
        out = np.empty(arr.shape, dtype=object)
        out.flat[:] = [v.abs2() for v in arr.flat]
        return out
    return arr.real**2 + arr.imag**2


def conj(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == object:
        out = np.empty(arr.shape, dtype=object)
        out.flat[:] = [v.conjugate() for v in arr.flat]
        return out
    return np.conj(arr)


def to_float(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == object:
        return np.array([complex(v) for v in arr.flat], dtype=np.complex128).reshape(arr.shape)
    return np.asarray(arr, dtype=np.complex128)


def scale(arr: np.ndarray, factor) -> np.ndarray:
    """Multiply by a real rational factor, keeping the backend."""
    if arr.dtype == object:
        f = _frac(factor)
        out = np.empty(arr.shape, dtype=object)
        out.flat[:] = [v * f for v in arr.flat]
        return out
    return arr * float(factor)


def total(values) -> Union[Fraction, float, CRational, complex]:
    """Sum with a fixed left-to-right order."""
    acc = None
    for v in values:
        acc = v if acc is None else acc + v
    return 0 if acc is None else acc


def to_split_ints(arr: np.ndarray) -> tuple[list[int], list[int], int]:
    """Write an exact vector as (re numerators, im numerators, common denominator)."""
    den = 1
    for v in arr.flat:
        den = math.lcm(den, v.re.denominator, v.im.denominator)
    re = [int(v.re * den) for v in arr.flat]
    im = [int(v.im * den) for v in arr.flat]
    return re, im, den


def from_split_ints(re, im, den: int) -> np.ndarray:
    out = np.empty(len(re), dtype=object)
    out[:] = [CRational(Fraction(a, den), Fraction(b, den)) for a, b in zip(re, im)]
    return out
