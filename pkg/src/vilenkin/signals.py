"""Step functions, atoms and Walsh polynomials on G_p."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import scalars as S
from .group import (
    GroupElement,
    RootOfUnity,
    check_p,
    character,
    digit_add_array,
    lam,
    lambda_inv,
    p_adic_exponent,
)
from .scalars import EXACT, FLOAT, BackendError, CRational


@dataclass(frozen=True)
class Grid:
    """Cells lambda^{-1}[k p^-m, (k+1) p^-m) for k < p^(M+m)."""

    p: int
    m: int
    M: int

    def __post_init__(self):
        check_p(self.p)
        if self.m + self.M < 0:
            raise ValueError(f"empty grid: m + M = {self.m + self.M} < 0")

    @property
    def n(self) -> int:
        return self.m + self.M

    @property
    def size(self) -> int:
        return self.p**self.n

    @property
    def cell_width(self) -> Fraction:
        return Fraction(self.p) ** (-self.m)

    def cell(self, k: int) -> tuple[Fraction, Fraction]:
        w = self.cell_width
        return k * w, (k + 1) * w

    def cell_of(self, q) -> int:
        """Index of the cell containing lambda-coordinate q (may be >= size)."""
        return math.floor(Fraction(q) / self.cell_width)

    def refined(self, m: int, M: int) -> "Grid":
        return Grid(self.p, max(self.m, m), max(self.M, M))


def _normalize_half(values: np.ndarray, half: int, p: int) -> tuple[np.ndarray, int]:
    """Fold p**(half/2) into the values as far as exact arithmetic allows."""
    r = math.isqrt(p)
    if r * r == p:
        factor = Fraction(r) ** half
        return (S.scale(values, factor) if factor != 1 else values), 0
    odd = half % 2
    k = (half - odd) // 2
    if k:
        values = S.scale(values, Fraction(p) ** k)
    return values, odd


class StepFunction:
    """f = p**(half/2) * sum_k values[k] * 1_{cell k} on a Grid.

    ``half`` is 0 or 1; it only survives for non-square p after an odd
    dilation, so squared norms stay rational.
    """

    __slots__ = ("grid", "values", "half")

    def __init__(self, grid: Grid, values, half: int = 0, backend: Optional[str] = None):
        if isinstance(values, np.ndarray) and backend is None:
            vals = values
        else:
            vals = S.as_backend(values, backend or EXACT)
        if vals.ndim != 1 or len(vals) != grid.size:
            raise ValueError(f"expected {grid.size} cell values for {grid}, got shape {vals.shape}")
        vals, half = _normalize_half(vals, half, grid.p)
        vals = vals.copy()
        vals.setflags(write=False)
        self.grid = grid
        self.values = vals
        self.half = half

    # construction -----------------------------------------------------
    @classmethod
    def zeros(cls, grid: Grid, backend: str = EXACT) -> "StepFunction":
        return cls(grid, S.zeros(grid.size, backend))

    @classmethod
    def indicator(cls, p: int, a, b, backend: str = EXACT) -> "StepFunction":
        """Indicator of lambda^{-1}[a, b) for p-adic endpoints."""
        a, b = Fraction(a), Fraction(b)
        if not 0 <= a < b:
            raise ValueError("need 0 <= a < b")
        m = max(p_adic_exponent(a, p), p_adic_exponent(b, p))
        M = 0
        while Fraction(p) ** M < b:
            M += 1
        M = max(M, -m)
        grid = Grid(p, m, M)
        w = grid.cell_width
        vals = [1 if a <= k * w < b else 0 for k in range(grid.size)]
        return cls(grid, vals, backend=backend)

    # basic properties -------------------------------------------------
    @property
    def p(self) -> int:
        return self.grid.p

    @property
    def backend(self) -> str:
        return S.backend_of(self.values)

    @property
    def exact(self) -> bool:
        return self.backend == EXACT

    def scaled_values(self) -> np.ndarray:
        """Cell values including the sqrt(p) factor (float if it is irrational)."""
        if self.half == 0:
            return self.values
        return S.to_float(self.values) * math.sqrt(self.p)

    def abs2_values(self) -> np.ndarray:
        a = S.abs2(self.values)
        if self.half:
            a = a * (Fraction(self.p) if a.dtype == object else float(self.p))
        return a

    def norm2(self):
        """Squared L2 norm; exact Fraction on the exact backend."""
        w = self.grid.cell_width
        if self.exact:
            return S.total(self.abs2_values()) * w
        return float(np.sum(self.abs2_values())) * float(w)

    def integral(self):
        if self.half:
            return complex(S.total(S.to_float(self.values))) * math.sqrt(self.p) * float(self.grid.cell_width)
        w = self.grid.cell_width
        if self.exact:
            return S.total(self.values) * w
        return complex(np.sum(self.values)) * float(w)

    def is_zero(self) -> bool:
        if self.exact:
            return not any(self.values)
        return not np.any(self.values)

    def support_interval(self) -> tuple[Fraction, Fraction]:
        """Smallest [0, p^s) containing the support (lambda-coordinates)."""
        nz = [k for k, v in enumerate(self.values) if v]
        if not nz:
            return Fraction(0), Fraction(0)
        top = (max(nz) + 1) * self.grid.cell_width
        s = -self.grid.m
        while Fraction(self.p) ** s < top:
            s += 1
        return Fraction(0), Fraction(self.p) ** s

    def value_at(self, x: GroupElement):
        if x.p != self.p:
            raise ValueError("group mismatch")
        k = self.grid.cell_of(lam(x))
        if k >= self.grid.size:
            return S.ZERO if self.exact and not self.half else 0j
        v = self.values[k]
        if self.half:
            return complex(v) * math.sqrt(self.p)
        return v

    # conversions ------------------------------------------------------
    def to_float(self) -> "StepFunction":
        return StepFunction(self.grid, S.to_float(self.values), self.half)

    def with_backend(self, backend: str) -> "StepFunction":
        if backend == self.backend:
            return self
        if backend == FLOAT:
            return self.to_float()
        raise BackendError("cannot promote a float step function to the exact backend")

    def refine(self, m: int, M: int) -> "StepFunction":
        """Same function on a finer and/or wider grid."""
        g = self.grid
        if m < g.m or M < g.M:
            raise ValueError("refine only moves to finer resolution / larger support")
        r = m - g.m
        vals = np.repeat(self.values, self.p**r)
        extra = self.p ** (m + M) - len(vals)
        if extra:
            vals = np.concatenate([vals, S.zeros(extra, self.backend)])
        return StepFunction(Grid(self.p, m, M), vals, self.half)

    def trimmed(self) -> "StepFunction":
        """The same function on the coarsest grid that still resolves it."""
        f = self
        p = self.p
        while f.grid.M + f.grid.m > 0:
            top = f.values[len(f.values) // p:]
            if any(top) if f.exact else np.any(top):
                break
            f = StepFunction(Grid(p, f.grid.m, f.grid.M - 1), f.values[: len(f.values) // p], f.half)
        while f.grid.M + f.grid.m > 0:
            blocks = f.values.reshape(-1, p)
            if not all(all(b[0] == x for x in b[1:]) for b in blocks):
                break
            f = StepFunction(Grid(p, f.grid.m - 1, f.grid.M), blocks[:, 0].copy(), f.half)
        return f

    def _aligned(self, other: "StepFunction") -> tuple["StepFunction", "StepFunction"]:
        if other.p != self.p:
            raise ValueError("group mismatch")
        m = max(self.grid.m, other.grid.m)
        M = max(self.grid.M, other.grid.M)
        a, b = self.refine(m, M), other.refine(m, M)
        if a.half != b.half:
            a, b = a.to_float(), b.to_float()
            return (StepFunction(a.grid, a.scaled_values()), StepFunction(b.grid, b.scaled_values()))
        if a.backend != b.backend:
            a, b = a.to_float(), b.to_float()
        return a, b

    # algebra ----------------------------------------------------------
    def __add__(self, other: "StepFunction") -> "StepFunction":
        a, b = self._aligned(other)
        return StepFunction(a.grid, a.values + b.values, a.half)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        a, b = self._aligned(other)
        return StepFunction(a.grid, a.values - b.values, a.half)

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.grid, -self.values, self.half)

    def __mul__(self, c) -> "StepFunction":
        if isinstance(c, StepFunction):
            return NotImplemented
        if self.exact and not isinstance(c, (complex, float)):
            c = CRational.coerce(c)
            vals = np.empty(len(self.values), dtype=object)
            vals[:] = [v * c for v in self.values]
            return StepFunction(self.grid, vals, self.half)
        return StepFunction(self.grid, S.to_float(self.values) * complex(c), self.half)

    __rmul__ = __mul__

    def conjugate(self) -> "StepFunction":
        return StepFunction(self.grid, S.conj(self.values), self.half)

    def equals(self, other: "StepFunction", tol: Optional[float] = None) -> bool:
        """Pointwise equality; exact unless a tolerance is given."""
        a, b = self._aligned(other)
        if tol is None:
            if not (a.exact and b.exact):
                return bool(np.array_equal(a.values, b.values))
            return all(x == y for x, y in zip(a.values, b.values))
        d = S.to_float(a.values) - S.to_float(b.values)
        scale_ = max(1.0, float(np.max(np.abs(S.to_float(a.values)), initial=0.0)))
        return bool(np.max(np.abs(d), initial=0.0) <= tol * scale_)

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __repr__(self):
        g = self.grid
        head = ", ".join(str(v) for v in list(self.values[:8]))
        more = ", ..." if len(self.values) > 8 else ""
        h = f", half={self.half}" if self.half else ""
        return f"StepFunction(p={g.p}, m={g.m}, M={g.M}{h}, [{head}{more}])"


# ----------------------------------------------------------------------
# translation and dilation
# ----------------------------------------------------------------------

def _level_above(q: Fraction, p: int) -> int:
    """Smallest integer M with q < p**M."""
    if q == 0:
        return -10**9
    M = 0
    while Fraction(p) ** M <= q:
        M += 1
    while Fraction(p) ** (M - 1) > q:
        M -= 1
    return M


def translate(f: StepFunction, h) -> StepFunction:
    """x -> f(x (+) lambda^{-1}(h))."""
    h = Fraction(h)
    p = f.p
    m = max(f.grid.m, p_adic_exponent(h, p))
    M = max(f.grid.M, _level_above(h, p))
    g = f.refine(m, M)
    if h == 0:
        return g
    n = m + M
    shift = int(h * Fraction(p) ** m)
    idx = digit_add_array(np.arange(p**n), shift, p, n)
    return StepFunction(g.grid, g.values[idx], g.half)


def dilate_step(f: StepFunction, j: int) -> StepFunction:
    """x -> f(D^j x), without the L2 factor."""
    g = f.grid
    return StepFunction(Grid(g.p, g.m + j, g.M - j), f.values, f.half)


def translate_dilate(f: StepFunction, j: int, h) -> StepFunction:
    """f_{j,h}(x) = p**(j/2) f(D^j x (+) lambda^{-1}(h))."""
    g = dilate_step(translate(f, h), j)
    return StepFunction(g.grid, g.values, g.half + j)


# ----------------------------------------------------------------------
# atoms
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    """coeff * phase * chi(modulate, x) * 1_{I_scale (+) translate}(x).

    ``phase`` keeps roots of unity produced by the Fourier transform exact.
    """

    coeff: object
    scale: int
    translate: GroupElement
    modulate: GroupElement
    phase: RootOfUnity = field(default_factory=lambda: RootOfUnity(1, 0))

    def __post_init__(self):
        if self.translate.p != self.modulate.p:
            raise ValueError("atom translation and modulation live in different groups")

    @property
    def p(self) -> int:
        return self.translate.p

    @classmethod
    def ball(cls, p: int, scale: int, translate=0, modulate=0, coeff=1) -> "Atom":
        t = translate if isinstance(translate, GroupElement) else lambda_inv(translate, p)
        mo = modulate if isinstance(modulate, GroupElement) else lambda_inv(modulate, p)
        return cls(coeff, scale, t, mo)

    def reduced_translate(self) -> GroupElement:
        """Translation digits that actually move the ball (positions < scale)."""
        return GroupElement(self.p, tuple((j, d) for j, d in self.translate.digits if j < self.scale))

    def grid(self) -> Grid:
        p, n = self.p, self.scale
        m = n
        for j, _ in self.modulate.digits:
            m = max(m, -j)
        t = self.reduced_translate()
        M = -n
        if not t.is_zero():
            M = max(M, -t.N)
        return Grid(p, m, max(M, -m))


def _scalar_value(a: Atom, backend: str):
    if backend == EXACT:
        c = CRational.coerce(a.coeff)
        return c * a.phase.to_exact()
    return complex(a.coeff) * complex(a.phase)


def _atom_values(a: Atom, grid: Grid, backend: str) -> np.ndarray:
    p, m, n_cells = grid.p, grid.m, grid.size
    k = np.arange(n_cells, dtype=np.int64)
    # x digit at position t is the base-p digit of k at place p**(m-1-t)
    t_idx = int(lam(a.reduced_translate()) * Fraction(p) ** m)
    width = p ** (m - a.scale)
    diff = digit_add_array(k, _neg_index(t_idx, p, grid.n), p, grid.n)
    inside = diff < width
    expo = np.zeros(n_cells, dtype=np.int64)
    for j, d in a.modulate.digits:
        t = -1 - j
        place = m - 1 - t
        if place < 0:
            continue
        if place >= grid.n:
            continue
        expo += d * ((k // p**place) % p)
    expo %= p
    c = _scalar_value(a, backend)
    out = S.zeros(n_cells, backend)
    if backend == EXACT:
        for i in np.nonzero(inside)[0]:
            out[i] = c * RootOfUnity(p, int(expo[i])).to_exact()
    else:
        roots = np.exp(2j * np.pi * np.arange(p) / p)
        roots[0] = 1
        if p % 4 == 0:
            roots[p // 4], roots[p // 2], roots[3 * p // 4] = 1j, -1, -1j
        elif p % 2 == 0:
            roots[p // 2] = -1
        out[inside] = c * roots[expo[inside]]
    return out


def _neg_index(k: int, p: int, n: int) -> int:
    out, place = 0, 1
    for _ in range(n):
        k, d = divmod(k, p)
        out += ((p - d) % p) * place
        place *= p
    return out


def step_from_atoms(atoms: Sequence[Atom], backend: Optional[str] = None) -> StepFunction:
    """Sum of atoms as a step function on the coarsest common grid.

    With ``backend=None`` the exact backend is used when every cell value is a
    Gaussian rational and float otherwise.
    """
    atoms = list(atoms)
    if not atoms:
        raise ValueError("need at least one atom")
    p = atoms[0].p
    if any(a.p != p for a in atoms):
        raise ValueError("atoms from different groups")
    grids = [a.grid() for a in atoms]
    m = max(g.m for g in grids)
    M = max(g.M for g in grids)
    grid = Grid(p, m, max(M, 0))
    if backend is None:
        try:
            return step_from_atoms(atoms, EXACT)
        except (BackendError, TypeError):
            return step_from_atoms(atoms, FLOAT)
    acc = S.zeros(grid.size, backend)
    for a in atoms:
        acc = acc + _atom_values(a, grid, backend)
    return StepFunction(grid, acc)


def fourier_atom(a: Atom) -> Atom:
    """Exact Fourier transform of an atom.

    F[c chi(b, .) 1_{I_n (+) t}] = c p^-n chi(t, b) chi(-t, .) 1_{I_-n (+) b}.
    """
    t = a.reduced_translate()
    b = a.modulate
    phase = a.phase * character(t, b)
    coeff = a.coeff
    factor = Fraction(a.p) ** (-a.scale)
    if isinstance(coeff, complex):
        coeff = coeff * float(factor)
    else:
        coeff = CRational.coerce(coeff) * factor
    return Atom(coeff, -a.scale, b, -t, phase)


# ----------------------------------------------------------------------
# Walsh polynomials
# ----------------------------------------------------------------------

@dataclass
class WalshPolynomial:
    """1_{[0,1)} * sum_{k < p^n} a_k w_k."""

    p: int
    n: int
    coefficients: np.ndarray

    def __post_init__(self):
        check_p(self.p)
        if not isinstance(self.coefficients, np.ndarray):
            self.coefficients = S.exact_array(self.coefficients)
        if len(self.coefficients) != self.p**self.n:
            raise ValueError(f"need {self.p ** self.n} coefficients")

    @property
    def backend(self) -> str:
        return S.backend_of(self.coefficients)

    def norm2(self):
        return S.total(S.abs2(self.coefficients)) if self.backend == EXACT else float(np.sum(S.abs2(self.coefficients)))


def walsh_poly_to_step(w: WalshPolynomial) -> StepFunction:
    from .vct import vct_forward

    vals = vct_forward(w.coefficients, w.p).entries
    return StepFunction(Grid(w.p, w.n, 0), S.scale(vals, Fraction(w.p) ** w.n))


def step_to_walsh_poly(f: StepFunction) -> WalshPolynomial:
    from .vct import vct_inverse

    if f.half:
        f = StepFunction(f.grid, f.scaled_values())
    g = f.trimmed()
    if g.grid.M > 0:
        raise ValueError("step function is not supported in lambda^{-1}[0, 1)")
    g = g.refine(max(g.grid.m, 0), 0)
    n = g.grid.m
    a = vct_inverse(S.scale(g.values, Fraction(f.p) ** (-n)), f.p)
    return WalshPolynomial(f.p, n, a)
