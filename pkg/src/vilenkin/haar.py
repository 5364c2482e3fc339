"""Haar analysis on G_p and the Gibbs-type spectral operators.

Indexing: psi^nu_{j,k} lives on the cell lambda^{-1}[k p^-j, (k+1) p^-j) and
equals p^(j/2) * zeta^(-nu*u) on its u-th subcell, zeta = exp(2 pi i / p).

Coefficients are stored *reduced*: ``details[(nu, j, k)]`` holds
p^(-j/2) * <f, psi^nu_{j,k}>, which is a Gaussian rational for rational f and
p in {2, 4}.  For a function supported in lambda^{-1}[0, p^-j_min) every
coarser coefficient is c^nu_{j,0} = p^(j/2) * (integral of f), so the infinite
coarse tail is stored as (j_min, mean).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import scalars as S
from .group import RootOfUnity, check_p
from .scalars import EXACT, FLOAT, BackendError, CRational
from .signals import Grid, StepFunction
from .vct import fourier_step, inverse_fourier_step, require_exact_ok, vct_inverse


STRICT_RTOL = 1e-12


def _root_table(p: int, backend: str, sign: int = 1) -> list:
    """zeta**(sign * e) for e < p in the requested backend."""
    return [RootOfUnity(p, sign * e).value(backend) for e in range(p)]


def _is_zero(v) -> bool:
    return not v if not isinstance(v, complex) else v == 0


@dataclass
class HaarExpansion:
    p: int
    details: dict = field(default_factory=dict)
    j_min: int = 0
    mean: object = 0
    half: int = 0
    backend: str = EXACT

    def coefficient(self, nu: int, j: int, k: int):
        """Reduced coefficient p^(-j/2) c^nu_{j,k}, tail included."""
        if j < self.j_min:
            return self.mean if k == 0 else 0
        return self.details.get((nu, j, k), 0)

    def value(self, nu: int, j: int, k: int) -> complex:
        """The actual coefficient c^nu_{j,k} as a float complex."""
        return complex(self.coefficient(nu, j, k)) * self.p ** ((j + self.half) / 2)

    def canonical(self) -> "HaarExpansion":
        p = self.p
        det = {key: v for key, v in self.details.items() if not _is_zero(v)}
        j_min, mean = self.j_min, self.mean
        if _is_zero(mean):
            j_min = min((j for _, j, _ in det), default=0)
        while True:
            level = {key: v for key, v in det.items() if key[1] == j_min}
            want = {(nu, j_min, 0) for nu in range(1, p)}
            if _is_zero(mean) or set(level) != want or any(v != mean for v in level.values()):
                break
            for key in want:
                del det[key]
            j_min += 1
        if _is_zero(mean) and not det:
            j_min = 0
        return HaarExpansion(p, det, j_min, mean, self.half, self.backend)

    def equals(self, other: "HaarExpansion", tol: Optional[float] = None) -> bool:
        a, b = self.canonical(), other.canonical()
        if a.p != b.p or a.half != b.half:
            return False
        if tol is None:
            return a.j_min == b.j_min and a.mean == b.mean and a.details == b.details
        lo = min(a.j_min, b.j_min)
        keys = set(a.details) | set(b.details) | {(nu, j, 0) for nu in range(1, a.p) for j in range(lo, max(a.j_min, b.j_min))}
        scale_ = max([1.0] + [abs(complex(v)) for v in a.details.values()])
        if abs(complex(a.mean) - complex(b.mean)) > tol * scale_:
            return False
        return all(abs(complex(a.coefficient(*k)) - complex(b.coefficient(*k))) <= tol * scale_ for k in keys)

    def norm2(self):
        """Parseval sum: sum p^j |c_hat|^2 + p^j_min |mean|^2 (times p^half)."""
        p = self.p
        exact = self.backend == EXACT
        acc = Fraction(0) if exact else 0.0
        for (_, j, _), v in sorted(self.details.items()):
            a2 = v.abs2() if exact else abs(v) ** 2
            acc += (Fraction(p) ** j if exact else float(p) ** j) * a2
        m2 = CRational.coerce(self.mean).abs2() if exact else abs(complex(self.mean)) ** 2
        acc += (Fraction(p) ** self.j_min if exact else float(p) ** self.j_min) * m2
        return acc * (p**self.half)

    def finest_level(self) -> int:
        """One past the largest detail scale (the native resolution m)."""
        return max((j + 1 for _, j, _ in self.details), default=self.j_min)


# ----------------------------------------------------------------------
# Haar functions
# ----------------------------------------------------------------------

def haar_function(nu: int, j: int, k: int, p: int, backend: Optional[str] = None) -> StepFunction:
    p = check_p(p)
    if not 1 <= nu <= p - 1:
        raise ValueError(f"Haar index nu must be in 1..{p - 1}, got {nu}")
    if k < 0:
        raise ValueError("Haar translation index must be nonnegative")
    if backend is None:
        backend = EXACT if p in (2, 4) else FLOAT
    m = j + 1
    M = -j
    while (k + 1) > p ** (M + j):
        M += 1
    grid = Grid(p, m, M)
    roots = _root_table(p, backend, sign=-1)
    vals = S.zeros(grid.size, backend)
    for u in range(p):
        vals[k * p + u] = roots[(nu * u) % p]
    return StepFunction(grid, vals, half=j)


# ----------------------------------------------------------------------
# analysis / synthesis
# ----------------------------------------------------------------------

def _backend_for(p: int, backend: str) -> str:
    if backend == EXACT and p not in (2, 4):
        raise BackendError(f"exact Haar analysis needs p in (2, 4); got p={p}")
    return backend


def haar_analyze(f: StepFunction) -> HaarExpansion:
    p = f.p
    backend = _backend_for(p, f.backend)
    m, M = f.grid.m, f.grid.M
    roots = _root_table(p, backend)
    level = S.scale(f.values, Fraction(p) ** (-m))  # integrals over cells at level m
    details = {}
    for j in range(m - 1, -M - 1, -1):
        blocks = level.reshape(-1, p)
        for nu in range(1, p):
            coef = blocks[:, 0].copy()
            for u in range(1, p):
                coef = coef + roots[(nu * u) % p] * blocks[:, u]
            for k, v in enumerate(coef):
                if not _is_zero(v):
                    details[(nu, j, k)] = v
        level = blocks[:, 0].copy()
        for u in range(1, p):
            level = level + blocks[:, u]
    mean = level[0]
    return HaarExpansion(p, details, -M, mean, f.half, backend)


def haar_synthesize(e: HaarExpansion, grid: Optional[Grid] = None) -> StepFunction:
    p = e.p
    need_m = e.finest_level()
    need_M = -e.j_min
    for _, j, k in e.details:
        while (k + 1) > p ** (need_M + j):
            need_M += 1
    if grid is None:
        grid = Grid(p, need_m, max(need_M, -need_m))
    if grid.m < need_m or grid.M < need_M:
        raise ValueError(f"grid {grid} cannot hold the expansion (needs m>={need_m}, M>={need_M})")
    backend = _backend_for(p, e.backend)
    inv = _root_table(p, backend, sign=-1)
    if backend == EXACT:
        level = S.exact_array([e.mean])
        third = Fraction(1, p)
    else:
        level = np.array([complex(e.mean)])
        third = 1.0 / p
    for j in range(-grid.M, grid.m):
        count = len(level)
        nxt = S.zeros(count * p, backend)
        for k in range(count):
            c = [level[k]] + [e.coefficient(nu, j, k) for nu in range(1, p)]
            if backend == EXACT:
                c = [CRational.coerce(v) for v in c]
            for u in range(p):
                acc = c[0]
                for nu in range(1, p):
                    acc = acc + inv[(nu * u) % p] * c[nu]
                nxt[k * p + u] = acc * third
        level = nxt
    vals = S.scale(level, Fraction(p) ** grid.m)
    return StepFunction(grid, vals, e.half)


# ----------------------------------------------------------------------
# Haar coefficients of the Fourier transform
# ----------------------------------------------------------------------

def d_from_c(e: HaarExpansion) -> HaarExpansion:
    """Haar expansion of Ff computed from the Haar expansion of f.

    With psi^mu_{j,k} indexed by its support cell, the reduced coefficients of
    Ff are

    * k = 0:  p^-j * (integral of f over cell mu at level -j), where that
      integral is rebuilt from the tail and the c^nu_{i,0};
    * k >= 1: write k = (p - nu) p^q + r with r < p^q; then
      p^-j * sum_{n < p^q} c_hat^nu_{q-j, mu p^q + n} conj(w_r(lambda^{-1}(n/p^q))),
      i.e. p^-j times entry r of the inverse VCT of that coefficient block.
    """
    p = e.p
    backend = _backend_for(p, e.backend)
    if backend == EXACT:
        require_exact_ok(p)
    M = -e.j_min
    m = e.finest_level()
    inv = _root_table(p, backend, sign=-1)
    one_over_p = Fraction(1, p) if backend == EXACT else 1.0 / p

    def pw(x):
        return Fraction(p) ** x if backend == EXACT else float(p) ** x

    def coerce(v):
        return CRational.coerce(v) if backend == EXACT else complex(v)

    # integrals over the cells u < p of level l inside [0, p^(1-l))
    first = {}
    s_prev = coerce(e.mean)
    for lev in range(e.j_min + 1, m + 1):
        c = [coerce(e.coefficient(nu, lev - 1, 0)) for nu in range(1, p)]
        row = []
        for u in range(p):
            acc = s_prev
            for nu in range(1, p):
                acc = acc + inv[(nu * u) % p] * c[nu - 1]
            row.append(acc * one_over_p)
        first[lev] = row
        s_prev = row[0]
    f_at_zero = s_prev * pw(m)

    by_level: dict[tuple[int, int], dict[int, object]] = {}
    for (nu, i, n), v in e.details.items():
        by_level.setdefault((nu, i), {})[n] = v

    details = {}
    for j in range(-m, M):
        for mu in range(1, p):
            v0 = first[-j][mu] * pw(-j) if -j in first else f_at_zero
            if not _is_zero(v0):
                details[(mu, j, 0)] = v0
            q = 0
            while q - j <= m - 1:
                i = q - j
                for nu in range(1, p):
                    block = by_level.get((nu, i))
                    if not block:
                        continue
                    base = mu * p**q
                    vec = S.zeros(p**q, backend)
                    hit = False
                    for n in range(p**q):
                        v = block.get(base + n)
                        if v is not None:
                            vec[n] = coerce(v)
                            hit = True
                    if not hit:
                        continue
                    out = vct_inverse(vec, p)
                    lead = (p - nu) * p**q
                    for r, v in enumerate(out):
                        if not _is_zero(v):
                            details[(mu, j, lead + r)] = v * pw(-j)
                q += 1
    return HaarExpansion(p, details, -m, f_at_zero, e.half, backend).canonical()


# ----------------------------------------------------------------------
# spectral operators
# ----------------------------------------------------------------------

def gnorm_cell_multipliers(grid: Grid) -> list:
    """||.||_G on each cell k >= 1 of the grid (constant there); cell 0 gets 0."""
    p, m = grid.p, grid.m
    out = [Fraction(0)]
    for k in range(1, grid.size):
        # p^t <= k < p^(t+1), so the norm on the cell is p^(t+1-m)
        t = 0
        while p ** (t + 1) <= k:
            t += 1
        out.append(Fraction(p) ** (t - m + 1))
    return out


def zero_cell_weight(p: int, m: int) -> Fraction:
    """Integral of ||x||_G^2 over lambda^{-1}[0, p^-m)."""
    return Fraction(p) ** (-3 * m) * Fraction(p * p * (p - 1), p**3 - 1)


def _apply_multiplier(F: StepFunction, mult: list) -> StepFunction:
    if F.exact:
        vals = np.empty(len(F.values), dtype=object)
        vals[:] = [v * w for v, w in zip(F.values, mult)]
    else:
        vals = F.values * np.array([float(w) for w in mult])
    return StepFunction(F.grid, vals, F.half)


def modified_gibbs(f: StepFunction, strict: bool = False) -> StepFunction:
    """D f with F(D f) = ||.||_G Ff, exact away from the zero frequency cell.

    The frequency cell containing 0 has a non-constant multiplier, and its
    contribution is not a step function; it is dropped here (``strict`` raises
    instead).  :func:`gibbs_energy` adds its exact L2 contribution back.
    """
    F = fourier_step(f)
    if strict:
        v0 = F.values[0]
        if F.exact:
            bad = not _is_zero(v0)
        else:
            bad = abs(v0) > STRICT_RTOL * max(float(np.max(np.abs(F.values))), np.finfo(float).tiny)
        if bad:
            raise ValueError("Ff does not vanish on the zero frequency cell")
    return inverse_fourier_step(_apply_multiplier(F, gnorm_cell_multipliers(F.grid)))


def gibbs_energy(f: StepFunction):
    """||D f||_2^2 including the zero-cell term, exact on the exact backend."""
    F = fourier_step(f)
    g = F.grid
    mult = gnorm_cell_multipliers(g)
    a2 = F.abs2_values()
    w = g.cell_width
    if F.exact:
        acc = sum((a * mm * mm for a, mm in zip(a2[1:], mult[1:])), Fraction(0)) * w
        return acc + a2[0] * zero_cell_weight(g.p, g.m)
    acc = float(np.dot(a2[1:], np.array([float(x) ** 2 for x in mult[1:]]))) * float(w)
    return acc + float(a2[0]) * float(zero_cell_weight(g.p, g.m))


def gibbs_classical(f: StepFunction) -> StepFunction:
    """Gibbs derivative on G_2 through its multiplier lambda(xi).

    Each frequency cell uses lambda at its left endpoint, which is the exact
    multiplier when the step function is read as a Walsh polynomial on [0, 1).
    """
    if f.p != 2:
        raise ValueError("the classical Gibbs derivative is defined for p = 2 only")
    F = fourier_step(f)
    w = F.grid.cell_width
    mult = [k * w for k in range(F.grid.size)]
    return inverse_fourier_step(_apply_multiplier(F, mult))


def eigenvalue(j: int, p: int) -> Fraction:
    """Eigenvalue of D on psi^nu_{j,k}: the norm on its Fourier support shell."""
    return Fraction(p) ** (j + 1)
