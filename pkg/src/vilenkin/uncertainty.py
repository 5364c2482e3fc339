"""Variances and uncertainty products under the lambda metric and the G-norm.

For a step function on Grid(p, m, M) the objective
``sum_k |v_k|^2 * w[k (-) c]`` is constant in the center within each native
cell c, and every center outside lambda^{-1}[0, p^M) is strictly worse, so
minimizing over the p^(m+M) grid cells is exact.  ``w`` holds the integral of
the squared distance to 0 over each cell.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from . import scalars as S
from .group import GroupElement, digit_add_array, lam, p_adic_exponent
from .haar import haar_analyze, zero_cell_weight
from .scalars import EXACT
from .signals import Grid, StepFunction, WalshPolynomial
from .vct import EXACT_PRIMES, fourier_step, group_correlate, vct_forward

LAMBDA = "lambda"
GNORM = "gnorm"
METRICS = (LAMBDA, GNORM)

LOWER_BOUND_C = 8.5e-5
FLOAT_RTOL = 1e-9

Number = Union[Fraction, float]


def _check_metric(metric: str) -> str:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    return metric


def cube_weight(k: int) -> Fraction:
    """((k+1)^3 - k^3) / 3, the integral of x^2 over [k, k+1)."""
    return Fraction((k + 1) ** 3 - k**3, 3)


@dataclass(frozen=True)
class CellWeights:
    grid: Grid
    metric: str
    weights: tuple

    @classmethod
    def build(cls, grid: Grid, metric: str) -> "CellWeights":
        _check_metric(metric)
        p, m = grid.p, grid.m
        if metric == LAMBDA:
            scale = Fraction(p) ** (-3 * m)
            w = tuple(cube_weight(k) * scale for k in range(grid.size))
        else:
            w = [zero_cell_weight(p, m)]
            width = Fraction(p) ** (-m)
            t, edge = 0, p
            for k in range(1, grid.size):
                while k >= edge:
                    t += 1
                    edge *= p
                # p^t <= k < p^(t+1), so the norm on the cell is p^(t+1-m)
                w.append(width * Fraction(p) ** (2 * (t + 1 - m)))
            w = tuple(w)
        return cls(grid, metric, w)

    def as_array(self, exact: bool) -> np.ndarray:
        if exact:
            out = np.empty(len(self.weights), dtype=object)
            out[:] = list(self.weights)
            return out
        return np.array([float(x) for x in self.weights])


# ----------------------------------------------------------------------
# moments and variances
# ----------------------------------------------------------------------

def _center_index(f: StepFunction, center) -> tuple[StepFunction, int]:
    if isinstance(center, GroupElement):
        if center.p != f.p:
            raise ValueError("group mismatch")
        q = lam(center)
    else:
        q = Fraction(center)
    p = f.p
    m = max(f.grid.m, p_adic_exponent(q, p))
    M = f.grid.M
    while Fraction(p) ** M <= q:
        M += 1
    g = f.refine(m, M)
    return g, g.grid.cell_of(q)


def second_moment(f: StepFunction, center=0, metric: str = GNORM) -> Number:
    """Integral of d(x, center)^2 |f(x)|^2."""
    _check_metric(metric)
    g, c = _center_index(f, center)
    grid = g.grid
    w = CellWeights.build(grid, metric).weights
    u = g.abs2_values()
    idx = digit_add_array(np.arange(grid.size), c, grid.p, grid.n)
    if g.exact:
        return sum((u[j] * w[i] for i, j in enumerate(idx)), Fraction(0))
    return float(sum(float(u[j]) * float(w[i]) for i, j in enumerate(idx)))


def moment_profile(f: StepFunction, metric: str, method: str = "fast") -> np.ndarray:
    """Second moment about every cell of f's grid (one representative each)."""
    grid = f.grid
    u = f.abs2_values()
    w = CellWeights.build(grid, metric).as_array(f.exact)
    if method == "fast" and (not f.exact or grid.p in EXACT_PRIMES):
        return group_correlate(u, w, grid.p, method="fast")
    return group_correlate(u, w, grid.p, method="direct")


def _merge_cells(cells, grid: Grid) -> list[tuple[Fraction, Fraction]]:
    out: list[list[Fraction]] = []
    for c in sorted(cells):
        a, b = grid.cell(c)
        if out and out[-1][1] == a:
            out[-1][1] = b
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def _argmin(values: np.ndarray, exact: bool) -> tuple[object, list[int]]:
    if exact:
        best = min(values)
        return best, [i for i, v in enumerate(values) if v == best]
    vals = np.asarray(values, dtype=float)
    best = float(vals.min())
    tol = FLOAT_RTOL * max(abs(best), np.finfo(float).tiny)
    return best, [int(i) for i in np.nonzero(vals <= best + tol)[0]]


CENTERS = ("all", "support")


def _support_cells(f: StepFunction) -> np.ndarray:
    if f.exact:
        return np.array([i for i, v in enumerate(f.values) if v != S.ZERO], dtype=int)
    return np.nonzero(np.abs(f.values) > 0)[0]


def variance(f: StepFunction, metric: str = GNORM, method: str = "fast", centers: str = "all"):
    """(V(f), minimizing centers as merged lambda-intervals).

    ``centers="all"`` is the true minimum over G.  ``centers="support"``
    only admits centers inside supp f.
    """
    _check_metric(metric)
    if centers not in CENTERS:
        raise ValueError(f"centers must be one of {CENTERS}")
    if f.is_zero():
        raise ValueError("variance of the zero function is undefined")
    prof = moment_profile(f, metric, method)
    if centers == "support":
        idx = _support_cells(f)
        best, sub = _argmin(prof[idx], f.exact)
        cells = [int(idx[i]) for i in sub]
    else:
        best, cells = _argmin(prof, f.exact)
    norm2 = f.norm2()
    return best / norm2, _merge_cells(cells, f.grid)


@dataclass
class UPReport:
    metric: str
    V_time: Number
    V_freq: Number
    UP: Number
    argmin_time: list = field(default_factory=list)
    argmin_freq: list = field(default_factory=list)
    exact: bool = True

    def to_dict(self) -> dict:
        def num(x):
            return str(Fraction(x)) if self.exact else float(x)

        def ivs(lst):
            return [[num(a), num(b)] for a, b in lst]

        return {
            "metric": self.metric,
            "exact": self.exact,
            "V_time": num(self.V_time),
            "V_freq": num(self.V_freq),
            "UP": num(self.UP),
            "argmin_time": ivs(self.argmin_time),
            "argmin_freq": ivs(self.argmin_freq),
        }


def up(f: StepFunction, metric: str = GNORM, method: str = "fast", centers: str = "all") -> UPReport:
    """UP(f) = V(f) V(Ff) for one metric."""
    _check_metric(metric)
    vt, at = variance(f, metric, method, centers)
    F = fourier_step(f)
    vf, af = variance(F, metric, method, centers)
    return UPReport(metric, vt, vf, vt * vf, at, af, f.exact)


# ----------------------------------------------------------------------
# Walsh-coefficient route (lambda metric)
# ----------------------------------------------------------------------

def variance_lambda_walsh(w: WalshPolynomial) -> tuple[Number, Number]:
    """(V_lambda(f_n), V_lambda(F f_n)) for f_n = 1_{[0,1)} sum a_k w_k.

    Frequency side: F f_n has value a_k on [k, k+1), so
    min_k1 sum_k |a_{k (+) k1}|^2 ((k+1)^3-k^3)/3 / sum |a_k|^2.
    Time side: the cell values b = p^n VCT(a) with the same cube weights
    scaled by p^(-3n).
    """
    p, n = w.p, w.n
    a = w.coefficients
    exact = S.backend_of(a) == EXACT
    a2 = S.abs2(a)
    total = S.total(a2) if exact else float(np.sum(a2))
    if not total:
        raise ValueError("zero Walsh polynomial")
    N = p**n
    if exact:
        cubes = np.empty(N, dtype=object)
        cubes[:] = [cube_weight(k) for k in range(N)]
    else:
        cubes = np.array([float(cube_weight(k)) for k in range(N)])
    method = "fast" if (not exact or p in EXACT_PRIMES) else "direct"

    freq = group_correlate(a2, cubes, p, method=method)
    v_freq, _ = _argmin(freq, exact)

    b = S.scale(vct_forward(a, p).entries, Fraction(p) ** n)
    b2 = S.abs2(b)
    time = group_correlate(b2, cubes, p, method=method)
    v_time, _ = _argmin(time, exact)
    scale = Fraction(p) ** (-3 * n) if exact else float(p) ** (-3 * n)
    return v_time * scale / total, v_freq / total


# ----------------------------------------------------------------------
# Haar route (G-norm)
# ----------------------------------------------------------------------

def moment_via_haar(f: StepFunction) -> Number:
    """Integral of ||t||^2 |Ff(t)|^2 from the Haar coefficients of f.

    sum |p^(j+1) c^nu_{j,k}|^2 over the stored details plus the closed-form
    coarse tail sum_{j < j_min} (p-1) p^(2j+2) p^j |mean|^2.
    """
    e = haar_analyze(f)
    p = e.p
    exact = e.backend == EXACT
    if exact:
        acc = Fraction(0)
        for (_, j, _), v in sorted(e.details.items()):
            acc += Fraction(p) ** (3 * j + 2) * v.abs2()
        m2 = S.CRational.coerce(e.mean).abs2()
        acc += m2 * Fraction((p - 1) * p * p, p**3 - 1) * Fraction(p) ** (3 * e.j_min)
        return acc * p**e.half
    acc = 0.0
    for (_, j, _), v in sorted(e.details.items()):
        acc += float(p) ** (3 * j + 2) * abs(v) ** 2
    acc += abs(complex(e.mean)) ** 2 * (p - 1) * p * p / (p**3 - 1) * float(p) ** (3 * e.j_min)
    return acc * p**e.half


# ----------------------------------------------------------------------
# inequality checks
# ----------------------------------------------------------------------

@dataclass
class BoundsReport:
    p: int
    UP_lambda: Number
    UP_G: Number
    lower_bound: float
    lower_ok: bool
    comparison_ok: bool

    @property
    def scaled_G(self) -> Number:
        """p^-4 UP_G, the lower end of the comparison."""
        return self.UP_G / self.p**4

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.comparison_ok


def check_bounds(f: StepFunction, slack: float = 0.0) -> BoundsReport:
    """UP_lambda >= C and p^-4 UP_G <= UP_lambda < UP_G.

    ``slack`` is a relative margin used on the float backend.
    """
    ul = up(f, LAMBDA).UP
    ug = up(f, GNORM).UP
    p = f.p
    if f.exact and slack == 0:
        lower = ul >= Fraction(LOWER_BOUND_C)
        comp = Fraction(1, p**4) * ug <= ul < ug
    else:
        ulf, ugf = float(ul), float(ug)
        s = slack * max(abs(ulf), abs(ugf))
        lower = ulf >= LOWER_BOUND_C - s
        comp = ugf / p**4 <= ulf + s and ulf < ugf + s
    return BoundsReport(p, ul, ug, LOWER_BOUND_C, bool(lower), bool(comp))
