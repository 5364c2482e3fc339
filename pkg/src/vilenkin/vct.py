"""Discrete Vilenkin-Chrestenson transform and the Fourier transform of step functions.

Forward transform of a length p**n vector::

    y_k = p**-n * sum_s x_s * w_k(lambda^{-1}(s / p**n))

with w_k(lambda^{-1}(s/p**n)) = zeta**(sum_t k_t s_{n-1-t}), zeta = exp(2 pi i/p),
and k_t, s_t base-p digits (least significant first). The fast kernel runs a
length-p DFT along each digit axis of the reshaped vector and then applies the
digit-reversal permutation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import scalars as S
from .group import check_p, digit_add_array, digit_reverse_table
from .scalars import EXACT, FLOAT, BackendError
from .signals import Grid, StepFunction

EXACT_PRIMES = (2, 4)
KERNELS = ("fast", "naive")


@dataclass
class SpectrumVector:
    p: int
    n: int
    entries: np.ndarray

    def __len__(self):
        return len(self.entries)


def log_p(size: int, p: int) -> int:
    n, q = 0, 1
    while q < size:
        q *= p
        n += 1
    if q != size:
        raise ValueError(f"length {size} is not a power of p={p}")
    return n


def require_exact_ok(p: int) -> None:
    if p not in EXACT_PRIMES:
        raise BackendError(
            f"exact backend supports transforms only for p in {EXACT_PRIMES} "
            f"(twiddles must lie in {{1, i, -1, -i}}); got p={p}, use --backend f64"
        )


@lru_cache(maxsize=32)
def _twiddles(p: int) -> np.ndarray:
    w = np.exp(2j * np.pi * np.arange(p) / p)
    # exact quarter turns, so p = 2, 4, 8 butterflies carry no rounding there
    for e in range(p):
        if (4 * e) % p == 0:
            w[e] = (1, 1j, -1, -1j)[(4 * e) // p]
    w.setflags(write=False)
    return w


# ----------------------------------------------------------------------
# fast kernels
# ----------------------------------------------------------------------

def _fast_float(x: np.ndarray, p: int, n: int, sign: int) -> np.ndarray:
    a = np.asarray(x, dtype=np.complex128).reshape((p,) * n) if n else np.asarray(x, dtype=np.complex128).copy()
    if n == 0:
        return a
    tw = _twiddles(p)
    for axis in range(n):
        a = np.moveaxis(a, axis, 0)
        if p == 2:
            out = np.empty_like(a)
            out[0] = a[0] + a[1]
            out[1] = a[0] - a[1]
        else:
            out = np.empty_like(a)
            for u in range(p):
                acc = a[0].copy()
                for s in range(1, p):
                    acc += tw[(sign * u * s) % p] * a[s]
                out[u] = acc
        a = np.moveaxis(out, 0, axis)
    flat = a.reshape(-1)
    return flat[digit_reverse_table(p, n)]


def _rotate(re, im, e: int):
    """Multiply (re + i im) by i**e."""
    e %= 4
    if e == 0:
        return re, im
    if e == 1:
        return -im, re
    if e == 2:
        return -re, -im
    return im, -re


def _fast_exact_ints(re: np.ndarray, im: np.ndarray, p: int, n: int, sign: int):
    if n == 0:
        return re.copy(), im.copy()
    re = re.reshape((p,) * n)
    im = im.reshape((p,) * n)
    q = 4 // p
    for axis in range(n):
        re = np.moveaxis(re, axis, 0)
        im = np.moveaxis(im, axis, 0)
        ore = np.empty_like(re)
        oim = np.empty_like(im)
        if p == 2:
            ore[0], oim[0] = re[0] + re[1], im[0] + im[1]
            ore[1], oim[1] = re[0] - re[1], im[0] - im[1]
        else:
            for u in range(p):
                acc_re, acc_im = re[0], im[0]
                for s in range(1, p):
                    r, i = _rotate(re[s], im[s], sign * q * u * s)
                    acc_re = acc_re + r
                    acc_im = acc_im + i
                ore[u], oim[u] = acc_re, acc_im
        re = np.moveaxis(ore, 0, axis)
        im = np.moveaxis(oim, 0, axis)
    perm = digit_reverse_table(p, n)
    return re.reshape(-1)[perm], im.reshape(-1)[perm]


# ----------------------------------------------------------------------
# naive kernels
# ----------------------------------------------------------------------

def _digit_matrix(p: int, n: int, reverse: bool) -> np.ndarray:
    k = np.arange(p**n, dtype=np.int64)
    cols = [(k // p**t) % p for t in range(n)]
    if reverse:
        cols = cols[::-1]
    return np.stack(cols, axis=1) if n else np.zeros((p**n, 0), dtype=np.int64)


def _partial_exponents(p: int, n: int, digits: range, rows: range | None = None) -> np.ndarray:
    """E[k', s] = sum_{t in digits} k_t s_{n-1-t} mod p, k' running over those digits of k."""
    sd = _digit_matrix(p, n, reverse=True)
    width = len(digits)
    kk = np.arange(p**width, dtype=np.int64) if rows is None else np.arange(rows.start, rows.stop, dtype=np.int64)
    expo = np.zeros((len(kk), p**n), dtype=np.int64)
    for i, t in enumerate(digits):
        expo += np.outer((kk // p**i) % p, sd[:, t])
    return expo % p


def _naive_float(x: np.ndarray, p: int, n: int, sign: int) -> np.ndarray:
    """Direct O(N^2) summation.

    Each kernel entry zeta**e(k, s) is the product of a low-digit and a
    high-digit factor, so the N^2 multiply-adds run as dense matrix products.
    """
    N = p**n
    x = np.asarray(x, dtype=np.complex128)
    low = 0
    while low < n and p ** (low + 1) * N <= (1 << 24):
        low += 1
    low = max(low, min(n, 1))
    tw = _twiddles(p) if sign > 0 else np.conj(_twiddles(p))
    t_low = tw[_partial_exponents(p, n, range(low))]
    if p == 2:
        t_low = t_low.real.copy()
    rows = p ** (n - low)
    out = np.empty((rows, p**low), dtype=np.complex128)
    chunk = max(1, (1 << 22) // N)
    for h in range(0, rows, chunk):
        # high-digit factors are built per chunk to bound memory
        th = tw[_partial_exponents(p, n, range(low, n), range(h, min(h + chunk, rows)))]
        if p == 2:
            th = th.real
            out[h:h + chunk] = (th * x.real) @ t_low.T + 1j * ((th * x.imag) @ t_low.T)
        else:
            out[h:h + chunk] = (th * x) @ t_low.T
    return out.reshape(-1)


def _naive_exact_ints(re: np.ndarray, im: np.ndarray, p: int, n: int, sign: int):
    N = p**n
    kd = _digit_matrix(p, n, reverse=False)
    sd = _digit_matrix(p, n, reverse=True)
    q = 4 // p
    ore = np.empty(N, dtype=object)
    oim = np.empty(N, dtype=object)
    for k in range(N):
        expo = (sd @ kd[k]) % p
        acc_re, acc_im = 0, 0
        for e in range(p):
            mask = expo == e
            if not mask.any():
                continue
            sr = sum(re[mask].tolist())
            si = sum(im[mask].tolist())
            r, i = _rotate(sr, si, sign * q * e)
            acc_re += r
            acc_im += i
        ore[k], oim[k] = acc_re, acc_im
    return ore, oim


# ----------------------------------------------------------------------
# public transforms
# ----------------------------------------------------------------------

def _unscaled(x: np.ndarray, p: int, n: int, sign: int, kernel: str) -> tuple[np.ndarray, str]:
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    backend = S.backend_of(x)
    if backend == EXACT:
        require_exact_ok(p)
        re, im, den = S.to_split_ints(x)
        re = np.array(re + [0], dtype=object)[:-1]
        im = np.array(im + [0], dtype=object)[:-1]
        f = _fast_exact_ints if kernel == "fast" else _naive_exact_ints
        ore, oim = f(re, im, p, n, sign)
        return S.from_split_ints(list(ore), list(oim), den), EXACT
    f = _fast_float if kernel == "fast" else _naive_float
    return f(x, p, n, sign), FLOAT


def _as_vector(x) -> np.ndarray:
    if isinstance(x, SpectrumVector):
        return x.entries
    if isinstance(x, np.ndarray):
        return x
    vals = list(x)
    if vals and all(isinstance(v, (complex, float)) for v in vals):
        return S.float_array(vals)
    return S.exact_array(vals)


def vct_forward(x, p: int, kernel: str = "fast") -> SpectrumVector:
    """y_k = p^-n sum_s x_s w_k(lambda^{-1}(s/p^n))."""
    p = check_p(p)
    x = _as_vector(x)
    n = log_p(len(x), p)
    y, backend = _unscaled(x, p, n, +1, kernel)
    scale_ = Fraction(1, p**n)
    y = S.scale(y, scale_)
    return SpectrumVector(p, n, y)


def vct_inverse(y, p: int | None = None, kernel: str = "fast") -> np.ndarray:
    """x_k = sum_s y_s conj(w_k(lambda^{-1}(s/p^n)))."""
    if isinstance(y, SpectrumVector):
        p = y.p
    if p is None:
        raise ValueError("p is required for a plain vector")
    p = check_p(p)
    y = _as_vector(y)
    n = log_p(len(y), p)
    x, _ = _unscaled(y, p, n, -1, kernel)
    return x


# ----------------------------------------------------------------------
# Fourier transform of step functions
# ----------------------------------------------------------------------

def fourier_step(f: StepFunction, kernel: str = "fast") -> StepFunction:
    """Ff(omega) = int f(x) conj(chi(x, omega)) dx.

    For f on Grid(p, m, M) the transform lives on Grid(p, M, m) and its cell
    values are p^-m times the inverse VCT of the cell values of f.
    """
    g = f.grid
    vals = vct_inverse(f.values, g.p, kernel=kernel)
    vals = S.scale(vals, Fraction(g.p) ** (-g.m))
    return StepFunction(Grid(g.p, g.M, g.m), vals, f.half)


def inverse_fourier_step(g: StepFunction, kernel: str = "fast") -> StepFunction:
    """F^{-1}g(x) = int g(omega) chi(x, omega) d omega."""
    gr = g.grid
    vals = vct_forward(g.values, gr.p, kernel=kernel).entries
    vals = S.scale(vals, Fraction(gr.p) ** gr.M)
    return StepFunction(Grid(gr.p, gr.M, gr.m), vals, g.half)


def reflect(f: StepFunction) -> StepFunction:
    """x -> f((-)x)."""
    from .group import digit_neg_array

    g = f.grid
    idx = digit_neg_array(np.arange(g.size), g.p, g.n)
    return StepFunction(g, f.values[idx], f.half)


# ----------------------------------------------------------------------
# group correlation
# ----------------------------------------------------------------------

def correlate_direct(u: np.ndarray, w: np.ndarray, p: int) -> np.ndarray:
    """r_c = sum_k u[k (+) c] * w[k], by the O(N^2) double loop."""
    n = log_p(len(u), p)
    if len(w) != len(u):
        raise ValueError("correlation needs equal lengths")
    N = len(u)
    k = np.arange(N)
    exact = u.dtype == object or w.dtype == object
    out = np.empty(N, dtype=object if exact else np.result_type(u, w))
    for c in range(N):
        idx = digit_add_array(k, c, p, n)
        if exact:
            out[c] = S.total(a * b for a, b in zip(u[idx], w))
        else:
            out[c] = np.dot(u[idx], w)
    return out


def group_correlate(u, w, p: int, method: str = "fast") -> np.ndarray:
    """r_c = sum_k u[k (+) c] * w[k] for every cell index c.

    ``fast`` uses two forward transforms and one inverse; ``direct`` is the
    O(N^2) loop. Real inputs give real (float64 or Fraction) outputs.
    """
    u = np.asarray(u) if not isinstance(u, np.ndarray) else u
    w = np.asarray(w) if not isinstance(w, np.ndarray) else w
    if len(u) != len(w):
        raise ValueError("correlation needs equal lengths")
    n = log_p(len(u), p)
    if method == "direct":
        return correlate_direct(u, w, p)
    exact = u.dtype == object or w.dtype == object
    if exact:
        require_exact_ok(p)
        uc, wc = S.exact_array(u), S.exact_array(w)
    else:
        uc, wc = np.asarray(u, dtype=np.complex128), np.asarray(w, dtype=np.complex128)
    U = vct_forward(uc, p).entries
    W = vct_forward(S.conj(wc), p).entries
    prod = U * S.conj(W)
    r = vct_inverse(S.scale(prod, p**n), p)
    real_in = (not exact and np.isrealobj(u) and np.isrealobj(w)) or (
        exact and all(S.CRational.coerce(v).is_real() for v in u) and all(S.CRational.coerce(v).is_real() for v in w)
    )
    if real_in:
        if exact:
            out = np.empty(len(r), dtype=object)
            out[:] = [v.re for v in r]
            return out
        return r.real.copy()
    return r
