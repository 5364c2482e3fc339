from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gaussian_rationals, step_functions
from vilenkin import scalars as S
from vilenkin.group import GroupElement, character, lam, lambda_inv, sub
from vilenkin.scalars import CRational
from vilenkin.signals import (
    Atom,
    Grid,
    StepFunction,
    WalshPolynomial,
    fourier_atom,
    step_from_atoms,
    step_to_walsh_poly,
    translate,
    translate_dilate,
    walsh_poly_to_step,
)
from vilenkin.vct import fourier_step

F = Fraction


def cr_list(*xs):
    return [CRational(x) for x in xs]


def atom_at(a: Atom, x: GroupElement):
    """Direct evaluation of an atom at a point, from the group operations."""
    if lam(sub(x, a.translate)) >= F(a.p) ** (-a.scale):
        return CRational(0)
    return CRational.coerce(a.coeff) * (a.phase * character(a.modulate, x)).to_exact()


# --- examples ---------------------------------------------------------------

def test_single_ball_atom():
    f = step_from_atoms([Atom.ball(2, 0)])
    assert (f.grid.m, f.grid.M) == (0, 0)
    assert list(f.values) == cr_list(1)


def test_f2_values():
    f = StepFunction.indicator(2, 0, F(3, 8))
    assert (f.grid.m, f.grid.M) == (3, 0)
    assert list(f.values) == cr_list(1, 1, 1, 0, 0, 0, 0, 0)
    g = step_from_atoms([Atom.ball(2, 2), Atom.ball(2, 3, F(1, 4))])
    assert g.equals(f)


def test_fourier_of_f2_matches_atom_sum():
    f2 = StepFunction.indicator(2, 0, F(3, 8))
    # 1_[0,4)/4 + w_1(./4) 1_[0,8)/8
    expected = step_from_atoms([
        Atom.ball(2, -2, coeff=F(1, 4)),
        Atom.ball(2, -3, modulate=F(1, 4), coeff=F(1, 8)),
    ])
    Ff = fourier_step(f2)
    assert Ff.equals(expected)
    vals = [F(3, 8)] * 2 + [F(1, 8)] * 2 + [F(1, 8)] * 2 + [F(-1, 8)] * 2
    assert Ff.refine(0, 3).equals(StepFunction(Grid(2, 0, 3), vals))


def test_translate_dilate_examples():
    f = StepFunction.indicator(2, 0, 1)
    assert translate_dilate(f, 0, 0).equals(f)
    half = StepFunction.indicator(2, 0, F(1, 2))
    assert translate_dilate(half, 0, F(1, 2)).equals(StepFunction.indicator(2, F(1, 2), 1))
    g = translate_dilate(f, 1, 0)
    assert g.half == 1
    assert g.grid.cell_width == F(1, 2) and g.grid.M == -1
    assert g.norm2() == 1


def test_fourier_atom_examples():
    phi = Atom.ball(2, 0)
    assert fourier_atom(phi) == Atom(CRational(1), 0, GroupElement.zero(2), GroupElement.zero(2))
    f1 = step_from_atoms([Atom.ball(2, 2)])
    Ff1 = step_from_atoms([fourier_atom(Atom.ball(2, 2))])
    assert Ff1.equals(StepFunction.indicator(2, 0, 4) * F(1, 4))
    assert fourier_step(f1).equals(Ff1)
    g1 = Atom.ball(2, 2, translate=F(3, 4))
    # (1/4) w_3(./4) on [0,4)
    w3 = step_from_atoms([Atom.ball(2, -2, modulate=F(3, 4), coeff=F(1, 4))])
    assert step_from_atoms([fourier_atom(g1)]).equals(w3)


def test_walsh_polynomial_examples():
    f1 = StepFunction.indicator(2, 0, F(1, 4))
    w = step_to_walsh_poly(f1)
    assert w.n == 2 and list(w.coefficients) == cr_list(*[F(1, 4)] * 4)
    one = walsh_poly_to_step(WalshPolynomial(2, 3, cr_list(1, 0, 0, 0, 0, 0, 0, 0)))
    assert one.equals(StepFunction.indicator(2, 0, 1))
    with pytest.raises(ValueError):
        step_to_walsh_poly(StepFunction.indicator(2, 0, 2))


def test_grid_and_step_basics():
    g = Grid(3, 1, 1)
    assert g.size == 9 and g.cell(4) == (F(4, 3), F(5, 3)) and g.cell_of(F(5, 3)) == 5
    f = StepFunction.indicator(3, F(1, 3), F(5, 3))
    assert f.integral() == CRational(F(4, 3))
    assert f.norm2() == F(4, 3)
    assert f.support_interval() == (0, 3)
    assert f.value_at(lambda_inv(F(2, 3), 3)) == CRational(1)
    assert f.value_at(lambda_inv(2, 3)) == CRational(0)
    with pytest.raises(ValueError):
        StepFunction(Grid(2, 1, 0), cr_list(1, 2, 3))
    with pytest.raises(ValueError):
        StepFunction.indicator(2, 1, F(1, 2))


def test_float_backend_roundtrip():
    f = StepFunction.indicator(2, F(1, 4), F(5, 8))
    g = f.to_float()
    assert not g.exact and g.equals(f, tol=0)
    with pytest.raises(S.BackendError):
        g.with_backend(S.EXACT)


def test_non_gaussian_atoms_fall_back_to_float():
    # 1 + chi(1, x) on I takes the value 1 + exp(2 pi i / 3)
    atoms = [Atom.ball(3, 0, modulate=1), Atom.ball(3, 0)]
    f = step_from_atoms(atoms)
    assert not f.exact
    with pytest.raises(S.BackendError):
        step_from_atoms(atoms, S.EXACT)


# --- properties -------------------------------------------------------------

@st.composite
def atoms(draw, p=None):
    p = p or draw(st.sampled_from([2, 4]))
    n = draw(st.integers(-2, 3))
    t = F(draw(st.integers(0, 4 * p**3)), p**3)
    b = F(draw(st.integers(0, p**4)), p**2)
    c = draw(gaussian_rationals())
    return Atom.ball(p, n, t, b, c)


@settings(max_examples=60, deadline=None)
@given(st.lists(atoms(2), min_size=1, max_size=3))
def test_atoms_pointwise(ats):
    f = step_from_atoms(ats)
    for k in range(f.grid.size):
        x = lambda_inv(k * f.grid.cell_width, 2)
        direct = sum((atom_at(a, x) for a in ats), CRational(0))
        assert f.values[k] == direct


@settings(max_examples=60, deadline=None)
@given(atoms())
def test_fourier_atom_matches_vct(a):
    f = step_from_atoms([a])
    Fa = step_from_atoms([fourier_atom(a)])
    assert fourier_step(f).equals(Fa)
    assert fourier_step(f.to_float()).equals(Fa, tol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(-2, 3), st.integers(-2, 3), st.integers(0, 3))
def test_fourier_atom_float_nonquarter(n, t_num, b_num):
    a = Atom.ball(3, n, F(abs(t_num), 9), F(b_num, 3), CRational(1, 1))
    f = step_from_atoms([a], S.FLOAT)
    Fa = step_from_atoms([fourier_atom(a)], S.FLOAT)
    assert fourier_step(f).equals(Fa, tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(step_functions(p=2, max_m=3, max_M=1), st.integers(-3, 3), st.integers(0, 16))
def test_translate_dilate_preserves_norm(f, j, h):
    g = translate_dilate(f, j, F(h, 8))
    assert g.norm2() == f.norm2()
    if j % 2 == 0:
        assert g.half == 0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]), st.data())
def test_translate_dilate_odd_j_non_square_p(p, data):
    f = data.draw(step_functions(p=p, max_m=2, max_M=1))
    g = translate_dilate(f, 1, 0)
    assert g.half == 1
    assert g.norm2() == f.norm2()


@settings(max_examples=50, deadline=None)
@given(st.lists(atoms(2), min_size=1, max_size=3), gaussian_rationals(), gaussian_rationals())
def test_linearity(ats, alpha, beta):
    def scaled(a, c):
        return Atom(CRational.coerce(a.coeff) * c, a.scale, a.translate, a.modulate)

    f = step_from_atoms(ats)
    g = step_from_atoms(ats[:1])
    combo = step_from_atoms([scaled(a, alpha) for a in ats] + [scaled(ats[0], beta)])
    assert combo.equals(f * alpha + g * beta)


@settings(max_examples=50, deadline=None)
@given(step_functions(p=2, max_m=3, max_M=1), st.integers(0, 3), st.integers(0, 3))
def test_refine_preserves_function(f, dm, dM):
    g = f.refine(f.grid.m + dm, f.grid.M + dM)
    assert g.equals(f)
    assert g.norm2() == f.norm2()


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 4]), st.integers(1, 3), st.data())
def test_walsh_roundtrip_and_plancherel(p, n, data):
    a = data.draw(st.lists(gaussian_rationals(), min_size=p**n, max_size=p**n))
    w = WalshPolynomial(p, n, a)
    f = walsh_poly_to_step(w)
    assert walsh_poly_to_step(step_to_walsh_poly(f)).equals(f)
    assert w.norm2() == S.total(S.abs2(f.values)) * F(p) ** (-n)


def test_random_translate_matches_group_shift():
    rng = random.Random(3)
    for _ in range(20):
        f = StepFunction(Grid(2, 2, 1), [CRational(rng.randint(-3, 3)) for _ in range(8)])
        h = F(rng.randint(0, 7), 4)
        g = translate(f, h)
        for k in range(g.grid.size):
            x = lambda_inv(k * g.grid.cell_width, 2)
            assert g.values[k] == f.value_at(x + lambda_inv(h, 2))
    assert np.all(translate(f, 0).values == f.values)
