from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from vilenkin.group import GroupElement
from vilenkin.scalars import CRational
from vilenkin.signals import Grid, StepFunction

SMALL_P = (2, 3, 4, 5, 8)


def rationals(max_num=6, max_den=6):
    return st.builds(Fraction, st.integers(-max_num, max_num), st.integers(1, max_den))


def gaussian_rationals():
    return st.builds(CRational, rationals(), rationals())


@st.composite
def elements(draw, p=None, lo=-3, hi=4):
    p = p if p is not None else draw(st.sampled_from(SMALL_P))
    digits = draw(st.dictionaries(st.integers(lo, hi), st.integers(1, p - 1), max_size=5))
    return GroupElement.from_digits(p, digits)


@st.composite
def element_triples(draw):
    p = draw(st.sampled_from(SMALL_P))
    return tuple(draw(elements(p)) for _ in range(3))


@st.composite
def step_functions(draw, p=2, max_m=4, max_M=2, complex_values=True):
    """Nonzero exact step functions on Grid(p, m, M)."""
    m = draw(st.integers(0, max_m))
    M = draw(st.integers(0, max_M))
    grid = Grid(p, m, M)
    vals = gaussian_rationals() if complex_values else st.builds(CRational, rationals())
    values = draw(st.lists(vals, min_size=grid.size, max_size=grid.size))
    if all(not v for v in values):
        values[draw(st.integers(0, grid.size - 1))] = CRational(1)
    return StepFunction(grid, values)


def random_step(rng: random.Random, p=2, max_m=4, max_M=2, backend="exact", real=False) -> StepFunction:
    """Random nonzero step function for fixed-size corpora (no shrinking needed)."""
    m = rng.randint(0, max_m)
    M = rng.randint(0, max_M)
    grid = Grid(p, m, M)

    def frac():
        return Fraction(rng.randint(-9, 9), rng.randint(1, 8))

    if backend == "exact":
        vals = [CRational(frac(), 0 if real else frac()) for _ in range(grid.size)]
        if not any(vals):
            vals[0] = CRational(1)
        return StepFunction(grid, vals)
    nrng = np.random.default_rng(rng.randint(0, 2**32 - 1))
    v = nrng.standard_normal(grid.size)
    if not real:
        v = v + 1j * nrng.standard_normal(grid.size)
    return StepFunction(grid, v.astype(np.complex128))


def corpus(seed: int, count: int, **kw) -> list[StepFunction]:
    rng = random.Random(seed)
    return [random_step(rng, **kw) for _ in range(count)]


# ----------------------------------------------------------------------
# acceptance criteria report
# ----------------------------------------------------------------------

CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        entry = CRITERIA.setdefault(mark.args[0], {"title": mark.args[1], "results": []})
        status = "xfail" if hasattr(rep, "wasxfail") else rep.outcome
        entry["results"].append((item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        entry = CRITERIA[n]
        bad = [name for name, status in entry["results"] if status != "passed"]
        total = len(entry["results"])
        if not bad:
            line = f"criterion {n}: PASS  {entry['title']} ({total} checks)"
        else:
            known = all(status == "xfail" for _, status in entry["results"] if status != "passed")
            why = "known unattainable" if known else "failed"
            line = f"criterion {n}: FAIL  {entry['title']} ({len(bad)}/{total} {why}: {', '.join(bad)})"
        terminalreporter.write_line(line)
