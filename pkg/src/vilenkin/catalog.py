"""Named example functions and their published reference values."""
from __future__ import annotations

from fractions import Fraction

from .signals import StepFunction

F = Fraction

EXAMPLES = {
    "f1": (F(0), F(1, 4)),
    "g1": (F(3, 4), F(1)),
    "f2": (F(0), F(3, 8)),
    "g2": (F(3, 4), F(9, 8)),
}

# name -> quantity -> value, for p = 2
REFERENCE = {
    "f1": {"V_lambda": F(1, 48), "V_lambda_F": F(16, 3), "UP_lambda": F(1, 9),
           "V_G": F(1, 28), "V_G_F": F(64, 7), "UP_G": F(16, 49),
           "argmin_time": [(F(0), F(1, 4))], "argmin_freq": [(F(0), F(4))]},
    "g1": {"V_lambda": F(1, 48), "V_lambda_F": F(16, 3), "UP_lambda": F(1, 9),
           "V_G": F(1, 28), "V_G_F": F(64, 7), "UP_G": F(16, 49),
           "argmin_time": [(F(3, 4), F(1))], "argmin_freq": [(F(0), F(4))]},
    "f2": {"V_lambda": F(3, 64), "V_lambda_F": F(8), "UP_lambda": F(3, 8),
           "V_G": F(4, 21), "V_G_F": F(96, 7), "UP_G": F(128, 49),
           "argmin_time": [(F(0), F(1, 8))], "argmin_freq": [(F(0), F(2))]},
    "g2": {"V_lambda": F(71, 64), "V_lambda_F": F(32, 3), "UP_lambda": F(71, 6),
           "V_G": F(19, 14), "V_G_F": F(255, 14), "UP_G": F(4845, 196),
           "argmin_time": [(F(3, 4), F(7, 8))], "argmin_freq": [(F(0), F(4))]},
}

# Published entries that disagree with the definition of V.  The tuple holds
# (value the definition gives, short reason).
KNOWN_DISCREPANCIES = {
    ("f2", "V_G"): (F(3, 28), "published value integrates over [0,1/2) instead of [0,3/8)"),
    ("f2", "UP_G"): (F(72, 49), "follows from V_G(f2)"),
    ("g2", "V_lambda"): (F(161, 192), "published minimum is taken over centers in supp g2 only"),
    ("g2", "UP_lambda"): (F(161, 18), "follows from V_lambda(g2)"),
    ("g2", "argmin_time"): ([(F(1, 4), F(3, 8))], "true lambda minimizer lies outside supp g2"),
}


def example(name: str, p: int = 2, backend: str = "exact") -> StepFunction:
    a, b = EXAMPLES[name]
    return StepFunction.indicator(p, a, b, backend=backend)


def example2_closed_form(k: int) -> Fraction:
    """UP_G(1_[0,1/4)) on the group with p = 2^k."""
    q = 2**k
    s = q * q + q + 1
    return (1 - F(4, q) + F(4, q * s)) * (F(3, 4) * q * q + F(q * q, 4 * s))
