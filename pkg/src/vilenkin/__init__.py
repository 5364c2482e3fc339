"""Harmonic analysis on Vilenkin groups: transforms, Haar bases and uncertainty products."""
from __future__ import annotations

from .group import GroupElement, RootOfUnity, character, lam, lambda_inv, norm_G, walsh
from .haar import HaarExpansion, d_from_c, haar_analyze, haar_function, haar_synthesize, modified_gibbs
from .scalars import EXACT, FLOAT, BackendError, CRational
from .signals import Atom, Grid, StepFunction, WalshPolynomial, step_from_atoms
from .uncertainty import UPReport, check_bounds, moment_via_haar, second_moment, up, variance
from .vct import fourier_step, group_correlate, inverse_fourier_step, vct_forward, vct_inverse

__version__ = "0.1.0"

__all__ = [
    "Atom", "BackendError", "CRational", "EXACT", "FLOAT", "Grid", "GroupElement",
    "HaarExpansion", "RootOfUnity", "StepFunction", "UPReport", "WalshPolynomial",
    "character", "check_bounds", "d_from_c", "fourier_step", "group_correlate",
    "haar_analyze", "haar_function", "haar_synthesize", "inverse_fourier_step", "lam",
    "lambda_inv", "modified_gibbs", "moment_via_haar", "norm_G", "second_moment",
    "step_from_atoms", "up", "variance", "vct_forward", "vct_inverse", "walsh",
]
