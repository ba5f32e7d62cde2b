"""Spectral tools for quantum toboggans: multisheeted complex contours,
their rectification to Sturm-Schroedinger form, shooting and matrix
eigensolvers, the solvable free toboggan, supersymmetric partners,
large-l asymptotics and metrics of finite non-Hermitian pencils."""

from .complexpath import ContourSpec, StokesWedge, stokes_wedges, total_turning
from .eigensolve import (Eigenresult, ShootingConfig, SolverError, matrix_spectrum,
                         mismatch, refine_root, shoot_spectrum)
from .gaussian import GaussRational
from .odeint import IntegratorConfig, OdeState, integrate_along, wkb_seed
from .xform import PotentialSpec, SturmProblem, rectify

__all__ = [
    "ContourSpec", "StokesWedge", "stokes_wedges", "total_turning",
    "Eigenresult", "ShootingConfig", "SolverError", "matrix_spectrum", "mismatch",
    "refine_root", "shoot_spectrum", "GaussRational", "IntegratorConfig", "OdeState",
    "integrate_along", "wkb_seed", "PotentialSpec", "SturmProblem", "rectify",
]
