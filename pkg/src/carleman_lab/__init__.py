"""Numerical verification of Carleman estimates and Cauchy-data stability on polar grids."""

from .bank import elliptic_bank, parabolic_bank
from .carleman import (CarlemanSides, SweepResult, detect_stable_region, elliptic_sides, elliptic_sweep,
                       parabolic_sides, parabolic_sweep)
from .errors import CarlemanLabError
from .geometry import INNER, OUTER, BoundaryCurve, GridDomain, GridField, build_annulus, build_disk, grid_circle
from .riemannian import Anisotropic, Conformal, Euclidean, MetricField, PotentialField, laplace_beltrami
from .solvers import (EllipticProblem, ParabolicProblem, cauchy_on_circle, solve_exterior_truncated,
                      solve_interior, solve_parabolic)
from .stability import (AdmissibleSpec, EllipticSetup, ParabolicAdmissibleSpec, ParabolicSetup, SeparableData,
                        TrigPoly, run_parabolic_study, run_study, sample_admissible)
from .weights import EllipticWeight, ParabolicWeight, build_parabolic_weight, build_radial_weight

__version__ = "0.1.0"

__all__ = [
    "INNER", "OUTER", "AdmissibleSpec", "Anisotropic", "BoundaryCurve", "CarlemanLabError", "CarlemanSides",
    "Conformal", "EllipticProblem", "EllipticSetup", "EllipticWeight", "Euclidean", "GridDomain", "GridField",
    "MetricField", "ParabolicAdmissibleSpec", "ParabolicProblem", "ParabolicSetup", "ParabolicWeight",
    "PotentialField", "SeparableData", "SweepResult", "TrigPoly", "build_annulus", "build_disk",
    "build_parabolic_weight", "build_radial_weight", "cauchy_on_circle", "detect_stable_region", "elliptic_bank",
    "elliptic_sides", "elliptic_sweep", "grid_circle", "laplace_beltrami", "parabolic_bank", "parabolic_sides",
    "parabolic_sweep", "run_parabolic_study", "run_study", "sample_admissible", "solve_exterior_truncated",
    "solve_interior", "solve_parabolic",
]
