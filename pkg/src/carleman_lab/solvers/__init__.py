from .elliptic import (CauchyData, DirichletOperator, EllipticProblem, cauchy_on_circle, exterior_domain, extract_cauchy,
                       h1_norm, l2_norm, required_radius, solve_exterior_truncated, solve_interior)
from .parabolic import ParabolicProblem, SpaceTimeField, solve_parabolic, time_derivative

__all__ = [
    "CauchyData", "DirichletOperator", "EllipticProblem", "ParabolicProblem", "SpaceTimeField", "cauchy_on_circle",
    "exterior_domain", "extract_cauchy", "h1_norm", "l2_norm", "required_radius",
    "solve_exterior_truncated", "solve_interior", "solve_parabolic", "time_derivative",
]
