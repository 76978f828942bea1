"""Carleman weight functions.

Elliptic weights use ``varphi = exp(gamma*phi)`` and ``sigma = s*gamma*varphi``
with the factor ``exp(2*s*varphi)``.  The factor overflows long before the
interesting range of ``s`` is reached, so every weighted integrand is
assembled as ``exp(2*s*varphi - shift)`` with one shift shared by both sides
of an inequality; ratios are unaffected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ParameterOverflow, UnsupportedGeometry, WeightViolation
from .geometry import INNER, GridDomain, GridField
from .riemannian import cartesian_gradient

DELTA_MIN = 1e-3
# largest sigma**3 we allow before declaring the parameters unusable
_SIGMA3_MAX = 1e250


def build_radial_weight(dom: GridDomain, upsilon: str) -> GridField:
    """Distance to the circle ``upsilon``: ``r - a`` (inner) or ``b - r`` (outer)."""
    if dom.kind != "annulus":
        raise UnsupportedGeometry("radial weights need an annulus")
    dom.role_of(upsilon)
    if upsilon == INNER:
        return dom.from_polar(lambda r, t: r - dom.r_inner)
    return dom.from_polar(lambda r, t: dom.r_outer - r)


def validate_weight(phi: GridField, upsilon: str, delta_min: float = DELTA_MIN,
                    tol: float = 1e-12) -> float:
    """Check positivity off ``upsilon``, vanishing on it and a non-degenerate gradient.

    Returns ``delta = min |grad phi|`` over the nodes.
    """
    dom = phi.domain
    ring = dom.boundary_ring(upsilon)
    vals = phi.values
    on_ups = np.abs(vals[ring])
    if on_ups.max() > tol:
        j = int(on_ups.argmax())
        raise WeightViolation("phi does not vanish on Upsilon", (ring, j), vals[ring, j])
    rest = vals.copy()
    rest[ring] = np.inf
    if rest.min() <= 0.0:
        i, j = np.unravel_index(rest.argmin(), rest.shape)
        raise WeightViolation("phi is not positive in D", (i, j), vals[i, j])
    grad = cartesian_gradient(dom, vals)
    mag = np.hypot(grad[0], grad[1])
    delta = float(mag.min())
    if delta <= delta_min:
        i, j = np.unravel_index(mag.argmin(), mag.shape)
        raise WeightViolation(f"min |grad phi| = {delta:.3g} <= delta_min = {delta_min:g}", (i, j), delta)
    return delta


@dataclass(frozen=True, eq=False)
class EllipticWeight:
    phi: GridField
    upsilon_id: str
    gamma: float
    s: float
    delta: float

    def __post_init__(self):
        if not (self.gamma > 0 and self.s > 0):
            raise ValueError("gamma and s must be positive")

    @classmethod
    def radial(cls, dom: GridDomain, upsilon: str, gamma: float, s: float,
               delta_min: float = DELTA_MIN) -> "EllipticWeight":
        phi = build_radial_weight(dom, upsilon)
        return cls(phi, upsilon, float(gamma), float(s), validate_weight(phi, upsilon, delta_min))

    def with_params(self, gamma: float | None = None, s: float | None = None) -> "EllipticWeight":
        return EllipticWeight(self.phi, self.upsilon_id, self.gamma if gamma is None else float(gamma),
                              self.s if s is None else float(s), self.delta)

    @cached_property
    def phi_big(self) -> np.ndarray:
        return np.exp(self.gamma * self.phi.values)

    @cached_property
    def sigma(self) -> np.ndarray:
        return self.s * self.gamma * self.phi_big


@dataclass(frozen=True)
class CarlemanFactors:
    """``exp(2 s varphi)`` stored as ``weight * exp(shift)``, plus ``sigma`` and ``sigma**3``."""

    log_e2sphi: np.ndarray = field(repr=False)
    shift: float
    weight: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    sigma3: np.ndarray = field(repr=False)

    @property
    def e2sphi(self) -> np.ndarray:
        """Unshifted factor; may overflow to ``inf`` for large ``s``."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_e2sphi)


def guarded_factors(log_e2sphi: np.ndarray, sigma: np.ndarray, extra_shift: float = 0.0) -> CarlemanFactors:
    if not np.all(np.isfinite(log_e2sphi)):
        raise ParameterOverflow("2*s*varphi is not finite")
    shift = float(log_e2sphi.max()) + float(extra_shift)
    with np.errstate(over="ignore"):
        sigma3 = sigma**3
    if not np.all(np.isfinite(sigma3)) or sigma3.max() > _SIGMA3_MAX:
        raise ParameterOverflow(f"sigma^3 exceeds {_SIGMA3_MAX:g}")
    weight = np.exp(log_e2sphi - shift)
    return CarlemanFactors(log_e2sphi, shift, weight, sigma, sigma3)


def carleman_factors(w: EllipticWeight, extra_shift: float = 0.0) -> CarlemanFactors:
    return guarded_factors(2.0 * w.s * w.phi_big, w.sigma, extra_shift)


def ell(t, T: float):
    """Degenerate time factor ``1 / (t (T - t))``."""
    t = np.asarray(t, dtype=float)
    return 1.0 / (t * (T - t))


@dataclass(frozen=True, eq=False)
class ParabolicWeight:
    phi_x: GridField
    T: float
    t: np.ndarray = field(repr=False)
    gamma: float
    s: float

    @property
    def m(self) -> float:
        return float(self.phi_x.values.max())

    @property
    def t_min(self) -> float:
        return float(self.t[0])

    @cached_property
    def ell(self) -> np.ndarray:
        return ell(self.t, self.T)

    @cached_property
    def varphi(self) -> np.ndarray:
        """``(exp(gamma phi) - exp(2 gamma m)) * ell(t)``, shape ``(n_t, n_r+1, n_theta)``."""
        e = np.exp(self.gamma * self.phi_x.values) - np.exp(2.0 * self.gamma * self.m)
        return self.ell[:, None, None] * e[None]

    @cached_property
    def xi(self) -> np.ndarray:
        return self.ell[:, None, None] * np.exp(self.gamma * self.phi_x.values)[None]

    @property
    def sigma(self) -> np.ndarray:
        return self.s * self.gamma * self.xi

    def with_params(self, gamma: float | None = None, s: float | None = None) -> "ParabolicWeight":
        return ParabolicWeight(self.phi_x, self.T, self.t, self.gamma if gamma is None else float(gamma),
                               self.s if s is None else float(s))


def parabolic_time_grid(T: float, n_t: int) -> np.ndarray:
    """``n_t`` uniform nodes on ``[t_min, T - t_min]`` with ``t_min = T / (4 n_t)``."""
    t_min = T / (4.0 * n_t)
    return np.linspace(t_min, T - t_min, n_t)


def build_parabolic_weight(phi_x: GridField, T: float, n_t: int, gamma: float, s: float) -> ParabolicWeight:
    if not T > 0:
        raise ValueError("T must be positive")
    if n_t < 16:
        raise ValueError("n_t must be at least 16")
    return ParabolicWeight(phi_x, float(T), parabolic_time_grid(T, n_t), float(gamma), float(s))


def parabolic_factors(w: ParabolicWeight, extra_shift: float = 0.0) -> CarlemanFactors:
    return guarded_factors(2.0 * w.s * w.varphi, w.sigma, extra_shift)
