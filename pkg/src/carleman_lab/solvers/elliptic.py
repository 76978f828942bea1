"""Dirichlet problems for ``-Delta_g u + p u = 0`` and Cauchy-data extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import GammaOffGrid, IncompatibleData, TruncationTooSmall
from ..geometry import (INNER, OUTER, BoundaryCurve, GridDomain, GridField, build_annulus,
                        grid_circle, integrate_boundary)
from ..riemannian import MetricField, PotentialField, d_r, d_theta, gather, node_index, scatter
from .linalg import SPDSolver

TRUNCATION_TOL = 1e-8


@dataclass(eq=False)
class EllipticProblem:
    domain: GridDomain
    metric: MetricField
    potential: PotentialField
    dirichlet: dict
    kind: str = "interior"
    gamma_radius: float | None = None
    tol: float = 1e-12
    truncation_tol: float = TRUNCATION_TOL
    operator: "DirichletOperator | None" = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("interior", "exterior_truncated"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        nt = self.domain.n_theta
        traces = {}
        for bid in self.domain.boundary_ids:
            if bid not in self.dirichlet:
                raise IncompatibleData(f"missing Dirichlet data on boundary {bid!r}")
            val = np.broadcast_to(np.asarray(self.dirichlet[bid], dtype=float), (nt,)).copy()
            if not np.all(np.isfinite(val)):
                raise IncompatibleData(f"non-finite Dirichlet data on {bid!r}")
            traces[bid] = val
        self.dirichlet = traces
        if self.kind == "exterior_truncated":
            if not self.potential.eta > 0:
                raise IncompatibleData("the exterior problem needs p >= eta > 0")
            if self.domain.boundary_tags.get(OUTER) != "artificial":
                raise IncompatibleData("the truncated exterior problem needs an artificial outer circle")
            if np.any(self.dirichlet[OUTER] != 0.0):
                raise IncompatibleData("the artificial boundary carries homogeneous data")
        elif np.any(self.potential.p < 0):
            raise IncompatibleData("the interior problem needs p >= 0")


class DirichletOperator:
    """``-Delta_g + p`` with its boundary rows eliminated; reusable for many traces."""

    def __init__(self, domain: GridDomain, metric: MetricField, potential: PotentialField, tol: float = 1e-12):
        self.domain = domain
        disc = metric.discretization
        A = (disc.K + sp.diags(gather(domain, potential.p) * disc.mass)).tocsr()
        self.idx = node_index(domain)
        self.free = ~disc.boundary_mask
        self.coupling = A[self.free][:, ~self.free]
        self.solver = SPDSolver(A[self.free][:, self.free], tol=tol)
        self.tol = tol
        self.size = A.shape[0]

    def solve(self, dirichlet: dict) -> GridField:
        dom = self.domain
        u_b = np.zeros(self.size)
        for bid, trace in dirichlet.items():
            u_b[self.idx[dom.boundary_ring(bid)]] = trace
        x = u_b.copy()
        x[self.free], its = self.solver.solve_counted(-(self.coupling @ u_b[~self.free]))
        out = GridField(dom, scatter(dom, x))
        out.meta.update(iterations=its, tol=self.tol)
        return out


def _solve_dirichlet(prob: EllipticProblem) -> GridField:
    if prob.operator is None:
        prob.operator = DirichletOperator(prob.domain, prob.metric, prob.potential, prob.tol)
    return prob.operator.solve(prob.dirichlet)


def solve_interior(prob: EllipticProblem) -> GridField:
    if prob.kind != "interior":
        raise IncompatibleData("solve_interior needs an interior problem")
    return _solve_dirichlet(prob)


def truncation_bound(eta: float, R_inf: float, r_gamma: float) -> float:
    return math.exp(-math.sqrt(eta) * (R_inf - r_gamma))


def required_radius(eta: float, r_gamma: float, truncation_tol: float = TRUNCATION_TOL) -> float:
    """Smallest ``R_inf`` with ``exp(-sqrt(eta) (R_inf - r_gamma)) <= truncation_tol``."""
    return r_gamma + math.log(1.0 / truncation_tol) / math.sqrt(eta)


def exterior_domain(r_s: float, r_gamma: float, R_inf: float, n_gamma: int, n_theta: int) -> GridDomain:
    """Annulus ``(r_s, ~R_inf)`` whose spacing puts ``r_gamma`` on a grid circle.

    ``n_gamma`` radial cells span ``[r_s, r_gamma]``; the outer radius is rounded up.
    """
    dr = (r_gamma - r_s) / n_gamma
    n_r = int(math.ceil((R_inf - r_s) / dr - 1e-9))
    return build_annulus(r_s, r_s + n_r * dr, n_r, n_theta, {INNER: "S", OUTER: "artificial"})


def solve_exterior_truncated(prob: EllipticProblem, R_inf: float | None = None) -> GridField:
    """Exterior problem on ``annulus(r_S, R_inf)`` with ``u = 0`` on the artificial circle."""
    if prob.kind != "exterior_truncated":
        raise IncompatibleData("solve_exterior_truncated needs an exterior_truncated problem")
    dom = prob.domain
    R_inf = dom.r_outer if R_inf is None else float(R_inf)
    r_gamma = prob.gamma_radius if prob.gamma_radius is not None else dom.r_inner
    eta = prob.potential.eta
    bound = truncation_bound(eta, R_inf, r_gamma)
    if bound > prob.truncation_tol * (1 + 1e-9):
        raise TruncationTooSmall(
            f"R_inf={R_inf:g} gives exp(-sqrt(eta)(R_inf - r_Gamma)) = {bound:.3g} > {prob.truncation_tol:g}; "
            f"need R_inf >= {required_radius(eta, r_gamma, prob.truncation_tol):.6g}")
    if abs(R_inf - dom.r_outer) > 1e-12 * R_inf:
        n_r = int(math.ceil((R_inf - dom.r_inner) / dom.dr - 1e-9))
        new = build_annulus(dom.r_inner, dom.r_inner + n_r * dom.dr, n_r, dom.n_theta,
                            dict(dom.boundary_tags), dom.center)
        prob = EllipticProblem(new, MetricField.sample(new, prob.metric.preset), prob.potential.resample(new),
                               {INNER: prob.dirichlet[INNER], OUTER: 0.0}, prob.kind, prob.gamma_radius,
                               prob.tol, prob.truncation_tol)
    out = _solve_dirichlet(prob)
    out.meta.update(R_inf=float(prob.domain.r_outer), truncation_bound=bound)
    return out


@dataclass(frozen=True)
class CauchyData:
    trace: np.ndarray = field(repr=False)
    normal_deriv: np.ndarray = field(repr=False)
    radius: float
    theta: np.ndarray = field(repr=False)
    l2_trace: float
    h1_trace: float
    l2_normal: float

    @property
    def norms(self) -> dict:
        return {"l2_trace": self.l2_trace, "h1_trace": self.h1_trace, "l2_normal": self.l2_normal}


def l2_norm(values: np.ndarray, curve: BoundaryCurve) -> float:
    return math.sqrt(integrate_boundary(np.asarray(values) ** 2, curve))


def arclength_derivative(values: np.ndarray, curve: BoundaryCurve) -> np.ndarray:
    """Periodic centred derivative in theta divided by the radius."""
    return d_theta(np.asarray(values, dtype=float), curve.domain.dtheta) / curve.radius


def h1_norm(values: np.ndarray, curve: BoundaryCurve) -> float:
    return math.sqrt(l2_norm(values, curve) ** 2 + l2_norm(arclength_derivative(values, curve), curve) ** 2)


def radial_derivative_on(u: GridField, ring: int) -> np.ndarray:
    """Second-order radial derivative on one ring (centred inside, one-sided at the ends)."""
    vals = u.values
    dr = u.domain.dr
    if 0 < ring < u.domain.n_r:
        return (vals[ring + 1] - vals[ring - 1]) / (2 * dr)
    return d_r(vals, dr)[ring]


def extract_cauchy(u: GridField, gamma_curve: BoundaryCurve) -> CauchyData:
    """Trace and outward normal derivative of ``u`` on a grid circle, with discrete norms."""
    if gamma_curve.domain is not u.domain:
        raise GammaOffGrid("curve belongs to a different grid")
    trace = gamma_curve.trace(u)
    sign = float(np.sign(gamma_curve.normal[0] @ np.array([np.cos(gamma_curve.theta[0]),
                                                          np.sin(gamma_curve.theta[0])])))
    dn = sign * radial_derivative_on(u, gamma_curve.ring)
    return CauchyData(trace, dn, gamma_curve.radius, gamma_curve.theta.copy(),
                      l2_norm(trace, gamma_curve), h1_norm(trace, gamma_curve), l2_norm(dn, gamma_curve))


def cauchy_on_circle(u: GridField, radius: float) -> CauchyData:
    return extract_cauchy(u, grid_circle(u.domain, radius))
