"""Crank-Nicolson solver for ``(d_t - Delta_g) u = f`` with Dirichlet data on the outer circle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from ..errors import IncompatibleData
from ..geometry import OUTER, GridDomain, GridField
from ..riemannian import MetricField, gather, node_index, scatter
from .linalg import FactorizedSolver


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Values on ``t x grid``; ``dt_values`` holds ``d_t u`` on the same nodes."""

    domain: GridDomain
    t: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    dt_values: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.values.shape != (self.t.size,) + self.domain.shape:
            raise ValueError("space-time values do not match the grid")

    def at(self, k: int) -> GridField:
        return GridField(self.domain, self.values[k])

    def restrict(self, sub: GridDomain) -> "SpaceTimeField":
        i0 = self.domain.ring_index(sub.r_inner)
        if i0 is None or sub.n_theta != self.domain.n_theta:
            raise ValueError("sub-domain does not share this grid")
        sl = slice(i0, i0 + sub.n_r + 1)
        return SpaceTimeField(sub, self.t, self.values[:, sl].copy(), self.dt_values[:, sl].copy(), dict(self.meta))

    @classmethod
    def from_function(cls, dom: GridDomain, t: np.ndarray, u: Callable, u_t: Callable | None = None):
        """Sample closed forms ``u(t, r, theta)`` (and ``d_t u``); finite differences when ``u_t`` is None."""
        t = np.asarray(t, dtype=float)
        T = t[:, None, None]
        vals = np.broadcast_to(u(T, dom.R[None], dom.TH[None]), (t.size,) + dom.shape).astype(float)
        if u_t is None:
            dt_vals = time_derivative(vals, t)
        else:
            dt_vals = np.broadcast_to(u_t(T, dom.R[None], dom.TH[None]), vals.shape).astype(float)
        if dom.is_disk:
            vals[:, 0] = vals[:, 0, :1]
            dt_vals[:, 0] = dt_vals[:, 0, :1]
        return cls(dom, t, vals, dt_vals)


def time_derivative(values: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Centred differences in time, one-sided second order at the ends."""
    return np.gradient(values, t, axis=0, edge_order=2)


@dataclass(eq=False)
class ParabolicProblem:
    domain: GridDomain
    metric: MetricField
    T: float
    n_t: int
    u0: GridField
    boundary: Callable[[float], np.ndarray]
    source: Callable[[float], np.ndarray] | None = None
    gamma_radius: float | None = None
    tol: float = 1e-10

    def __post_init__(self):
        if not self.domain.is_disk:
            raise IncompatibleData("the parabolic problem lives on a disk")
        if self.n_t < 64:
            raise IncompatibleData("time step must satisfy dt <= T/64")
        g0 = np.broadcast_to(np.asarray(self.boundary(0.0), dtype=float), (self.domain.n_theta,))
        mismatch = np.abs(g0 - self.u0.values[-1]).max()
        if mismatch > 1e-10:
            raise IncompatibleData(f"g(0, .) differs from u0 on S by {mismatch:.3g}")

    @property
    def dt(self) -> float:
        return self.T / self.n_t

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n_t + 1)


def solve_parabolic(prob: ParabolicProblem) -> SpaceTimeField:
    dom = prob.domain
    disc = prob.metric.discretization
    idx = node_index(dom)
    N = disc.K.shape[0]
    free = ~disc.boundary_mask
    bnodes = idx[dom.boundary_ring(OUTER)]
    dt = prob.dt
    Mdt = sp.diags(disc.mass / dt)
    lhs = (Mdt + 0.5 * disc.K).tocsr()
    rhs_op = (Mdt - 0.5 * disc.K).tocsr()
    solver = FactorizedSolver(lhs[free][:, free], tol=prob.tol)
    coupling = lhs[free][:, ~free]

    def src(t):
        if prob.source is None:
            return 0.0
        return disc.mass * gather(dom, np.broadcast_to(prob.source(t), dom.shape))

    t = prob.t
    out = np.empty((t.size,) + dom.shape)
    u = gather(dom, prob.u0.values)
    out[0] = prob.u0.values
    f_old = src(t[0])
    for k in range(1, t.size):
        f_new = src(t[k])
        b = rhs_op @ u + 0.5 * (f_old + f_new)
        nxt = np.zeros(N)
        nxt[bnodes] = np.broadcast_to(prob.boundary(t[k]), (dom.n_theta,))
        b_free = b[free] - coupling @ nxt[~free]
        nxt[free] = solver.solve(b_free, x0=u[free])
        u = nxt
        f_old = f_new
        out[k] = scatter(dom, u)
    res = SpaceTimeField(dom, t, out, time_derivative(out, t))
    res.meta.update(dt=dt, tol=prob.tol)
    return res
