"""Both sides of the elliptic and parabolic Carleman inequalities, and (s, gamma) sweeps.

Every weighted integrand carries ``exp(2 s varphi - shift)`` with one shift per
evaluation, so the reported terms equal the true ones times ``exp(-shift)``.
Ratios are exact; absolute values are recovered through ``log_term``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NoStableRegion
from .geometry import BoundaryCurve, GridField, boundary_curve
from .parallel import ordered_map
from .riemannian import (MetricField, PotentialField, cartesian_gradient, d_theta, laplace_beltrami_values,
                         metric_normal)
from .solvers.parabolic import SpaceTimeField
from .weights import EllipticWeight, ParabolicWeight, carleman_factors, parabolic_factors

TERMS = ("lhs_interior", "lhs_upsilon", "rhs_pde", "rhs_pi", "rhs_upsilon_tangential")
INDETERMINATE_RHS = 1e-300
STABLE_SLACK = 1.2


@dataclass(frozen=True)
class CarlemanSides:
    lhs_interior: float
    lhs_upsilon: float
    rhs_pde: float
    rhs_pi: float
    rhs_upsilon_tangential: float
    s: float
    gamma: float
    exponent_shift: float
    # per-term natural logs, kept so a term far below the shared shift is not lost to underflow
    logs: tuple | None = field(default=None, compare=False, repr=False)

    @property
    def lhs(self) -> float:
        return self.lhs_interior + self.lhs_upsilon

    @property
    def rhs(self) -> float:
        return self.rhs_pde + self.rhs_pi + self.rhs_upsilon_tangential

    @property
    def indeterminate(self) -> bool:
        return not self.rhs > INDETERMINATE_RHS

    @property
    def ratio(self) -> float:
        return math.nan if self.indeterminate else self.lhs / self.rhs

    def log_term(self, name: str) -> float:
        """Natural log of the unshifted term (``-inf`` for a zero term)."""
        if self.logs is not None:
            return self.logs[TERMS.index(name)]
        v = getattr(self, name)
        return math.log(v) + self.exponent_shift if v > 0 else -math.inf

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in TERMS}
        d.update(s=self.s, gamma=self.gamma, exponent_shift=self.exponent_shift, lhs=self.lhs, rhs=self.rhs,
                 ratio=self.ratio)
        return d


# ------------------------------------------------------------------ quadrature
#
# The weights vary on scales ~1/(2 s gamma varphi), far below any affordable grid
# spacing.  Integrands are therefore handled as exp(L) * F with L the (shifted)
# log-weight and F a smooth factor.  Both are interpolated by local four-point
# cubics, which is accurate because each is smooth on the grid scale, and
# exp(L) * F is then integrated on a sub-grid fine enough that L moves by at
# most _DL per step.

_DL = 0.05
_NEGLIGIBLE = 80.0
_MAX_SUB = 4096


def _support_max(L: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Largest ``L`` along the last axis where ``F`` is nonzero (``max L`` if ``F`` vanishes)."""
    masked = np.where(F != 0, L, -np.inf).max(axis=-1)
    return np.where(np.isfinite(masked), masked, L.max(axis=-1))


def _local_cubic(x: np.ndarray, n_sub: np.ndarray):
    """Sub-grid points, Simpson weights and 4-point Lagrange interpolation stencils.

    Each cell ``[x_i, x_{i+1}]`` is split into ``n_sub[i]`` (even) steps and interpolated
    from nodes ``i-1 .. i+2`` (shifted inwards at the ends).  Being local, the
    interpolant is exactly zero wherever the data vanish on the stencil, so no
    ringing leaks into regions the weight amplifies.
    """
    n = x.size - 1
    h0 = x[1] - x[0]
    counts = n_sub.copy()
    counts[-1] += 1  # the last cell also carries the right end point
    cell = np.repeat(np.arange(n), counts)
    start = np.concatenate([[0], np.cumsum(counts)[:-1]])
    k = np.arange(cell.size) - start[cell]
    m = n_sub[cell]
    h = h0 / m
    w = np.where(k % 2 == 1, 4.0, 2.0) * h / 3.0
    w[0] = h[0] / 3.0
    w[-1] = h[-1] / 3.0
    s0 = np.clip(cell - 1, 0, n - 3)
    xi = cell - s0 + k / m
    z = np.arange(4.0)
    coef = np.ones((xi.size, 4))
    for a in range(4):
        for c in range(4):
            if c != a:
                coef[:, a] *= (xi - z[c]) / (z[a] - z[c])
    idx = s0[:, None] + np.arange(4)
    return x[cell] + h * k, w, idx, coef


def _fitted(L: np.ndarray, F: np.ndarray, x: np.ndarray):
    """``int exp(L) F dx`` along the last axis as ``(scale, value)`` with result ``exp(scale) * value``.

    ``F`` must be nonnegative; its interpolant is clipped at zero.
    """
    L = np.asarray(L, dtype=float)
    F = np.broadcast_to(F, L.shape)
    scale = _support_max(L, F)
    Ls = L - scale[..., None]
    # a cell needs sub-steps only in slices where it is within _NEGLIGIBLE e-folds of
    # the overall maximum; other slices are swamped once the slices are combined
    rel = L - np.where(np.isfinite(scale), scale, L.max(axis=-1)).max()
    significant = np.maximum(rel[..., :-1], rel[..., 1:]) > -_NEGLIGIBLE
    jump = np.where(significant, np.abs(np.diff(Ls, axis=-1)), 0.0)
    lead = tuple(range(L.ndim - 1))
    if lead:
        jump = jump.max(axis=lead)
    n_sub = np.ceil(jump / _DL).astype(int)
    n_sub = np.clip(n_sub + n_sub % 2, 2, _MAX_SUB)
    _, wf, idx, coef = _local_cubic(x, n_sub)
    Lf = (Ls[..., idx] * coef).sum(axis=-1)
    Ff = np.maximum((F[..., idx] * coef).sum(axis=-1), 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        integrand = np.where(Ff > 0, np.exp(Lf) * Ff, 0.0)
    return scale, integrand @ wf


def _theta_sum(L: np.ndarray, F: np.ndarray, dtheta: float):
    """Periodic trapezoid in theta as ``(scale, value)``."""
    F = np.broadcast_to(F, L.shape)
    scale = _support_max(L, F)
    return scale, (np.exp(L - scale[..., None]) * F).sum(axis=-1) * dtheta


def _volume(dom, L: np.ndarray, F: np.ndarray):
    """``int_D exp(L) F dx`` over the trailing grid axes, as ``(scale, value)``."""
    sc, val = _theta_sum(L, F, dom.dtheta)
    return _fitted(sc, val * dom.r, dom.r)


def _surface(curve: BoundaryCurve, L: np.ndarray, F: np.ndarray):
    sc, val = _theta_sum(L, F, curve.domain.dtheta)
    return sc, val * curve.radius


def _shared_shift(parts: list, base: float, t: np.ndarray | None = None):
    """Reduce ``(scale, value)`` pairs to numbers under one common shift.

    The shift is ``base`` plus the log of the largest term, so the largest term is of
    order one whatever the dynamic range of the weight.
    """
    pairs = []
    for scale, value in parts:
        if t is not None:
            scale, value = _fitted(scale, value, t)
        pairs.append((float(scale), float(value)))
    logs = [sc + math.log(v) for sc, v in pairs if v > 0]
    extra = max(logs) if logs else 0.0
    true_logs = tuple(base + sc + math.log(v) if v > 0 else -math.inf for sc, v in pairs)
    return [v * math.exp(sc - extra) if v > 0 else 0.0 for sc, v in pairs], base + extra, true_logs


def _ring_terms(g: MetricField, values: np.ndarray, grad: np.ndarray, curve: BoundaryCurve):
    """Euclidean ``|grad u|^2``, ``d_{nu_g} u`` and Euclidean ``|grad_tau u|^2`` on a circle.

    ``values`` has shape ``(..., n_r+1, n_theta)`` and ``grad`` is its Cartesian gradient.
    """
    gr = grad[..., curve.ring, :]
    full = gr[0] ** 2 + gr[1] ** 2
    nug = metric_normal(g, curve)
    dn = gr[0] * nug[:, 0] + gr[1] * nug[:, 1]
    tau = d_theta(values[..., curve.ring, :], curve.domain.dtheta) / curve.radius
    return full, dn, tau**2


def _roles(dom, roles: dict | None, upsilon_id: str) -> tuple[str, str]:
    roles = dict(roles or {})
    ups = roles.get("upsilon", upsilon_id)
    if ups != upsilon_id:
        raise ValueError(f"weight vanishes on {upsilon_id!r}, not on {ups!r}")
    pi = roles.get("pi")
    if pi is None:
        pi = next(b for b in dom.boundary_ids if b != ups)
    dom.role_of(pi)
    return ups, pi


# ------------------------------------------------------------------ elliptic


def elliptic_sides(w: EllipticWeight, g: MetricField, p: PotentialField, u: GridField,
                   roles: dict | None = None, extra_shift: float = 0.0) -> CarlemanSides:
    """The five weighted terms of the elliptic inequality for ``P = -Delta_g + p``.

    ``roles`` maps ``"upsilon"``/``"pi"`` to boundary ids; by default Upsilon is where the
    weight vanishes and Pi is the other circle.
    """
    dom = u.domain
    if w.phi.domain != dom or g.domain != dom:
        raise ValueError("weight, metric and field must share one grid")
    ups, pi = _roles(dom, roles, w.upsilon_id)
    fac = carleman_factors(w, extra_shift)
    L = fac.log_e2sphi - fac.shift
    sig, sig3 = fac.sigma, fac.sigma3
    vals = u.values
    grad = cartesian_gradient(dom, vals)
    grad2 = grad[0] ** 2 + grad[1] ** 2
    Pu = -laplace_beltrami_values(g, vals) + p.p * vals

    lhs_int = _volume(dom, L, sig * w.gamma * (grad2 + sig**2 * vals**2))
    rhs_pde = _volume(dom, L, Pu**2)

    cu = boundary_curve(dom, ups)
    _, dn, tau2 = _ring_terms(g, vals, grad, cu)
    i = cu.ring
    lhs_ups = _surface(cu, L[i], sig[i] * (dn**2 + sig[i] ** 2 * vals[i] ** 2))
    rhs_tau = _surface(cu, L[i], sig[i] * tau2)

    cp = boundary_curve(dom, pi)
    full, _, _ = _ring_terms(g, vals, grad, cp)
    j = cp.ring
    rhs_pi = _surface(cp, L[j], sig[j] * full + sig3[j] * vals[j] ** 2)
    terms, shift, logs = _shared_shift([lhs_int, lhs_ups, rhs_pde, rhs_pi, rhs_tau], fac.shift)
    return CarlemanSides(*terms, w.s, w.gamma, shift, logs)


# ------------------------------------------------------------------ parabolic


def parabolic_sides(w: ParabolicWeight, g: MetricField, u: SpaceTimeField, roles: dict | None = None,
                    extra_shift: float = 0.0) -> CarlemanSides:
    """Weighted terms of the parabolic inequality for ``d_t - Delta_g``.

    ``u`` must be sampled on the weight's time grid.  Sigma is the circle where the
    spatial weight vanishes (the observation-opposite side) and Sigma_0 the other one.
    """
    dom = u.domain
    if w.phi_x.domain != dom or g.domain != dom:
        raise ValueError("weight, metric and field must share one grid")
    if u.t.shape != w.t.shape or not np.allclose(u.t, w.t, rtol=0, atol=1e-14 * w.T):
        raise ValueError("space-time field is not sampled on the weight's time grid")
    upsilon = next(b for b in dom.boundary_ids if np.all(np.abs(w.phi_x.values[dom.boundary_ring(b)]) <= 1e-12))
    ups, pi = _roles(dom, roles, upsilon)
    fac = parabolic_factors(w, extra_shift)
    L = fac.log_e2sphi - fac.shift
    sig, sig3 = fac.sigma, fac.sigma3
    vals, ut = u.values, u.dt_values
    grad = cartesian_gradient(dom, vals)
    grad2 = grad[0] ** 2 + grad[1] ** 2
    Lu = ut - laplace_beltrami_values(g, vals)

    lhs_int = _volume(dom, L, w.gamma * sig * (grad2 + sig**2 * vals**2))
    rhs_pde = _volume(dom, L, Lu**2)

    cu = boundary_curve(dom, ups)
    i = cu.ring
    _, dn, tau2 = _ring_terms(g, vals, grad, cu)
    si = sig[:, i]
    lhs_ups = _surface(cu, L[:, i], si * (dn**2 + si**2 * vals[:, i] ** 2))
    rhs_tau = _surface(cu, L[:, i], ut[:, i] ** 2 / si + si * tau2)

    cp = boundary_curve(dom, pi)
    j = cp.ring
    full, _, _ = _ring_terms(g, vals, grad, cp)
    sj = sig[:, j]
    rhs_pi = _surface(cp, L[:, j], ut[:, j] ** 2 / sj + sj * full + sig3[:, j] * vals[:, j] ** 2)

    terms, shift, logs = _shared_shift([lhs_int, lhs_ups, rhs_pde, rhs_pi, rhs_tau], fac.shift, w.t)
    return CarlemanSides(*terms, w.s, w.gamma, shift, logs)


# ------------------------------------------------------------------ sweeps


@dataclass
class SweepResult:
    """Sides on the product grid ``gamma x s`` for every bank member.

    ``sides[m][a][b]`` belongs to member ``m``, ``gamma_grid[a]`` and ``s_grid[b]``.
    """

    test_ids: list[str]
    s_grid: np.ndarray
    gamma_grid: np.ndarray
    sides: list = field(repr=False)
    gamma_star: float | None = None
    s_star: float | None = None
    c_emp: float | None = None
    diagnostic: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def ratios(self) -> np.ndarray:
        """Array of shape ``(members, n_gamma, n_s)``; NaN marks indeterminate points."""
        return np.array([[[sd.ratio for sd in row] for row in mem] for mem in self.sides])

    @property
    def stable(self) -> bool:
        return self.c_emp is not None

    def rows(self) -> list[dict]:
        out = []
        for m, tid in enumerate(self.test_ids):
            for a in range(len(self.gamma_grid)):
                for b in range(len(self.s_grid)):
                    sd = self.sides[m][a][b]
                    out.append({"test_id": tid, "s": sd.s, "gamma": sd.gamma, "lhs_interior": sd.lhs_interior,
                                "lhs_upsilon": sd.lhs_upsilon, "rhs_pde": sd.rhs_pde, "rhs_pi": sd.rhs_pi,
                                "rhs_tau": sd.rhs_upsilon_tangential, "ratio": sd.ratio,
                                "flag": "indeterminate" if sd.indeterminate else "ok"})
        return out

    def summary(self) -> dict:
        return {"gamma_star": self.gamma_star, "s_star": self.s_star, "C_emp": self.c_emp,
                "stable": self.stable, "diagnostic": self.diagnostic, "test_ids": list(self.test_ids),
                "s_grid": [float(x) for x in self.s_grid], "gamma_grid": [float(x) for x in self.gamma_grid],
                **self.meta}

    def raise_if_unstable(self):
        if not self.stable:
            raise NoStableRegion(self.diagnostic)


def detect_stable_region(ratios: np.ndarray, gamma_grid, s_grid, slack: float = STABLE_SLACK):
    """Smallest corner ``(gamma*, s*)`` over which every member's ratio stays bounded.

    A corner ``(a, b)`` is accepted when all ratios on ``{gamma >= gamma_a, s >= s_b}``
    are finite and each member's ratio there is at most ``slack`` times its value at
    the corner itself.  Corners are ordered by ``s`` first, then ``gamma``.  Returns
    ``(a, b, C_emp)`` with ``C_emp`` the largest ratio on the region, or a diagnostic string.
    """
    M, na, nb = ratios.shape
    if not np.isfinite(ratios).any():
        return "every ratio is indeterminate (rhs <= 1e-300 after shifting)"
    for b in range(nb):
        for a in range(na):
            region = ratios[:, a:, b:]
            if not np.isfinite(region).all():
                continue
            corner = ratios[:, a, b][:, None, None]
            if np.all(region <= slack * corner * (1 + 1e-12)):
                return a, b, float(region.max())
    return "no corner of the (gamma, s) grid bounds every ratio within the slack"


def sweep(bank: Sequence, weight, s_grid, gamma_grid, sides_fn: Callable, slack: float = STABLE_SLACK,
          workers: int | None = None) -> SweepResult:
    """Evaluate ``sides_fn(weight.with_params(gamma, s), member)`` on the grid product.

    ``bank`` holds ``(test_id, field)`` pairs.  Points run in a thread pool; results
    are placed by index so the output does not depend on scheduling.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    gamma_grid = np.asarray(gamma_grid, dtype=float)
    if len(bank) == 0 or s_grid.size == 0 or gamma_grid.size == 0:
        raise ValueError("sweep needs a non-empty bank and grids")
    ids = [tid for tid, _ in bank]
    jobs = [(m, a, b) for m in range(len(bank)) for a in range(gamma_grid.size) for b in range(s_grid.size)]

    def run(job):
        m, a, b = job
        return sides_fn(weight.with_params(gamma=gamma_grid[a], s=s_grid[b]), bank[m][1])

    done = ordered_map(run, jobs, workers)
    sides = [[[None] * s_grid.size for _ in range(gamma_grid.size)] for _ in bank]
    for (m, a, b), sd in zip(jobs, done):
        sides[m][a][b] = sd
    res = SweepResult(ids, s_grid, gamma_grid, sides)
    found = detect_stable_region(res.ratios, gamma_grid, s_grid, slack)
    if isinstance(found, str):
        res.diagnostic = found
    else:
        a, b, c = found
        res.gamma_star, res.s_star, res.c_emp = float(gamma_grid[a]), float(s_grid[b]), c
    return res


def elliptic_sweep(bank: Sequence, weight: EllipticWeight, g: MetricField, p: PotentialField, s_grid,
                   gamma_grid, roles: dict | None = None, **kw) -> SweepResult:
    return sweep(bank, weight, s_grid, gamma_grid, lambda w, u: elliptic_sides(w, g, p, u, roles), **kw)


def parabolic_sweep(bank: Sequence, weight: ParabolicWeight, g: MetricField, s_grid, gamma_grid,
                    roles: dict | None = None, **kw) -> SweepResult:
    return sweep(bank, weight, s_grid, gamma_grid, lambda w, u: parabolic_sides(w, g, u, roles), **kw)
