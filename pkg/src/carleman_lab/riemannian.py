"""Metric fields and discrete Riemannian operators on polar grids.

All operators work in the mapped coordinates ``(r, theta)``.  In these
coordinates the Laplace-Beltrami operator reads

    Delta_g u = 1/(r sqrt|g|) d_a (A^{ab} d_b u),    A = r sqrt|g| J^{-1} g^{-1} J^{-T},

with ``J = d(x, y)/d(r, theta)``.  The divergence form is discretised by
assembling the quadratic energy ``1/2 int A grad u . grad u dr dtheta`` on
the grid (face differences for the diagonal of ``A``, cell-centred
differences for its off-diagonal entry), which yields a symmetric stiffness
matrix whose interior rows are conservative flux differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .geometry import BoundaryCurve, GridDomain, GridField


class MetricPreset:
    """Closed-form metric coefficients ``g_ij(x, y)`` in Cartesian components."""

    name = "abstract"

    def cartesian(self, x, y):
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def polar_flux(self, r, theta, center=(0.0, 0.0)):
        """Return ``(A_rr, A_rt, A_tt, sqrt_det)`` at polar points."""
        x = center[0] + r * np.cos(theta)
        y = center[1] + r * np.sin(theta)
        g = self.cartesian(x, y)
        det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
        sq = np.sqrt(det)
        inv00, inv01, inv11 = g[..., 1, 1] / det, -g[..., 0, 1] / det, g[..., 0, 0] / det
        c, s = np.cos(theta), np.sin(theta)
        # e_r = (c, s), e_theta = (-s, c)
        q_rr = c * c * inv00 + 2 * c * s * inv01 + s * s * inv11
        q_rt = -c * s * inv00 + (c * c - s * s) * inv01 + c * s * inv11
        q_tt = s * s * inv00 - 2 * c * s * inv01 + c * c * inv11
        with np.errstate(divide="ignore", invalid="ignore"):
            a_tt = sq * q_tt / r
        return r * sq * q_rr, sq * q_rt, a_tt, sq


class Euclidean(MetricPreset):
    name = "euclidean"

    def cartesian(self, x, y):
        x = np.asarray(x, dtype=float)
        g = np.zeros(np.broadcast(x, y).shape + (2, 2))
        g[..., 0, 0] = g[..., 1, 1] = 1.0
        return g


class Conformal(MetricPreset):
    """``g = c * I`` with a constant factor ``c > 0``."""

    name = "conformal"

    def __init__(self, c: float = 2.0):
        if not c > 0:
            raise ValueError("conformal factor must be positive")
        self.c = float(c)

    def params(self):
        return {"c": self.c}

    def cartesian(self, x, y):
        return self.c * Euclidean().cartesian(x, y)


def smooth_bump(r, center, width):
    """C-infinity bump equal to 1 at ``center`` and supported in ``|r-center| < width``."""
    xi = (np.asarray(r, dtype=float) - center) / width
    out = np.zeros_like(xi)
    inside = np.abs(xi) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi[inside] ** 2))
    return out


class Anisotropic(MetricPreset):
    """``g = diag(1 + amplitude * sin^2(theta) * rho(r), 1)`` with ``rho`` a smooth bump."""

    name = "anisotropic"

    def __init__(self, amplitude: float = 0.5, r_center: float = 1.5, r_width: float = 0.4,
                 center=(0.0, 0.0)):
        if amplitude <= -1.0:
            raise ValueError("amplitude must exceed -1 to keep g positive definite")
        self.amplitude = float(amplitude)
        self.r_center = float(r_center)
        self.r_width = float(r_width)
        self.center = (float(center[0]), float(center[1]))

    def params(self):
        return {"amplitude": self.amplitude, "r_center": self.r_center, "r_width": self.r_width}

    def cartesian(self, x, y):
        dx, dy = np.asarray(x, dtype=float) - self.center[0], np.asarray(y, dtype=float) - self.center[1]
        r = np.hypot(dx, dy)
        with np.errstate(invalid="ignore", divide="ignore"):
            sin2 = np.where(r > 0, dy * dy / np.where(r > 0, r * r, 1.0), 0.0)
        g = Euclidean().cartesian(dx, dy)
        g[..., 0, 0] = 1.0 + self.amplitude * sin2 * smooth_bump(r, self.r_center, self.r_width)
        return g


PRESETS = {"euclidean": Euclidean, "conformal": Conformal, "anisotropic": Anisotropic}


def make_preset(name: str, **params) -> MetricPreset:
    try:
        cls = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown metric preset {name!r}") from None
    return cls(**params)


@dataclass(frozen=True, eq=False)
class MetricField:
    """A metric preset sampled at the nodes of a domain."""

    domain: GridDomain
    preset: MetricPreset
    g: np.ndarray = field(repr=False)
    ginv: np.ndarray = field(repr=False)
    det_g: np.ndarray = field(repr=False)
    theta_ell: float

    @classmethod
    def sample(cls, domain: GridDomain, preset: MetricPreset | None = None) -> "MetricField":
        preset = preset or Euclidean()
        g = preset.cartesian(domain.X, domain.Y)
        g = 0.5 * (g + np.swapaxes(g, -1, -2))
        det = np.linalg.det(g)
        if np.any(det <= 0):
            raise ValueError("metric is not positive definite")
        ginv = np.linalg.inv(g)
        theta_ell = float(np.linalg.eigvalsh(g).min())
        if theta_ell <= 0:
            raise ValueError("metric is not uniformly elliptic")
        return cls(domain, preset, g, ginv, det, theta_ell)

    @cached_property
    def discretization(self) -> "Discretization":
        return assemble(self)

    @cached_property
    def polar(self):
        return self.preset.polar_flux(self.domain.R, self.domain.TH, self.domain.center)


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Nodal potential ``p`` with declared lower bound ``eta``; ``func(x, y)`` allows resampling."""

    p: np.ndarray
    eta: float = 0.0
    func: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.eta > 0 and np.any(self.p < self.eta):
            raise ValueError(f"potential falls below its declared bound eta={self.eta}")

    @classmethod
    def constant(cls, domain: GridDomain, value: float, eta: float = 0.0) -> "PotentialField":
        value = float(value)
        return cls(np.full(domain.shape, value), float(eta), lambda x, y: np.full(np.shape(x), value))

    @classmethod
    def from_function(cls, domain: GridDomain, func, eta: float = 0.0) -> "PotentialField":
        return cls(np.asarray(func(domain.X, domain.Y), dtype=float) * np.ones(domain.shape), float(eta), func)

    def resample(self, domain: GridDomain) -> "PotentialField":
        if self.func is None:
            raise ValueError("potential has no closed form to resample")
        return PotentialField.from_function(domain, self.func, self.eta)


# ---------------------------------------------------------------- indexing


def node_index(dom: GridDomain) -> np.ndarray:
    """Map grid positions to unknown numbers (the disk centre is one unknown)."""
    nr1, nt = dom.shape
    if dom.is_disk:
        idx = np.empty(dom.shape, dtype=np.int64)
        idx[0] = 0
        idx[1:] = 1 + np.arange((nr1 - 1) * nt).reshape(nr1 - 1, nt)
        return idx
    return np.arange(nr1 * nt).reshape(nr1, nt)


def n_unknowns(dom: GridDomain) -> int:
    nr1, nt = dom.shape
    return 1 + (nr1 - 1) * nt if dom.is_disk else nr1 * nt


def gather(dom: GridDomain, values: np.ndarray) -> np.ndarray:
    """Grid array -> unknown vector."""
    if dom.is_disk:
        return np.concatenate([values[:1, 0], values[1:].ravel()])
    return values.ravel().copy()


def scatter(dom: GridDomain, vec: np.ndarray) -> np.ndarray:
    """Unknown vector -> grid array."""
    if dom.is_disk:
        out = np.empty(dom.shape)
        out[0] = vec[0]
        out[1:] = vec[1:].reshape(dom.n_r, dom.n_theta)
        return out
    return vec.reshape(dom.shape).copy()


# ---------------------------------------------------------------- assembly


@dataclass(frozen=True, eq=False)
class Discretization:
    """Symmetric stiffness ``K`` and lumped volume ``mass`` (dx measure times sqrt|g|)."""

    domain: GridDomain
    K: sp.csr_matrix
    mass: np.ndarray
    boundary_mask: np.ndarray


def assemble(metric: MetricField) -> Discretization:
    dom, preset = metric.domain, metric.preset
    nr, nt = dom.n_r, dom.n_theta
    dr, dth = dom.dr, dom.dtheta
    r, th = dom.r, dom.theta
    idx = node_index(dom)
    N = n_unknowns(dom)
    jp = np.roll(np.arange(nt), -1)
    rows, cols, vals = [], [], []

    def add(ia, ib, w):
        # energy term 1/2 * w * (u[ia] - u[ib])^2
        rows.extend([ia, ib, ia, ib])
        cols.extend([ia, ib, ib, ia])
        vals.extend([w, w, -w, -w])

    # radial faces (i+1/2, j)
    rf = r[:-1] + 0.5 * dr
    a_rr, _, _, _ = preset.polar_flux(rf[:, None], th[None, :], dom.center)
    w = a_rr * dth / dr
    add(idx[:-1].ravel(), idx[1:].ravel(), w.ravel())

    # angular faces (i, j+1/2); boundary rings own half a cell
    i0 = 1 if dom.is_disk else 0
    _, _, a_tt, _ = preset.polar_flux(r[i0:, None], (th + 0.5 * dth)[None, :], dom.center)
    span = np.full(nr + 1, dr)
    span[0] = span[-1] = 0.5 * dr
    w = a_tt * span[i0:, None] / dth
    add(idx[i0:].ravel(), idx[i0:, jp].ravel(), w.ravel())

    # cross terms on cells (i+1/2, j+1/2): energy A_rt * Dr u * Dth u * dr dth
    _, a_rt, _, _ = preset.polar_flux(rf[:, None], (th + 0.5 * dth)[None, :], dom.center)
    if np.any(np.abs(a_rt) > 1e-15):
        a = idx[:-1]
        b = idx[:-1][:, jp]
        c = idx[1:]
        d = idx[1:][:, jp]
        # Dr = (c + d - a - b)/(2 dr), Dth = (b + d - a - c)/(2 dth)
        coef_r = {0: -1, 1: -1, 2: 1, 3: 1}
        coef_t = {0: -1, 1: 1, 2: -1, 3: 1}
        corners = [a, b, c, d]
        scale = (a_rt / 4.0).ravel()
        for p in range(4):
            for q in range(4):
                # symmetric part of Dr (x) Dth
                wgt = 0.5 * (coef_r[p] * coef_t[q] + coef_t[p] * coef_r[q]) * scale
                if np.any(wgt != 0):
                    rows.append(corners[p].ravel())
                    cols.append(corners[q].ravel())
                    vals.append(2.0 * wgt)
    rows = np.concatenate([np.atleast_1d(np.asarray(x)).ravel() for x in rows])
    cols = np.concatenate([np.atleast_1d(np.asarray(x)).ravel() for x in cols])
    vals = np.concatenate([np.atleast_1d(np.asarray(x, dtype=float)).ravel() for x in vals])
    K = sp.coo_matrix((vals, (rows, cols)), shape=(N, N)).tocsr()
    K.sum_duplicates()

    sq = np.sqrt(metric.det_g)
    vol = r[:, None] * span[:, None] * dth * sq
    if dom.is_disk:
        vol[0] = 0.25 * np.pi * dr * dr * sq[0, 0] / nt
    mass = np.bincount(idx.ravel(), weights=vol.ravel(), minlength=N)
    bmask = np.zeros(N, dtype=bool)
    bmask[idx[-1]] = True
    if not dom.is_disk:
        bmask[idx[0]] = True
    return Discretization(dom, K, mass, bmask)


# ---------------------------------------------------------------- differences


def d_r(values: np.ndarray, dr: float) -> np.ndarray:
    """Radial derivative along the last-but-one axis; second order, one-sided at the ends."""
    return np.gradient(values, dr, axis=-2, edge_order=2)


def d_theta(values: np.ndarray, dth: float) -> np.ndarray:
    """Periodic centred angular derivative along the last axis."""
    return (np.roll(values, -1, axis=-1) - np.roll(values, 1, axis=-1)) / (2.0 * dth)


def _d2_r(values, dr):
    out = np.empty_like(values)
    out[..., 1:-1, :] = (values[..., 2:, :] - 2 * values[..., 1:-1, :] + values[..., :-2, :]) / dr**2
    out[..., 0, :] = (2 * values[..., 0, :] - 5 * values[..., 1, :] + 4 * values[..., 2, :]
                      - values[..., 3, :]) / dr**2
    out[..., -1, :] = (2 * values[..., -1, :] - 5 * values[..., -2, :] + 4 * values[..., -3, :]
                       - values[..., -4, :]) / dr**2
    return out


def _d2_theta(values, dth):
    return (np.roll(values, -1, axis=-1) - 2 * values + np.roll(values, 1, axis=-1)) / dth**2


def cartesian_gradient(dom: GridDomain, values: np.ndarray) -> np.ndarray:
    """Cartesian partials ``(d_x u, d_y u)`` stacked on a new leading axis.

    ``values`` may carry extra leading (e.g. time) axes.
    """
    ur = d_r(values, dom.dr)
    ut = d_theta(values, dom.dtheta)
    c, s = np.cos(dom.theta), np.sin(dom.theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        ut_r = ut / dom.r[:, None]
    gx = c * ur - s * ut_r
    gy = s * ur + c * ut_r
    if dom.is_disk:
        # centre node: first Fourier mode of ring 1
        ring = values[..., 1, :]
        fx = (ring * c).sum(axis=-1) * dom.dtheta / (np.pi * dom.dr)
        fy = (ring * s).sum(axis=-1) * dom.dtheta / (np.pi * dom.dr)
        gx[..., 0, :] = fx[..., None]
        gy[..., 0, :] = fy[..., None]
    return np.stack([gx, gy])


# ---------------------------------------------------------------- operators


def laplace_beltrami(g: MetricField, u: GridField) -> GridField:
    """Delta_g u: conservative flux differences inside, one-sided second-order stencils on the boundary."""
    dom = u.domain
    disc = _cached_assembly(g)
    vec = gather(dom, u.values)
    lap = -(disc.K @ vec) / disc.mass
    out = scatter(dom, lap)
    for i in ([0, dom.n_r] if not dom.is_disk else [dom.n_r]):
        out[i] = _nondivergence_ring(g, u.values, i)
    return GridField(dom, out)


def laplace_beltrami_values(g: MetricField, values: np.ndarray) -> np.ndarray:
    """Vectorised Delta_g over leading axes of ``values`` (shape ``(..., n_r+1, n_theta)``)."""
    dom = g.domain
    disc = _cached_assembly(g)
    lead = values.shape[:-2]
    flat = values.reshape((-1,) + dom.shape)
    vecs = np.stack([gather(dom, v) for v in flat], axis=1)
    lap = -(disc.K @ vecs) / disc.mass[:, None]
    out = np.stack([scatter(dom, lap[:, k]) for k in range(flat.shape[0])])
    for i in ([0, dom.n_r] if not dom.is_disk else [dom.n_r]):
        out[:, i] = _nondivergence_ring(g, flat, i)
    return out.reshape(lead + dom.shape)


def _cached_assembly(g: MetricField) -> Discretization:
    return g.discretization


def _nondivergence_ring(g: MetricField, values: np.ndarray, i: int) -> np.ndarray:
    dom = g.domain
    dr, dth = dom.dr, dom.dtheta
    a_rr, a_rt, a_tt, sq = g.polar
    ur = d_r(values, dr)[..., i, :]
    urr = _d2_r(values, dr)[..., i, :]
    ut = d_theta(values[..., i, :], dth)
    utt = _d2_theta(values[..., i, :], dth)
    urt = d_theta(ur, dth)
    div_r = d_r(a_rr, dr)[i] + d_theta(a_rt[i], dth)
    div_t = d_r(a_rt, dr)[i] + d_theta(a_tt[i], dth)
    flux = (a_rr[i] * urr + 2 * a_rt[i] * urt + a_tt[i] * utt + div_r * ur + div_t * ut)
    return flux / (dom.r[i] * sq[i])


def grad_g(g: MetricField, w: GridField) -> np.ndarray:
    """Metric gradient ``g^{ij} d_i w`` in Cartesian components, shape ``(2, n_r+1, n_theta)``."""
    du = cartesian_gradient(w.domain, w.values)
    return np.einsum("...ij,i...->j...", g.ginv, du)


def norm_g_sq(g: MetricField, X: np.ndarray) -> GridField:
    return GridField(g.domain, np.einsum("...ij,i...,j...->...", g.g, X, X))


def metric_normal(g: MetricField, curve: BoundaryCurve) -> np.ndarray:
    """Unit (in ``g``) normal ``g^{ij} nu_j / sqrt(g^{kl} nu_k nu_l)`` at the curve nodes, shape ``(n, 2)``."""
    ginv = g.ginv[curve.ring]
    nu = curve.normal
    up = np.einsum("nij,nj->ni", ginv, nu)
    return up / np.sqrt(np.einsum("ni,ni->n", up, nu))[:, None]


def dnu_g(g: MetricField, u: GridField, curve: BoundaryCurve) -> np.ndarray:
    nug = metric_normal(g, curve)
    du = cartesian_gradient(u.domain, u.values)[:, curve.ring, :]
    # <nu_g, grad_g u>_g = nu_g^i d_i u
    return np.einsum("ni,in->n", nug, du)


def tangential_grad(u: GridField, curve: BoundaryCurve):
    """Euclidean tangential gradient on a circle: ``(|grad_tau u|, components (n, 2))``."""
    comp = d_theta(curve.trace(u), curve.domain.dtheta) / curve.radius
    return np.abs(comp), comp[:, None] * curve.tangent


def tangential_grad_g(g: MetricField, u: GridField, curve: BoundaryCurve) -> np.ndarray:
    """``|grad_{tau_g} u|_g^2`` per curve node."""
    G = grad_g(g, u)[:, curve.ring, :].T
    nug = metric_normal(g, curve)
    gij = g.g[curve.ring]
    dn = np.einsum("nij,ni,nj->n", gij, nug, G)
    T = G - dn[:, None] * nug
    return np.einsum("nij,ni,nj->n", gij, T, T)


def boundary_gradient_parts(g: MetricField, u: GridField, curve: BoundaryCurve):
    """``(|grad_g u|_g^2, d_{nu_g} u, |grad_{tau_g} u|_g^2)`` from one discrete gradient."""
    G = grad_g(g, u)[:, curve.ring, :].T
    gij = g.g[curve.ring]
    nug = metric_normal(g, curve)
    full = np.einsum("nij,ni,nj->n", gij, G, G)
    dn = np.einsum("nij,ni,nj->n", gij, nug, G)
    T = G - dn[:, None] * nug
    return full, dn, np.einsum("nij,ni,nj->n", gij, T, T)
