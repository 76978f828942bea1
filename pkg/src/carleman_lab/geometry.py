"""Concentric-circle geometries on uniform polar grids.

Nodes sit at ``r_i = r_inner + i*dr`` (``i = 0..n_r``) and
``theta_j = j*dtheta`` (``j = 0..n_theta-1``); the angular direction is
periodic, so node ``(i, n_theta)`` is node ``(i, 0)`` and is not stored.
For a disk, ring 0 is the centre and all of its ``n_theta`` copies are the
same physical node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np
from scipy.integrate import simpson

from .errors import InvalidGeometry, UnknownBoundary

ROLES = ("S", "Gamma", "artificial")
INNER, OUTER = "inner", "outer"


@dataclass(frozen=True, eq=False)
class GridDomain:
    kind: str
    r_inner: float
    r_outer: float
    n_r: int
    n_theta: int
    boundary_tags: Mapping[str, str]
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("disk", "annulus"):
            raise InvalidGeometry(f"unknown domain kind {self.kind!r}")
        if not self.r_outer > self.r_inner >= 0.0:
            raise InvalidGeometry(
                f"radii must satisfy r_outer > r_inner >= 0, got ({self.r_inner}, {self.r_outer})")
        if self.kind == "disk" and self.r_inner != 0.0:
            raise InvalidGeometry("a disk has r_inner = 0")
        if self.kind == "annulus" and self.r_inner <= 0.0:
            raise InvalidGeometry("an annulus needs r_inner > 0")
        if int(self.n_r) != self.n_r or self.n_r < 8:
            raise InvalidGeometry(f"n_r must be an integer >= 8, got {self.n_r}")
        if int(self.n_theta) != self.n_theta or self.n_theta < 16 or self.n_theta % 2:
            raise InvalidGeometry(f"n_theta must be an even integer >= 16, got {self.n_theta}")
        ids = set(self.boundary_ids)
        if set(self.boundary_tags) != ids:
            raise InvalidGeometry(f"boundary_tags must give one role to each of {sorted(ids)}")
        for bid, role in self.boundary_tags.items():
            if role not in ROLES:
                raise InvalidGeometry(f"role {role!r} of boundary {bid!r} not in {ROLES}")
        object.__setattr__(self, "boundary_tags", MappingProxyType(dict(self.boundary_tags)))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def boundary_ids(self) -> tuple[str, ...]:
        return (INNER, OUTER) if self.kind == "annulus" else (OUTER,)

    @property
    def is_disk(self) -> bool:
        return self.kind == "disk"

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_r + 1, self.n_theta)

    @property
    def dr(self) -> float:
        return (self.r_outer - self.r_inner) / self.n_r

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.n_theta

    @cached_property
    def r(self) -> np.ndarray:
        return self.r_inner + self.dr * np.arange(self.n_r + 1)

    @cached_property
    def theta(self) -> np.ndarray:
        return self.dtheta * np.arange(self.n_theta)

    @cached_property
    def R(self) -> np.ndarray:
        return np.broadcast_to(self.r[:, None], self.shape)

    @cached_property
    def TH(self) -> np.ndarray:
        return np.broadcast_to(self.theta[None, :], self.shape)

    @cached_property
    def X(self) -> np.ndarray:
        return self.center[0] + self.R * np.cos(self.TH)

    @cached_property
    def Y(self) -> np.ndarray:
        return self.center[1] + self.R * np.sin(self.TH)

    def ring_index(self, radius: float, tol: float = 1e-9) -> int | None:
        """Index of the grid circle of the given radius, or None if off-grid."""
        x = (radius - self.r_inner) / self.dr
        i = int(round(x))
        if 0 <= i <= self.n_r and abs(x - i) <= tol * max(1.0, abs(x)):
            return i
        return None

    def role_of(self, boundary_id: str) -> str:
        if boundary_id not in self.boundary_tags:
            raise UnknownBoundary(f"domain has no boundary {boundary_id!r}")
        return self.boundary_tags[boundary_id]

    def boundary_with_role(self, role: str) -> str:
        for bid, rl in self.boundary_tags.items():
            if rl == role:
                return bid
        raise UnknownBoundary(f"no boundary carries role {role!r}")

    def boundary_ring(self, boundary_id: str) -> int:
        self.role_of(boundary_id)
        return 0 if boundary_id == INNER else self.n_r

    def boundary_radius(self, boundary_id: str) -> float:
        self.role_of(boundary_id)
        return self.r_inner if boundary_id == INNER else self.r_outer

    def refined(self, factor: int = 2) -> "GridDomain":
        return GridDomain(self.kind, self.r_inner, self.r_outer, self.n_r * factor,
                          self.n_theta * factor, dict(self.boundary_tags), self.center)

    def subannulus(self, r_inner: float, r_outer: float | None = None,
                   tags: Mapping[str, str] | None = None) -> "GridDomain":
        """The annulus between two grid circles, with the same spacing."""
        r_outer = self.r_outer if r_outer is None else r_outer
        i0, i1 = self.ring_index(r_inner), self.ring_index(r_outer)
        if i0 is None or i1 is None or i1 <= i0:
            raise InvalidGeometry(f"({r_inner}, {r_outer}) are not grid circles of this domain")
        tags = dict(tags) if tags is not None else {INNER: "Gamma", OUTER: "S"}
        return GridDomain("annulus", float(self.r[i0]), float(self.r[i1]), i1 - i0,
                          self.n_theta, tags, self.center)

    def field(self, values) -> "GridField":
        return GridField(self, np.asarray(values, dtype=float))

    def from_polar(self, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "GridField":
        """Sample ``f(r, theta)`` at every node."""
        vals = np.broadcast_to(np.asarray(f(self.R, self.TH), dtype=float), self.shape).copy()
        if self.is_disk:
            vals[0, :] = vals[0, 0]
        return GridField(self, vals)

    def from_cartesian(self, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "GridField":
        vals = np.broadcast_to(np.asarray(f(self.X, self.Y), dtype=float), self.shape).copy()
        if self.is_disk:
            vals[0, :] = vals[0, 0]
        return GridField(self, vals)


def build_annulus(r_inner: float, r_outer: float, n_r: int, n_theta: int,
                  tags: Mapping[str, str], center=(0.0, 0.0)) -> GridDomain:
    return GridDomain("annulus", float(r_inner), float(r_outer), n_r, n_theta, tags, center)


def build_disk(radius: float, n_r: int, n_theta: int, role: str = "S",
               center=(0.0, 0.0)) -> GridDomain:
    return GridDomain("disk", 0.0, float(radius), n_r, n_theta, {OUTER: role}, center)


@dataclass(frozen=True, eq=False)
class GridField:
    domain: GridDomain
    values: np.ndarray
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.values.shape != self.domain.shape:
            raise ValueError(f"field shape {self.values.shape} != domain shape {self.domain.shape}")
        if self.domain.is_disk and np.any(self.values[0] != self.values[0, 0]):
            raise ValueError("disk centre copies must carry one value")

    def __add__(self, other):
        return GridField(self.domain, self.values + _vals(other))

    def __sub__(self, other):
        return GridField(self.domain, self.values - _vals(other))

    def __mul__(self, other):
        return GridField(self.domain, self.values * _vals(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridField(self.domain, -self.values)

    def restrict(self, sub: GridDomain) -> "GridField":
        """Values on a sub-annulus obtained from :meth:`GridDomain.subannulus`."""
        i0 = self.domain.ring_index(sub.r_inner)
        if i0 is None or sub.n_theta != self.domain.n_theta or abs(sub.dr - self.domain.dr) > 1e-12:
            raise InvalidGeometry("sub-domain does not share this grid")
        return GridField(sub, self.values[i0:i0 + sub.n_r + 1].copy())

    def on_ring(self, i: int) -> np.ndarray:
        return self.values[i]


def _vals(x):
    return x.values if isinstance(x, GridField) else x


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    domain: GridDomain
    boundary_id: str
    ring: int
    radius: float
    theta: np.ndarray
    points: np.ndarray = field(repr=False)
    dS: np.ndarray = field(repr=False)
    normal: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def tangent(self) -> np.ndarray:
        return np.stack([-np.sin(self.theta), np.cos(self.theta)], axis=-1)

    def trace(self, u: GridField) -> np.ndarray:
        return u.values[self.ring].copy()


def boundary_curve(dom: GridDomain, boundary_id: str) -> BoundaryCurve:
    """Boundary circle with normals pointing out of ``dom``."""
    ring = dom.boundary_ring(boundary_id)
    sign = -1.0 if boundary_id == INNER else 1.0
    return _circle(dom, ring, sign, boundary_id)


def grid_circle(dom: GridDomain, radius: float, outward: float = 1.0,
                name: str = "Gamma") -> BoundaryCurve:
    """A grid circle (possibly interior to ``dom``) with radial normal ``outward*e_r``."""
    from .errors import GammaOffGrid

    ring = dom.ring_index(radius)
    if ring is None or (dom.is_disk and ring == 0):
        raise GammaOffGrid(f"circle r={radius} is not a grid circle of the domain")
    return _circle(dom, ring, outward, name)


def _circle(dom, ring, sign, name):
    th = dom.theta
    rad = float(dom.r[ring])
    er = np.stack([np.cos(th), np.sin(th)], axis=-1)
    pts = np.asarray(dom.center)[None, :] + rad * er
    return BoundaryCurve(dom, name, ring, rad, th, pts, np.full(th.size, rad * dom.dtheta), sign * er)


def integrate_volume(f: GridField) -> float:
    """Integral of ``f dx`` over the domain: periodic trapezoid in theta, Simpson in r."""
    dom = f.domain
    radial = dom.r * f.values.sum(axis=1) * dom.dtheta
    return float(simpson(radial, x=dom.r))


def integrate_boundary(f: np.ndarray, curve: BoundaryCurve) -> float:
    """Integral of ``f dS`` over a circle (periodic trapezoid rule)."""
    f = np.asarray(f, dtype=float)
    return float(np.dot(f, curve.dS))
