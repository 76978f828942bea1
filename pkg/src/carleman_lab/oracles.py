"""Independent reference computations and the checks run by ``oracle-check``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .carleman import elliptic_sides
from .geometry import INNER, OUTER, boundary_curve, build_annulus, build_disk, grid_circle
from .riemannian import Anisotropic, MetricField, PotentialField, boundary_gradient_parts, laplace_beltrami
from .solvers.elliptic import (EllipticProblem, cauchy_on_circle, exterior_domain, l2_norm,
                               required_radius, solve_exterior_truncated, solve_interior)
from .solvers.parabolic import ParabolicProblem, solve_parabolic
from .stability import (AdmissibleSpec, EllipticSetup, ParabolicSetup, SeparableData, TrigPoly,
                        check_admissible, elliptic_ratio, parabolic_ratio, sample_admissible)
from .weights import EllipticWeight


def bessel_k(nu: int, x: float) -> float:
    """``K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`` by adaptive quadrature.

    The integrand is below ``exp(-x e^t / 2 + nu t)``; the tail past ``t = 40`` is nil for ``x > 1e-15``.
    """
    val, _ = quad(lambda t: math.exp(-x * math.cosh(t) + nu * t) * 0.5 * (1 + math.exp(-2 * nu * t)), 0.0, 40.0,
                  epsabs=1e-300, epsrel=1e-13, limit=400)
    return val


def exterior_reference(r_s: float = 1.0, r_gamma: float = 2.0) -> tuple[float, float]:
    """``u(r_gamma)`` and the outward ``d_r u(r_gamma)`` for ``-Delta u + u = 0``, ``u(r_s) = 1``, decay at infinity."""
    k0s = bessel_k(0, r_s)
    return bessel_k(0, r_gamma) / k0s, -bessel_k(1, r_gamma) / k0s


def log_r_carleman_ratio(s: float, gamma: float, a: float = 1.0, b: float = 2.0) -> float:
    """lhs/rhs for ``u = log r`` on ``annulus(a, b)``, ``phi = r - a`` (closed-form integrands)."""
    E = lambda r: 2 * s * math.exp(gamma * (r - a))  # noqa: E731
    shift = E(b)
    sig = lambda r: s * gamma * math.exp(gamma * (r - a))  # noqa: E731
    u, du = math.log, (lambda r: 1.0 / r)

    def f(r):
        return math.exp(E(r) - shift) * sig(r) * gamma * (du(r) ** 2 + sig(r) ** 2 * u(r) ** 2) * r * 2 * math.pi

    width = 1.0 / (2 * s * gamma * math.exp(gamma * (b - a)))
    pts = [b - k * width for k in (1, 4, 16, 64, 256) if b - k * width > a]
    lint = quad(f, a, b, points=sorted(pts), limit=500, epsabs=1e-300, epsrel=1e-12)[0]
    lups = 2 * math.pi * a * math.exp(E(a) - shift) * sig(a) * (du(a) ** 2 + sig(a) ** 2 * u(a) ** 2)
    rpi = 2 * math.pi * b * (sig(b) * du(b) ** 2 + sig(b) ** 3 * u(b) ** 2)
    return (lint + lups) / rpi


@dataclass(frozen=True)
class OracleResult:
    name: str
    value: float
    reference: float
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tol)

    def row(self) -> dict:
        return {"name": self.name, "value": self.value, "reference": self.reference, "error": self.error,
                "tol": self.tol, "passed": self.passed}


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_bessel() -> list[OracleResult]:
    from scipy.special import k0, k1
    out = []
    for name, nu, x, lib in (("K0(1)", 0, 1.0, k0), ("K0(2)", 0, 2.0, k0), ("K1(2)", 1, 2.0, k1)):
        v = bessel_k(nu, x)
        out.append(OracleResult(f"bessel {name}", v, float(lib(x)), _rel(v, float(lib(x))), 1e-10))
    return out


def check_laplace_order() -> list[OracleResult]:
    errs = []
    for nr, nt in ((32, 64), (64, 128), (128, 256)):
        dom = build_annulus(1.0, 2.0, nr, nt, {INNER: "S", OUTER: "Gamma"})
        g = MetricField.sample(dom)
        u = dom.from_cartesian(lambda x, y: np.exp(x) * np.sin(y))
        errs.append(float(np.abs(laplace_beltrami(g, u).values).max()))
    order = math.log2(errs[1] / errs[2])
    return [OracleResult("laplace-beltrami order (e^x sin y)", order, 2.0, max(0.0, 1.9 - order), 0.0)]


def check_disk_modes(n_r: int = 128, n_theta: int = 256) -> list[OracleResult]:
    out = []
    dom = build_disk(1.0, n_r, n_theta)
    g = MetricField.sample(dom)
    p = PotentialField.constant(dom, 0.0)
    gam = grid_circle(dom, 0.5)
    for k in (1, 3):
        prob = EllipticProblem(dom, g, p, {OUTER: np.cos(k * dom.theta)})
        cd = cauchy_on_circle(solve_interior(prob), 0.5)
        exact = 0.5**k * np.cos(k * dom.theta)
        err = l2_norm(cd.trace - exact, gam) / l2_norm(exact, gam)
        out.append(OracleResult(f"disk trace k={k}", err, 0.0, err, 1e-3))
    return out


def check_exterior(n_gamma: int = 32, n_theta: int = 64) -> list[OracleResult]:
    ref_u, ref_dn = exterior_reference()
    dom = exterior_domain(1.0, 2.0, required_radius(1.0, 2.0), n_gamma, n_theta)
    prob = EllipticProblem(dom, MetricField.sample(dom), PotentialField.constant(dom, 1.0, 1.0),
                           {INNER: 1.0, OUTER: 0.0}, "exterior_truncated", 2.0)
    cd = cauchy_on_circle(solve_exterior_truncated(prob), 2.0)
    u2, dn2 = float(cd.trace.mean()), float(cd.normal_deriv.mean())
    return [OracleResult("exterior u(2)", u2, ref_u, abs(u2 - ref_u), 1e-3),
            OracleResult("exterior d_nu u(2)", dn2, ref_dn, abs(dn2 - ref_dn), 1e-3)]


def check_carleman_log_r(n_r: int = 512, n_theta: int = 64) -> list[OracleResult]:
    dom = build_annulus(1.0, 2.0, n_r, n_theta, {INNER: "S", OUTER: "Gamma"})
    w = EllipticWeight.radial(dom, INNER, 3.0, 20.0)
    sd = elliptic_sides(w, MetricField.sample(dom), PotentialField.constant(dom, 0.0),
                        dom.from_polar(lambda r, t: np.log(r) + 0 * t))
    ref = log_r_carleman_ratio(20.0, 3.0)
    return [OracleResult("carleman ratio log r (s=20, gamma=3)", sd.ratio, ref, _rel(sd.ratio, ref), 1e-2)]


def check_tangential_identity() -> list[OracleResult]:
    out = []
    dom = build_annulus(1.0, 2.0, 32, 64, {INNER: "S", OUTER: "Gamma"})
    u = dom.from_cartesian(lambda x, y: np.exp(0.3 * x) * np.cos(y) + x * y)
    for name, preset in (("euclidean", None), ("anisotropic", Anisotropic())):
        g = MetricField.sample(dom, preset)
        worst = 0.0
        for bid in dom.boundary_ids:
            full, dn, tang = boundary_gradient_parts(g, u, boundary_curve(dom, bid))
            worst = max(worst, float(np.abs(tang - (full - dn**2)).max()))
        out.append(OracleResult(f"tangential identity ({name})", worst, 0.0, worst, 1e-12))
    return out


def check_constant_ratios() -> list[OracleResult]:
    r = elliptic_ratio(TrigPoly(1.0), EllipticSetup.interior(n_r=32, n_theta=64)).ratio
    out = [OracleResult("interior constant ratio", r, math.sqrt(2.0), _rel(r, math.sqrt(2.0)), 1e-6)]
    T, eps = 1.0, 0.25
    pr = parabolic_ratio(SeparableData((1.0,), TrigPoly(1.0), T), eps, ParabolicSetup.disk(n_r=16, n_theta=32, n_t=64))
    ref = math.sqrt(2 * (T - 2 * eps) / T)
    out.append(OracleResult("parabolic constant ratio (eps=T/4)", pr.ratio, ref, _rel(pr.ratio, ref), 1e-6))
    return out


def manufactured_parabolic_error(n_r: int, n_theta: int, n_t: int, T: float = 1.0) -> float:
    """Relative space-time L2 error of Crank-Nicolson against ``u = e^{-t} r^2`` on the unit disk."""
    dom = build_disk(1.0, n_r, n_theta)
    g = MetricField.sample(dom)
    exact = lambda t: np.exp(-t) * dom.R**2  # noqa: E731
    prob = ParabolicProblem(dom, g, T, n_t, dom.field(exact(0.0)), lambda t: np.exp(-t) * np.ones(dom.n_theta),
                            lambda t: -np.exp(-t) * dom.R**2 - 4 * np.exp(-t))
    u = solve_parabolic(prob)
    ex = np.stack([exact(t) for t in u.t])
    w = dom.r[None, :, None]
    num = np.trapezoid(np.trapezoid(((u.values - ex) ** 2 * w).sum(-1), dom.r, axis=-1), u.t)
    den = np.trapezoid(np.trapezoid((ex**2 * w).sum(-1), dom.r, axis=-1), u.t)
    return math.sqrt(num / den)


def check_manufactured() -> list[OracleResult]:
    e1 = manufactured_parabolic_error(16, 32, 64)
    e2 = manufactured_parabolic_error(32, 64, 128)
    order = math.log2(e1 / e2)
    return [OracleResult("parabolic manufactured error (32,64,128)", e2, 0.0, e2, 1e-3),
            OracleResult("parabolic manufactured order", order, 2.0, max(0.0, 1.9 - order), 0.0)]


def check_sampler() -> list[OracleResult]:
    spec = AdmissibleSpec(1.0, 2.0, 4, 7)
    samples = sample_admissible(spec, 100, 128)
    th = np.arange(128) * 2 * np.pi / 128
    bad = sum(not check_admissible(a(th), spec).ok for a in samples)
    return [OracleResult("sampler admissibility (alpha=1, beta=2, K=4, seed=7)", float(bad), 0.0, float(bad), 0.0)]


def check_sigma() -> list[OracleResult]:
    dom = build_annulus(1.0, 2.0, 8, 16, {INNER: "S", OUTER: "Gamma"})
    w = EllipticWeight.radial(dom, INNER, 3.0, 10.0)
    v = float(w.sigma[-1, 0])
    ref = 30.0 * math.exp(3.0)
    return [OracleResult("sigma at phi=1 (gamma=3, s=10)", v, ref, _rel(v, ref), 1e-12)]


CHECKS: dict[str, Callable[[], list[OracleResult]]] = {
    "bessel": check_bessel,
    "laplace_order": check_laplace_order,
    "disk_modes": check_disk_modes,
    "exterior": check_exterior,
    "carleman_log_r": check_carleman_log_r,
    "tangential_identity": check_tangential_identity,
    "constant_ratios": check_constant_ratios,
    "manufactured": check_manufactured,
    "sampler": check_sampler,
    "sigma": check_sigma,
}


def run_all() -> list[OracleResult]:
    out = []
    for fn in CHECKS.values():
        out.extend(fn())
    return out
