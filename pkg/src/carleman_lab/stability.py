"""Empirical stability constants: admissible boundary data, forward solves, ratio statistics.

Elliptic ratios are ``||a||_{H1(S)} / (||u||_{H1(Gamma)} + ||d_nu u||_{L2(Gamma)})``; the
parabolic ratio uses the space-time analogue with the numerator restricted to
``(eps, T - eps) x S``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from .errors import CarlemanLabError, IncompatibleData, SamplingExhausted
from .geometry import INNER, OUTER, BoundaryCurve, GridDomain, boundary_curve, build_disk, grid_circle
from .parallel import ordered_map
from .riemannian import MetricField, MetricPreset, PotentialField, d_theta
from .solvers.elliptic import (TRUNCATION_TOL, DirichletOperator, exterior_domain,
                               extract_cauchy, h1_norm, l2_norm, radial_derivative_on, required_radius)
from .solvers.parabolic import ParabolicProblem, solve_parabolic, time_derivative

MAX_REJECTIONS = 1000
_ADMISSIBLE_TOL = 1e-12


# ------------------------------------------------------------------ admissible data


@dataclass(frozen=True)
class AdmissibleSpec:
    alpha: float
    beta: float
    fourier_degree: int = 4
    rng_seed: int = 0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise ValueError("beta must be finite and nonnegative")


@dataclass(frozen=True)
class ParabolicAdmissibleSpec:
    alpha: float
    beta: float
    u0_profile: str = "harmonic"
    time_degree: int = 2
    fourier_degree: int = 4
    rng_seed: int = 0

    def __post_init__(self):
        AdmissibleSpec(self.alpha, self.beta)
        if self.u0_profile != "harmonic":
            raise ValueError("only the harmonic extension of g(0, .) is supported as u0")


@dataclass(frozen=True)
class TrigPoly:
    """``c0 + sum_k (cos_k cos k theta + sin_k sin k theta)``, ``k = 1..K``."""

    c0: float
    cos: tuple = ()
    sin: tuple = ()

    def __post_init__(self):
        n = max(len(self.cos), len(self.sin))
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos) + (0.0,) * (n - len(self.cos)))
        object.__setattr__(self, "sin", tuple(float(c) for c in self.sin) + (0.0,) * (n - len(self.sin)))

    def _k(self):
        return np.arange(1, len(self.cos) + 1)

    def __call__(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        k = self._k()
        if k.size == 0:
            return np.full(th.shape, float(self.c0))
        kt = np.multiply.outer(th, k)
        return self.c0 + np.cos(kt) @ np.asarray(self.cos) + np.sin(kt) @ np.asarray(self.sin)

    def derivative(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        k = self._k()
        if k.size == 0:
            return np.zeros(th.shape)
        kt = np.multiply.outer(th, k)
        return -np.sin(kt) @ (k * np.asarray(self.cos)) + np.cos(kt) @ (k * np.asarray(self.sin))

    def scaled(self, lam: float) -> "TrigPoly":
        return TrigPoly(lam * self.c0, tuple(lam * np.asarray(self.cos)), tuple(lam * np.asarray(self.sin)))

    def to_dict(self) -> dict:
        return {"c0": float(self.c0), "cos": [float(c) for c in self.cos], "sin": [float(c) for c in self.sin]}


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    min_abs: float
    max_tangential: float
    worst_node: tuple
    condition: str = ""


def check_admissible(a: np.ndarray, spec: AdmissibleSpec, radius: float = 1.0) -> AdmissibilityReport:
    """Nodewise ``|a| >= alpha`` and ``|d_tau a| <= beta`` with the harness' tangential stencil."""
    a = np.asarray(a, dtype=float)
    dth = 2 * np.pi / a.size
    tau = np.abs(d_theta(a, dth) / radius)
    absval = np.abs(a)
    if absval.min() < spec.alpha - _ADMISSIBLE_TOL:
        return AdmissibilityReport(False, float(absval.min()), float(tau.max()), (int(absval.argmin()),),
                                   "|a| < alpha")
    if tau.max() > spec.beta + _ADMISSIBLE_TOL:
        return AdmissibilityReport(False, float(absval.min()), float(tau.max()), (int(tau.argmax()),),
                                   "|d_tau a| > beta")
    return AdmissibilityReport(True, float(absval.min()), float(tau.max()), ())


def _oscillation(rng: np.random.Generator, K: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(1, K + 1)
    return rng.standard_normal(K) / k**2, rng.standard_normal(K) / k**2


def sample_admissible(spec: AdmissibleSpec, count: int, n_theta: int, radius: float = 1.0) -> list[TrigPoly]:
    """Positive trigonometric polynomials in the admissible class, deterministic under the seed.

    The oscillatory part is scaled so that ``sum_k k(|c_k| + |d_k|) / radius`` (a bound on
    ``|d_tau a|``) is a random fraction of ``beta``; the mean then sits above
    ``alpha + sum_k (|c_k| + |d_k|)``.  Every draw is re-checked nodewise.
    """
    rng = np.random.default_rng(spec.rng_seed)
    theta = np.arange(n_theta) * 2 * np.pi / n_theta
    out = []
    K = spec.fourier_degree
    k = np.arange(1, K + 1)
    for _ in range(count):
        for _attempt in range(MAX_REJECTIONS):
            c, d = _oscillation(rng, K)
            bound = float(np.sum(k * (np.abs(c) + np.abs(d)))) / radius
            frac = rng.uniform(0.25, 1.0)
            scale = frac * spec.beta / bound if bound > 0 and spec.beta > 0 else 0.0
            c, d = scale * c, scale * d
            c0 = spec.alpha * (1.0 + rng.uniform(0.0, 1.0)) + float(np.sum(np.abs(c) + np.abs(d)))
            a = TrigPoly(c0, tuple(c), tuple(d))
            if check_admissible(a(theta), spec, radius).ok:
                out.append(a)
                break
        else:
            raise SamplingExhausted(f"no admissible draw after {MAX_REJECTIONS} attempts")
    return out


@dataclass(frozen=True)
class SeparableData:
    """``g(t, theta) = g0(t) * g1(theta)`` with ``g0`` a polynomial in ``t / T``."""

    g0: tuple
    g1: TrigPoly
    T: float

    @property
    def _poly(self) -> Polynomial:
        return Polynomial(self.g0)

    def time_profile(self, t) -> np.ndarray:
        return self._poly(np.asarray(t, dtype=float) / self.T)

    def time_profile_dt(self, t) -> np.ndarray:
        return self._poly.deriv()(np.asarray(t, dtype=float) / self.T) / self.T

    def values(self, t, theta) -> np.ndarray:
        return np.multiply.outer(self.time_profile(t), self.g1(theta))

    def dt_values(self, t, theta) -> np.ndarray:
        return np.multiply.outer(self.time_profile_dt(t), self.g1(theta))

    def scaled(self, lam: float) -> "SeparableData":
        return SeparableData(self.g0, self.g1.scaled(lam), self.T)

    def to_dict(self) -> dict:
        return {"g0": [float(c) for c in self.g0], "g1": self.g1.to_dict(), "T": self.T}


def check_parabolic_admissible(G: np.ndarray, t: np.ndarray, spec: ParabolicAdmissibleSpec,
                               radius: float = 1.0) -> AdmissibilityReport:
    """Nodewise ``|g| >= alpha`` and ``|d_t g| + |d_tau g| <= beta`` on a ``(t, theta)`` grid."""
    G = np.asarray(G, dtype=float)
    dth = 2 * np.pi / G.shape[-1]
    slope = np.abs(time_derivative(G, t)) + np.abs(d_theta(G, dth) / radius)
    absval = np.abs(G)
    if absval.min() < spec.alpha - _ADMISSIBLE_TOL:
        return AdmissibilityReport(False, float(absval.min()), float(slope.max()),
                                   tuple(int(i) for i in np.unravel_index(absval.argmin(), G.shape)),
                                   "|g| < alpha")
    if slope.max() > spec.beta + _ADMISSIBLE_TOL:
        return AdmissibilityReport(False, float(absval.min()), float(slope.max()),
                                   tuple(int(i) for i in np.unravel_index(slope.argmax(), G.shape)),
                                   "|d_t g| + |d_tau g| > beta")
    return AdmissibilityReport(True, float(absval.min()), float(slope.max()), ())


def sample_parabolic_admissible(spec: ParabolicAdmissibleSpec, count: int, t: np.ndarray, n_theta: int,
                                radius: float = 1.0) -> list[SeparableData]:
    """Separable admissible data ``g0(t) g1(theta)`` with ``g0(0) = 1`` and ``g0`` increasing.

    ``g0 = 1 + sum_j b_j (t/T)^j`` with ``b_j >= 0``, so ``1 <= g0 <= 1 + sum b_j``.  The
    oscillation ``lam`` of both factors is bisected so the nodewise slope bound holds.
    """
    rng = np.random.default_rng(spec.rng_seed)
    t = np.asarray(t, dtype=float)
    T = float(t[-1])
    theta = np.arange(n_theta) * 2 * np.pi / n_theta
    J, K = spec.time_degree, spec.fourier_degree
    out = []
    for _ in range(count):
        for _attempt in range(MAX_REJECTIONS):
            b = rng.uniform(0.0, 1.0, J) / np.arange(1, J + 1)
            c, d = _oscillation(rng, K)
            osc = float(np.sum(np.abs(c) + np.abs(d)))
            margin = rng.uniform(0.0, 1.0)

            def build(lam):
                c0 = spec.alpha * (1.0 + margin) + lam * osc
                return SeparableData(tuple([1.0, *(lam * b)]), TrigPoly(c0, tuple(lam * c), tuple(lam * d)), T)

            def ok(lam):
                s = build(lam)
                return check_parabolic_admissible(s.values(t, theta), t, spec, radius).ok

            if not ok(0.0):
                continue
            lo, hi = 0.0, 1.0
            while ok(hi) and hi < 1e6:
                lo, hi = hi, 2 * hi
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                lo, hi = (mid, hi) if ok(mid) else (lo, mid)
            cand = build(lo * rng.uniform(0.25, 1.0))
            if check_parabolic_admissible(cand.values(t, theta), t, spec, radius).ok:
                out.append(cand)
                break
        else:
            raise SamplingExhausted(f"no admissible draw after {MAX_REJECTIONS} attempts")
    return out


# ------------------------------------------------------------------ elliptic ratios


@dataclass(eq=False)
class EllipticSetup:
    """Grid, operator and the two circles of an interior or exterior stability experiment.

    Interior: disk of radius ``r_s`` whose boundary is S, measurement circle Gamma inside.
    Exterior: obstacle boundary S at ``r_s``, Gamma at ``r_gamma > r_s``, truncated at ``R_inf``.
    """

    kind: str
    domain: GridDomain
    metric: MetricField
    potential: PotentialField
    r_s: float
    r_gamma: float
    tol: float = 1e-12
    params: dict = field(default_factory=dict)
    _local: threading.local = field(default_factory=threading.local, repr=False)

    @classmethod
    def interior(cls, r_s: float = 1.0, r_gamma: float = 0.5, n_r: int = 64, n_theta: int = 128,
                 preset: MetricPreset | None = None, p_value: float = 0.0, tol: float = 1e-12) -> "EllipticSetup":
        dom = build_disk(r_s, n_r, n_theta, "S")
        grid_circle(dom, r_gamma)
        return cls("interior", dom, MetricField.sample(dom, preset), PotentialField.constant(dom, p_value), r_s,
                   r_gamma, tol, dict(n_r=n_r, n_theta=n_theta, p_value=p_value))

    @classmethod
    def exterior(cls, r_s: float = 1.0, r_gamma: float = 2.0, n_gamma: int = 32, n_theta: int = 128,
                 preset: MetricPreset | None = None, p_value: float = 1.0, eta: float | None = None,
                 R_inf: float | None = None, truncation_tol: float = TRUNCATION_TOL,
                 tol: float = 1e-12) -> "EllipticSetup":
        eta = p_value if eta is None else eta
        if not eta > 0:
            raise IncompatibleData("the exterior problem needs p >= eta > 0")
        need = required_radius(eta, r_gamma, truncation_tol)
        R_inf = need if R_inf is None else R_inf
        if R_inf < need * (1 - 1e-12):
            from .errors import TruncationTooSmall
            raise TruncationTooSmall(f"R_inf={R_inf:g} < required {need:.6g}")
        dom = exterior_domain(r_s, r_gamma, R_inf, n_gamma, n_theta)
        return cls("exterior", dom, MetricField.sample(dom, preset), PotentialField.constant(dom, p_value, eta),
                   r_s, r_gamma, tol, dict(n_gamma=n_gamma, n_theta=n_theta, p_value=p_value, eta=eta,
                                          R_inf=R_inf, truncation_tol=truncation_tol))

    def refined(self, factor: int = 2) -> "EllipticSetup":
        q = dict(self.params)
        preset = self.metric.preset
        if self.kind == "interior":
            return EllipticSetup.interior(self.r_s, self.r_gamma, q["n_r"] * factor, q["n_theta"] * factor,
                                          preset, q["p_value"], self.tol)
        return EllipticSetup.exterior(self.r_s, self.r_gamma, q["n_gamma"] * factor, q["n_theta"] * factor,
                                      preset, q["p_value"], q["eta"], q["R_inf"], q["truncation_tol"], self.tol)

    @property
    def s_id(self) -> str:
        return OUTER if self.kind == "interior" else INNER

    @property
    def s_curve(self) -> BoundaryCurve:
        return boundary_curve(self.domain, self.s_id)

    @property
    def gamma_curve(self) -> BoundaryCurve:
        # the normal points away from S, the side where the data are measured
        return grid_circle(self.domain, self.r_gamma, -1.0 if self.kind == "interior" else 1.0)

    @property
    def theta(self) -> np.ndarray:
        return self.domain.theta

    @property
    def operator(self) -> DirichletOperator:
        """Per-thread operator: the multigrid hierarchy is not shared across threads."""
        op = getattr(self._local, "op", None)
        if op is None:
            op = DirichletOperator(self.domain, self.metric, self.potential, self.tol)
            self._local.op = op
        return op

    def solve(self, a: np.ndarray):
        data = {self.s_id: np.asarray(a, dtype=float)}
        if self.kind == "exterior":
            data[OUTER] = np.zeros(self.domain.n_theta)
        return self.operator.solve(data)

    def describe(self) -> dict:
        return {"kind": self.kind, "r_S": self.r_s, "r_Gamma": self.r_gamma, "metric": self.metric.preset.name,
                "metric_params": self.metric.preset.params(), "tol": self.tol, **self.params}


@dataclass(frozen=True)
class SampleRecord:
    sample_id: int
    l2_S: float
    h1_S: float
    h1_Gamma: float
    l2_dn_Gamma: float
    ratio: float
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {"sample_id": self.sample_id, "h1_S": self.h1_S, "h1_Gamma": self.h1_Gamma,
                "l2_dn_Gamma": self.l2_dn_Gamma, "ratio": self.ratio}


def _ratio(num: float, den: float) -> tuple[float, str]:
    if not den > 0 or not math.isfinite(den):
        return math.nan, "zero_denominator"
    return num / den, "ok"


def elliptic_ratio(a, setup: EllipticSetup, sample_id: int = 0) -> SampleRecord:
    """Solve with Dirichlet data ``a`` on S and return the stability ratio record.

    ``a`` is a callable of theta (e.g. :class:`TrigPoly`) or an array on the theta nodes.
    """
    vals = np.asarray(a(setup.theta) if callable(a) else a, dtype=float)
    u = setup.solve(vals)
    cd = extract_cauchy(u, setup.gamma_curve)
    sc = setup.s_curve
    h1_s = h1_norm(vals, sc)
    ratio, status = _ratio(h1_s, cd.h1_trace + cd.l2_normal)
    return SampleRecord(sample_id, l2_norm(vals, sc), h1_s, cd.h1_trace, cd.l2_normal, ratio, status,
                        {"iterations": u.meta.get("iterations")})


# ------------------------------------------------------------------ parabolic ratios


@dataclass(eq=False)
class ParabolicSetup:
    """Disk ``B`` with S its boundary and Gamma an interior circle; ``n_t`` Crank-Nicolson steps."""

    domain: GridDomain
    metric: MetricField
    T: float
    n_t: int
    r_gamma: float
    tol: float = 1e-10
    params: dict = field(default_factory=dict)
    _local: threading.local = field(default_factory=threading.local, repr=False)

    @classmethod
    def disk(cls, radius: float = 1.0, r_gamma: float = 0.5, n_r: int = 32, n_theta: int = 64, n_t: int = 128,
             T: float = 1.0, preset: MetricPreset | None = None, tol: float = 1e-10) -> "ParabolicSetup":
        dom = build_disk(radius, n_r, n_theta, "S")
        grid_circle(dom, r_gamma)
        return cls(dom, MetricField.sample(dom, preset), float(T), int(n_t), r_gamma, tol,
                   dict(radius=radius, n_r=n_r, n_theta=n_theta))

    def refined(self, factor: int = 2) -> "ParabolicSetup":
        q = self.params
        return ParabolicSetup.disk(q["radius"], self.r_gamma, q["n_r"] * factor, q["n_theta"] * factor,
                                   self.n_t * factor, self.T, self.metric.preset, self.tol)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n_t + 1)

    @property
    def theta(self) -> np.ndarray:
        return self.domain.theta

    @property
    def radius(self) -> float:
        return self.domain.r_outer

    def harmonic_extension(self, trace: np.ndarray):
        op = getattr(self._local, "op", None)
        if op is None:
            op = DirichletOperator(self.domain, self.metric, PotentialField.constant(self.domain, 0.0), 1e-12)
            self._local.op = op
        return op.solve({OUTER: trace})

    def describe(self) -> dict:
        return {"kind": "parabolic", "T": self.T, "n_t": self.n_t, "r_Gamma": self.r_gamma,
                "metric": self.metric.preset.name, "metric_params": self.metric.preset.params(),
                "tol": self.tol, **self.params}


def _window_integral(q: np.ndarray, t: np.ndarray, lo: float, hi: float) -> float:
    """Trapezoid integral of nodal ``q(t)`` over ``[lo, hi]`` with linearly interpolated ends."""
    inside = (t > lo) & (t < hi)
    tt = np.concatenate([[lo], t[inside], [hi]])
    qq = np.concatenate([[np.interp(lo, t, q)], q[inside], [np.interp(hi, t, q)]])
    return float(np.trapezoid(qq, tt))


def parabolic_ratio(g: SeparableData, eps: float, setup: ParabolicSetup, sample_id: int = 0) -> SampleRecord:
    """Ratio of ``||g||_{H1((eps, T-eps) x S)}`` to the Cauchy data on ``(0, T) x Gamma``.

    ``extra["corollary_ratio"]`` replaces the numerator with ``||g1||_{H1(S)}``.
    """
    T = setup.T
    if not 0 < eps < T / 2:
        raise IncompatibleData("eps must lie in (0, T/2)")
    dom = setup.domain
    t, th = setup.t, setup.theta
    G = g.values(t, th)
    u0 = setup.harmonic_extension(G[0])
    prob = ParabolicProblem(dom, setup.metric, T, setup.n_t, u0, lambda s: g.values(s, th), tol=setup.tol)
    u = solve_parabolic(prob)

    s_curve = boundary_curve(dom, OUTER)
    dS = s_curve.dS
    Gt = time_derivative(G, t)
    Gtau = d_theta(G, dom.dtheta) / s_curve.radius
    q_s = (G**2 + Gt**2 + Gtau**2) @ dS
    num = math.sqrt(_window_integral(q_s, t, eps, T - eps))
    l2_s = math.sqrt(_window_integral(G**2 @ dS, t, eps, T - eps))

    gam = grid_circle(dom, setup.r_gamma)
    U = u.values[:, gam.ring]
    Ut = u.dt_values[:, gam.ring]
    Utau = d_theta(U, dom.dtheta) / gam.radius
    h1_gamma = math.sqrt(float(np.trapezoid((U**2 + Ut**2 + Utau**2) @ gam.dS, t)))
    dn = np.stack([radial_derivative_on(u.at(k), gam.ring) for k in range(t.size)])
    l2_dn = math.sqrt(float(np.trapezoid(dn**2 @ gam.dS, t)))
    ratio, status = _ratio(num, h1_gamma + l2_dn)
    g1 = g.g1(th)
    cor = h1_norm(g1, s_curve)
    cor_ratio, _ = _ratio(cor, h1_gamma + l2_dn)
    return SampleRecord(sample_id, l2_s, num, h1_gamma, l2_dn, ratio, status,
                        {"h1_g1_S": cor, "corollary_ratio": cor_ratio})


# ------------------------------------------------------------------ studies


@dataclass
class StabilityReport:
    kind: str
    records: list
    aggregate: dict
    spec: dict
    setup: dict
    meta: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [r.row() for r in self.records]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "aggregate": self.aggregate, "spec": self.spec, "setup": self.setup,
                "meta": self.meta, "samples": [asdict(r) for r in self.records]}


def _failed(i: int, err: Exception) -> SampleRecord:
    code = err.code if isinstance(err, CarlemanLabError) else type(err).__name__
    return SampleRecord(i, math.nan, math.nan, math.nan, math.nan, math.nan, f"failed:{code}", {"message": str(err)})


def _aggregate(records: list, rerun: Callable[[int], SampleRecord] | None, refine: bool) -> dict:
    good = [r for r in records if r.status == "ok" and math.isfinite(r.ratio)]
    agg = {"count": len(records), "ok": len(good), "failed": len(records) - len(good)}
    if not good:
        agg.update(max=None, median=None, worst_sample=None, refined_max=None)
        return agg
    ratios = np.array([r.ratio for r in good])
    worst = good[int(ratios.argmax())]
    agg.update(max=float(ratios.max()), median=float(np.median(ratios)), min=float(ratios.min()),
               worst_sample=worst.sample_id, refined_max=None, refined_rel_change=None)
    if refine and rerun is not None:
        ref = rerun(worst.sample_id)
        agg["refined_max"] = ref.ratio
        agg["refined_rel_change"] = abs(ref.ratio - worst.ratio) / worst.ratio
    return agg


def run_study(spec: AdmissibleSpec, setup: EllipticSetup, count: int, refine: bool = True,
              workers: int | None = None) -> StabilityReport:
    """Monte-Carlo over admissible traces; the worst sample is recomputed on a 2x refined grid."""
    samples = sample_admissible(spec, count, setup.domain.n_theta, setup.r_s)

    def one(i):
        try:
            return elliptic_ratio(samples[i], setup, i)
        except CarlemanLabError as err:
            return _failed(i, err)

    records = ordered_map(one, range(count), workers)
    fine = setup.refined(2) if refine and count else None
    agg = _aggregate(records, (lambda i: elliptic_ratio(samples[i], fine, i)) if fine else None, refine)
    rep = StabilityReport(setup.kind, records, agg, asdict(spec), setup.describe())
    rep.meta["coefficients"] = [s.to_dict() for s in samples]
    return rep


def run_parabolic_study(spec: ParabolicAdmissibleSpec, setup: ParabolicSetup, count: int, eps: float,
                        refine: bool = True, workers: int | None = None) -> StabilityReport:
    samples = sample_parabolic_admissible(spec, count, setup.t, setup.domain.n_theta, setup.radius)

    def one(i):
        try:
            return parabolic_ratio(samples[i], eps, setup, i)
        except CarlemanLabError as err:
            return _failed(i, err)

    records = ordered_map(one, range(count), workers)
    fine = setup.refined(2) if refine and count else None
    agg = _aggregate(records, (lambda i: parabolic_ratio(samples[i], eps, fine, i)) if fine else None, refine)
    good = [r.extra["corollary_ratio"] for r in records if r.status == "ok"]
    agg["corollary_max"] = float(max(good)) if good else None
    rep = StabilityReport("parabolic", records, agg, {**asdict(spec), "eps": eps}, setup.describe())
    rep.meta["coefficients"] = [s.to_dict() for s in samples]
    return rep
