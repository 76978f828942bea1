import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carleman_lab.errors import TruncationTooSmall
from carleman_lab.stability import (AdmissibleSpec, EllipticSetup, ParabolicAdmissibleSpec, ParabolicSetup,
                                    SeparableData, TrigPoly, check_admissible, check_parabolic_admissible,
                                    elliptic_ratio, parabolic_ratio, run_parabolic_study, run_study,
                                    sample_admissible, sample_parabolic_admissible)


@pytest.fixture(scope="module")
def interior():
    return EllipticSetup.interior(n_r=32, n_theta=64)


def test_trig_poly_derivative():
    a = TrigPoly(1.0, (0.5, 0.1), (0.0, -0.2))
    th = np.linspace(0, 2 * np.pi, 7)
    h = 1e-6
    assert np.allclose(a.derivative(th), (a(th + h) - a(th - h)) / (2 * h), atol=1e-8)
    assert a.scaled(2.0)(th) == pytest.approx(2 * a(th))


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(0.1, 5.0), ratio=st.floats(0.1, 10.0), K=st.integers(1, 6), seed=st.integers(0, 2**31))
def test_sampler_respects_bounds(alpha, ratio, K, seed):
    spec = AdmissibleSpec(alpha, alpha * ratio, K, seed)
    th = np.arange(64) * 2 * np.pi / 64
    for a in sample_admissible(spec, 5, 64):
        assert check_admissible(a(th), spec).ok


def test_sampler_deterministic():
    spec = AdmissibleSpec(1.0, 2.0, 4, 7)
    assert sample_admissible(spec, 5, 64) == sample_admissible(spec, 5, 64)


def test_admissibility_failures():
    spec = AdmissibleSpec(1.0, 2.0)
    th = np.arange(64) * 2 * np.pi / 64
    assert check_admissible(0.5 + 0 * th, spec).condition == "|a| < alpha"
    assert check_admissible(3 + np.cos(5 * th), spec).condition == "|d_tau a| > beta"
    with pytest.raises(ValueError):
        AdmissibleSpec(0.0, 1.0)


def test_constant_interior_ratio(interior):
    rec = elliptic_ratio(TrigPoly(1.0), interior)
    assert math.isclose(rec.ratio, math.sqrt(2.0), rel_tol=1e-8)


def test_ratio_scale_invariant(interior):
    a = sample_admissible(AdmissibleSpec(1.0, 2.0, 4, 3), 1, 64)[0]
    r1 = elliptic_ratio(a, interior).ratio
    r2 = elliptic_ratio(a.scaled(1e3), interior).ratio
    assert abs(r1 - r2) <= 1e-9 * r1


def test_exterior_setup():
    setup = EllipticSetup.exterior(n_gamma=16, n_theta=32)
    rec = elliptic_ratio(TrigPoly(1.0), setup)
    assert np.isfinite(rec.ratio) and rec.status == "ok"
    with pytest.raises(TruncationTooSmall):
        EllipticSetup.exterior(R_inf=5.0)


def test_run_study(interior):
    rep = run_study(AdmissibleSpec(1.0, 2.0, 4, 7), interior, 6, refine=True, workers=2)
    agg = rep.aggregate
    assert agg["count"] == 6 and agg["ok"] == 6
    assert agg["refined_rel_change"] < 0.1
    assert len(rep.rows()) == 6 and len(rep.meta["coefficients"]) == 6
    assert rep.to_dict()["setup"]["kind"] == "interior"


def test_separable_data():
    g = SeparableData((1.0, 2.0), TrigPoly(1.0, (0.5,)), 2.0)
    t, th = np.array([0.0, 1.0, 2.0]), np.array([0.0, np.pi])
    assert np.allclose(g.values(t, th), np.outer([1.0, 2.0, 3.0], [1.5, 0.5]))
    assert np.allclose(g.dt_values(t, th), np.outer([1.0, 1.0, 1.0], [1.5, 0.5]))


def test_parabolic_sampler_and_constant_ratio():
    setup = ParabolicSetup.disk(n_r=16, n_theta=32, n_t=64)
    spec = ParabolicAdmissibleSpec(1.0, 2.0, rng_seed=4)
    for g in sample_parabolic_admissible(spec, 4, setup.t, 32):
        assert check_parabolic_admissible(g.values(setup.t, setup.theta), setup.t, spec).ok
        assert g.g0[0] == 1.0
    rec = parabolic_ratio(SeparableData((1.0,), TrigPoly(1.0), 1.0), 0.25, setup)
    assert math.isclose(rec.ratio, math.sqrt(2 * 0.5), rel_tol=1e-8)
    with pytest.raises(Exception):
        parabolic_ratio(SeparableData((1.0,), TrigPoly(1.0), 1.0), 0.6, setup)


def test_run_parabolic_study():
    setup = ParabolicSetup.disk(n_r=16, n_theta=32, n_t=64)
    rep = run_parabolic_study(ParabolicAdmissibleSpec(1.0, 2.0, rng_seed=1), setup, 3, 0.25, refine=False)
    assert rep.aggregate["ok"] == 3 and np.isfinite(rep.aggregate["corollary_max"])
    assert rep.aggregate["refined_max"] is None


def test_beta_zero_single_sample_matches_direct(interior):
    spec = AdmissibleSpec(1.0, 0.0, 4, 11)
    rep = run_study(spec, interior, 1, refine=False)
    a = sample_admissible(spec, 1, 64)[0]
    assert all(c == 0 for c in a.cos + a.sin)
    assert rep.records[0].ratio == elliptic_ratio(a, interior).ratio


@pytest.mark.parametrize("lam", [1e-3, 1.0, 1e3, -1.0])
def test_scale_and_sign_invariance(interior, lam):
    for a in sample_admissible(AdmissibleSpec(1.0, 2.0, 4, 5), 3, 64):
        base = elliptic_ratio(a, interior).ratio
        assert abs(elliptic_ratio(a.scaled(lam), interior).ratio - base) <= 1e-9 * base


def test_two_plus_cos_mesh_stable(interior):
    a = TrigPoly(2.0, (1.0,))
    assert check_admissible(a(interior.theta), AdmissibleSpec(1.0, 1.0)).ok
    coarse = elliptic_ratio(a, interior).ratio
    fine = elliptic_ratio(a, interior.refined(2)).ratio
    assert np.isfinite(coarse) and abs(fine - coarse) <= 0.05 * fine


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
def test_study_mesh_stable_for_beta_over_alpha(interior, beta):
    rep = run_study(AdmissibleSpec(1.0, beta, 4, 7), interior, 20, refine=True)
    assert rep.aggregate["refined_rel_change"] <= 0.1


def test_parabolic_scale_invariance_and_separable_example():
    setup = ParabolicSetup.disk(n_r=16, n_theta=32, n_t=64)
    g = SeparableData((1.0, 1.0), TrigPoly(2.0, (1.0,)), 1.0)
    base = parabolic_ratio(g, 0.25, setup)
    for lam in (1e-3, 1e3):
        assert abs(parabolic_ratio(g.scaled(lam), 0.25, setup).ratio - base.ratio) <= 1e-10 * base.ratio
    assert np.isfinite(base.ratio) and np.isfinite(base.extra["corollary_ratio"])
    fine = parabolic_ratio(g, 0.25, setup.refined(2))
    assert abs(fine.ratio - base.ratio) <= 0.05 * fine.ratio
