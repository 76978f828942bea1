import math

import numpy as np
import pytest

from carleman_lab.geometry import INNER, OUTER, boundary_curve, build_annulus, build_disk
from carleman_lab.riemannian import (Anisotropic, Conformal, MetricField, PotentialField, boundary_gradient_parts,
                                     cartesian_gradient, laplace_beltrami, make_preset)


def annulus(nr, nt):
    return build_annulus(1.0, 2.0, nr, nt, {INNER: "S", OUTER: "Gamma"})


def max_err(nr, nt, f, lap, preset=None):
    dom = annulus(nr, nt)
    g = MetricField.sample(dom, preset)
    return float(np.abs(laplace_beltrami(g, dom.from_cartesian(f)).values - dom.from_cartesian(lap).values).max())


def test_harmonic_function_second_order():
    f = lambda x, y: np.exp(x) * np.sin(y)  # noqa: E731
    e1, e2 = max_err(32, 64, f, lambda x, y: 0 * x), max_err(64, 128, f, lambda x, y: 0 * x)
    assert math.log2(e1 / e2) > 1.9


def test_quadratic_reproduced_to_roundoff():
    e = max_err(32, 64, lambda x, y: x**2 + y**2, lambda x, y: 4 + 0 * x)
    assert e < 1e-8


def test_conformal_metric_scales_operator():
    dom = annulus(32, 64)
    u = dom.from_cartesian(lambda x, y: x**3 - 2 * x * y)
    flat = laplace_beltrami(MetricField.sample(dom), u).values
    conf = laplace_beltrami(MetricField.sample(dom, Conformal(4.0)), u).values
    assert np.allclose(conf, 0.25 * flat, rtol=1e-12, atol=1e-12)


def test_disk_centre_row():
    dom = build_disk(1.0, 32, 64)
    g = MetricField.sample(dom)
    lap = laplace_beltrami(g, dom.from_cartesian(lambda x, y: x**2 + 3 * y**2)).values
    assert abs(lap[0, 0] - 8.0) < 1e-6


def test_cartesian_gradient_second_order():
    errs = []
    for nr, nt in ((16, 32), (32, 64)):
        dom = annulus(nr, nt)
        gx, gy = cartesian_gradient(dom, dom.from_cartesian(lambda x, y: 2 * x - y).values)
        errs.append(max(np.abs(gx - 2.0).max(), np.abs(gy + 1.0).max()))
    assert errs[0] < 2e-2 and math.log2(errs[0] / errs[1]) > 1.9


@pytest.mark.parametrize("preset", [None, Anisotropic()])
def test_tangential_decomposition(preset):
    dom = annulus(32, 64)
    g = MetricField.sample(dom, preset)
    u = dom.from_cartesian(lambda x, y: np.sin(x) * y + x**2)
    for bid in dom.boundary_ids:
        full, dn, tang = boundary_gradient_parts(g, u, boundary_curve(dom, bid))
        assert np.abs(tang - (full - dn**2)).max() <= 1e-12


def test_presets_and_validation():
    assert make_preset("conformal", c=3.0).params() == {"c": 3.0}
    with pytest.raises(ValueError):
        make_preset("hyperbolic")
    with pytest.raises(ValueError):
        Anisotropic(amplitude=-1.0)
    dom = annulus(16, 32)
    g = MetricField.sample(dom, Anisotropic(0.5))
    assert g.theta_ell > 0.99


def test_potential_bound_checked():
    dom = annulus(16, 32)
    with pytest.raises(ValueError):
        PotentialField(np.zeros(dom.shape), eta=0.5)
    p = PotentialField.constant(dom, 2.0, 1.0)
    q = p.resample(dom.refined())
    assert np.all(q.p == 2.0)
