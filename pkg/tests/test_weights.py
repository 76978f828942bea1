import math

import numpy as np
import pytest

from carleman_lab.errors import ParameterOverflow, UnsupportedGeometry, WeightViolation
from carleman_lab.geometry import INNER, OUTER, build_annulus, build_disk
from carleman_lab.weights import (EllipticWeight, build_parabolic_weight, build_radial_weight, carleman_factors, ell,
                                  parabolic_factors, parabolic_time_grid, validate_weight)


def annulus():
    return build_annulus(1.0, 2.0, 16, 32, {INNER: "S", OUTER: "Gamma"})


def test_radial_weight_vanishes_on_upsilon():
    dom = annulus()
    for ups in (INNER, OUTER):
        phi = build_radial_weight(dom, ups)
        assert np.all(phi.values[dom.boundary_ring(ups)] == 0.0)
        assert math.isclose(validate_weight(phi, ups), 1.0, rel_tol=1e-10)


def test_weight_needs_annulus():
    with pytest.raises(UnsupportedGeometry):
        build_radial_weight(build_disk(1.0, 16, 32), OUTER)


def test_violations_reported():
    dom = annulus()
    with pytest.raises(WeightViolation) as err:
        validate_weight(dom.from_polar(lambda r, t: r - 0.5), INNER)
    assert err.value.to_dict()["condition"] == "phi does not vanish on Upsilon"
    with pytest.raises(WeightViolation):
        validate_weight(dom.from_polar(lambda r, t: (r - 1.0) * (1.5 - r)), INNER)
    with pytest.raises(WeightViolation):
        validate_weight(dom.from_polar(lambda r, t: 1e-4 * (r - 1.0)), INNER)


def test_sigma_value():
    w = EllipticWeight.radial(annulus(), INNER, 3.0, 10.0)
    assert math.isclose(w.sigma[-1, 0], 30.0 * math.exp(3.0), rel_tol=1e-14)
    assert w.with_params(s=20.0).sigma[-1, 0] == 2 * w.sigma[-1, 0]


def test_factors_shift_and_overflow():
    w = EllipticWeight.radial(annulus(), INNER, 3.0, 400.0)
    f = carleman_factors(w)
    assert f.weight.max() == 1.0
    small = carleman_factors(w.with_params(s=0.5))
    assert np.allclose(np.log(small.weight) + small.shift, small.log_e2sphi)
    with pytest.raises(ParameterOverflow):
        carleman_factors(w.with_params(gamma=60.0, s=1e80))


def test_parabolic_weight_shape_and_sign():
    phi = build_radial_weight(annulus(), OUTER)
    w = build_parabolic_weight(phi, 1.0, 32, 2.0, 5.0)
    assert w.varphi.shape == (32, 17, 32)
    assert np.all(w.varphi < 0)
    t = parabolic_time_grid(1.0, 32)
    assert t[0] > 0 and t[-1] < 1.0
    assert np.allclose(w.ell, ell(t, 1.0))
    f = parabolic_factors(w)
    assert np.isfinite(f.weight).all() and f.weight.max() == 1.0
    with pytest.raises(ValueError):
        build_parabolic_weight(phi, 1.0, 8, 2.0, 5.0)
