"""Closed-form test functions fed to the Carleman verifier."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import k0

from .geometry import GridDomain, GridField
from .riemannian import smooth_bump
from .solvers.parabolic import SpaceTimeField


@dataclass(frozen=True)
class BankFunction:
    id: str
    func: Callable  # (r, theta) -> values, or (t, r, theta) -> values for space-time entries
    dt_func: Callable | None = None

    def sample(self, dom: GridDomain) -> GridField:
        return dom.from_polar(self.func)

    def sample_space_time(self, dom: GridDomain, t: np.ndarray) -> SpaceTimeField:
        return SpaceTimeField.from_function(dom, t, self.func, self.dt_func)


def _bump_params(dom: GridDomain):
    mid = 0.5 * (dom.r_inner + dom.r_outer)
    return mid, 0.3 * (dom.r_outer - dom.r_inner)


def elliptic_bank(dom: GridDomain) -> list[BankFunction]:
    """Eight functions covering ``Pu = 0`` and ``Pu != 0`` (for ``g = I, p = 0``)."""
    mid, width = _bump_params(dom)

    def bump(r, t):
        return smooth_bump(r, mid, width) + 0.0 * t

    def bump_cos(k):
        return lambda r, t: smooth_bump(r, mid, width) * np.cos(k * t)

    return [
        BankFunction("log_r", lambda r, t: np.log(r) + 0.0 * t),
        BankFunction("r_cos1", lambda r, t: r * np.cos(t)),
        BankFunction("r3_cos3", lambda r, t: r**3 * np.cos(3 * t)),
        BankFunction("k0_radial", lambda r, t: k0(r) + 0.0 * t),
        BankFunction("bump", bump),
        BankFunction("bump_cos1", bump_cos(1)),
        BankFunction("bump_cos2", bump_cos(2)),
        BankFunction("bump_cos5", bump_cos(5)),
    ]


def parabolic_bank() -> list[BankFunction]:
    """Four space-time functions; ``r^2 + 4t`` is caloric, the others are not."""
    return [
        BankFunction("exp_r_cos1", lambda t, r, th: np.exp(-t) * r * np.cos(th),
                     lambda t, r, th: -np.exp(-t) * r * np.cos(th)),
        BankFunction("caloric_r2", lambda t, r, th: r**2 + 4.0 * t + 0.0 * th,
                     lambda t, r, th: 4.0 + 0.0 * (r + th)),
        BankFunction("t_r2_cos2", lambda t, r, th: (1.0 + t) * r**2 * np.cos(2 * th),
                     lambda t, r, th: r**2 * np.cos(2 * th) + 0.0 * t),
        BankFunction("exp_1_plus_r2", lambda t, r, th: np.exp(-2.0 * t) * (1.0 + r**2) + 0.0 * th,
                     lambda t, r, th: -2.0 * np.exp(-2.0 * t) * (1.0 + r**2) + 0.0 * th),
    ]


def zero_function(space_time: bool = False) -> BankFunction:
    if space_time:
        return BankFunction("zero", lambda t, r, th: 0.0 * (t + r + th), lambda t, r, th: 0.0 * (t + r + th))
    return BankFunction("zero", lambda r, t: 0.0 * (r + t))
