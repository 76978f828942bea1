"""Preconditioned conjugate gradients for the SPD systems of the forward solvers."""

from __future__ import annotations

import math
import threading

import numpy as np
import pyamg
import scipy.sparse as sp
from scipy.sparse.linalg import cg, splu

from ..errors import SolverDiverged

# pyamg estimates spectral radii from np.random start vectors; pinning the seed keeps results reproducible
_AMG_LOCK = threading.Lock()
_AMG_SEED = 20240611


def _amg_preconditioner(A: sp.csr_matrix):
    with _AMG_LOCK:
        state = np.random.get_state()
        np.random.seed(_AMG_SEED)
        try:
            ml = pyamg.smoothed_aggregation_solver(A, symmetry="symmetric")
        finally:
            np.random.set_state(state)
    return ml.aspreconditioner(cycle="V")


class SPDSolver:
    """CG on a fixed SPD matrix with an algebraic-multigrid preconditioner built once."""

    def __init__(self, A: sp.spmatrix, tol: float = 1e-12):
        self.A = sp.csr_matrix(A)
        self.tol = float(tol)
        n = self.A.shape[0]
        self.maxiter = int(math.ceil(50.0 * math.sqrt(n) * math.log(1.0 / self.tol)))
        self._M = _amg_preconditioner(self.A)

    def solve(self, b: np.ndarray, x0: np.ndarray | None = None) -> np.ndarray:
        return self.solve_counted(b, x0)[0]

    def solve_counted(self, b: np.ndarray, x0: np.ndarray | None = None) -> tuple[np.ndarray, int]:
        """Solution and CG iteration count (kept off the instance so threads can share it)."""
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            return np.zeros_like(b), 0
        count = [0]

        def cb(_):
            count[0] += 1

        x, info = cg(self.A, b, x0=x0, rtol=self.tol, atol=0.0, maxiter=self.maxiter, M=self._M, callback=cb)
        res = np.linalg.norm(b - self.A @ x) / bnorm
        if info != 0 or not np.isfinite(res) or res > 10 * self.tol:
            raise SolverDiverged(f"CG stopped after {count[0]} iterations with relative residual {res:.3g}")
        return x, count[0]


class FactorizedSolver:
    """Sparse LU factorisation reused across many right-hand sides, with a residual check."""

    def __init__(self, A: sp.spmatrix, tol: float = 1e-10):
        self.A = sp.csc_matrix(A)
        self.tol = float(tol)
        self._lu = splu(self.A)

    def solve(self, b: np.ndarray, x0: np.ndarray | None = None) -> np.ndarray:
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            return np.zeros_like(b)
        x = self._lu.solve(b)
        res = np.linalg.norm(b - self.A @ x) / bnorm
        if not np.isfinite(res) or res > self.tol:
            raise SolverDiverged(f"factorised solve left relative residual {res:.3g}")
        return x
