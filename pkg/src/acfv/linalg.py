"""Solvers for the shifted system (M + tau A) x = b.

The shifted matrix is symmetric positive definite (positive diagonal
mass plus a positive semi-definite stiffness), so two solution paths
are enough: a prefactored dense Cholesky for small meshes, which also
serves as the exact-oracle path in the tests, and preconditioned
conjugate gradients with a Jacobi preconditioner for everything else.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps

from .errors import NumericalFailure

__all__ = ["ShiftedSolver", "pcg", "solve_spd", "DENSE_LIMIT"]

# Systems up to this size are solved by dense Cholesky factorization.
DENSE_LIMIT = 64


def pcg(matrix, b, precond_diag, rtol=1e-12, max_iter=None):
    """Preconditioned conjugate gradients for a symmetric positive definite system.

    Iterates until |matrix x - b|_2 <= rtol |b|_2 or the iteration cap
    (10 times the dimension by default) is hit, in which case a
    NumericalFailure carrying the last residual norm is raised.
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if max_iter is None:
        max_iter = 10 * n
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return np.zeros(n)

    x = np.zeros(n)
    r = b.copy()
    z = r / precond_diag
    p = z.copy()
    rz = r @ z
    for _ in range(max_iter):
        Ap = matrix @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        if np.linalg.norm(r) <= rtol * b_norm:
            return x
        z = r / precond_diag
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NumericalFailure(
        f"conjugate gradients did not reach rtol={rtol:g} within {max_iter} iterations",
        residual=float(np.linalg.norm(r)),
    )


def solve_spd(matrix, b, rtol=1e-12):
    """Solve an SPD system, dense Cholesky when small, PCG otherwise."""
    n = b.shape[0]
    if n <= DENSE_LIMIT:
        dense = matrix.toarray() if sps.issparse(matrix) else np.asarray(matrix)
        return sla.cho_solve(sla.cho_factor(dense), b)
    diag = matrix.diagonal() if sps.issparse(matrix) else np.diagonal(matrix)
    return pcg(matrix, b, diag, rtol=rtol)


class ShiftedSolver:
    """Solver for (M + tau A) x = b on a fixed mesh and time step.

    Holds references to the mass diagonal and the stiffness matrix so
    the step functions can reach them, and prefactors the shifted
    matrix once.  All per-call state is local, so one solver instance
    can serve concurrent solves.

    Right-hand sides may be a single field of shape (d,) or a stack of
    fields of shape (p, d); the output matches the input shape.
    """

    def __init__(self, mass_diag, stiffness, tau, rtol=1e-12):
        if tau <= 0:
            raise ValueError("tau must be positive")
        self.mass_diag = np.asarray(mass_diag, dtype=float)
        self.stiffness = stiffness
        self.tau = float(tau)
        self.rtol = float(rtol)
        self.n = self.mass_diag.shape[0]

        shifted = sps.diags(self.mass_diag) + tau * stiffness
        self.shifted = shifted.tocsr()
        if self.n <= DENSE_LIMIT:
            self._chol = sla.cho_factor(self.shifted.toarray())
            self._precond = None
        else:
            self._chol = None
            self._precond = self.mass_diag + tau * stiffness.diagonal()

    @property
    def m_min(self) -> float:
        return float(self.mass_diag.min())

    def solve(self, b):
        """Solve (M + tau A) x = b to relative residual ``rtol``."""
        b = np.asarray(b, dtype=float)
        if b.ndim == 1:
            return self._solve_one(b)
        if b.ndim == 2:
            if self._chol is not None:
                return sla.cho_solve(self._chol, b.T).T
            return np.vstack([self._solve_one(row) for row in b])
        raise ValueError("right-hand side must be 1-d or 2-d")

    def _solve_one(self, b):
        if self._chol is not None:
            x = sla.cho_solve(self._chol, b)
            # One refinement step in the unlikely case rounding in the
            # factorization leaves the residual above the contract.
            r = b - self.shifted @ x
            b_norm = np.linalg.norm(b)
            if b_norm > 0 and np.linalg.norm(r) > self.rtol * b_norm:
                x = x + sla.cho_solve(self._chol, r)
            return x
        return pcg(self.shifted, b, self._precond, rtol=self.rtol)

    def apply_markov(self, x):
        """Apply (M + tau A)^{-1} M, the monotone one-step heat propagator.

        The matrix is entrywise nonnegative and fixes constants, so it
        maps nonnegative fields to nonnegative fields and conserves the
        mass-weighted total.
        """
        x = np.asarray(x, dtype=float)
        return self.solve(x * self.mass_diag)
