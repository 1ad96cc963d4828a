"""Resolvent norms by inverse iteration on (A - z)^H (A - z)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numcore import SolverError, SparseMatrix, start_vector
from ..numcore import solve as _solve


@dataclass
class PseudospectraGrid:
    z: np.ndarray
    values: np.ndarray            # estimates of ||(A - z)^{-1}||; inf where a solve failed
    converged: np.ndarray
    iterations: np.ndarray

    def rows(self):
        for z, v, c in zip(self.z, self.values, self.converged):
            yield {"re_z": z.real, "im_z": z.imag, "resolvent_norm": v, "converged": bool(c)}


def shifted(A: SparseMatrix, z: complex) -> SparseMatrix:
    diag = np.repeat(np.arange(A.n), np.diff(A.indptr)) == A.indices
    if int(diag.sum()) != A.n:
        raise ValueError("matrix must store its full diagonal")
    data = A.data.copy()
    data[diag] -= z
    return A.with_data(data)


def resolvent_norm(A: SparseMatrix, z: complex, tol: float = 1e-3, maxit: int = 200,
                   solver_tol: float = 1e-9, solver_maxit: int = 3000, seed: int = 7):
    """``1 / sigma_min(A - z)`` by power iteration on ``((A - z)^H (A - z))^{-1}``.

    Each sweep solves with ``(A - z)^H`` and then ``A - z``. Returns
    ``(estimate, converged, iterations)``; a failed solve (``z`` at or next
    to an eigenvalue) gives ``(inf, False, k)``.
    """
    B = shifted(A, z)
    BH = B.conj_transpose()
    x = start_vector(A.n, seed)
    est = prev = 0.0
    for k in range(1, maxit + 1):
        try:
            y, _ = _solve(BH, x, tol=solver_tol, maxit=solver_maxit)
            est = float(np.linalg.norm(y))
            x2, _ = _solve(B, y, tol=solver_tol, maxit=solver_maxit)
        except SolverError:
            return np.inf, False, k
        if not np.isfinite(est) or est == 0:
            return np.inf, False, k
        if k > 1 and abs(est - prev) <= tol * est:
            return est, True, k
        prev = est
        x = x2 / np.linalg.norm(x2)
    return est, False, maxit


def pseudospectra_grid(A: SparseMatrix, z_values, tol: float = 1e-3, maxit: int = 200,
                       **kwargs) -> PseudospectraGrid:
    z = np.asarray(list(z_values), dtype=np.complex128)
    vals = np.empty(z.size)
    conv = np.zeros(z.size, dtype=bool)
    its = np.zeros(z.size, dtype=int)
    for i, zi in enumerate(z):
        vals[i], conv[i], its[i] = resolvent_norm(A, zi, tol, maxit, **kwargs)
    return PseudospectraGrid(z=z, values=vals, converged=conv, iterations=its)
