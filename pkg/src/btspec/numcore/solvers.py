"""Jacobi-preconditioned BiCGSTAB with a restarted-GMRES fallback."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .sparse import SparseMatrix, spmv

STAGNATION_WINDOW = 50


class SolverError(RuntimeError):
    """Raised when an iterative solve fails to reach its tolerance."""

    def __init__(self, message, best_residual, iterations):
        super().__init__(f"{message} (best relative residual {best_residual:.3e} "
                         f"after {iterations} iterations)")
        self.best_residual = best_residual
        self.iterations = iterations


class SolveInfo(NamedTuple):
    iterations: int
    residual: float      # true relative residual ||Ax - b|| / ||b||
    method: str


def _norm(v):
    return float(np.sqrt(np.vdot(v, v).real))


def _bicgstab(A, b, x, minv, tol_abs, maxit):
    """Return (x, iterations, stagnated). Stops on convergence of the
    recursive residual, breakdown or stagnation."""
    r = b - spmv(A, x)
    rhat = r.copy()
    rho = alpha = omega = 1.0 + 0j
    v = np.zeros_like(b)
    p = np.zeros_like(b)
    best = _norm(r)
    best_x = x.copy()
    since_best = 0
    it = 0
    if best <= tol_abs:
        return x, 0, False
    while it < maxit:
        it += 1
        rho_new = np.vdot(rhat, r)
        if rho_new == 0:
            return best_x, it, True
        beta = (rho_new / rho) * (alpha / omega)
        p = r + beta * (p - omega * v)
        phat = minv * p
        v = spmv(A, phat)
        denom = np.vdot(rhat, v)
        if denom == 0:
            return best_x, it, True
        alpha = rho_new / denom
        s = r - alpha * v
        ns = _norm(s)
        if ns <= tol_abs:
            x = x + alpha * phat
            return x, it, False
        shat = minv * s
        t = spmv(A, shat)
        tt = np.vdot(t, t).real
        if tt == 0:
            return best_x, it, True
        omega = np.vdot(t, s) / tt
        x = x + alpha * phat + omega * shat
        r = s - omega * t
        rho = rho_new
        nr = _norm(r)
        if nr < best:
            best, best_x, since_best = nr, x, 0
        else:
            since_best += 1
        if nr <= tol_abs:
            return x, it, False
        if omega == 0 or since_best >= STAGNATION_WINDOW:
            return best_x, it, True
    return best_x, it, True


def _gmres(A, b, x, minv, tol_abs, maxit, restart):
    """Right-preconditioned restarted GMRES. Returns (x, iterations)."""
    n = b.size
    it = 0
    while it < maxit:
        r = b - spmv(A, x)
        beta = _norm(r)
        if beta <= tol_abs:
            break
        m = min(restart, maxit - it, n)
        V = np.zeros((m + 1, n), dtype=np.complex128)
        H = np.zeros((m + 1, m), dtype=np.complex128)
        cs = np.zeros(m, dtype=np.complex128)
        sn = np.zeros(m, dtype=np.complex128)
        e = np.zeros(m + 1, dtype=np.complex128)
        e[0] = beta
        V[0] = r / beta
        k_used = 0
        for k in range(m):
            it += 1
            w = spmv(A, minv * V[k])
            for i in range(k + 1):
                H[i, k] = np.vdot(V[i], w)
                w -= H[i, k] * V[i]
            H[k + 1, k] = _norm(w)
            if H[k + 1, k] > 0:
                V[k + 1] = w / H[k + 1, k]
            for i in range(k):
                h0, h1 = H[i, k], H[i + 1, k]
                H[i, k] = np.conj(cs[i]) * h0 + np.conj(sn[i]) * h1
                H[i + 1, k] = -sn[i] * h0 + cs[i] * h1
            a, c = H[k, k], H[k + 1, k]
            den = np.sqrt(abs(a) ** 2 + abs(c) ** 2)
            if den == 0:
                cs[k], sn[k] = 1.0, 0.0
            else:
                cs[k], sn[k] = a / den, c / den
            H[k, k] = np.conj(cs[k]) * a + np.conj(sn[k]) * c
            H[k + 1, k] = 0
            e[k + 1] = -sn[k] * e[k]
            e[k] = np.conj(cs[k]) * e[k]
            k_used = k + 1
            if abs(e[k + 1]) <= tol_abs or H[k, k] == 0:
                break
        Hk = H[:k_used, :k_used]
        if np.any(np.diag(Hk) == 0):
            raise SolverError("GMRES breakdown on a singular system", abs(e[k_used]) / _norm(b), it)
        y = np.linalg.solve(np.triu(Hk), e[:k_used])
        x = x + minv * (V[:k_used].T @ y)
        if k_used < m and abs(e[k_used]) > tol_abs:
            # lucky breakdown without convergence: no further progress possible
            break
    return x, it


def solve(A: SparseMatrix, b, tol: float = 1e-10, maxit: int = 1000,
          preconditioner="jacobi", x0=None, restart: int = 40):
    """Solve ``A x = b`` to relative residual ``tol``.

    BiCGSTAB with Jacobi preconditioning runs first; if it breaks down or
    its residual stops decreasing for 50 iterations, GMRES(``restart``)
    continues from the best iterate. The residual of the returned solution
    is recomputed with one extra product, so ``info.residual`` is the true
    relative residual.

    Returns
    -------
    x : ndarray
    info : SolveInfo

    Raises
    ------
    SolverError
        If ``maxit`` iterations do not reach the tolerance.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (A.n,):
        raise ValueError(f"dimension mismatch: matrix is {A.n}x{A.n}, rhs has shape {b.shape}")
    nb = _norm(b)
    if nb == 0:
        return np.zeros_like(b), SolveInfo(0, 0.0, "trivial")
    if preconditioner == "jacobi":
        d = A.diagonal()
        minv = np.where(d != 0, 1.0 / np.where(d != 0, d, 1.0), 1.0)
    elif preconditioner is None:
        minv = np.ones(A.n, dtype=np.complex128)
    else:
        raise ValueError(f"unsupported preconditioner {preconditioner!r}")

    tol_abs = tol * nb
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.complex128)
    total = 0
    method = "bicgstab"
    best_res = np.inf
    while total < maxit:
        if method == "bicgstab":
            x, its, stagnated = _bicgstab(A, b, x, minv, tol_abs, maxit - total)
            if stagnated:
                method = "gmres"
        else:
            x, its = _gmres(A, b, x, minv, tol_abs, maxit - total, restart)
        total += its
        res = _norm(b - spmv(A, x))
        best_res = min(best_res, res)
        if res <= tol_abs:
            return x, SolveInfo(total, res / nb, method)
        if method == "gmres" and its == 0:
            break
    raise SolverError("iterative solve did not converge", best_res / nb, total)
