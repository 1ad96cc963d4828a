"""Crank-Nicolson propagation over one period and the monodromy map.

On the torus cell the potential ``i g x`` is gauged away: the state obeys
``dw/dt = -B(p(t)) w`` with the x-link phase drifting as ``p(t) = p0 - g t``.
After one period ``t_g = 2 pi / g`` the phase has moved by ``-2 pi``, and
multiplying by ``exp(-2 pi i x)`` brings the state back to the ``p0``
gauge. The resulting map is the monodromy operator restricted to
``p0``-Floquet states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import TORUS_CELL, CellGrid, build_cell_grid
from .numcore import SparseMatrix, solve
from .operators import ProblemConfig, StencilFamily


@dataclass
class MonodromyContext:
    config: ProblemConfig
    grid: CellGrid
    family: StencilFamily = field(repr=False)
    dt: float
    phases: np.ndarray           # midpoint phases p_j
    realign: np.ndarray          # exp(-2 pi i x) on the DOFs

    @property
    def n(self) -> int:
        return self.grid.n_active

    @property
    def end_phase(self) -> float:
        return self.config.p0 - self.config.g * self.config.Nt * self.dt


def make_context(config: ProblemConfig, grid: CellGrid | None = None) -> MonodromyContext:
    if grid is None:
        grid = build_cell_grid(config.N, config.shape)
    if grid.topology != TORUS_CELL:
        raise ValueError("the monodromy lives on the torus cell")
    dt = config.t_g / config.Nt
    j = np.arange(config.Nt)
    phases = config.p0 - config.g * (j + 0.5) * dt
    realign = np.exp(-2j * math.pi * grid.dof_x)
    for a in (phases, realign):
        a.setflags(write=False)
    return MonodromyContext(config, grid, StencilFamily(grid, config.q), dt, phases, realign)


def _cn_matrix(ctx: MonodromyContext, j: int) -> SparseMatrix:
    fam = ctx.family
    data = fam.shifted_data(ctx.phases[j], 0.5 * ctx.dt, 1.0)
    return SparseMatrix(fam.pattern.n, fam.pattern.indptr, fam.pattern.indices, data, check=False)


def _cn_solve(M: SparseMatrix, w: np.ndarray, tol: float, maxit: int) -> np.ndarray:
    # (I - dt/2 B) w == 2 w - (I + dt/2 B) w
    rhs = 2.0 * w - (M @ w)
    x, _ = solve(M, rhs, tol=tol, maxit=maxit, x0=rhs)
    return x


def cn_step(ctx: MonodromyContext, w: np.ndarray, j: int) -> np.ndarray:
    """One Crank-Nicolson step with the generator frozen at the midpoint phase ``p_j``."""
    cfg = ctx.config
    return _cn_solve(_cn_matrix(ctx, j), np.asarray(w, dtype=np.complex128),
                     cfg.solver_tol, cfg.solver_maxit)


def evolve_period(ctx: MonodromyContext, w0: np.ndarray, snapshots: bool = False):
    """Run the ``Nt`` steps of one period without realignment.

    With ``snapshots=True`` also returns the states at ``t_j = j dt`` for
    ``j = 0..Nt-1`` as an ``(Nt, n)`` array.
    """
    w = np.array(w0, dtype=np.complex128)
    store = np.empty((ctx.config.Nt, w.size), dtype=np.complex128) if snapshots else None
    for j in range(ctx.config.Nt):
        if snapshots:
            store[j] = w
        w = cn_step(ctx, w, j)
    return (w, store) if snapshots else w


def monodromy_apply(ctx: MonodromyContext, w0: np.ndarray) -> np.ndarray:
    """One period of evolution followed by the gauge realignment."""
    return ctx.realign * evolve_period(ctx, w0)


def monodromy_power_apply(ctx: MonodromyContext, w0: np.ndarray, s: int) -> np.ndarray:
    if s < 1:
        raise ValueError("s must be at least 1")
    w = np.asarray(w0, dtype=np.complex128)
    for _ in range(s):
        w = monodromy_apply(ctx, w)
    return w


def strip_semigroup_apply(A: SparseMatrix, T: float, Nt: int, w, tol: float = 1e-10,
                          maxit: int = 2000) -> np.ndarray:
    """``Nt`` Crank-Nicolson steps of size ``T / Nt`` for ``dw/dt = -A w``."""
    if T <= 0:
        raise ValueError("T must be positive")
    M = strip_cn_matrix(A, T / Nt)
    return strip_cn_steps(M, Nt, w, tol, maxit)


def strip_cn_matrix(A: SparseMatrix, dt: float) -> SparseMatrix:
    data = 0.5 * dt * A.data
    diag = np.repeat(np.arange(A.n), np.diff(A.indptr)) == A.indices
    if int(diag.sum()) != A.n:
        raise ValueError("strip matrix must store its full diagonal")
    data = data.copy()
    data[diag] += 1.0
    return A.with_data(data)


def strip_cn_steps(M: SparseMatrix, Nt: int, w, tol: float = 1e-10, maxit: int = 2000):
    w = np.array(w, dtype=np.complex128)
    if not np.any(w):
        return w
    for _ in range(Nt):
        w = _cn_solve(M, w, tol, maxit)
    return w


def rayleigh_refine(apply, v) -> tuple[complex, float]:
    """Rayleigh quotient of a single-period map and its relative residual."""
    mu, res, _ = rayleigh_refine_full(apply, v)
    return mu, res


def rayleigh_refine_full(apply, v):
    v = np.asarray(v, dtype=np.complex128)
    nv2 = np.vdot(v, v).real
    if nv2 <= 0:
        raise ValueError("zero vector")
    av = np.asarray(apply(v), dtype=np.complex128)
    mu = np.vdot(v, av) / nv2
    res = float(np.linalg.norm(av - mu * v) / math.sqrt(nv2))
    return complex(mu), res, av
