"""Strip eigenfunctions rebuilt from a monodromy eigenvector."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry import CellGrid, build_strip_grid
from ..operators import ProblemConfig, assemble_strip_bt
from ..propagator import evolve_period, make_context
from .branches import unfold


class UnconvergedPairError(ValueError):
    pass


@dataclass
class Reconstruction:
    u: np.ndarray                 # values on the strip DOFs
    grid: CellGrid
    lam: complex
    residual: float               # windowed ||(A - lam) u|| / ||u||
    pair_residual: float          # ||K w0 - mu w0|| / ||w0|| seen during the evolution
    localized_fraction: float     # share of ||u||^2 inside |x| <= 2
    pairing_ratio: float          # |sum u * tau_1 u| / ||u||^2 (bilinear, no conjugation)


def strip_to_cell_map(strip: CellGrid, cell: CellGrid) -> np.ndarray:
    """Cell DOF of every strip DOF under ``x -> x mod 1``."""
    j, l = strip.active_jl
    idx = cell.active_index[j % cell.N, l]
    if np.any(idx < 0):
        raise ValueError("strip and cell masks disagree")
    return idx


def bilinear_translate_pairing(u: np.ndarray, grid: CellGrid) -> complex:
    """``sum_x u(x) u(x - 1)`` on the strip (no complex conjugation)."""
    full = grid.scatter(u, 0j)
    N = grid.N
    return complex(np.sum(full[N:] * full[:-N]))


def reconstruct_eigenfunction(config: ProblemConfig, mu: complex, w0, L: int,
                              pair_tol: float = 1e-4) -> Reconstruction:
    """Average the ungauged snapshots of one period into a strip eigenfunction.

    Snapshot ``j`` at ``t_j = j dt`` becomes ``exp(i p(t_j) x) w(t_j, x mod 1)``
    on the strip, weighted by ``exp(t_j lam)`` with ``lam = -Log(mu) / t_g``.
    The plain average over ``j = 0..Nt-1`` is the periodic trapezoid rule
    for the integral over one period. The residual is measured on
    ``|x| <= L - 1`` to keep clear of the truncated ends.
    """
    ctx = make_context(config)
    w0 = np.asarray(w0, dtype=np.complex128)
    end, snaps = evolve_period(ctx, w0, snapshots=True)
    kw = ctx.realign * end
    pair_res = float(np.linalg.norm(kw - mu * w0) / np.linalg.norm(w0))
    if pair_res > pair_tol:
        raise UnconvergedPairError(f"(mu, w0) is not an eigenpair: residual {pair_res:.3e}")
    lam = unfold(mu, config.t_g, config.g)

    strip = build_strip_grid(config.N, L, config.shape)
    cmap = strip_to_cell_map(strip, ctx.grid)
    x = strip.dof_x
    Nt = config.Nt
    u = np.zeros(strip.n_active, dtype=np.complex128)
    for j in range(Nt):
        t = j * ctx.dt
        p = config.p0 - config.g * t
        u += np.exp(t * lam + 1j * p * x) * snaps[j][cmap]
    u /= Nt

    A = assemble_strip_bt(strip, config.g, config.q)
    r = A @ u - lam * u
    win = np.abs(x) <= L - 1
    nu = np.linalg.norm(u[win])
    residual = float(np.linalg.norm(r[win]) / nu) if nu > 0 else math.inf
    total = np.vdot(u, u).real
    loc = float(np.sum(np.abs(u[np.abs(x) <= 2]) ** 2) / total)
    pairing = abs(bilinear_translate_pairing(u, strip)) / total
    return Reconstruction(u=u, grid=strip, lam=lam, residual=residual, pair_residual=pair_res,
                          localized_fraction=loc, pairing_ratio=float(pairing))
