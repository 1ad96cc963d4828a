"""Discrete Bloch fibre operators on the perforated cell and strip.

Conventions: a hop from x to x + dx carries the link phase ``exp(+i p dx)``
and a hop from y to y + dy carries ``exp(-i q dy)``. With these, on the
hole-free cell the plane wave ``exp(2 pi i (k x + m y))`` is an exact
eigenvector of the cell operator with eigenvalue
``discrete_dispersion(k, m, (p, q), N)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import DIRICHLET_STRIP, TORUS_CELL, CellGrid, HoleShape
from .numcore import SparseMatrix, TripletPattern

TWO_PI = 2.0 * math.pi
DEFAULT_NT = 256


def _reduce(angle: float) -> float:
    r = math.fmod(angle, TWO_PI)
    if r < 0:
        r += TWO_PI
    return 0.0 if r >= TWO_PI else r


@dataclass(frozen=True)
class BlochPhases:
    """Quasimomenta ``p`` (x) and ``q`` (y), stored modulo 2 pi in [0, 2 pi)."""

    p: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p", _reduce(float(self.p)))
        object.__setattr__(self, "q", _reduce(float(self.q)))


@dataclass(frozen=True)
class ProblemConfig:
    """Physical and numerical parameters of one monodromy computation.

    ``p0`` is kept as given (not reduced modulo 2 pi): the time-dependent
    phase schedule must be continuous in it.
    """

    g: float
    q: float = 0.0
    p0: float = 0.0
    shape: HoleShape = field(default_factory=HoleShape)
    N: int = 64
    Nt: int = DEFAULT_NT
    s: int = 1
    arnoldi_m: int = 20
    arnoldi_tol: float = 1e-6
    seed: int = 1
    solver_tol: float = 1e-10
    solver_maxit: int = 2000
    nev: int = 6
    mu_floor: float = 1e-14

    def __post_init__(self):
        if not (self.g > 0 and math.isfinite(self.g)):
            raise ValueError(f"g must be positive, got {self.g}")
        if self.Nt < 8:
            raise ValueError(f"Nt must be at least 8, got {self.Nt}")
        if self.s < 1:
            raise ValueError(f"s must be at least 1, got {self.s}")
        if self.arnoldi_m < 1:
            raise ValueError("arnoldi_m must be positive")
        if self.arnoldi_tol <= 0 or self.solver_tol <= 0:
            raise ValueError("tolerances must be positive")

    @property
    def t_g(self) -> float:
        """Period ``2 pi / g`` of the pseudo-invariance."""
        return TWO_PI / self.g

    @property
    def h(self) -> float:
        """Semiclassical parameter ``g**-1/2``."""
        return self.g ** -0.5

    def with_(self, **changes) -> "ProblemConfig":
        return replace(self, **changes)


def discrete_dispersion(k: int, m: int, phases, N: int) -> float:
    """Eigenvalue of the hole-free cell operator on the plane wave ``(k, m)``.

    ``phases`` is a :class:`BlochPhases` or a raw ``(p, q)`` pair; raw
    values are used as given, which matters inside the time stepper where
    ``p`` drifts through several multiples of 2 pi.
    """
    p, q = (phases.p, phases.q) if isinstance(phases, BlochPhases) else phases
    d = 1.0 / N
    c = 2.0 / (d * d)
    return c * (1.0 - math.cos((TWO_PI * k + p) * d)) + c * (1.0 - math.cos((TWO_PI * m - q) * d))


class StencilFamily:
    """Five-point stencil on a grid with its x-link phases left free.

    ``matrix(p)`` returns the operator whose forward x-hops carry
    ``exp(i p dx)``; the y-hops, diagonal and any extra diagonal potential
    are fixed at construction. The sparsity pattern is computed once.
    """

    def __init__(self, grid: CellGrid, q: float, potential=None):
        d = grid.spacing
        inv = 1.0 / (d * d)
        nx, ny = grid.nx, grid.ny
        periodic_x = grid.topology == TORUS_CELL
        j, l = grid.active_jl
        dof = np.arange(grid.n_active)
        rows, cols, base, fwd, bwd = [dof], [dof], [], [], []
        diag = np.full(grid.n_active, 4.0 * inv, dtype=np.complex128)
        if potential is not None:
            diag = diag + potential
        base.append(diag)
        fwd.append(np.zeros(grid.n_active))
        bwd.append(np.zeros(grid.n_active))
        eq = np.exp(-1j * q * d)
        hops = [(1, 0, "f"), (-1, 0, "b"), (0, 1, eq), (0, -1, np.conj(eq))]
        for dj, dl, kind in hops:
            jj, ll = j + dj, (l + dl) % ny
            if periodic_x:
                jj = jj % nx
                ok = np.ones(jj.shape, dtype=bool)
            else:
                ok = (jj >= 0) & (jj < nx)
                jj = np.clip(jj, 0, nx - 1)
            nb = grid.active_index[jj, ll]
            ok &= nb >= 0
            cnt = int(ok.sum())
            rows.append(dof[ok])
            cols.append(nb[ok])
            zero = np.zeros(cnt)
            if isinstance(kind, str):
                base.append(zero)
                fwd.append(np.full(cnt, -inv) if kind == "f" else zero)
                bwd.append(np.full(cnt, -inv) if kind == "b" else zero)
            else:
                base.append(np.full(cnt, -inv * kind))
                fwd.append(zero)
                bwd.append(zero)
        self.grid = grid
        self.q = q
        self.pattern = TripletPattern(grid.n_active, np.concatenate(rows), np.concatenate(cols))
        self.base = self.pattern.gather(np.concatenate(base))
        self.fwd = self.pattern.gather(np.concatenate(fwd))
        self.bwd = self.pattern.gather(np.concatenate(bwd))
        self.diag_slots = self._diag_slots()

    def _diag_slots(self):
        p = self.pattern
        rows = np.repeat(np.arange(p.n), np.diff(p.indptr))
        return np.flatnonzero(rows == p.indices)

    def data(self, p: float) -> np.ndarray:
        e = np.exp(1j * p * self.grid.spacing)
        return self.base + e * self.fwd + np.conj(e) * self.bwd

    def matrix(self, p: float = 0.0) -> SparseMatrix:
        return SparseMatrix(self.pattern.n, self.pattern.indptr, self.pattern.indices,
                            self.data(p), check=False)

    def shifted_data(self, p: float, scale: float, shift: complex = 1.0) -> np.ndarray:
        """Values of ``shift * I + scale * A(p)`` on the same pattern."""
        out = scale * self.data(p)
        out[self.diag_slots] += shift
        return out


def assemble_cell_bloch(grid: CellGrid, phases: BlochPhases) -> SparseMatrix:
    """Gauge-transformed fibre operator ``-(d_x + i p)^2 - (d_y - i q)^2`` on the torus cell."""
    if grid.topology != TORUS_CELL:
        raise ValueError(f"cell operator needs a {TORUS_CELL} grid, got {grid.topology}")
    return StencilFamily(grid, phases.q).matrix(phases.p)


def strip_potential(grid: CellGrid, g: float) -> np.ndarray:
    return 1j * g * grid.dof_x


def assemble_strip_bt(grid: CellGrid, g: float, q: float) -> SparseMatrix:
    """Truncated-strip Bloch-Torrey operator ``-Delta_h + i g x`` at y-quasimomentum ``q``."""
    if grid.topology != DIRICHLET_STRIP:
        raise ValueError(f"strip operator needs a {DIRICHLET_STRIP} grid, got {grid.topology}")
    return StencilFamily(grid, q, potential=strip_potential(grid, g)).matrix(0.0)
