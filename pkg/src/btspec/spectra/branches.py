"""Branch eigenvalues from the monodromy and the truncated strip."""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..geometry import build_strip_grid
from ..numcore import SolverError, arnoldi
from ..operators import ProblemConfig, assemble_strip_bt, discrete_dispersion
from ..propagator import (make_context, monodromy_apply, monodromy_power_apply,
                          strip_cn_matrix, strip_cn_steps)

SUBSET_CAVEAT = ("values approximate a subset of the spectrum of the fibre operator "
                 "(inclusion only; equality with the monodromy spectrum is conjectural)")

MONODROMY = "monodromy"
STRIP = "strip"


# Arguments this close to -pi are treated as +pi, so a real negative mu whose
# argument flips sign under roundoff always unfolds to the same band edge.
EDGE_SNAP = 1e-9


class PureDecayError(ValueError):
    """A zero monodromy value has no finite eigenvalue."""


def unfold(mu: complex, t_eff: float, g: float) -> complex:
    """``-Log(mu) / t_eff`` with the principal branch, ``Arg in (-pi, pi]``.

    The imaginary part lands in ``[-pi/t_eff, pi/t_eff)``, which for
    ``t_eff = 2 pi / g`` is the band ``[-g/2, g/2)``. Arguments within
    :data:`EDGE_SNAP` of ``-pi`` count as ``pi``.
    """
    mu = complex(mu)
    if mu == 0:
        raise PureDecayError("mu = 0: pure decay mode, no finite eigenvalue")
    if t_eff <= 0 or g <= 0:
        raise ValueError("t_eff and g must be positive")
    arg = math.atan2(mu.imag, mu.real)
    if arg <= -math.pi + EDGE_SNAP:
        arg = math.pi
    return complex(-math.log(abs(mu)), -arg) / t_eff


def fold_to_band(lam: complex, g: float) -> complex:
    """Representative of ``lam + i g Z`` with imaginary part in ``[-g/2, g/2)``."""
    im = lam.imag - g * math.floor(lam.imag / g + 0.5)
    if im >= g / 2:
        im -= g
    return complex(lam.real, im)


def band_distance(a: complex, b: complex, g: float) -> float:
    """Distance between ``a`` and ``b`` modulo ``i g``."""
    d = fold_to_band(complex(a) - complex(b), g)
    return abs(d)


@dataclass
class BranchEigenvalue:
    lam: complex
    mu: complex
    residual: float
    q: float
    p0: float
    g: float
    s: int
    method: str
    x_center: float = float("nan")
    interior_weight: float = float("nan")

    def to_row(self) -> dict:
        return {"q": self.q, "p0": self.p0, "g": self.g, "s": self.s,
                "re_lambda": self.lam.real, "im_lambda": self.lam.imag,
                "abs_mu": abs(self.mu), "residual": self.residual, "method": self.method}

    def as_dict(self) -> dict:
        d = asdict(self)
        d["lam"] = [self.lam.real, self.lam.imag]
        d["mu"] = [self.mu.real, self.mu.imag]
        return d


@dataclass
class SpectrumRun:
    """Branch values of one computation plus what it cost."""

    branches: list
    ritz_dimension: int
    matvecs: int
    n_converged: int
    seconds: float
    vectors: list = field(default_factory=list, repr=False)
    detected: bool = True


def circular_center(weights: np.ndarray, x: np.ndarray) -> float:
    """Mean position of ``weights`` on the unit circle ``x mod 1``, in [-1/2, 1/2)."""
    z = np.sum(weights * np.exp(2j * math.pi * x))
    if z == 0:
        return float("nan")
    return math.atan2(z.imag, z.real) / (2 * math.pi)


def monodromy_spectrum(config: ProblemConfig, ctx=None, keep_vectors=False) -> SpectrumRun:
    """Branch values from Arnoldi on the ``s``-period monodromy.

    Each converged Ritz vector is re-used in a single-period Rayleigh
    quotient so that ``Im lambda`` is recovered modulo ``g`` rather than
    ``g / s``; the reported residual is the single-period one.
    """
    t0 = time.perf_counter()
    ctx = make_context(config) if ctx is None else ctx
    s = config.s
    m = min(config.arnoldi_m, ctx.n)
    ritz = arnoldi(lambda v: monodromy_power_apply(ctx, v, s), ctx.n, m,
                   config.arnoldi_tol, seed=config.seed, nev=config.nev)
    out, vecs = [], []
    floor = config.mu_floor ** s
    for i in np.flatnonzero(ritz.converged):
        val, vec = ritz.values[i], ritz.vectors[:, i]
        if abs(val) < floor:
            continue
        if s == 1:
            mu1 = complex(val)
            res = float(ritz.residuals[i])
        else:
            av = monodromy_apply(ctx, vec)
            mu1 = complex(np.vdot(vec, av) / np.vdot(vec, vec).real)
            res = float(np.linalg.norm(av - mu1 * vec) / np.linalg.norm(vec))
        if abs(mu1) < config.mu_floor:
            continue
        lam = unfold(mu1, config.t_g, config.g)
        w = np.abs(vec) ** 2
        out.append(BranchEigenvalue(lam=lam, mu=mu1, residual=res, q=config.q, p0=config.p0,
                                    g=config.g, s=s, method=MONODROMY,
                                    x_center=circular_center(w, ctx.grid.dof_x)))
        vecs.append(vec)
    order = sorted(range(len(out)), key=lambda i: (out[i].lam.real, out[i].lam.imag))
    out = [out[i] for i in order]
    vecs = [vecs[i] for i in order]
    return SpectrumRun(branches=out, ritz_dimension=ritz.dimension, matvecs=ritz.matvecs,
                       n_converged=int(ritz.converged.sum()), seconds=time.perf_counter() - t0,
                       vectors=vecs if keep_vectors else [], detected=bool(out))


def plane_wave_factor(config: ProblemConfig, k: int, m: int) -> complex:
    """Per-period amplification of the hole-free plane wave ``(k, m)`` before realignment.

    Product over the Crank-Nicolson steps of ``(1 - dt sigma_j / 2) / (1 + dt sigma_j / 2)``
    with ``sigma_j`` the discrete dispersion at the midpoint phase ``p_j``.
    """
    return complex(np.exp(_log_plane_wave_factor(config, k, m)))


def _log_plane_wave_factor(config: ProblemConfig, k: int, m: int) -> complex:
    dt = config.t_g / config.Nt
    total = 0j
    for j in range(config.Nt):
        p = config.p0 - config.g * (j + 0.5) * dt
        sig = discrete_dispersion(k, m, (p, config.q), config.N)
        total += cmath.log((1 - 0.5 * dt * sig) / (1 + 0.5 * dt * sig))
    return total


def no_hole_log_modulus(config: ProblemConfig, m: int) -> float:
    """Logarithm of the common eigenvalue modulus of the ``m`` sector (underflow-free)."""
    if config.shape.kind != "none":
        raise ValueError("closed form only holds without a hole")
    N = config.N
    return sum(_log_plane_wave_factor(config, k, m).real for k in range(N)) / N


def no_hole_monodromy_eigs(config: ProblemConfig, m: int) -> np.ndarray:
    """Eigenvalues of the hole-free monodromy in the y-sector ``m``.

    Realignment shifts x-mode ``k`` to ``k - 1`` (mod N), so the sector is a
    cyclic weighted shift with weights ``rho_k``; its eigenvalues are the N
    N-th roots of ``prod_k rho_k``.
    """
    if config.shape.kind != "none":
        raise ValueError("closed form only holds without a hole")
    N = config.N
    logp = sum(_log_plane_wave_factor(config, k, m) for k in range(N))
    j = np.arange(N)
    return np.exp((logp + 2j * math.pi * j) / N)


def no_hole_spectrum(config: ProblemConfig) -> np.ndarray:
    """All ``N**2`` hole-free monodromy eigenvalues, sorted by descending modulus."""
    vals = np.concatenate([no_hole_monodromy_eigs(config, m) for m in range(config.N)])
    return vals[np.argsort(-np.abs(vals), kind="stable")]


def strip_spectrum(config: ProblemConfig, L: int, T: float | None = None,
                   Nt: int | None = None, m: int | None = None, tol: float | None = None,
                   keep_vectors=False) -> SpectrumRun:
    """Branch values of the truncated strip operator from its Crank-Nicolson semigroup.

    ``Im lambda`` is only determined modulo ``2 pi / T`` (``g`` for the
    default ``T = t_g``); values are folded to the band ``[-g/2, g/2)``.
    ``interior_weight`` is the share of the eigenvector norm inside
    ``|x| <= max(L - 1, 1/2)``, which separates hole modes from end-wall modes.
    """
    t0 = time.perf_counter()
    T = config.t_g if T is None else T
    Nt = config.Nt if Nt is None else Nt
    grid = build_strip_grid(config.N, L, config.shape)
    A = assemble_strip_bt(grid, config.g, config.q)
    M = strip_cn_matrix(A, T / Nt)
    n = grid.n_active
    m = min(config.arnoldi_m if m is None else m, n)
    tol = config.arnoldi_tol if tol is None else tol

    def apply(v):
        return strip_cn_steps(M, Nt, v, config.solver_tol, config.solver_maxit)

    ritz = arnoldi(apply, n, m, tol, seed=config.seed, nev=config.nev)
    x = grid.dof_x
    inner = np.abs(x) <= max(L - 1, 0.5)
    out, vecs = [], []
    for i in np.flatnonzero(ritz.converged):
        mu = complex(ritz.values[i])
        if abs(mu) < config.mu_floor:
            continue
        vec = ritz.vectors[:, i]
        w = np.abs(vec) ** 2
        w = w / w.sum()
        lam = fold_to_band(unfold(mu, T, 2 * math.pi / T), config.g)
        out.append(BranchEigenvalue(lam=lam, mu=mu, residual=float(ritz.residuals[i]),
                                    q=config.q, p0=config.p0, g=config.g, s=1, method=STRIP,
                                    x_center=float(w @ x), interior_weight=float(w[inner].sum())))
        vecs.append(vec)
    order = sorted(range(len(out)), key=lambda i: (out[i].lam.real, out[i].lam.imag))
    return SpectrumRun(branches=[out[i] for i in order], ritz_dimension=ritz.dimension,
                       matvecs=ritz.matvecs, n_converged=int(ritz.converged.sum()),
                       seconds=time.perf_counter() - t0,
                       vectors=[vecs[i] for i in order] if keep_vectors else [],
                       detected=bool(out))


def strip_matrix(config: ProblemConfig, L: int):
    grid = build_strip_grid(config.N, L, config.shape)
    return grid, assemble_strip_bt(grid, config.g, config.q)
