"""Arnoldi eigensolver for black-box linear maps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .rng import RngStream


@dataclass
class RitzSet:
    """Ritz pairs sorted by descending modulus.

    ``residuals[i]`` is the explicitly evaluated ``||A v - theta v|| / ||v||``
    for the leading pairs that were checked and ``nan`` for the rest;
    ``converged[i]`` is ``residuals[i] <= tol``.
    """

    values: np.ndarray
    residuals: np.ndarray
    vectors: np.ndarray            # shape (n, k), unit columns
    converged: np.ndarray
    dimension: int                 # Krylov basis size reached
    matvecs: int
    breakdown: bool = False
    basis: np.ndarray = field(default=None, repr=False)       # (n, dimension + 1)
    hessenberg: np.ndarray = field(default=None, repr=False)  # (dimension + 1, dimension)
    images: np.ndarray = field(default=None, repr=False)      # A v for checked pairs

    def __len__(self):
        return len(self.values)

    def pairs(self, converged_only=True):
        for i, val in enumerate(self.values):
            if converged_only and not self.converged[i]:
                continue
            yield val, self.residuals[i], self.vectors[:, i]


def start_vector(n: int, seed: int) -> np.ndarray:
    v = RngStream(seed).complex_uniform(n)
    return v / np.linalg.norm(v)


def arnoldi(apply: Callable[[np.ndarray], np.ndarray], n: int, m: int, tol: float,
            seed: int = 0, nev: int | None = None, v0=None,
            breakdown_tol: float = 1e-12) -> RitzSet:
    """Arnoldi factorisation ``A V_m = V_{m+1} H_m`` and its Ritz pairs.

    The basis is grown with modified Gram-Schmidt plus one full
    reorthogonalisation pass, from a seeded random start vector (or
    ``v0``). A subdiagonal entry below ``breakdown_tol`` times the norm of
    the new candidate vector ends the iteration early; the basis size
    reached is recorded in ``dimension``.

    Residuals are evaluated with one extra application of ``apply`` for each
    of the ``nev`` leading Ritz pairs (all of them when ``nev`` is None).
    """
    if m < 1 or m > n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    V = np.zeros((m + 1, n), dtype=np.complex128)  # rows are basis vectors
    H = np.zeros((m + 1, m), dtype=np.complex128)
    v = start_vector(n, seed) if v0 is None else np.asarray(v0, dtype=np.complex128)
    V[0] = v / np.linalg.norm(v)
    matvecs = 0
    k = 0
    broke = False
    while k < m:
        w = np.array(apply(V[k].copy()), dtype=np.complex128)
        matvecs += 1
        wnorm = np.linalg.norm(w)
        for _ in range(2):
            for i in range(k + 1):
                c = np.vdot(V[i], w)
                H[i, k] += c
                w -= c * V[i]
        h = np.linalg.norm(w)
        H[k + 1, k] = h
        k += 1
        if h <= breakdown_tol * max(wnorm, np.finfo(float).tiny):
            H[k, k - 1] = 0.0
            broke = True
            break
        V[k] = w / h

    Hk = H[:k, :k]
    theta, Y = np.linalg.eig(Hk)
    order = np.argsort(-np.abs(theta), kind="stable")
    theta, Y = theta[order], Y[:, order]
    vectors = V[:k].T @ Y
    vectors /= np.linalg.norm(vectors, axis=0)

    nchk = k if nev is None else min(nev, k)
    residuals = np.full(k, np.nan)
    images = np.zeros((n, nchk), dtype=np.complex128)
    for i in range(nchk):
        av = np.asarray(apply(vectors[:, i]), dtype=np.complex128)
        matvecs += 1
        images[:, i] = av
        residuals[i] = np.linalg.norm(av - theta[i] * vectors[:, i])
    converged = residuals <= tol
    return RitzSet(values=theta, residuals=residuals, vectors=vectors,
                   converged=converged, dimension=k, matvecs=matvecs,
                   breakdown=broke, basis=V[:k + 1].T, hessenberg=H[:k + 1, :k],
                   images=images)
