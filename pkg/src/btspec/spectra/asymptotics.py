"""Airy-law scaling of the leftmost branch as g grows."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .airy import IM_TARGET, RE_TARGET


@dataclass
class PowerLawFit:
    exponent: float
    prefactor: float
    rms: float

    def __iter__(self):
        return iter((self.exponent, self.prefactor, self.rms))


def fit_power_law(points) -> PowerLawFit:
    """Least-squares fit of ``value = prefactor * g**exponent`` in log-log space.

    ``rms`` is the root-mean-square residual of ``log(value)``.
    """
    pts = [(float(g), float(v)) for g, v in points]
    if len(pts) < 3:
        raise ValueError("need at least three points")
    if any(g <= 0 or v <= 0 for g, v in pts):
        raise ValueError("power-law fit needs positive g and values")
    lg = np.log([g for g, _ in pts])
    lv = np.log([v for _, v in pts])
    X = np.column_stack([lg, np.ones_like(lg)])
    coef, *_ = np.linalg.lstsq(X, lv, rcond=None)
    resid = lv - X @ coef
    return PowerLawFit(float(coef[0]), float(math.exp(coef[1])),
                       float(math.sqrt(np.mean(resid ** 2))))


@dataclass
class AsymptoticRow:
    g: float
    re_lambda_min: float
    im_lambda_min: float
    re_scaled: float
    im_scaled: float
    target_re: float = RE_TARGET
    target_im: float = IM_TARGET

    def to_row(self) -> dict:
        return {k: getattr(self, k) for k in
                ("g", "re_lambda_min", "im_lambda_min", "re_scaled", "im_scaled",
                 "target_re", "target_im")}

    @property
    def re_ratio(self) -> float:
        return self.re_scaled / self.target_re

    @property
    def im_ratio(self) -> float:
        return self.im_scaled / self.target_im


@dataclass
class AsymptoticReport:
    rows: list
    gaps: list = field(default_factory=list)
    fit: PowerLawFit | None = None


def select_leftmost(branches, x_anchor: float, rel_tie: float = 1e-6):
    """Branch with minimal ``Re lambda``.

    Near-ties (the conjugate partner produced by the x-reflection symmetry)
    are resolved in favour of the mode centred closest to ``x_anchor``.
    """
    if not branches:
        return None
    lo = min(b.lam.real for b in branches)
    close = [b for b in branches if b.lam.real <= lo + rel_tie * max(abs(lo), 1.0)]

    def offset(b):
        if math.isnan(b.x_center):
            return math.inf
        d = (b.x_center - x_anchor + 0.5) % 1.0 - 0.5
        return abs(d)

    return min(close, key=lambda b: (offset(b), b.lam.real))


def airy_anchor(r: float) -> float:
    """Boundary point whose quasimode follows ``i g x + |a1| e^{-i pi/3} g^{2/3}``.

    For ``-Delta + i g x`` the Dirichlet half-line problem on ``x > x0`` has
    first eigenvalue ``i g x0 + |a1| e^{+i pi/3} g^{2/3}``; the ``e^{-i pi/3}``
    phase belongs to a wall with the domain on its left, i.e. the hole point
    ``(-r, 0)``. The mode at ``(r, 0)`` carries the complex-conjugate value.
    """
    return -r


def scaled_row(g: float, lam: complex, x_star: float) -> AsymptoticRow:
    s = g ** (-2.0 / 3.0)
    # g x* - Im lambda is only defined modulo g; take the representative in [-g/2, g/2)
    im_gap = (g * x_star - lam.imag + 0.5 * g) % g - 0.5 * g
    return AsymptoticRow(g=g, re_lambda_min=lam.real, im_lambda_min=lam.imag,
                         re_scaled=lam.real * s, im_scaled=im_gap * s)


def asymptotic_report(results, x_star: float) -> AsymptoticReport:
    """Scale the leftmost branch of each ``(g, branches)`` pair.

    ``results`` is an ascending-g sequence of ``(g, list of BranchEigenvalue)``;
    ``x_star`` is the hole boundary point the quasimode is measured from
    (see :func:`airy_anchor`). Missing branches become gaps.
    """
    rows, gaps = [], []
    last = -math.inf
    for g, branches in results:
        if g <= last:
            raise ValueError("g values must be strictly ascending")
        last = g
        best = select_leftmost(branches, x_star)
        if best is None:
            gaps.append(g)
            continue
        rows.append(scaled_row(g, best.lam, x_star))
    fit = None
    if len(rows) >= 3:
        fit = fit_power_law([(row.g, row.re_lambda_min) for row in rows])
    return AsymptoticReport(rows=rows, gaps=gaps, fit=fit)
