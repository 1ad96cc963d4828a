import cmath
import math

import numpy as np
import pytest
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from btspec.spectra import BranchEigenvalue, airy_anchor, asymptotic_report, fit_power_law
from btspec.spectra.airy import A1, IM_TARGET, RE_TARGET
from btspec.spectra.asymptotics import scaled_row, select_leftmost


def test_exact_power_law():
    fit = fit_power_law([(g, 3.0 * g ** (2 / 3)) for g in (10, 100, 1000)])
    assert fit.exponent == pytest.approx(2 / 3, abs=1e-12)
    assert fit.prefactor == pytest.approx(3.0, rel=1e-12)
    assert fit.rms == pytest.approx(0, abs=1e-12)


def test_constant_data():
    exponent, prefactor, _ = fit_power_law([(g, 5.0) for g in (1, 2, 4, 8)])
    assert exponent == pytest.approx(0, abs=1e-12) and prefactor == pytest.approx(5)


def test_perturbed_power_law():
    gs = [250, 500, 1000, 2000, 4000]
    pts = [(g, 1.2 * g ** (2 / 3) * (1 + 0.01 * (-1) ** k)) for k, g in enumerate(gs)]
    assert abs(fit_power_law(pts).exponent - 2 / 3) <= 0.02


def test_fit_input_checks():
    with pytest.raises(ValueError):
        fit_power_law([(1, 1), (2, 2)])
    with pytest.raises(ValueError):
        fit_power_law([(1, 1), (2, -2), (3, 3)])


def test_synthetic_airy_law_hits_targets():
    gs = [250.0, 500.0, 1000.0, 2000.0]
    lam = {g: 1j * 0.25 * g + abs(A1) * cmath.exp(-1j * math.pi / 3) * g ** (2 / 3) for g in gs}
    results = [(g, [BranchEigenvalue(lam=lam[g], mu=0.1, residual=0, q=0, p0=0, g=g, s=1,
                                     method="monodromy", x_center=0.25)]) for g in gs]
    rep = asymptotic_report(results, 0.25)
    for row in rep.rows:
        assert row.re_scaled == pytest.approx(RE_TARGET, rel=1e-12)
        assert row.im_scaled == pytest.approx(IM_TARGET, rel=1e-12)
        assert row.re_ratio == pytest.approx(1) and row.im_ratio == pytest.approx(1)
    assert rep.fit.exponent == pytest.approx(2 / 3, abs=1e-12)
    assert not rep.gaps


def test_missing_values_become_gaps():
    rep = asymptotic_report([(1.0, []), (2.0, [])], 0.25)
    assert rep.gaps == [1.0, 2.0] and rep.fit is None
    with pytest.raises(ValueError):
        asymptotic_report([(2.0, []), (1.0, [])], 0.25)


def branch(lam, xc):
    return BranchEigenvalue(lam=lam, mu=0.5, residual=0, q=0, p0=0, g=100, s=1,
                            method="monodromy", x_center=xc)


def test_leftmost_tie_goes_to_anchor_side():
    a, b = branch(10 + 30j, 0.39), branch(10 - 30j, -0.39)
    assert select_leftmost([a, b], 0.25) is a
    assert select_leftmost([a, b], -0.25) is b
    c = branch(9 + 1j, 0.0)
    assert select_leftmost([a, b, c], -0.25) is c
    assert select_leftmost([], 0.0) is None


def test_im_gap_is_folded_into_band():
    row = scaled_row(100.0, complex(5, 45), -0.25)
    # -25 - 45 = -70 ~ 30 modulo 100
    assert row.im_scaled * 100 ** (2 / 3) == pytest.approx(30.0)


def test_half_line_airy_phase_fixes_the_anchor():
    """-u'' + i g x u on (0, X) with Dirichlet ends: lambda_1 ~ |a1| e^{+i pi/3} g^{2/3}.

    With the domain to the right of the wall the phase is +pi/3, so the
    e^{-i pi/3} law belongs to a wall with the domain on its left, i.e.
    the hole point (-r, 0).
    """
    g, X, n = 1000.0, 1.5, 6000
    h = X / (n + 1)
    x = h * np.arange(1, n + 1)
    main = 2.0 / h ** 2 + 1j * g * x
    A = sps.diags([main, -np.ones(n - 1) / h ** 2, -np.ones(n - 1) / h ** 2], [0, 1, -1],
                  format="csc")
    guess = abs(A1) * g ** (2 / 3) * cmath.exp(1j * math.pi / 3)
    vals = spla.eigs(A, k=1, sigma=guess, return_eigenvectors=False)
    lam = vals[0] / g ** (2 / 3)
    assert lam == pytest.approx(abs(A1) * cmath.exp(1j * math.pi / 3), rel=1e-4)
    assert lam.imag > 0
    # mirrored wall, domain x < 0: operator -u'' - i g y u in y = -x
    assert airy_anchor(0.25) == -0.25
