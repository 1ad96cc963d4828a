import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from btspec.geometry import HoleShape
from btspec.numcore import SparseMatrix
from btspec.operators import ProblemConfig
from btspec.spectra import (BranchEigenvalue, UnconvergedPairError, match_branches,
                            monodromy_spectrum, pseudo_invariance_check, pseudospectra_grid,
                            reconstruct_eigenfunction, resolvent_norm, sweep_q)
from btspec.spectra.branches import strip_matrix
from btspec.spectra.pseudospectra import shifted
from btspec.spectra.reconstruct import bilinear_translate_pairing, strip_to_cell_map
from btspec.spectra.sweep import branch_set_distance, continue_branches, min_gap
from btspec.geometry import build_cell_grid, build_strip_grid


def bv(lam, q=0.0, g=20.0):
    return BranchEigenvalue(lam=complex(lam), mu=0.5, residual=0.0, q=q, p0=0.0, g=g, s=1,
                            method="monodromy")


# ---- continuation -------------------------------------------------------------------

def test_match_nearest_with_threshold():
    a = [1 + 0j, 5 + 0j, 9 + 0j]
    b = [1.1 + 0j, 5.3 + 0j, 20 + 0j]
    assert [(i, j) for i, j, _ in match_branches(a, b, g=100.0)] == [(0, 0), (1, 1)]


def test_match_is_modulo_ig():
    assert match_branches([3 + 9.9j, 30 + 0j], [3 - 9.9j, 30 + 0j], g=20.0)[0][:2] == (0, 0)


def test_min_gap():
    assert min_gap([0j, 3 + 0j, 3 + 4j], 100.0) == pytest.approx(3.0)
    assert min_gap([1j], 10.0) == math.inf


def test_births_and_deaths():
    sets = [[bv(1), bv(5)], [bv(1.05), bv(5.1), bv(12)], [bv(1.1), bv(12.1)]]
    matches, births, deaths, curves = continue_branches(sets, lambda k: 100.0)
    assert births == [(1, 2)]
    assert deaths == [(1, 1)]
    assert sorted(len(c) for c in curves) == [2, 2, 3]
    assert len(matches) == 2


@given(st.lists(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8, unique=True))
def test_self_match_is_identity(vals):
    out = match_branches(vals, vals, g=1000.0)
    assert all(i == j and d == 0 for i, j, d in out)
    assert len(out) == len(vals) or min_gap(vals, 1000.0) == 0


def test_hausdorff_distance():
    a = [bv(1), bv(2 + 1j)]
    assert branch_set_distance(a, a, 20.0) == 0
    assert branch_set_distance(a, [bv(1)], 20.0) == pytest.approx(math.sqrt(2))
    assert branch_set_distance(a, [], 20.0) == math.inf


def test_sweep_over_q():
    cfg = ProblemConfig(g=20.0, N=12, Nt=64, shape=HoleShape.disk(0.25), arnoldi_m=12, nev=3,
                        solver_tol=1e-12)
    res = sweep_q(cfg, [0.0, 0.5, 2 * math.pi])
    assert res.values == [0.0, 0.5, 2 * math.pi]
    assert not res.failures and all(res.branches)
    assert all(b.q == q for q, bs in zip(res.values, res.branches) for b in bs)
    assert "subset" in res.metadata["caveat"]
    scale = max(abs(b.lam) for b in res.branches[0])
    assert branch_set_distance(res.branches[0], res.branches[2], cfg.g) <= 1e-8 * scale
    rows = list(res.rows())
    assert len(rows) == sum(len(b) for b in res.branches)


# ---- cross-check --------------------------------------------------------------------

def test_identical_lists_have_zero_mismatch():
    vals = [3 + 1j, 7 - 2j]
    rep = pseudo_invariance_check(vals, vals, 20.0, 0.05)
    assert rep.max_mismatch == 0 and rep.passed


def test_shift_by_ig_is_invisible():
    mono = [3 + 1j, 7 - 2j]
    strip = [z + 20j for z in mono] + [mono[0] - 40j]
    rep = pseudo_invariance_check(mono, strip, 20.0, 1e-12)
    assert rep.max_mismatch <= 1e-12 and rep.passed


def test_dominant_mismatch_relative():
    rep = pseudo_invariance_check([10 + 0j, 30 + 0j], [10.4 + 0j], 100.0, 0.05)
    assert rep.relative_mismatch == pytest.approx(0.04) and rep.passed
    assert not pseudo_invariance_check([10 + 0j], [], 100.0, 0.05).passed


# ---- pseudospectra ------------------------------------------------------------------

def test_resolvent_of_diagonal():
    A = SparseMatrix.diag([1.0, 2j])
    val, ok, _ = resolvent_norm(A, 0.0)
    assert ok and val == pytest.approx(1.0, rel=1e-3)
    val, ok, _ = resolvent_norm(A, 1.1)
    assert ok and val == pytest.approx(10.0, rel=1e-3)


def test_eigenvalue_point_is_flagged():
    J = SparseMatrix.from_triplets(2, [0, 0, 1], [0, 1, 1], [0.0, 1.0, 0.0])
    val, ok, _ = resolvent_norm(J, 0.0)
    assert not ok and val == math.inf


def test_resolvent_against_dense_svd(rng):
    a = np.diag(np.arange(1, 31, dtype=float) + 0.5j) + np.triu(rng.normal(size=(30, 30)), 1)
    A = SparseMatrix.from_dense(a + 1e-300 * np.eye(30))
    for z in (0.3 + 0.1j, 4.2 - 1j):
        want = 1 / np.linalg.svd(a - z * np.eye(30), compute_uv=False)[-1]
        val, ok, _ = resolvent_norm(A, z, tol=1e-8, maxit=500)
        assert ok and val == pytest.approx(want, rel=1e-5)


def test_shifted_requires_diagonal():
    with pytest.raises(ValueError):
        shifted(SparseMatrix.from_dense([[0, 1], [1, 0]]), 0.5)


def test_grid_rows():
    grid = pseudospectra_grid(SparseMatrix.diag([1.0, 2j]), [0.0, 1.1])
    rows = list(grid.rows())
    assert [r["converged"] for r in rows] == [True, True]
    assert list(rows[0]) == ["re_z", "im_z", "resolvent_norm", "converged"]


# ---- reconstruction -----------------------------------------------------------------

def test_strip_to_cell_map():
    shape = HoleShape.disk(0.25)
    cell, strip = build_cell_grid(8, shape), build_strip_grid(8, 2, shape)
    idx = strip_to_cell_map(strip, cell)
    np.testing.assert_allclose((strip.dof_x - cell.dof_x[idx] + 0.5) % 1.0, 0.5, atol=1e-12)
    np.testing.assert_allclose(strip.dof_y, cell.dof_y[idx])


def test_bilinear_pairing_of_a_translate_invariant_wave():
    strip = build_strip_grid(4, 1, HoleShape())
    u = np.exp(2j * math.pi * strip.dof_y)
    # sum over two overlapping cells of u^2 = e^{4 pi i y}, which cancels over y
    assert abs(bilinear_translate_pairing(u, strip)) <= 1e-12
    assert bilinear_translate_pairing(np.ones(strip.n_active), strip) == pytest.approx(32)


RECON = ProblemConfig(g=20.0, N=16, Nt=128, shape=HoleShape.disk(0.25), arnoldi_m=16, nev=2,
                      arnoldi_tol=1e-9, solver_tol=1e-12)


@pytest.fixture(scope="module")
def recon():
    run = monodromy_spectrum(RECON, keep_vectors=True)
    b, v = run.branches[0], run.vectors[0]
    return b, v, reconstruct_eigenfunction(RECON, b.mu, v, 4, pair_tol=1e-8)


def test_reconstruction_is_a_strip_eigenfunction(recon):
    b, _, rec = recon
    assert rec.lam == b.lam
    assert rec.residual <= 5e-2
    assert rec.localized_fraction >= 0.9
    assert rec.pairing_ratio <= 0.1
    assert rec.u.shape == (rec.grid.n_active,)


def test_reconstruction_matches_dense_strip_eigenvalue(recon):
    b, _, _ = recon
    _, A = strip_matrix(RECON, 4)
    ev = np.linalg.eigvals(A.todense())
    d = np.min(np.abs(ev - b.lam))
    assert d <= 1e-2 * abs(b.lam)


def test_reconstruction_refuses_non_eigenpairs(recon):
    b, v, _ = recon
    with pytest.raises(UnconvergedPairError):
        reconstruct_eigenfunction(RECON, b.mu * 1.1, v, 4)
