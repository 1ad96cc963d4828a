import math

import numpy as np
import pytest

from btspec.geometry import HoleShape
from btspec.numcore import RngStream, SparseMatrix, arnoldi
from btspec.operators import ProblemConfig, discrete_dispersion
from btspec.propagator import (cn_step, evolve_period, make_context, monodromy_apply,
                               monodromy_power_apply, rayleigh_refine, strip_cn_matrix,
                               strip_cn_steps, strip_semigroup_apply)
from btspec.spectra import plane_wave_factor


def plane_wave(grid, k, m):
    return np.exp(2j * math.pi * (k * grid.dof_x + m * grid.dof_y))


def amplification(dt, sigma):
    return (1 - 0.5 * dt * sigma) / (1 + 0.5 * dt * sigma)


def test_scalar_surrogate_steps():
    A = SparseMatrix.diag([2.0])
    np.testing.assert_allclose(strip_cn_steps(strip_cn_matrix(A, 1.0), 1, [1.0]), [0.0], atol=1e-15)
    Z = SparseMatrix.diag([0.0])
    np.testing.assert_allclose(strip_cn_steps(strip_cn_matrix(Z, 1.0), 3, [0.7j]), [0.7j])


def test_context_schedule():
    cfg = ProblemConfig(g=20.0, p0=0.4, N=8, Nt=64)
    ctx = make_context(cfg)
    assert ctx.end_phase == pytest.approx(cfg.p0 - 2 * math.pi)
    assert ctx.phases[0] == pytest.approx(cfg.p0 - cfg.g * 0.5 * ctx.dt)
    np.testing.assert_allclose(np.abs(ctx.realign), 1.0)


@pytest.mark.parametrize("k,m,j", [(0, 0, 0), (1, -1, 5), (2, 3, 63)])
def test_single_step_on_plane_wave(k, m, j):
    cfg = ProblemConfig(g=7.0, q=0.3, p0=1.2, N=8, Nt=64, solver_tol=1e-14)
    ctx = make_context(cfg)
    w = plane_wave(ctx.grid, k, m)
    sigma = discrete_dispersion(k, m, (ctx.phases[j], cfg.q), cfg.N)
    out = cn_step(ctx, w, j)
    np.testing.assert_allclose(out, amplification(ctx.dt, sigma) * w, rtol=0, atol=1e-12)


@pytest.mark.parametrize("k,m", [(0, 0), (1, 2), (-2, 1)])
def test_period_on_plane_wave_is_scalar_product(k, m):
    # large g keeps every rho well above roundoff (short period)
    cfg = ProblemConfig(g=200.0, q=0.9, p0=-0.4, N=8, Nt=64, solver_tol=1e-14)
    ctx = make_context(cfg)
    w = plane_wave(ctx.grid, k, m)
    rho = plane_wave_factor(cfg, k, m)
    out = evolve_period(ctx, w)
    assert np.linalg.norm(out - rho * w) <= 1e-12 * abs(rho) * np.linalg.norm(w)
    mu, res = rayleigh_refine(lambda v: evolve_period(ctx, v), w)
    assert mu == pytest.approx(rho, rel=1e-12)
    assert res <= 1e-12 * abs(rho)


def test_realignment_is_cyclic_mode_shift():
    cfg = ProblemConfig(g=3.0, N=8, Nt=16)
    ctx = make_context(cfg)
    w = plane_wave(ctx.grid, 2, 1)
    np.testing.assert_allclose(ctx.realign * w, plane_wave(ctx.grid, 1, 1), atol=1e-13)
    # k = 0 wraps around to k = N - 1 on the cell-centred grid, up to a constant phase
    shifted = ctx.realign * plane_wave(ctx.grid, 0, 0)
    ratio = shifted / plane_wave(ctx.grid, cfg.N - 1, 0)
    np.testing.assert_allclose(ratio, ratio[0], atol=1e-13)


def test_snapshots_start_with_initial_state():
    cfg = ProblemConfig(g=20.0, N=8, Nt=16, shape=HoleShape.disk(0.25))
    ctx = make_context(cfg)
    w0 = RngStream(2).complex_uniform(ctx.n)
    end, snaps = evolve_period(ctx, w0, snapshots=True)
    assert snaps.shape == (16, ctx.n)
    np.testing.assert_array_equal(snaps[0], w0)
    np.testing.assert_allclose(cn_step(ctx, snaps[-1], 15), end)


def test_state_lives_on_active_points_only():
    cfg = ProblemConfig(g=20.0, N=16, Nt=16, shape=HoleShape.disk(0.25))
    ctx = make_context(cfg)
    assert ctx.n == ctx.grid.n_active < cfg.N ** 2
    with pytest.raises(ValueError):
        monodromy_apply(ctx, np.ones(cfg.N ** 2))


@pytest.mark.parametrize("shape", [HoleShape(), HoleShape.disk(0.25), HoleShape.ellipse(0.3, 0.15)])
def test_contraction(shape):
    cfg = ProblemConfig(g=25.0, q=0.5, p0=0.3, N=12, Nt=32, shape=shape)
    ctx = make_context(cfg)
    rng = RngStream(5)
    for _ in range(20):
        w = rng.complex_uniform(ctx.n)
        assert np.linalg.norm(monodromy_apply(ctx, w)) <= np.linalg.norm(w) * (1 + 1e-12)


def test_power_apply():
    cfg = ProblemConfig(g=20.0, N=8, Nt=16, shape=HoleShape.disk(0.25))
    ctx = make_context(cfg)
    w = RngStream(3).complex_uniform(ctx.n)
    np.testing.assert_array_equal(monodromy_power_apply(ctx, w, 1), monodromy_apply(ctx, w))
    prev = np.linalg.norm(w)
    for s in (1, 2, 3):
        nrm = np.linalg.norm(monodromy_power_apply(ctx, w, s))
        assert nrm <= prev * (1 + 1e-12)
        prev = nrm
    with pytest.raises(ValueError):
        monodromy_power_apply(ctx, w, 0)


def test_power_apply_on_plane_wave_composes_shifted_factors():
    cfg = ProblemConfig(g=9.0, q=0.2, N=6, Nt=32, solver_tol=1e-14)
    ctx = make_context(cfg)
    k, m, s = 2, 1, 3
    out = monodromy_power_apply(ctx, plane_wave(ctx.grid, k, m), s)
    want = np.prod([abs(plane_wave_factor(cfg, k - i, m)) for i in range(s)])
    assert np.linalg.norm(out) / np.linalg.norm(plane_wave(ctx.grid, k, m)) == pytest.approx(
        want, rel=1e-11)


def test_strip_semigroup_zero_and_contraction():
    A = SparseMatrix.from_dense(np.array([[2.0, -1, 0], [-1, 2, -1], [0, -1, 2]])
                                + np.diag([-1j, 0, 1j]))
    assert not strip_semigroup_apply(A, 1.0, 10, np.zeros(3)).any()
    w = np.array([1.0, 1j, -0.5])
    assert np.linalg.norm(strip_semigroup_apply(A, 0.5, 20, w)) <= np.linalg.norm(w)


def test_strip_semigroup_scalar_exponential():
    A = SparseMatrix.diag([1.0, 1 + 10j])
    out = strip_semigroup_apply(A, 1.0, 1000, np.ones(2), tol=1e-14)
    np.testing.assert_allclose(out, np.exp(-np.array([1.0, 1 + 10j])), atol=1e-4)


def test_rayleigh_quotients():
    mu, res = rayleigh_refine(lambda v: np.array([0.5, 0.1]) * v, np.array([0.0, 2.0]))
    assert mu == pytest.approx(0.1) and res == 0
    mu, _ = rayleigh_refine(lambda v: np.array([0.5, 0.1]) * v, np.ones(2) / math.sqrt(2))
    assert mu == pytest.approx(0.3)
    with pytest.raises(ValueError):
        rayleigh_refine(lambda v: v, np.zeros(2))


def dominant(cfg):
    ctx = make_context(cfg)
    r = arnoldi(lambda v: monodromy_apply(ctx, v), ctx.n, min(ctx.n, 20), 1e-9, seed=1, nev=1)
    return r.values[0]


def test_second_order_in_time():
    base = ProblemConfig(g=20.0, N=16, shape=HoleShape.disk(0.25), solver_tol=1e-13)
    mus = [dominant(base.with_(Nt=nt)) for nt in (32, 64, 128)]
    d1, d2 = abs(mus[1] - mus[0]), abs(mus[2] - mus[1])
    assert d1 / d2 >= 3.5


def test_gauge_origin_invariance():
    base = ProblemConfig(g=15.0, q=0.4, p0=0.3, N=8, Nt=32, shape=HoleShape.disk(0.25),
                         solver_tol=1e-14)
    a = dominant(base)
    b = dominant(base.with_(p0=base.p0 + 2 * math.pi))
    assert abs(a - b) <= 1e-10
