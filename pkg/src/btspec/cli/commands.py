"""Subcommand implementations. Each returns a process exit code."""
from __future__ import annotations

import json
import logging
import math
import time
from pathlib import Path

import numpy as np

from .. import __version__
from ..numcore import RngStream, SolverError, arnoldi
from ..operators import ProblemConfig
from ..propagator import evolve_period, make_context, monodromy_apply
from ..spectra import (SUBSET_CAVEAT, airy_anchor, asymptotic_report, monodromy_spectrum,
                       no_hole_spectrum, plane_wave_factor,
                       pseudo_invariance_check, pseudospectra_grid, reconstruct_eigenfunction,
                       strip_spectrum, sweep_g, sweep_q, unfold)
from ..spectra.airy import RE_TARGET
from ..spectra.branches import strip_matrix
from ..spectra.reconstruct import UnconvergedPairError
from .config import ConfigError, RunConfig
from .io import (ASYMPTOTICS_COLUMNS, PSEUDOSPECTRA_COLUMNS, SPECTRUM_COLUMNS, write_csv,
                 write_json)

log = logging.getLogger("btspec")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

MAX_DENSE_VALIDATE = 256


class NumericalFailure(RuntimeError):
    pass


class Context:
    """Resolved config, output directory and flags shared by the commands."""

    def __init__(self, cfg: RunConfig, out: Path, plots: bool, threads: int):
        self.cfg = cfg
        self.out = Path(out)
        self.plots = plots
        self.threads = max(1, threads)
        self.t0 = time.perf_counter()
        self.out.mkdir(parents=True, exist_ok=True)
        self.echo = {k: v for k, v in cfg.resolved().items() if k not in ("output_dir", "plots")}

    def csv(self, name, columns, rows, caveat=None):
        path = write_csv(self.out / name, columns, rows, self.echo, caveat)
        log.info("wrote %s", path)
        return path

    def json(self, name, payload, caveat=None):
        path = write_json(self.out / name, payload, self.echo, caveat,
                          wall_time=time.perf_counter() - self.t0)
        log.info("wrote %s", path)
        return path

    def figure(self, fn, *args, name, caveat=None):
        if not self.plots:
            return None
        text = f"btspec {__version__}; config: {json.dumps(self.echo, default=str)}"
        if caveat:
            text += f"; {caveat}"
        path = fn(*args, self.out / name, description=text)
        log.info("wrote %s", path)
        return path


def _plotting():
    from .. import plotting
    return plotting


def _branch_rows(branches):
    return [b.to_row() for b in branches]


def cmd_spectrum(ctx: Context) -> int:
    cfg = ctx.cfg.problem()
    run = monodromy_spectrum(cfg)
    ctx.csv("spectrum.csv", SPECTRUM_COLUMNS, _branch_rows(run.branches), SUBSET_CAVEAT)
    ctx.json("summary.json", {
        "command": "spectrum", "detected": run.detected, "count": len(run.branches),
        "branches": [b.as_dict() for b in run.branches], "ritz_dimension": run.ritz_dimension,
        "matvecs": run.matvecs, "compute_seconds": run.seconds}, SUBSET_CAVEAT)
    ctx.figure(_plotting().plot_spectrum, run.branches, name="spectrum.svg", caveat=SUBSET_CAVEAT)
    if not run.detected:
        log.warning("no Ritz pair converged: spectrum not detected")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_sweep(ctx: Context) -> int:
    cfg = ctx.cfg.problem()
    qs = ctx.cfg.q_list()
    res = sweep_q(cfg, qs, workers=ctx.threads)
    ctx.csv("spectrum.csv", SPECTRUM_COLUMNS, list(res.rows()), SUBSET_CAVEAT)
    ctx.json("summary.json", {
        "command": "sweep", "parameter": "q", "values": res.values,
        "counts": [len(b) for b in res.branches],
        "matches": res.matches, "births": res.births, "deaths": res.deaths,
        "curves": res.curves, "failures": res.failures,
        "runtimes": res.metadata["runtimes"]}, SUBSET_CAVEAT)
    ctx.figure(_plotting().plot_curves, res, name="curves.svg", caveat=SUBSET_CAVEAT)
    return EXIT_NUMERICAL if len(res.failures) == len(qs) else EXIT_OK


def _strip_run(ctx: Context, cfg: ProblemConfig):
    c = ctx.cfg
    return strip_spectrum(cfg, c["strip_L"], T=c.get("strip_T"), Nt=c.get("strip_Nt"),
                          m=c.get("strip_m"), tol=c.get("strip_tol"))


def cmd_strip(ctx: Context) -> int:
    cfg = ctx.cfg.problem()
    run = _strip_run(ctx, cfg)
    ctx.csv("spectrum.csv", SPECTRUM_COLUMNS, _branch_rows(run.branches), SUBSET_CAVEAT)
    ctx.json("summary.json", {
        "command": "strip", "L": ctx.cfg["strip_L"], "detected": run.detected,
        "branches": [b.as_dict() for b in run.branches], "ritz_dimension": run.ritz_dimension,
        "matvecs": run.matvecs, "compute_seconds": run.seconds}, SUBSET_CAVEAT)
    ctx.figure(_plotting().plot_spectrum, run.branches, name="spectrum.svg", caveat=SUBSET_CAVEAT)
    return EXIT_OK if run.detected else EXIT_NUMERICAL


def cmd_crosscheck(ctx: Context) -> int:
    cfg = ctx.cfg.problem()
    mono = monodromy_spectrum(cfg)
    strip = _strip_run(ctx, cfg)
    interior = [b for b in strip.branches if b.interior_weight >= 0.5]
    rep = pseudo_invariance_check(mono.branches, interior, cfg.g, ctx.cfg["crosscheck_tol"])
    ctx.csv("spectrum.csv", SPECTRUM_COLUMNS,
            _branch_rows(mono.branches) + _branch_rows(strip.branches), SUBSET_CAVEAT)
    ctx.json("summary.json", {
        "command": "crosscheck", "pairs": rep.pairs, "max_mismatch": rep.max_mismatch,
        "dominant_mismatch": rep.dominant_mismatch, "relative_mismatch": rep.relative_mismatch,
        "tol": rep.tol, "passed": rep.passed,
        "strip_edge_modes_excluded": len(strip.branches) - len(interior)}, SUBSET_CAVEAT)
    ctx.figure(_plotting().plot_spectrum, mono.branches + strip.branches, name="crosscheck.svg",
               caveat=SUBSET_CAVEAT)
    if not mono.detected or not interior:
        return EXIT_NUMERICAL
    return EXIT_OK if rep.passed else EXIT_VALIDATION


def cmd_reconstruct(ctx: Context) -> int:
    cfg = ctx.cfg.problem(s=1)
    if cfg.p0 != 0.0:
        raise ConfigError("reconstruct needs p0 = 0")
    run = monodromy_spectrum(cfg, keep_vectors=True)
    if not run.detected:
        return EXIT_NUMERICAL
    b, v = run.branches[0], run.vectors[0]
    L = ctx.cfg["strip_L"]
    rec = reconstruct_eigenfunction(cfg, b.mu, v, L, pair_tol=max(10 * cfg.arnoldi_tol, 1e-8))
    x, y = rec.grid.dof_x, rec.grid.dof_y
    rows = [{"x": float(xi), "y": float(yi), "re_u": float(u.real), "im_u": float(u.imag)}
            for xi, yi, u in zip(x, y, rec.u)]
    ctx.csv("eigenfunction.csv", ["x", "y", "re_u", "im_u"], rows)
    ctx.json("summary.json", {
        "command": "reconstruct", "lambda": rec.lam, "mu": b.mu, "L": L,
        "residual": rec.residual, "pair_residual": rec.pair_residual,
        "localized_fraction": rec.localized_fraction, "pairing_ratio": rec.pairing_ratio})
    ctx.figure(_plotting().plot_eigenfunction, rec, name="eigenfunction.svg")
    return EXIT_OK


def _z_window(ctx: Context, g: float):
    c = ctx.cfg
    re = c.get("ps_re") or [0.5 * RE_TARGET * g ** (2 / 3)] * 2
    im = c.get("ps_im") or [0.0, g / 2]
    nre, nim = c["ps_n_re"], c["ps_n_im"]
    res = [re[0]] if nre == 1 else list(np.linspace(re[0], re[1], nre))
    ims = [im[0]] if nim == 1 else [im[0] + (im[1] - im[0]) * k / nim for k in range(nim)]
    return [complex(a, b) for b in ims for a in res]


def cmd_pseudospectra(ctx: Context) -> int:
    c = ctx.cfg
    cfg = c.problem(N=c.get("ps_N") or c["N"])
    _, A = strip_matrix(cfg, c["strip_L"])
    zs = _z_window(ctx, cfg.g)
    grid = pseudospectra_grid(A, zs, tol=c["ps_tol"], maxit=c["ps_maxit"], seed=cfg.seed)
    rows = list(grid.rows())
    ctx.csv("pseudospectra.csv", PSEUDOSPECTRA_COLUMNS, rows)
    finite = grid.values[np.isfinite(grid.values)]
    ctx.json("summary.json", {
        "command": "pseudospectra", "count": len(rows), "converged": int(grid.converged.sum()),
        "scaled_norms": list(grid.values * cfg.g ** (2 / 3)),
        "median": float(np.median(finite)) if finite.size else None,
        "iterations": list(grid.iterations)})
    ctx.figure(_plotting().plot_pseudospectra, grid, name="pseudospectra.svg")
    return EXIT_OK if grid.converged.all() else EXIT_NUMERICAL


def auto_periods(g: float) -> int:
    """Smallest s with |mu|^s <= 0.1 when Re lambda follows the leading Airy law."""
    decay = (2 * math.pi / g) * RE_TARGET * g ** (2 / 3)
    return max(1, math.ceil(math.log(10.0) / decay))


def cmd_asymptotics(ctx: Context) -> int:
    c = ctx.cfg
    gs = c.get("g_values")
    if not gs:
        raise ConfigError("asymptotics needs g_values")
    base = c.problem(g=gs[0])
    Ns = c.get("N_values") or [c["N"]] * len(gs)
    ss = c.get("s_values") or [auto_periods(g) for g in gs]
    overrides = [{"N": n, "s": s} for n, s in zip(Ns, ss)]
    res = sweep_g(base, gs, overrides, workers=ctx.threads)
    x_star = airy_anchor(base.shape.x_extent)
    rep = asymptotic_report(list(zip(gs, res.branches)), x_star)
    ctx.csv("asymptotics.csv", ASYMPTOTICS_COLUMNS, [row.to_row() for row in rep.rows])
    ctx.csv("spectrum.csv", SPECTRUM_COLUMNS, list(res.rows()), SUBSET_CAVEAT)
    fit = rep.fit
    ctx.json("summary.json", {
        "command": "asymptotics", "anchor_x": x_star, "g_values": gs, "N_values": Ns, "s_values": ss,
        "gaps": rep.gaps, "failures": res.failures,
        "fit": None if fit is None else {"exponent": fit.exponent, "prefactor": fit.prefactor,
                                         "rms": fit.rms},
        "runtimes": res.metadata["runtimes"]}, SUBSET_CAVEAT)
    ctx.figure(_plotting().plot_asymptotics, rep, name="asymptotics.svg", caveat=SUBSET_CAVEAT)
    return EXIT_NUMERICAL if rep.gaps else EXIT_OK


def validation_checks(cfg: ProblemConfig):
    """Oracle and invariant checks for one config; yields (name, passed, detail)."""
    ctx = make_context(cfg)
    rng = RngStream(cfg.seed)

    # unfold/refold round trip
    worst = 0.0
    for _ in range(20):
        lam = complex(rng.next() * cfg.g, (rng.next() - 0.5) * 0.9 * cfg.g)
        worst = max(worst, abs(unfold(np.exp(-cfg.t_g * lam), cfg.t_g, cfg.g) - lam) / abs(lam))
    yield "unfold_roundtrip", worst <= 1e-12, f"max relative error {worst:.2e}"

    # contraction on seeded random states
    worst = 0.0
    for _ in range(5):
        w = rng.complex_uniform(ctx.n)
        worst = max(worst, np.linalg.norm(monodromy_apply(ctx, w)) / np.linalg.norm(w))
    yield "contraction", worst <= 1 + 1e-12, f"max ||Kw||/||w|| = {worst:.15f}"

    if cfg.shape.kind == "none":
        # plane-wave factor against the per-step scalar product
        wave = np.exp(2j * math.pi * (ctx.grid.dof_x + ctx.grid.dof_y))
        out = evolve_period(ctx, wave)
        rho = plane_wave_factor(cfg, 1, 1)
        err = np.linalg.norm(out - rho * wave) / (abs(rho) * np.linalg.norm(wave))
        yield "plane_wave_factor", err <= 1e-9, f"relative error {err:.2e}"

        # Arnoldi moduli against the weighted-shift closed form (full Krylov space)
        n = ctx.n
        if n <= MAX_DENSE_VALIDATE:
            ritz = arnoldi(lambda v: monodromy_apply(ctx, v), n, n, 1e-8, seed=cfg.seed, nev=0)
            got = np.sort(np.abs(ritz.values))[::-1]
            want = np.abs(no_hole_spectrum(cfg))[:got.size]
            err = float(np.max(np.abs(got - want)))
            yield "weighted_shift_moduli", err <= 1e-8, f"max modulus error {err:.2e}"

    run = monodromy_spectrum(cfg)
    ok = all(abs(b.mu) <= 1 + 1e-10 and b.lam.real >= -1e-10 * cfg.g for b in run.branches)
    yield "accretivity", ok, f"{len(run.branches)} branch values checked"
    ok = all(-cfg.g / 2 <= b.lam.imag < cfg.g / 2 for b in run.branches)
    yield "band", ok, "Im lambda in [-g/2, g/2)"


def cmd_validate(ctx: Context) -> int:
    cfg = ctx.cfg.problem()
    results = []
    for name, passed, detail in validation_checks(cfg):
        results.append({"check": name, "passed": bool(passed), "detail": detail})
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    ctx.csv("validation.csv", ["check", "passed", "detail"],
            [{**r, "detail": r["detail"].replace(",", ";")} for r in results])
    ctx.json("summary.json", {"command": "validate", "results": results})
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_VALIDATION


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "strip": cmd_strip,
    "crosscheck": cmd_crosscheck,
    "reconstruct": cmd_reconstruct,
    "pseudospectra": cmd_pseudospectra,
    "asymptotics": cmd_asymptotics,
    "validate": cmd_validate,
}


def run_command(name: str, ctx: Context) -> int:
    try:
        return COMMANDS[name](ctx)
    except ConfigError:
        raise
    except (SolverError, UnconvergedPairError, ArithmeticError, NumericalFailure) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
