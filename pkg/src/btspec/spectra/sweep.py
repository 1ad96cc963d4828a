"""Parameter sweeps with nearest-neighbour continuation of branches."""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..numcore import SolverError
from ..operators import ProblemConfig
from .branches import SUBSET_CAVEAT, band_distance, monodromy_spectrum


@dataclass
class SweepResult:
    parameter: str
    values: list
    branches: list                 # per parameter value: list of BranchEigenvalue
    matches: list                  # per adjacent pair: list of (i, j, distance)
    births: list                   # (parameter index, branch index) with no predecessor
    deaths: list                   # (parameter index, branch index) with no successor
    curves: list                   # each curve: list of (parameter index, branch index)
    failures: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def rows(self):
        for k, bs in enumerate(self.branches):
            for b in bs:
                yield b.to_row()


def min_gap(values, g) -> float:
    """Smallest distance (modulo ``i g``) between two values of one set."""
    best = math.inf
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            d = band_distance(values[i], values[j], g)
            if d > 0:
                best = min(best, d)
    return best


def match_branches(a, b, g, factor=0.5):
    """Greedy nearest-neighbour pairing of two value lists, modulo ``i g``.

    Pairs farther apart than ``factor`` times the smallest intra-set gap are
    left unmatched. Returns ``[(i, j, distance), ...]``, a partial injection.
    """
    a = [complex(x) for x in a]
    b = [complex(x) for x in b]
    if not a or not b:
        return []
    gap = min(min_gap(a, g), min_gap(b, g))
    threshold = factor * gap
    cand = sorted((band_distance(x, y, g), i, j)
                  for i, x in enumerate(a) for j, y in enumerate(b))
    used_a, used_b, out = set(), set(), []
    for d, i, j in cand:
        if d > threshold:
            break
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        out.append((i, j, d))
    return sorted(out)


def continue_branches(branch_sets, g_of):
    """Chain adjacent matches into curves; flag births and deaths."""
    matches, births, deaths, curves = [], [], [], []
    owner = {}
    for i in range(len(branch_sets[0]) if branch_sets else 0):
        owner[(0, i)] = len(curves)
        curves.append([(0, i)])
    for k in range(len(branch_sets) - 1):
        a = [b.lam for b in branch_sets[k]]
        c = [b.lam for b in branch_sets[k + 1]]
        g = min(g_of(k), g_of(k + 1))
        mk = match_branches(a, c, g)
        matches.append(mk)
        succ = {i: j for i, j, _ in mk}
        pred = {j for _, j, _ in mk}
        for i in range(len(a)):
            if i not in succ:
                deaths.append((k, i))
            else:
                cid = owner[(k, i)]
                owner[(k + 1, succ[i])] = cid
                curves[cid].append((k + 1, succ[i]))
        for j in range(len(c)):
            if j not in pred:
                births.append((k + 1, j))
                owner[(k + 1, j)] = len(curves)
                curves.append([(k + 1, j)])
    return matches, births, deaths, curves


def _run_one(config):
    try:
        run = monodromy_spectrum(config)
        return run.branches, None, run.seconds
    except (SolverError, ValueError, ArithmeticError) as exc:
        return [], f"{type(exc).__name__}: {exc}", 0.0


def run_parallel(configs, workers=1):
    """Run monodromy spectra for a list of configs; results in input order."""
    if workers <= 1 or len(configs) <= 1:
        return [_run_one(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, configs))


def sweep_q(config: ProblemConfig, q_values, workers: int = 1) -> SweepResult:
    """Monodromy branch sets over a list of y-quasimomenta with continuation."""
    q_values = [float(q) for q in q_values]
    if not q_values:
        raise ValueError("empty q list")
    t0 = time.perf_counter()
    results = run_parallel([config.with_(q=q) for q in q_values], workers)
    branches = [r[0] for r in results]
    failures = {k: r[1] for k, r in enumerate(results) if r[1] is not None}
    matches, births, deaths, curves = continue_branches(branches, lambda k: config.g)
    meta = {"caveat": SUBSET_CAVEAT, "runtimes": [r[2] for r in results],
            "wall_time": time.perf_counter() - t0}
    return SweepResult("q", q_values, branches, matches, births, deaths, curves, failures, meta)


def sweep_g(config: ProblemConfig, g_values, overrides=None, workers: int = 1) -> SweepResult:
    """Like :func:`sweep_q` over the gradient strength; ``overrides[k]`` tweaks config k."""
    g_values = [float(g) for g in g_values]
    if not g_values:
        raise ValueError("empty g list")
    t0 = time.perf_counter()
    configs = []
    for k, g in enumerate(g_values):
        extra = overrides[k] if overrides else {}
        configs.append(config.with_(g=g, **extra))
    results = run_parallel(configs, workers)
    branches = [r[0] for r in results]
    failures = {k: r[1] for k, r in enumerate(results) if r[1] is not None}
    matches, births, deaths, curves = continue_branches(branches, lambda k: g_values[k])
    meta = {"caveat": SUBSET_CAVEAT, "runtimes": [r[2] for r in results],
            "wall_time": time.perf_counter() - t0}
    return SweepResult("g", g_values, branches, matches, births, deaths, curves, failures, meta)


def branch_set_distance(a, b, g) -> float:
    """Symmetric Hausdorff distance between two branch sets modulo ``i g``."""
    la = [x.lam for x in a]
    lb = [x.lam for x in b]
    if not la and not lb:
        return 0.0
    if not la or not lb:
        return math.inf
    d = np.array([[band_distance(x, y, g) for y in lb] for x in la])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
