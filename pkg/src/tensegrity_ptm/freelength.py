"""Equilibria with non-zero spring free length by multistart Newton search.

Squared spring lengths no longer make the energy polynomial in the
tan-half variables, so equilibria are located numerically: a deterministic
seed grid plus the zero-free-length solutions as warm starts, a damped
Newton iteration on the analytic gradient, then residual, admissibility
(every spring longer than its free length) and stability filtering.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .dksp import DEDUP_TOL, RESIDUAL_TOL, Equilibrium, dedupe, make_equilibrium, merge_multiple, solve_dksp
from .model import Configuration, Geometry, Loading, normalized_params, spring_lengths, wrap_angle

DEFAULT_SEEDS = 24
STEP_CLAMP = 0.5
MAXITER = 80


@dataclass
class MultistartStats:
    seeds: int = 0
    converged: int = 0
    degenerate: int = 0
    deduplicated: int = 0


@dataclass
class FreeLengthResult:
    equilibria: list[Equilibrium] = field(default_factory=list)
    rejected_short_spring: int = 0
    multistart_stats: MultistartStats = field(default_factory=MultistartStats)
    # min_i(l_i) - l0 for each accepted equilibrium
    margins: list[float] = field(default_factory=list)


def seed_grid(n: int = DEFAULT_SEEDS) -> tuple[np.ndarray, np.ndarray]:
    """n x n cell-centred angle pairs covering (-pi, pi]^2, row-major."""
    a = -math.pi + (np.arange(n) + 0.5) * (2 * math.pi / n)
    t1, t2 = np.meshgrid(a, a, indexing="ij")
    return t1.ravel(), t2.ravel()


def gradient_residual(g: Geometry, g1: float, g2: float) -> float:
    """Gradient scaled like the zero-free-length residuals (dU/dtheta_i / (k L_i))."""
    return max(abs(g1) / (g.k * g.L1), abs(g2) / (g.k * g.L2))


def solve_freelength(g: Geometry, l: Loading, rho: float, seeds: int = DEFAULT_SEEDS,
                     warm_start: bool = True) -> FreeLengthResult:
    if not g.l0 > 0:
        raise ValueError("solve_freelength requires l0 > 0; use solve_dksp for l0 = 0")
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    th1, th2 = seed_grid(seeds)
    if warm_start:
        base = solve_dksp(replace(g, l0=0.0), l, rho)
        th1 = np.concatenate([[e.config.theta1 for e in base], th1])
        th2 = np.concatenate([[e.config.theta2 for e in base], th2])

    prm = normalized_params(g, l, rho)
    gtol = 1e-12 * g.scale
    x1, x2, gn, status = kernels.freelength_newton(
        prm, g.k, g.l0, th1, th2, maxiter=MAXITER, clamp=STEP_CLAMP, gtol=gtol
    )
    stats = MultistartStats(seeds=len(th1), degenerate=int(np.sum(status == 2)))

    g1, g2, *_ = kernels.freelength_derivatives(prm, g.k, g.l0, x1, x2)
    cands = []
    for a, b, d1, d2, st in zip(x1, x2, g1, g2, status):
        if st == 2:
            continue
        r = gradient_residual(g, d1, d2)
        if r < RESIDUAL_TOL and math.hypot(d1, d2) < RESIDUAL_TOL * g.scale:
            cands.append((wrap_angle(a), wrap_angle(b), r))
    stats.converged = len(cands)
    uniq = dedupe(cands, DEDUP_TOL)
    stats.deduplicated = len(uniq)

    out = FreeLengthResult(multistart_stats=stats)
    for a, b, r in sorted(uniq, key=lambda x: (x[0], x[1])):
        lengths = spring_lengths(g, Configuration(a, b, rho))
        margin = min(lengths) - g.l0
        if margin <= 0:
            out.rejected_short_spring += 1
            continue
        out.equilibria.append(make_equilibrium(g, l, a, b, rho, r))
    out.equilibria = merge_multiple(g, out.equilibria)
    out.margins = [min(spring_lengths(g, e.config)) - g.l0 for e in out.equilibria]
    return out
