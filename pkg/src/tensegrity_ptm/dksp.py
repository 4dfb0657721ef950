"""All equilibria of the zero-free-length mechanism for a given actuator input."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import (
    Configuration,
    Geometry,
    Loading,
    NodeCoordinates,
    hessian,
    node_coordinates,
    normalized_params,
    potential_energy,
    wrap_angle,
)
from .poly import (
    BivariatePoly,
    build_tanhalf_system,
    deflate_circular_factor,
    real_roots,
    sylvester_resultant,
)

RESIDUAL_TOL = 1e-8
DEDUP_TOL = 1e-6
FLAT_TOL = 1e-8
STABILITY_RTOL = 1e-7
# companion eigenvalues of near-double roots carry O(sqrt(eps)) imaginary
# parts; candidates are filtered later on the trigonometric residual
CANDIDATE_IMAG_TOL = 1e-5
# a multiple root polishes to a cluster of points that all pass the residual
# filter; near-singular points closer than this are merged
MULTIPLE_RADIUS = 1e-4
SINGULAR_RTOL = 1e-6

STABLE, UNSTABLE, MARGINAL = "stable", "unstable", "marginal"


class EliminationDegenerateError(RuntimeError):
    """The eliminant vanishes identically (positive-dimensional solution set)."""


class InconsistentRootError(ValueError):
    """No t1 satisfies both quadratics for the given t2 root."""


@dataclass(frozen=True)
class Equilibrium:
    config: Configuration
    residual: float
    energy: float
    minor1: float
    det_h: float
    stability: str
    flat: bool
    nodes: NodeCoordinates

    @property
    def stable(self) -> bool:
        return self.stability == STABLE

    @property
    def angles(self) -> tuple[float, float]:
        return self.config.theta1, self.config.theta2


def stability_tolerance(g: Geometry) -> float:
    return STABILITY_RTOL * g.scale


def label_minors(g: Geometry, minor1: float, det_h: float) -> str:
    """Stability label from the leading principal minors.

    ``minor1`` is compared with tau = 1e-7 k max(L)^2 and ``det_h`` with
    tau * k max(L)^2 so both thresholds carry the units of their minor.
    """
    tau = stability_tolerance(g)
    tau_det = tau * g.scale
    if abs(minor1) <= tau or abs(det_h) <= tau_det:
        return MARGINAL
    if minor1 > 0 and det_h > 0:
        return STABLE
    return UNSTABLE


def classify_stability(g: Geometry, l: Loading, c: Configuration) -> tuple[float, float, str]:
    """(H(1,1), det(H), label) at an equilibrium."""
    h = hessian(g, l, c)
    minor1 = float(h[0, 0])
    det_h = float(h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0])
    return minor1, det_h, label_minors(g, minor1, det_h)


def is_flat(theta1: float, theta2: float, tol: float = FLAT_TOL) -> bool:
    return all(abs(math.sin(t)) < tol for t in (theta1, theta2))


def make_equilibrium(g: Geometry, l: Loading, theta1: float, theta2: float, rho: float,
                     residual: float) -> Equilibrium:
    c = Configuration(theta1, theta2, rho)
    minor1, det_h, label = classify_stability(g, l, c)
    return Equilibrium(
        config=c,
        residual=float(residual),
        energy=potential_energy(g, l, c),
        minor1=minor1,
        det_h=det_h,
        stability=label,
        flat=is_flat(c.theta1, c.theta2),
        nodes=node_coordinates(g, c),
    )


def angle_distance(a: float, b: float) -> float:
    return abs(math.remainder(a - b, 2 * math.pi))


def dedupe(points, tol: float = DEDUP_TOL):
    """Keep the first of any angle pairs closer than ``tol`` in both angles."""
    kept = []
    for pt in points:
        if not any(angle_distance(pt[0], q[0]) < tol and angle_distance(pt[1], q[1]) < tol
                   for q in kept):
            kept.append(pt)
    return kept


def merge_multiple(g: Geometry, eqs: list[Equilibrium]) -> list[Equilibrium]:
    """Collapse clusters of near-singular equilibria into their best member.

    Points with ``|det H| <= 1e-6 (k max L^2)^2`` lying within
    ``MULTIPLE_RADIUS`` of each other are one multiple root; the member with
    the smallest residual is kept. Output is sorted by (theta1, theta2).
    """
    lim = SINGULAR_RTOL * g.scale ** 2
    kept: list[Equilibrium] = []
    for e in sorted(eqs, key=lambda e: e.residual):
        if abs(e.det_h) <= lim and any(
            abs(k.det_h) <= lim
            and angle_distance(e.config.theta1, k.config.theta1) < MULTIPLE_RADIUS
            and angle_distance(e.config.theta2, k.config.theta2) < MULTIPLE_RADIUS
            for k in kept
        ):
            continue
        kept.append(e)
    return sorted(kept, key=lambda e: e.angles)


def _quadratic_roots(a: float, b: float, c: float, scale: float) -> list[float]:
    """Real roots of a t^2 + b t + c, with t = inf when the leading term vanishes."""
    tiny = 1e-10 * scale
    if abs(a) <= tiny:
        roots = [math.inf]
        if abs(b) > tiny:
            roots.append(-c / b)
        return roots
    disc = b * b - 4 * a * c
    if disc < -1e-10 * scale * scale:
        return []
    sq = math.sqrt(max(disc, 0.0))
    # numerically stable pair
    qv = -0.5 * (b + math.copysign(sq, b))
    if qv == 0.0:
        return [0.0, 0.0]
    return [qv / a, c / qv]


def back_substitute(root_t2: float, p: BivariatePoly, q: BivariatePoly) -> list[float]:
    """t1 values solving p(t1, root_t2) = q(t1, root_t2) = 0.

    The two quadratics in t1 are combined to cancel the t1^2 term and the
    remaining linear equation is solved. When the combination degenerates the
    roots of the two quadratics are intersected instead; ``math.inf`` stands for
    t1 = infinity (theta1 = pi).
    """
    c1, b1, a1 = (float(np.polynomial.polynomial.polyval(root_t2, cf)) for cf in p.in_variable("t1"))
    c2, b2, a2 = (float(np.polynomial.polynomial.polyval(root_t2, cf)) for cf in q.in_variable("t1"))
    scale = max(abs(a1), abs(b1), abs(c1), abs(a2), abs(b2), abs(c2), 1e-300)
    lin = a2 * b1 - a1 * b2
    const = a2 * c1 - a1 * c2
    if abs(lin) > 1e-10 * scale * scale:
        t1 = -const / lin
        r1 = a1 * t1 * t1 + b1 * t1 + c1
        r2 = a2 * t1 * t1 + b2 * t1 + c2
        size = scale * max(1.0, t1 * t1)
        if abs(r1) < 1e-6 * size and abs(r2) < 1e-6 * size:
            return [t1]
        raise InconsistentRootError(f"t2={root_t2!r}: linear solution t1={t1!r} fails both quadratics")
    if abs(const) > 1e-10 * scale * scale:
        # only a root at infinity can be shared
        if abs(a1) <= 1e-10 * scale and abs(a2) <= 1e-10 * scale:
            return [math.inf]
        raise InconsistentRootError(f"t2={root_t2!r}: no common t1")
    roots1 = _quadratic_roots(a1, b1, c1, scale)
    roots2 = _quadratic_roots(a2, b2, c2, scale)
    common = []
    for r in roots1:
        for s in roots2:
            if (math.isinf(r) and math.isinf(s)) or (
                not math.isinf(r) and not math.isinf(s) and abs(r - s) < 1e-6 * max(1.0, abs(r))
            ):
                common.append(r if math.isinf(r) else 0.5 * (r + s))
                break
    if not common:
        raise InconsistentRootError(f"t2={root_t2!r}: quadratics share no root")
    return common


def _tan_to_angle(t: float) -> float:
    return math.pi if math.isinf(t) else 2.0 * math.atan(t)


def eliminate(p: BivariatePoly, q: BivariatePoly, order: str = "t1"):
    """Deflated eliminant in the surviving variable and the raw resultant."""
    res = sylvester_resultant(p, q, eliminate=order)
    scale = max(np.max(np.abs(p.coeffs)), np.max(np.abs(q.coeffs))) ** 4
    if res.is_zero() or res.max_norm() < 1e-13 * scale:
        raise EliminationDegenerateError("eliminant vanishes identically")
    deflated, mult = deflate_circular_factor(res)
    return deflated, res, mult


def candidate_angles(g: Geometry, l: Loading, rho: float, order: str = "t1") -> list[tuple[float, float]]:
    """Seeds for the trigonometric polish: eliminant roots, theta = pi edges, flats."""
    p, q = build_tanhalf_system(*normalized_params(g, l, rho))
    if order == "t2":
        # eliminate t2: swap roles, root in t1, back substitute for t2
        ps, qs = p.swapped(), q.swapped()
    else:
        ps, qs = p, q
    seeds = []
    deflated, _, _ = eliminate(ps, qs, "t1")
    if deflated.degree >= 1:
        for rr in real_roots(deflated, imag_tol=CANDIDATE_IMAG_TOL):
            try:
                others = back_substitute(rr.value, ps, qs)
            except InconsistentRootError:
                continue
            for o in others:
                a, b = _tan_to_angle(o), _tan_to_angle(rr.value)
                seeds.append((a, b) if order == "t1" else (b, a))
    seeds.extend(_edge_seeds(g, l))
    return seeds


def _edge_seeds(g: Geometry, l: Loading) -> list[tuple[float, float]]:
    """Configurations with an angle at pi, which tan-half cannot represent.

    With theta2 = pi the second equation reduces to sin theta1 = -F4/(k L1);
    with theta1 = pi the first gives sin theta2 = -F3/(k L2). The four flat
    poses are always included.
    """
    seeds = [(0.0, 0.0), (0.0, math.pi), (math.pi, 0.0), (math.pi, math.pi)]
    s = -l.F4 / (g.k * g.L1)
    if abs(s) <= 1:
        a = math.asin(s)
        seeds += [(a, math.pi), (math.pi - a, math.pi)]
    s = -l.F3 / (g.k * g.L2)
    if abs(s) <= 1:
        a = math.asin(s)
        seeds += [(math.pi, a), (math.pi, math.pi - a)]
    return seeds


def solve_dksp(g: Geometry, l: Loading, rho: float, order: str = "t1") -> list[Equilibrium]:
    """Every real equilibrium for actuator input ``rho`` (zero free length).

    ``order`` picks the eliminated variable ("t1" or "t2"). Solutions are
    sorted by theta1 ascending, then theta2.
    """
    if g.l0 != 0:
        raise ValueError("solve_dksp requires zero free length; use solve_freelength")
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    seeds = candidate_angles(g, l, rho, order)
    prm = normalized_params(g, l, rho)
    th1, th2, res = kernels.polish(prm, np.array([s[0] for s in seeds]), np.array([s[1] for s in seeds]))
    good = [(wrap_angle(a), wrap_angle(b), r) for a, b, r in zip(th1, th2, res) if r < RESIDUAL_TOL]
    good = dedupe(good)
    return merge_multiple(g, [make_equilibrium(g, l, a, b, rho, r) for a, b, r in good])


def stable_count(solutions) -> int:
    return sum(1 for s in solutions if s.stable)
