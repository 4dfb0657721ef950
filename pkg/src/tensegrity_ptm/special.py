"""Reduced solvers for the unloaded and the fully symmetric mechanism.

Both serve as fast paths for the atlas and as independent checks of the
general elimination solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dksp import RESIDUAL_TOL, Equilibrium, dedupe, make_equilibrium, merge_multiple
from .model import Geometry, Loading, normalized_params, wrap_angle
from .poly import Poly, real_roots


class NotSymmetricError(ValueError):
    """Inputs do not satisfy L1 = L2, F3 = F4 without horizontal loads."""


class DenominatorZeroError(ZeroDivisionError):
    pass


FLAT_POSES = ((0.0, 0.0), (0.0, math.pi), (math.pi, 0.0), (math.pi, math.pi))


def solve_unloaded(g: Geometry, rho: float) -> list[Equilibrium]:
    """Equilibria with no external load.

    The four flat poses always balance. The remaining pair satisfies
    L1 sin t1 = L2 sin t2 and L1 cos t1 + L2 cos t2 = 2 rho, i.e. the struts
    close a triangle with base 2 rho, which exists iff
    |L1 - L2| < 2 rho < L1 + L2. The triangle pose seeds a Newton polish and
    its mirror image completes the pair.
    """
    if g.l0 != 0:
        raise ValueError("solve_unloaded requires zero free length")
    l = Loading()
    prm = normalized_params(g, l, rho)
    pts = [(a, b, 0.0) for a, b in FLAT_POSES]

    c1 = (4 * rho * rho + g.L1 ** 2 - g.L2 ** 2) / (4 * rho * g.L1)
    c2 = (4 * rho * rho + g.L2 ** 2 - g.L1 ** 2) / (4 * rho * g.L2)
    if abs(c1) < 1 and abs(c2) < 1:
        s1 = math.sqrt(1 - c1 * c1)
        s2 = g.L1 * s1 / g.L2
        seed = np.array([math.atan2(s1, c1), -math.atan2(s1, c1)]), np.array([math.atan2(s2, c2), -math.atan2(s2, c2)])
        th1, th2, res = kernels.polish(prm, *seed)
        pts += [(a, b, r) for a, b, r in zip(th1, th2, res) if r < RESIDUAL_TOL]

    pts = dedupe([(wrap_angle(a), wrap_angle(b), r) for a, b, r in pts])
    return merge_multiple(g, [make_equilibrium(g, l, a, b, rho, r) for a, b, r in pts])


@dataclass
class SymmetricCaseSolutions:
    equal_angle: list[Equilibrium] = field(default_factory=list)
    distinct_angle: list[Equilibrium] = field(default_factory=list)

    @property
    def all(self) -> list[Equilibrium]:
        sols = self.equal_angle + self.distinct_angle
        return sorted(sols, key=lambda e: (e.config.theta1, e.config.theta2))


def _check_symmetric(g: Geometry):
    if g.l0 != 0:
        raise NotSymmetricError("symmetric solver requires zero free length")
    if abs(g.L1 - g.L2) > 1e-12 * max(g.L1, g.L2):
        raise NotSymmetricError(f"L1={g.L1} and L2={g.L2} differ")


def equal_angle_quartic(L: float, f: float, rho: float) -> Poly:
    """Second equilibrium equation with t1 = t2 = t (forces over k):

    f t^4 + 4 (L + rho) t^3 + 4 (rho - L) t - f = 0
    """
    return Poly([-f, 4 * (rho - L), 0.0, 4 * (L + rho), f])


def distinct_angle_quadratic(L: float, f: float, rho: float) -> Poly:
    """Eliminant of t1 between F(t1 + t2) + 2 k rho (1 - t1 t2) = 0 and the
    second equilibrium equation, with its (1 + t2^2) factor removed; divided by k^3.
    """
    return Poly([
        -f ** 3 + 4 * f * L * rho - 4 * f * rho ** 2,
        4 * f ** 2 * rho + 16 * rho ** 3,
        f ** 3 + 4 * f * L * rho + 4 * f * rho ** 2,
    ])


def distinct_partner(f: float, rho: float, t2: float) -> float:
    """t1 from the non-trivial factor F(t1 + t2) + 2 k rho (1 - t1 t2) = 0."""
    den = f - 2 * rho * t2
    if abs(den) <= 1e-14 * max(abs(f), 2 * rho * abs(t2), 2 * rho):
        return math.inf
    return -(f * t2 + 2 * rho) / den


def solve_symmetric(g: Geometry, f4: float, rho: float) -> SymmetricCaseSolutions:
    """Equilibria for L1 = L2 and F3 = F4 = ``f4`` split by branch.

    Equal-angle solutions are real roots of the quartic obtained with t1 = t2;
    distinct-angle solutions come from the quadratic in t2 with t1 recovered
    linearly, and appear as swap pairs (t1, t2), (t2, t1).
    """
    _check_symmetric(g)
    l = Loading(f4, f4)
    if f4 == 0:
        out = SymmetricCaseSolutions()
        for e in solve_unloaded(g, rho):
            target = out.equal_angle if abs(e.config.theta1 - e.config.theta2) < 1e-9 else out.distinct_angle
            target.append(e)
        return out

    L, f = g.L1, f4 / g.k
    prm = normalized_params(g, l, rho)

    eq_pts = []
    quart = equal_angle_quartic(L, f, rho)
    if quart.degree >= 1:
        eq_pts = [(2 * math.atan(r.value),) * 2 for r in real_roots(quart, imag_tol=1e-5)]
    if quart.degree < 4:
        eq_pts.append((math.pi, math.pi))

    di_pts = []
    quad = distinct_angle_quadratic(L, f, rho)
    if quad.degree >= 1:
        for r in real_roots(quad, imag_tol=1e-5):
            t1 = distinct_partner(f, rho, r.value)
            a = math.pi if math.isinf(t1) else 2 * math.atan(t1)
            b = 2 * math.atan(r.value)
            di_pts += [(a, b), (b, a)]

    def finish(points):
        if not points:
            return []
        th1, th2, res = kernels.polish(prm, np.array([p[0] for p in points]), np.array([p[1] for p in points]))
        kept = [(wrap_angle(a), wrap_angle(b), r) for a, b, r in zip(th1, th2, res) if r < RESIDUAL_TOL]
        return kept

    eq_kept = dedupe(finish(eq_pts))
    di_kept = [p for p in dedupe(finish(di_pts))
               if abs(math.remainder(p[0] - p[1], 2 * math.pi)) > 1e-6
               and not any(abs(math.remainder(p[0] - q[0], 2 * math.pi)) < 1e-6 and
                           abs(math.remainder(p[1] - q[1], 2 * math.pi)) < 1e-6 for q in eq_kept)]
    eq = [make_equilibrium(g, l, a, b, rho, r) for a, b, r in eq_kept]
    di = [make_equilibrium(g, l, a, b, rho, r) for a, b, r in di_kept]
    kept = {id(e) for e in merge_multiple(g, eq + di)}
    return SymmetricCaseSolutions(
        equal_angle=sorted((e for e in eq if id(e) in kept), key=lambda e: e.angles),
        distinct_angle=sorted((e for e in di if id(e) in kept), key=lambda e: e.angles),
    )


def det_h_distinct_angle(g: Geometry, f4: float, rho: float, t2: float, cleared: bool = False) -> float:
    """det(H) on the distinct-angle branch, in closed form.

    The cleared-denominator form is

        -4 (t2^2 + 1)^2 (4 k^2 rho^2 + F^2)^2 (-k rho t2^2 + F t2 + k rho)^2 / (-2 k rho t2 + F)^4

    which equals det(H) times the positive factor (1 + t1^2)^2 (1 + t2^2)^2 / L^2
    (t1 being the branch partner of t2). With ``cleared=True`` that form is
    returned as is; otherwise the factor is divided out, giving the
    determinant of the angle Hessian.
    """
    k = g.k
    den = -2 * k * rho * t2 + f4
    if abs(den) < 1e-10 * max(k * rho * max(1.0, abs(t2)), abs(f4)):
        raise DenominatorZeroError(f"-2 k rho t2 + F4 vanishes at t2={t2}")
    a = 4 * k * k * rho * rho + f4 * f4
    b = -k * rho * t2 * t2 + f4 * t2 + k * rho
    w = t2 * t2 + 1
    printed = -4 * w * w * a * a * b * b / den ** 4
    if cleared:
        return printed
    # 1 + t1^2 = (4 k^2 rho^2 + F^2)(1 + t2^2) / (F - 2 k rho t2)^2
    one_t1 = a * w / den ** 2
    return printed * g.L1 ** 2 / (one_t1 * one_t1 * w * w)
