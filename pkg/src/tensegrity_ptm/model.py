"""Mechanism description, node kinematics and the potential energy with its
first and second derivatives.

Frame: A1 at the origin, A2 = (rho, 0) on the x-axis. Strut 1 (A1A3) makes
angle theta1 with +x, strut 2 (A2A4) makes angle theta2 with -x, so

    A3 = (L1 cos theta1, L1 sin theta1)
    A4 = (rho - L2 cos theta2, L2 sin theta2)

Springs: l1 = |A1A4|, l2 = |A2A3|, l3 = |A3A4|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEGENERATE_SPRING_LENGTH = 1e-9


class DegenerateSpringError(ValueError):
    """A spring with non-zero free length has collapsed to zero length."""


@dataclass(frozen=True)
class Geometry:
    L1: float = 1.0
    L2: float = 1.0
    k: float = 100.0
    l0: float = 0.0

    def __post_init__(self):
        if not (self.L1 > 0 and self.L2 > 0):
            raise ValueError(f"strut lengths must be positive, got L1={self.L1}, L2={self.L2}")
        if not self.k > 0:
            raise ValueError(f"stiffness must be positive, got k={self.k}")
        if not self.l0 >= 0:
            raise ValueError(f"free length must be non-negative, got l0={self.l0}")

    @property
    def scale(self) -> float:
        """Characteristic energy scale k * max(L1, L2)**2."""
        return self.k * max(self.L1, self.L2) ** 2


@dataclass(frozen=True)
class Loading:
    F3: float = 0.0
    F4: float = 0.0
    F3x: float = 0.0
    F4x: float = 0.0

    def __post_init__(self):
        for name in ("F3", "F4", "F3x", "F4x"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def unloaded(self) -> bool:
        return self.F3 == 0 and self.F4 == 0 and self.F3x == 0 and self.F4x == 0


def wrap_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    w = math.remainder(theta, 2 * math.pi)
    if w == -math.pi:
        w = math.pi
    return w


@dataclass(frozen=True)
class Configuration:
    theta1: float
    theta2: float
    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"actuator length must be positive, got rho={self.rho}")
        object.__setattr__(self, "theta1", wrap_angle(self.theta1))
        object.__setattr__(self, "theta2", wrap_angle(self.theta2))


@dataclass(frozen=True)
class NodeCoordinates:
    x3: float
    y3: float
    x4: float
    y4: float


def normalized_params(g: Geometry, l: Loading, rho: float) -> tuple:
    """Parameters in force-per-stiffness units: (L1, L2, rho, f3, f4, f3x, f4x)."""
    return (g.L1, g.L2, rho, l.F3 / g.k, l.F4 / g.k, l.F3x / g.k, l.F4x / g.k)


def node_coordinates(g: Geometry, c: Configuration) -> NodeCoordinates:
    return NodeCoordinates(
        x3=g.L1 * math.cos(c.theta1),
        y3=g.L1 * math.sin(c.theta1),
        x4=c.rho - g.L2 * math.cos(c.theta2),
        y4=g.L2 * math.sin(c.theta2),
    )


def _squared_lengths(g: Geometry, c: Configuration):
    """Squared spring lengths with their first and second angle derivatives.

    Each derivative is returned as a 2-vector / 2x2 matrix in (theta1, theta2).
    Expanded from the node coordinates, the three squared lengths sum to
    3 rho^2 + 2 L1^2 + 2 L2^2 - 4 L1 rho cos t1 - 4 L2 rho cos t2 + 2 L1 L2 cos(t1 + t2).
    """
    L1, L2, rho = g.L1, g.L2, c.rho
    s1, c1 = math.sin(c.theta1), math.cos(c.theta1)
    s2, c2 = math.sin(c.theta2), math.cos(c.theta2)
    s12, c12 = math.sin(c.theta1 + c.theta2), math.cos(c.theta1 + c.theta2)

    d1 = rho * rho - 2 * rho * L2 * c2 + L2 * L2
    g1 = np.array([0.0, 2 * rho * L2 * s2])
    h1 = np.array([[0.0, 0.0], [0.0, 2 * rho * L2 * c2]])

    d2 = L1 * L1 - 2 * rho * L1 * c1 + rho * rho
    g2 = np.array([2 * rho * L1 * s1, 0.0])
    h2 = np.array([[2 * rho * L1 * c1, 0.0], [0.0, 0.0]])

    d3 = L1 * L1 + L2 * L2 + rho * rho - 2 * rho * L1 * c1 - 2 * rho * L2 * c2 + 2 * L1 * L2 * c12
    g3 = np.array([2 * rho * L1 * s1 - 2 * L1 * L2 * s12, 2 * rho * L2 * s2 - 2 * L1 * L2 * s12])
    cross = -2 * L1 * L2 * c12
    h3 = np.array([[2 * rho * L1 * c1 + cross, cross], [cross, 2 * rho * L2 * c2 + cross]])
    return (d1, d2, d3), (g1, g2, g3), (h1, h2, h3)


def spring_lengths(g: Geometry, c: Configuration) -> tuple[float, float, float]:
    """Lengths (|A1A4|, |A2A3|, |A3A4|) computed from node coordinates."""
    n = node_coordinates(g, c)
    return (
        math.hypot(n.x4, n.y4),
        math.hypot(n.x3 - c.rho, n.y3),
        math.hypot(n.x3 - n.x4, n.y3 - n.y4),
    )


def _load_terms(g: Geometry, l: Loading, c: Configuration):
    s1, c1 = math.sin(c.theta1), math.cos(c.theta1)
    s2, c2 = math.sin(c.theta2), math.cos(c.theta2)
    n = node_coordinates(g, c)
    work = l.F3 * n.y3 + l.F4 * n.y4 + l.F3x * n.x3 + l.F4x * n.x4
    grad = np.array([
        -l.F3 * g.L1 * c1 + l.F3x * g.L1 * s1,
        -l.F4 * g.L2 * c2 - l.F4x * g.L2 * s2,
    ])
    hess = np.diag([
        l.F3 * g.L1 * s1 + l.F3x * g.L1 * c1,
        l.F4 * g.L2 * s2 - l.F4x * g.L2 * c2,
    ])
    return -work, grad, hess


def _check_lengths(g: Geometry, lengths):
    if g.l0 > 0 and min(lengths) < DEGENERATE_SPRING_LENGTH:
        raise DegenerateSpringError(
            f"spring length {min(lengths):.3g} below {DEGENERATE_SPRING_LENGTH:g} with l0={g.l0}"
        )


def potential_energy(g: Geometry, l: Loading, c: Configuration) -> float:
    """Spring energy minus the work of the nodal loads."""
    load, _, _ = _load_terms(g, l, c)
    if g.l0 == 0:
        d, _, _ = _squared_lengths(g, c)
        return 0.5 * g.k * sum(d) + load
    lengths = spring_lengths(g, c)
    return 0.5 * g.k * sum((li - g.l0) ** 2 for li in lengths) + load


def gradient(g: Geometry, l: Loading, c: Configuration) -> np.ndarray:
    """(dU/dtheta1, dU/dtheta2)."""
    _, grad, _ = _load_terms(g, l, c)
    d, dd, _ = _squared_lengths(g, c)
    if g.l0 == 0:
        return grad + 0.5 * g.k * (dd[0] + dd[1] + dd[2])
    lengths = [math.sqrt(max(di, 0.0)) for di in d]
    _check_lengths(g, lengths)
    for li, gi in zip(lengths, dd):
        # d l = d(l^2) / (2 l)
        grad = grad + g.k * (li - g.l0) * gi / (2 * li)
    return grad


def hessian(g: Geometry, l: Loading, c: Configuration) -> np.ndarray:
    """Symmetric 2x2 matrix of second angle derivatives of the energy."""
    _, _, hess = _load_terms(g, l, c)
    d, dd, hd = _squared_lengths(g, c)
    if g.l0 == 0:
        hess = hess + 0.5 * g.k * (hd[0] + hd[1] + hd[2])
    else:
        lengths = [math.sqrt(max(di, 0.0)) for di in d]
        _check_lengths(g, lengths)
        for li, gi, hi in zip(lengths, dd, hd):
            dl = gi / (2 * li)
            d2l = hi / (2 * li) - np.outer(gi, gi) / (4 * li ** 3)
            hess = hess + g.k * (np.outer(dl, dl) + (li - g.l0) * d2l)
    # analytic forms are symmetric; enforce bitwise equality
    hess[1, 0] = hess[0, 1]
    return hess


def equilibrium_residuals(g: Geometry, l: Loading, c: Configuration) -> tuple[float, float]:
    """Trigonometric equilibrium residuals for zero free length.

    R_a = L2 sin(t1+t2) - (2 rho + F3x/k) sin t1 + (F3/k) cos t1
    R_b = L1 sin(t1+t2) - (2 rho - F4x/k) sin t2 + (F4/k) cos t2

    They relate to the gradient by dU/dtheta1 = -k L1 R_a, dU/dtheta2 = -k L2 R_b.
    """
    L1, L2, rho, f3, f4, f3x, f4x = normalized_params(g, l, c.rho)
    s12 = math.sin(c.theta1 + c.theta2)
    ra = L2 * s12 - (2 * rho + f3x) * math.sin(c.theta1) + f3 * math.cos(c.theta1)
    rb = L1 * s12 - (2 * rho - f4x) * math.sin(c.theta2) + f4 * math.cos(c.theta2)
    return ra, rb
