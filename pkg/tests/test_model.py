import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tensegrity_ptm.model import (
    Configuration,
    DegenerateSpringError,
    Geometry,
    Loading,
    equilibrium_residuals,
    gradient,
    hessian,
    node_coordinates,
    potential_energy,
    spring_lengths,
    wrap_angle,
)

import _oracles

angle = st.floats(-math.pi, math.pi, allow_nan=False)
length = st.floats(0.3, 3.0)
force = st.floats(-40, 40)


def fd_gradient(g, l, c, h=1e-6):
    out = []
    for d in ((h, 0), (0, h)):
        up = potential_energy(g, l, Configuration(c.theta1 + d[0], c.theta2 + d[1], c.rho))
        dn = potential_energy(g, l, Configuration(c.theta1 - d[0], c.theta2 - d[1], c.rho))
        out.append((up - dn) / (2 * h))
    return np.array(out)


def fd_hessian(g, l, c, h=1e-4):
    cols = []
    for d in ((h, 0), (0, h)):
        up = gradient(g, l, Configuration(c.theta1 + d[0], c.theta2 + d[1], c.rho))
        dn = gradient(g, l, Configuration(c.theta1 - d[0], c.theta2 - d[1], c.rho))
        cols.append((up - dn) / (2 * h))
    return np.column_stack(cols)


def test_validation():
    with pytest.raises(ValueError):
        Geometry(L1=0)
    with pytest.raises(ValueError):
        Geometry(k=-1)
    with pytest.raises(ValueError):
        Geometry(l0=-0.1)
    with pytest.raises(ValueError):
        Configuration(0, 0, 0)
    with pytest.raises(ValueError):
        Loading(F3=math.nan)


def test_wrap_angle():
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.5 + 2 * math.pi) == pytest.approx(0.5)
    c = Configuration(-math.pi, 7.0, 1.0)
    assert c.theta1 == math.pi and c.theta2 == pytest.approx(7.0 - 2 * math.pi)


def test_flat_pose_coordinates():
    g = Geometry(1.0, 1.5)
    n = node_coordinates(g, Configuration(0.0, 0.0, 1.0))
    assert (n.x3, n.y3, n.x4, n.y4) == pytest.approx((1.0, 0.0, -0.5, 0.0))
    assert spring_lengths(g, Configuration(0.0, 0.0, 1.0)) == pytest.approx((0.5, 0.0, 1.5))


def test_energy_closed_form():
    # zero free length: sum of squared lengths expands in cosines of the angles
    L1, L2, rho, k, F3, F4 = 1.2, 0.8, 0.9, 50.0, -3.0, 2.0
    g, l = Geometry(L1, L2, k), Loading(F3, F4)
    for a, b in [(0.3, -1.1), (2.0, 0.4), (-2.7, 3.0)]:
        s = (2 * L1 ** 2 + 2 * L2 ** 2 + 3 * rho ** 2 - 4 * rho * L1 * math.cos(a) - 4 * rho * L2 * math.cos(b)
             + 2 * L1 * L2 * math.cos(a + b))
        expect = 0.5 * k * s - F3 * L1 * math.sin(a) - F4 * L2 * math.sin(b)
        assert potential_energy(g, l, Configuration(a, b, rho)) == pytest.approx(expect, rel=1e-13)


@given(angle, angle, length, length, st.floats(0.05, 3), force, force, force, force,
       st.sampled_from([0.0, 0.05, 0.2]))
def test_energy_matches_oracle(a, b, L1, L2, rho, F3, F4, F3x, F4x, l0):
    g, l = Geometry(L1, L2, 100.0, l0), Loading(F3, F4, F3x, F4x)
    p = dict(L1=L1, L2=L2, k=100.0, rho=rho, F3=F3, F4=F4, F3x=F3x, F4x=F4x, l0=l0)
    assert potential_energy(g, l, Configuration(a, b, rho)) == pytest.approx(
        _oracles.energy(p, a, b), rel=1e-12, abs=1e-9)


@given(angle, angle, length, length, st.floats(0.05, 3), force, force, force, force)
def test_gradient_fd_zero_free_length(a, b, L1, L2, rho, F3, F4, F3x, F4x):
    g, l, c = Geometry(L1, L2), Loading(F3, F4, F3x, F4x), Configuration(a, b, rho)
    an, fd = gradient(g, l, c), fd_gradient(g, l, c)
    scale = g.scale + abs(F3) + abs(F4) + abs(F3x) + abs(F4x)
    assert np.max(np.abs(an - fd)) < 1e-6 * scale


@given(angle, angle, length, length, st.floats(0.05, 3), force, force, force, force)
def test_hessian_fd_and_symmetry(a, b, L1, L2, rho, F3, F4, F3x, F4x):
    g, l, c = Geometry(L1, L2), Loading(F3, F4, F3x, F4x), Configuration(a, b, rho)
    h = hessian(g, l, c)
    assert h[0, 1] == h[1, 0]
    scale = g.scale + abs(F3) + abs(F4) + abs(F3x) + abs(F4x)
    assert np.max(np.abs(h - fd_hessian(g, l, c))) < 1e-5 * scale


@given(angle, angle, st.floats(0.05, 0.3))
def test_free_length_derivatives(a, b, l0):
    g, l, c = Geometry(1.1, 0.9, 100.0, l0), Loading(-5, 3, 1, -2), Configuration(a, b, 0.8)
    if min(spring_lengths(g, c)) < 1e-3:
        return
    assert np.max(np.abs(gradient(g, l, c) - fd_gradient(g, l, c))) < 1e-6 * g.scale
    assert np.max(np.abs(hessian(g, l, c) - fd_hessian(g, l, c))) < 1e-5 * g.scale


def test_collapsed_spring_raises():
    g = Geometry(1.0, 1.0, 100.0, 0.1)
    # flat pose with rho = L1 puts A3 on A2
    with pytest.raises(DegenerateSpringError):
        gradient(g, Loading(), Configuration(0.0, 0.0, 1.0))


@given(angle, angle, length, length, st.floats(0.05, 3), force, force, st.floats(-10, 10), st.floats(-10, 10))
def test_residuals_are_scaled_gradient(a, b, L1, L2, rho, F3, F4, F3x, F4x):
    g, l, c = Geometry(L1, L2), Loading(F3, F4, F3x, F4x), Configuration(a, b, rho)
    ra, rb = equilibrium_residuals(g, l, c)
    g1, g2 = gradient(g, l, c)
    assert g1 == pytest.approx(-g.k * L1 * ra, abs=1e-12 * g.scale)
    assert g2 == pytest.approx(-g.k * L2 * rb, abs=1e-12 * g.scale)
    # residual form with each vertical force paired to its own node
    f3, f4, f3x, f4x = F3 / g.k, F4 / g.k, F3x / g.k, F4x / g.k
    assert ra == pytest.approx(L2 * math.sin(a + b) - (2 * rho + f3x) * math.sin(a) + f3 * math.cos(a), abs=1e-12)
    assert rb == pytest.approx(L1 * math.sin(a + b) - (2 * rho - f4x) * math.sin(b) + f4 * math.cos(b), abs=1e-12)


@given(angle, angle, length, st.floats(0.05, 3), force)
def test_symmetric_pose_equal_components(a, b, L, rho, F):
    g, l = Geometry(L, L), Loading(F, F)
    g1, g2 = gradient(g, l, Configuration(a, a, rho))
    assert g1 == pytest.approx(g2, abs=1e-12 * g.scale)


@given(angle, angle, length, length, st.floats(0.05, 3), force, force)
def test_mirror_symmetry(a, b, L1, L2, rho, F3, F4):
    # reflecting through the base flips the loads
    g = Geometry(L1, L2)
    u = potential_energy(g, Loading(F3, F4), Configuration(a, b, rho))
    v = potential_energy(g, Loading(-F3, -F4), Configuration(-a, -b, rho))
    assert u == pytest.approx(v, rel=1e-12, abs=1e-9)
