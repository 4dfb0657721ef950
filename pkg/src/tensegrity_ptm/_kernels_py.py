"""Pure numpy implementation of the hot kernels.

Parameter tuple ``p = (L1, L2, rho, f3, f4, f3x, f4x)`` with forces divided by
the spring stiffness. All kernels act elementwise on arrays of angle pairs.
"""
import numpy as np

BACKEND = "python"


def trig_residuals(p, th1, th2):
    L1, L2, rho, f3, f4, f3x, f4x = p
    th1 = np.asarray(th1, dtype=float)
    th2 = np.asarray(th2, dtype=float)
    s12 = np.sin(th1 + th2)
    ra = L2 * s12 - (2 * rho + f3x) * np.sin(th1) + f3 * np.cos(th1)
    rb = L1 * s12 - (2 * rho - f4x) * np.sin(th2) + f4 * np.cos(th2)
    return ra, rb


def polish(p, th1, th2, maxiter=30, tol=1e-14):
    """Newton iteration on the trigonometric residual pair.

    Returns polished angles and the final max-abs residual per point.
    """
    L1, L2, rho, f3, f4, f3x, f4x = p
    a = 2 * rho + f3x
    b = 2 * rho - f4x
    th1 = np.array(th1, dtype=float, copy=True)
    th2 = np.array(th2, dtype=float, copy=True)
    active = np.ones(th1.shape, dtype=bool)
    for _ in range(maxiter):
        ra, rb = trig_residuals(p, th1, th2)
        res = np.maximum(np.abs(ra), np.abs(rb))
        active &= res > tol
        if not active.any():
            break
        c12 = np.cos(th1 + th2)
        j11 = L2 * c12 - a * np.cos(th1) - f3 * np.sin(th1)
        j12 = L2 * c12
        j21 = L1 * c12
        j22 = L1 * c12 - b * np.cos(th2) - f4 * np.sin(th2)
        det = j11 * j22 - j12 * j21
        ok = active & (det != 0.0)
        safe = np.where(ok, det, 1.0)
        d1 = (j22 * ra - j12 * rb) / safe
        d2 = (j11 * rb - j21 * ra) / safe
        th1 = np.where(ok, th1 - d1, th1)
        th2 = np.where(ok, th2 - d2, th2)
        active &= ok
    ra, rb = trig_residuals(p, th1, th2)
    return th1, th2, np.maximum(np.abs(ra), np.abs(rb))


def minors(p, k, th1, th2):
    """H(1,1) and det(H) of the zero-free-length energy Hessian."""
    L1, L2, rho, f3, f4, f3x, f4x = p
    th1 = np.asarray(th1, dtype=float)
    th2 = np.asarray(th2, dtype=float)
    c12 = np.cos(th1 + th2)
    h11 = k * L1 * ((2 * rho + f3x) * np.cos(th1) - L2 * c12 + f3 * np.sin(th1))
    h22 = k * L2 * ((2 * rho - f4x) * np.cos(th2) - L1 * c12 + f4 * np.sin(th2))
    h12 = -k * L1 * L2 * c12
    return h11, h11 * h22 - h12 * h12


def freelength_derivatives(p, k, l0, th1, th2):
    """Energy gradient and Hessian with free length ``l0``.

    Returns ``(g1, g2, h11, h12, h22, lmin)`` where ``lmin`` is the shortest
    spring length at each point.
    """
    L1, L2, rho, f3, f4, f3x, f4x = p
    s1, c1 = np.sin(th1), np.cos(th1)
    s2, c2 = np.sin(th2), np.cos(th2)
    s12, c12 = np.sin(th1 + th2), np.cos(th1 + th2)

    d1 = rho * rho - 2 * rho * L2 * c2 + L2 * L2
    d2 = L1 * L1 - 2 * rho * L1 * c1 + rho * rho
    d3 = L1 * L1 + L2 * L2 + rho * rho - 2 * rho * L1 * c1 - 2 * rho * L2 * c2 + 2 * L1 * L2 * c12
    l1 = np.sqrt(np.maximum(d1, 0.0))
    l2 = np.sqrt(np.maximum(d2, 0.0))
    l3 = np.sqrt(np.maximum(d3, 0.0))
    lmin = np.minimum(np.minimum(l1, l2), l3)
    l1s = np.where(l1 > 0, l1, 1.0)
    l2s = np.where(l2 > 0, l2, 1.0)
    l3s = np.where(l3 > 0, l3, 1.0)

    # first derivatives of squared lengths
    e1 = 2 * rho * L2 * s2
    e2 = 2 * rho * L1 * s1
    e3a = 2 * rho * L1 * s1 - 2 * L1 * L2 * s12
    e3b = 2 * rho * L2 * s2 - 2 * L1 * L2 * s12
    # second derivatives of squared lengths
    q1 = 2 * rho * L2 * c2
    q2 = 2 * rho * L1 * c1
    cr = -2 * L1 * L2 * c12
    q3aa = 2 * rho * L1 * c1 + cr
    q3bb = 2 * rho * L2 * c2 + cr

    t1 = (l1s - l0) / (2 * l1s)
    t2 = (l2s - l0) / (2 * l2s)
    t3 = (l3s - l0) / (2 * l3s)
    g1 = t2 * e2 + t3 * e3a
    g2 = t1 * e1 + t3 * e3b

    # d2 (l - l0)^2 / 2 = (l0 / (4 l^3)) dd^T + (l - l0)/(2 l) Hd
    u1 = l0 / (4 * l1s ** 3)
    u2 = l0 / (4 * l2s ** 3)
    u3 = l0 / (4 * l3s ** 3)
    h11 = u2 * e2 * e2 + t2 * q2 + u3 * e3a * e3a + t3 * q3aa
    h22 = u1 * e1 * e1 + t1 * q1 + u3 * e3b * e3b + t3 * q3bb
    h12 = u3 * e3a * e3b + t3 * cr

    g1 = k * g1 - k * (f3 * L1 * c1 - f3x * L1 * s1)
    g2 = k * g2 - k * (f4 * L2 * c2 + f4x * L2 * s2)
    h11 = k * h11 + k * (f3 * L1 * s1 + f3x * L1 * c1)
    h22 = k * h22 + k * (f4 * L2 * s2 - f4x * L2 * c2)
    h12 = k * h12
    return g1, g2, h11, h12, h22, lmin


def freelength_newton(p, k, l0, th1, th2, maxiter=60, clamp=0.5, gtol=1e-12, lmin_floor=1e-9):
    """Damped Newton search for stationary points of the free-length energy.

    Steps are clamped to ``clamp`` rad in max-norm. Returns
    ``(th1, th2, gnorm, status)`` with status 0 = converged, 1 = not
    converged, 2 = trajectory hit a degenerate spring.
    """
    th1 = np.array(th1, dtype=float, copy=True)
    th2 = np.array(th2, dtype=float, copy=True)
    status = np.ones(th1.shape, dtype=np.int64)
    active = np.ones(th1.shape, dtype=bool)
    for _ in range(maxiter):
        g1, g2, h11, h12, h22, lmin = freelength_derivatives(p, k, l0, th1, th2)
        bad = active & (lmin < lmin_floor)
        status[bad] = 2
        active &= ~bad
        gn = np.maximum(np.abs(g1), np.abs(g2))
        done = active & (gn < gtol)
        status[done] = 0
        active &= ~done
        if not active.any():
            break
        det = h11 * h22 - h12 * h12
        scale = np.maximum(np.abs(h11) + np.abs(h22) + 2 * np.abs(h12), 1e-300)
        newton = np.abs(det) > 1e-14 * scale * scale
        safe = np.where(newton, det, 1.0)
        d1 = np.where(newton, (h22 * g1 - h12 * g2) / safe, g1 / scale)
        d2 = np.where(newton, (h11 * g2 - h12 * g1) / safe, g2 / scale)
        step = np.maximum(np.abs(d1), np.abs(d2))
        fac = np.where(step > clamp, clamp / np.maximum(step, 1e-300), 1.0)
        th1 = np.where(active, th1 - fac * d1, th1)
        th2 = np.where(active, th2 - fac * d2, th2)
        stalled = active & (step == 0.0)
        active &= ~stalled
    g1, g2, h11, h12, h22, lmin = freelength_derivatives(p, k, l0, th1, th2)
    gn = np.maximum(np.abs(g1), np.abs(g2))
    status = np.where((status == 1) & (gn < gtol), 0, status)
    return th1, th2, gn, status
