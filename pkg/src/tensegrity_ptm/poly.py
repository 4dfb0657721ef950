"""Univariate/bivariate real polynomials, Sylvester elimination and real roots.

Coefficients are stored in ascending degree order throughout.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

COEFF_FLOOR = 1e-12


class DegenerateLeadingCoefficientWarning(RuntimeWarning):
    """Leading coefficient in the eliminated variable vanishes identically."""


class Poly:
    """Real univariate polynomial, ascending coefficients, trimmed on construction."""

    def __init__(self, coefficients):
        c = np.atleast_1d(np.asarray(coefficients, dtype=float)).copy()
        scale = np.max(np.abs(c)) if c.size else 0.0
        if scale == 0.0:
            c = np.zeros(1)
        else:
            nz = np.nonzero(np.abs(c) > COEFF_FLOOR * scale)[0]
            c = c[: nz[-1] + 1]
        self.coefficients = c

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coefficients[0] == 0.0

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coefficients)

    def deriv(self) -> "Poly":
        return Poly(np.polynomial.polynomial.polyder(self.coefficients))

    def __mul__(self, other: "Poly") -> "Poly":
        return Poly(np.convolve(self.coefficients, other.coefficients))

    def __repr__(self):
        return f"Poly({self.coefficients.tolist()})"


class BivariatePoly:
    """Real polynomial in (t1, t2); ``coeffs[i, j]`` multiplies t1**i * t2**j."""

    def __init__(self, coeffs):
        self.coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))

    def degree_in(self, var: str) -> int:
        axis = _axis(var)
        c = self.coeffs if axis == 0 else self.coeffs.T
        rows = np.nonzero(np.any(c != 0.0, axis=1))[0]
        return int(rows[-1]) if rows.size else -1

    def __call__(self, t1, t2):
        return np.polynomial.polynomial.polyval2d(t1, t2, self.coeffs)

    def in_variable(self, var: str) -> list[np.ndarray]:
        """Coefficients in ``var`` as polynomials (ascending arrays) in the other variable."""
        c = self.coeffs if _axis(var) == 0 else self.coeffs.T
        return [c[i] for i in range(c.shape[0])]

    def swapped(self) -> "BivariatePoly":
        return BivariatePoly(self.coeffs.T)

    def __repr__(self):
        return f"BivariatePoly({self.coeffs.tolist()})"


def _axis(var: str) -> int:
    if var not in ("t1", "t2"):
        raise ValueError(f"unknown variable {var!r}, expected 't1' or 't2'")
    return 0 if var == "t1" else 1


def build_tanhalf_system(L1, L2, rho, f3, f4, f3x=0.0, f4x=0.0):
    """Polynomial form of the two equilibrium equations in t_i = tan(theta_i / 2).

    Arguments are in force-per-stiffness units (``f = F / k``). The returned
    pair equals ``-(1 + t1^2)(1 + t2^2)`` times the trigonometric residuals
    R_a and R_b (see :func:`tensegrity_ptm.model.equilibrium_residuals`).
    """
    a = 2 * rho + f3x
    b = 2 * rho - f4x
    p = np.zeros((3, 3))
    p[0, 0], p[2, 0], p[0, 2], p[2, 2] = -f3, f3, -f3, f3
    p[1, 0] = 2 * a - 2 * L2
    p[1, 2] = 2 * a + 2 * L2
    p[0, 1] = -2 * L2
    p[2, 1] = 2 * L2

    q = np.zeros((3, 3))
    q[0, 0], q[2, 0], q[0, 2], q[2, 2] = -f4, -f4, f4, f4
    q[1, 0] = -2 * L1
    q[1, 2] = 2 * L1
    q[0, 1] = 2 * b - 2 * L1
    q[2, 1] = 2 * b + 2 * L1
    return BivariatePoly(p), BivariatePoly(q)


def sylvester_matrix(a: list, b: list) -> np.ndarray:
    """Sylvester matrix of two polynomials given as descending coefficient lists."""
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    s = np.zeros((size, size), dtype=np.result_type(*a, *b, float))
    for i in range(n):
        s[i, i : i + m + 1] = a
    for i in range(m):
        s[n + i, i : i + n + 1] = b
    return s


def sylvester_resultant(p: BivariatePoly, q: BivariatePoly, eliminate: str = "t1") -> Poly:
    """Resultant of ``p`` and ``q`` with respect to ``eliminate``.

    The Sylvester determinant is a polynomial in the surviving variable; it is
    evaluated at roots of unity and its coefficients recovered by a DFT.
    """
    pc, qc = p.in_variable(eliminate), q.in_variable(eliminate)
    m, n = p.degree_in(eliminate), q.degree_in(eliminate)
    if m < 1 or n < 1:
        raise ValueError("both polynomials need positive degree in the eliminated variable")
    if m < len(pc) - 1 or n < len(qc) - 1:
        warnings.warn(
            "leading coefficient vanishes identically; using the lower-degree Sylvester matrix",
            DegenerateLeadingCoefficientWarning,
            stacklevel=2,
        )
    pc, qc = pc[: m + 1], qc[: n + 1]

    other = 1 - _axis(eliminate)
    dp = _true_degree(p.coeffs, other)
    dq = _true_degree(q.coeffs, other)
    bound = n * dp + m * dq
    npts = bound + 1
    z = np.exp(2j * np.pi * np.arange(npts) / npts)

    width = max(dp, dq) + 1
    vander = np.vander(z, width, increasing=True)
    pa = [vander[:, : len(c[:width])] @ c[:width] for c in pc]
    qa = [vander[:, : len(c[:width])] @ c[:width] for c in qc]
    mats = np.empty((npts, m + n, m + n), dtype=complex)
    for j in range(npts):
        mats[j] = sylvester_matrix([v[j] for v in reversed(pa)], [v[j] for v in reversed(qa)])
    values = np.linalg.det(mats)
    coeffs = np.fft.fft(values) / npts
    return Poly(coeffs.real)


def _true_degree(c: np.ndarray, axis: int) -> int:
    c = c if axis == 0 else c.T
    rows = np.nonzero(np.any(c != 0.0, axis=1))[0]
    return int(rows[-1]) if rows.size else 0


def deflate_circular_factor(p: Poly, rtol: float = 1e-8) -> tuple[Poly, int]:
    """Divide out (1 + t^2) as often as it divides ``p`` up to ``rtol``."""
    mult = 0
    cur = p
    while cur.degree >= 2:
        quo, rem = np.polynomial.polynomial.polydiv(cur.coefficients, [1.0, 0.0, 1.0])
        if np.max(np.abs(rem)) >= rtol * cur.max_norm():
            break
        cur = Poly(quo)
        mult += 1
    return cur, mult


@dataclass(frozen=True)
class RealRoot:
    value: float
    multiple: bool = False
    converged: bool = True


def _eval_with_scale(c: np.ndarray, t: float):
    """p(t), p'(t) and the rounding scale sum |c_i| |t|^i by Horner's rule."""
    v, dv, s = 0.0, 0.0, 0.0
    at = abs(t)
    for ci in c[::-1]:
        dv = dv * t + v
        v = v * t + ci
        s = s * at + abs(ci)
    return v, dv, s


def companion_eigenvalues(p: Poly) -> np.ndarray:
    c = p.coefficients
    n = p.degree
    if n < 1:
        return np.empty(0, dtype=complex)
    comp = np.zeros((n, n))
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(comp)


def real_roots(p: Poly, interval=None, imag_tol: float = 1e-8, maxiter: int = 50) -> list[RealRoot]:
    """All real roots of ``p``, polished by Newton's method, sorted ascending.

    Eigenvalues of the companion matrix whose imaginary part is below
    ``imag_tol * max(1, |z|)`` are candidates. A root is converged when
    ``|p(r)| < 1e-12`` times the rounding scale ``sum |c_i| |r|^i`` (which is
    the coefficient max-norm order for ``|r| <= 1``), and flagged multiple when
    ``|p'(r)|`` is below ``1e-6`` of the same scale.
    """
    if p.degree < 1:
        raise ValueError("real_roots needs a polynomial of degree >= 1")
    c = p.coefficients
    out = []
    for z in companion_eigenvalues(p):
        if abs(z.imag) > imag_tol * max(1.0, abs(z)):
            continue
        r = z.real
        for _ in range(maxiter):
            v, dv, s = _eval_with_scale(c, r)
            if abs(v) <= 1e-12 * s or dv == 0.0:
                break
            r_new = r - v / dv
            if r_new == r:
                break
            r = r_new
        v, dv, s = _eval_with_scale(c, r)
        converged = abs(v) <= 1e-12 * s
        if not converged:
            r = z.real
        multiple = abs(dv) * max(1.0, abs(r)) <= 1e-6 * s
        if interval is not None and not (interval[0] <= r <= interval[1]):
            continue
        out.append(RealRoot(float(r), multiple, converged))
    out.sort(key=lambda rr: rr.value)
    return out
