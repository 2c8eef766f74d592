"""Fresnel curve sheets, tangency orders, convexity and line intersections.

The Fresnel curve is the quartic ``{xi : det(A(xi) - I) = 0}``; its sheets
are ``S_j = {kappa_j(eta)^(-1/2) eta}`` with S_1 (smaller eigenvalue) outside.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .errors import NonConvergent, OrderAmbiguous
from .media import assemble_symbol, quadratic_forms, symbol_at
from .spectral import kappa, kappa_branch, kappa_derivatives, taylor_coeffs

TOL_H_RTOL = 1e-7


def sheet_point(m, phi, j):
    """Point kappa_j(phi)^(-1/2) (cos phi, sin phi); vectorised in ``phi``."""
    phi = np.asarray(phi, dtype=float)
    rad = kappa(m, phi, j) ** -0.5
    return np.stack([rad * np.cos(phi), rad * np.sin(phi)], axis=-1)


def membership_residual(m, points):
    """det(A(xi) - I) at each point; zero on the Fresnel curve."""
    points = np.asarray(points, dtype=float)
    A = symbol_at(m, points[..., 0], points[..., 1])
    return (A.a11 - 1) * (A.a22 - 1) - A.a12 ** 2


@dataclass
class FresnelSheet:
    sheet: int
    phi: np.ndarray
    points: np.ndarray


def fresnel_sheets(m, n=720):
    phi = 2 * np.pi * np.arange(n) / n
    return [FresnelSheet(j, phi, sheet_point(m, phi, j)) for j in (1, 2)]


def sheets_to_csv(sheets, path):
    s1, s2 = sheets
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phi", "s1x", "s1y", "s2x", "s2y"])
        for k, phi in enumerate(s1.phi):
            w.writerow([f"{v:.17g}" for v in (phi, *s1.points[k], *s2.points[k])])


# -- tangency -----------------------------------------------------------------

@dataclass
class TangencyResult:
    phi0: float
    sheet: int
    gamma_bar: int
    h_values: dict = field(default_factory=dict)


def curvature_test_values(m, phi0, j):
    """The two tangency test quantities built from derivatives of kappa_j at phi0.

    ``g  = 2 sqrt(k) (d^2 sqrt(k) + sqrt(k)) = k'' - k'^2/(2k) + 2k``
    ``g1 = 2 sqrt(k) d(d^2 sqrt(k) + sqrt(k)) = k''' + k'(1 - 3k''/(2k)) + 3k'^3/(4k^2)``

    Derivatives come from Richardson extrapolation, or from the exact closed
    form when the tableau cannot settle; ``method`` records which.
    """
    try:
        t = taylor_coeffs(kappa_branch(m, j), phi0, order=3)
        k0, k1, k2, k3 = (t.derivative(i) for i in range(4))
        method = "richardson"
    except NonConvergent:
        # a small eigenvalue gap nearby puts a branch point inside the stencil
        k0, k1, k2, k3 = (float(v) for v in kappa_derivatives(m, phi0, j, order=3))
        method = "exact"
    g = k2 - k1 ** 2 / (2 * k0) + 2 * k0
    g1 = k3 + k1 * (1 - 3 * k2 / (2 * k0)) + 3 * k1 ** 3 / (4 * k0 ** 2)
    vals = {k: float(v) for k, v in
            {"kappa": k0, "d1": k1, "d2": k2, "d3": k3, "g": g, "g_prime": g1}.items()}
    vals["method"] = method
    return vals


def tangency_order(m, phi0, j):
    """Contact order of the tangent line to sheet j at the point in direction phi0.

    2 when the curvature does not vanish, 3 at an inflection, 4 when the
    curvature vanishes to higher order (symmetric flattening).

    Raises
    ------
    OrderAmbiguous
        If the deciding test quantity lies between tol_h and 10 tol_h.
    """
    vals = curvature_test_values(m, phi0, j)
    tol = TOL_H_RTOL * abs(float(assemble_symbol(m, phi0).trace))
    vals["tol_h"] = tol
    g, g1 = abs(vals["g"]), abs(vals["g_prime"])
    if tol < g < 10 * tol:
        raise OrderAmbiguous(f"curvature test |g|={g:.3e} inside ambiguous band at phi={phi0:.12g}")
    if g > tol:
        order = 2
    else:
        if tol < g1 < 10 * tol:
            raise OrderAmbiguous(f"third-order test |g'|={g1:.3e} inside ambiguous band at phi={phi0:.12g}")
        order = 3 if g1 > tol else 4
    return TangencyResult(float(phi0), j, order, vals)


# -- convexity ------------------------------------------------------------------

@dataclass
class ConvexityResult:
    ok: bool
    min_value: float
    worst_phi: float


def curvature_numerator(m, j=2, n=4096):
    """r^2 + 2 r'^2 - r r'' for the polar sheet r = kappa_j^(-1/2), from exact derivatives of kappa_j.

    Near-degenerate media have curvature spikes far narrower than any
    practical grid spacing, so the derivatives are not taken numerically.
    """
    phi = 2 * np.pi * np.arange(n) / n
    k0, k1, k2 = kappa_derivatives(m, phi, j, order=2)
    r = k0 ** -0.5
    r1 = -0.5 * k0 ** -1.5 * k1
    r2 = 0.75 * k0 ** -2.5 * k1 ** 2 - 0.5 * k0 ** -1.5 * k2
    return phi, r * r + 2 * r1 * r1 - r * r2


def convexity_certificate(m, j=2, n=4096):
    """Strict convexity of sheet j: the polar curvature numerator is positive everywhere."""
    phi, num = curvature_numerator(m, j, n)
    k = int(np.argmin(num))
    scale = float(np.max(kappa(m, phi, j) ** -1.0))
    return ConvexityResult(bool(num[k] > 1e-10 * scale), float(num[k]), float(phi[k]))


# -- line intersections -------------------------------------------------------------

def line_polynomial(m, p, d):
    """f(s) = det(A(p + s d) - I) assembled exactly as a degree-4 polynomial in s."""
    x = Polynomial([p[0], d[0]])
    y = Polynomial([p[1], d[1]])
    xx, xy, yy = x * x, x * y, y * y
    f11, f12, f22 = quadratic_forms(m)
    a11 = f11[0] * xx + f11[1] * xy + f11[2] * yy
    a12 = f12[0] * xx + f12[1] * xy + f12[2] * yy
    a22 = f22[0] * xx + f22[1] * xy + f22[2] * yy
    return (a11 - 1) * (a22 - 1) - a12 * a12


def _distinct_real(roots, imag_tol):
    real = np.sort(roots[np.abs(roots.imag) <= imag_tol * (1 + np.abs(roots))].real)
    if real.size == 0:
        return 0
    return 1 + int(np.count_nonzero(np.diff(real) > 1e-6 * (1 + np.abs(real[1:]))))


def line_intersections(m, p, d, imag_tol=1e-7):
    """Number of distinct points where the line p + s d meets the Fresnel curve."""
    d = np.asarray(d, dtype=float)
    if not np.any(d):
        raise ValueError("direction must be nonzero")
    poly = line_polynomial(m, np.asarray(p, dtype=float), d).trim()
    if poly.degree() < 1:
        return 0
    return _distinct_real(poly.roots(), imag_tol)


def _line_coeffs(m, p, d):
    """Ascending quartic coefficients of det(A(p + s d) - I), one row per line."""
    x = np.stack([p[:, 0], d[:, 0], np.zeros(len(p))], axis=1)
    y = np.stack([p[:, 1], d[:, 1], np.zeros(len(p))], axis=1)

    def mul(a, b):
        out = np.zeros((len(a), a.shape[1] + b.shape[1] - 1))
        for i in range(a.shape[1]):
            out[:, i:i + b.shape[1]] += a[:, i:i + 1] * b
        return out

    xx, xy, yy = (mul(u, v)[:, :3] for u, v in ((x, x), (x, y), (y, y)))
    one = np.zeros_like(xx)
    one[:, 0] = 1.0
    a11, a12, a22 = (f[0] * xx + f[1] * xy + f[2] * yy for f in quadratic_forms(m))
    return (mul(a11 - one, a22 - one) - mul(a12, a12))[:, :5]


def line_intersections_batch(m, p, d, imag_tol=1e-7):
    """Vectorised :func:`line_intersections` over rows of ``p`` and ``d``.

    Roots come from batched companion matrices; lines whose leading
    coefficient is negligible go through the scalar path.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    d = np.atleast_2d(np.asarray(d, dtype=float))
    if not np.all(np.any(d, axis=1)):
        raise ValueError("direction must be nonzero")
    c = _line_coeffs(m, p, d)
    scale = np.max(np.abs(c), axis=1)
    regular = np.abs(c[:, 4]) > 1e-12 * scale
    out = np.empty(len(p), dtype=int)
    comp = np.zeros((int(regular.sum()), 4, 4))
    comp[:, 1:, :3] = np.eye(3)
    comp[:, :, 3] = -c[regular, :4] / c[regular, 4:5]
    roots = np.linalg.eigvals(comp)
    out[regular] = [_distinct_real(r, imag_tol) for r in roots]
    for k in np.flatnonzero(~regular):
        out[k] = line_intersections(m, p[k], d[k], imag_tol)
    return out
