"""Hyperbolic directions, coupling-function vanishing orders and assumption (A4).

A direction eta is hyperbolic when eta^perp is an eigenvector of A(eta), i.e.
when eta^perp . A(eta) eta = 0.  In polar angle this is (eight times) the
four-term trigonometric polynomial evaluated by :func:`hyp_poly`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import OrderAmbiguous, RootFindingFailure
from .media import TOL_CLASS, assemble_symbol
from .spectral import eigen_at, eigen_batch

ROOT_GRID = 8192
TOL_ZERO = 1e-8
TOL_A4 = 1e-9
A4_INTERPRETATION = "eigenvalue difference"
ELL_STEPS = 10.0 ** np.array([-2.0, -2.5, -3.0, -3.5])


def hyp_coefficients(m):
    """``(c2, c4, s2, s4)`` so that p = c2 cos2phi + c4 cos4phi + s2 sin2phi + s4 sin4phi."""
    return (
        4 * (m.sigma1 + m.sigma2),
        4 * (m.sigma1 - m.sigma2),
        -2 * (m.tau1 - m.tau2),
        -(m.tau1 + m.tau2 - 2 * m.lam - 4 * m.mu),
    )


def hyp_poly(m, phi, deriv=0):
    """The hyperbolic-direction polynomial (or its ``deriv``-th derivative) at ``phi``."""
    phi = np.asarray(phi, dtype=float)
    c2, c4, s2, s4 = hyp_coefficients(m)
    shift = deriv * np.pi / 2
    return (
        c2 * 2.0 ** deriv * np.cos(2 * phi + shift)
        + c4 * 4.0 ** deriv * np.cos(4 * phi + shift)
        + s2 * 2.0 ** deriv * np.sin(2 * phi + shift)
        + s4 * 4.0 ** deriv * np.sin(4 * phi + shift)
    )


def _derivative_bound(m, k):
    c2, c4, s2, s4 = hyp_coefficients(m)
    return (abs(c2) + abs(s2)) * 2.0 ** k + (abs(c4) + abs(s4)) * 4.0 ** k


def perp_projection(m, phi):
    """q(phi) = eta^perp . A(eta) eta, the quantity whose zeros define hyperbolic directions."""
    A = assemble_symbol(m, phi)
    c, s = np.cos(phi), np.sin(phi)
    return A.a12 * (c * c - s * s) + c * s * (A.a22 - A.a11)


@dataclass
class HyperbolicDirection:
    phi: float
    sheet: int
    poly_multiplicity: int
    ell: int
    kappa_hyp: float
    kappa_parab: float
    coupling_value: float = 0.0

    @property
    def a4_difference(self):
        return self.kappa_hyp - self.kappa_parab


@dataclass
class HyperbolicCatalog:
    directions: list = field(default_factory=list)
    identically_hyperbolic: bool = False
    # sheet whose eigenvector is eta^perp everywhere (isotropic media only)
    identical_sheet: int | None = None

    def __len__(self):
        return len(self.directions)

    def __iter__(self):
        return iter(self.directions)

    @property
    def angles(self):
        return np.array([d.phi for d in self.directions])

    @property
    def total_ell(self):
        return sum(d.ell for d in self.directions)

    def orbits(self):
        """Group directions related by phi -> phi + pi."""
        out, used = [], set()
        for i, d in enumerate(self.directions):
            if i in used:
                continue
            group = [i]
            for k in range(i + 1, len(self.directions)):
                if k not in used and _cyclic_distance(self.directions[k].phi, d.phi + math.pi) < 1e-7:
                    group.append(k)
            used.update(group)
            out.append([self.directions[k] for k in group])
        return out

    def at(self, phi, tol=1e-7):
        for d in self.directions:
            if _cyclic_distance(d.phi, phi) < tol:
                return d
        return None

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phi", "sheet", "poly_multiplicity", "ell", "kappa_hyp", "kappa_parab"])
            for d in self.directions:
                w.writerow([f"{d.phi:.17g}", d.sheet, d.poly_multiplicity, d.ell,
                            f"{d.kappa_hyp:.17g}", f"{d.kappa_parab:.17g}"])


def _cyclic_distance(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def _sign_change_roots(func, grid):
    vals = func(grid)
    h = grid[1] - grid[0]
    scalar = lambda x: float(func(np.asarray(x)))  # noqa: E731
    roots = []
    for i in range(len(grid)):
        a, fa = float(grid[i]), vals[i]
        fb = vals[(i + 1) % len(grid)]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb >= 0:
            continue
        b = a + h
        fb = scalar(b)
        if fa * fb > 0 or fb == 0.0:
            # the wrapped endpoint re-evaluated to the other side of a root at the boundary
            roots.append(b if abs(fb) <= abs(fa) else a)
            continue
        try:
            r = optimize.brentq(scalar, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        except RuntimeError as exc:
            raise RootFindingFailure(f"bracket [{a}, {b}] did not converge: {exc}") from exc
        roots.append(float(r))
    return roots


def _is_isotropic_symbol(m):
    bound = TOL_CLASS * m.scale
    return all(abs(c) <= bound for c in hyp_coefficients(m))


def polynomial_roots(m, n=ROOT_GRID, max_multiplicity=4):
    """Distinct roots of hyp_poly in [0, 2pi) with their multiplicities.

    A root of multiplicity k is a simple (sign-changing) root of the
    (k-1)-th derivative, so sign changes of p, p', p'', p''' are bracketed
    and a candidate from p^(k) is kept when all lower derivatives vanish
    there.  Grouped candidates take the location found at the highest k.

    Raises
    ------
    ValueError
        If the polynomial vanishes identically (isotropic symbol).
    """
    if _is_isotropic_symbol(m):
        raise ValueError("hyperbolic polynomial vanishes identically; every direction is hyperbolic")
    grid = 2 * np.pi * np.arange(n) / n
    bounds = [_derivative_bound(m, k) for k in range(max_multiplicity + 1)]
    cands = []
    for k in range(max_multiplicity):
        for r in _sign_change_roots(lambda x, k=k: hyp_poly(m, x, k), grid):
            lower_ok = all(abs(float(hyp_poly(m, r, j))) <= 1e-9 * bounds[j] for j in range(k))
            if lower_ok:
                cands.append((float(np.mod(r, 2 * np.pi)), k))
    groups = []
    for phi, k in sorted(cands):
        for g in groups:
            if _cyclic_distance(g[0][0], phi) < 1e-6:
                g.append((phi, k))
                break
        else:
            groups.append([(phi, k)])
    roots = []
    for g in groups:
        phi, k = max(g, key=lambda t: t[1])
        mult = k + 1
        # extend if the next derivative also vanishes (cannot bracket even-order roots of p^(k))
        while mult < max_multiplicity and abs(float(hyp_poly(m, phi, mult))) <= 1e-9 * bounds[mult]:
            mult += 1
        roots.append((phi, mult))
    roots.sort()
    return roots


def _slope(m, phi0, j, steps):
    offsets = np.concatenate([steps, -steps])
    _, _, r1, r2 = eigen_batch(m, phi0 + offsets)
    r = r1 if j == 1 else r2
    eta = np.stack([np.cos(phi0 + offsets), np.sin(phi0 + offsets)], axis=-1)
    a = np.abs(np.einsum("ki,ki->k", r, eta))
    mags = 0.5 * (a[: len(steps)] + a[len(steps):])
    if np.any(mags <= 0):
        return None, mags
    return float(np.polyfit(np.log(steps), np.log(mags), 1)[0]), mags


def vanishing_order(m, direction, steps=ELL_STEPS):
    """Vanishing order of the coupling function a_sheet at a hyperbolic direction.

    Fits the slope of log|a(phi0 +- h)| against log h; the slope must be
    within 0.1 of an integer that does not exceed the root multiplicity.
    A small eigenvalue gap shrinks the range where a_j is near its leading
    term, so the fit moves to smaller steps (a decade at a time) while the
    samples stay well above round-off.
    """
    phi0, j = direction.phi, direction.sheet
    slope = None
    for shift in (1.0, 1e-1, 1e-2):
        slope, mags = _slope(m, phi0, j, steps * shift)
        if slope is None:
            raise OrderAmbiguous(f"coupling vanishes identically near phi={phi0:.12g}")
        ell = int(round(slope))
        if ell >= 1 and abs(slope - ell) < 0.1:
            break
        if mags.min() < 1e-10:
            break
    else:
        ell = int(round(slope))
    if ell < 1 or abs(slope - ell) >= 0.1:
        raise OrderAmbiguous(f"log-log slope {slope:.4f} at phi={phi0:.12g} is not near an integer")
    if ell > direction.poly_multiplicity:
        raise OrderAmbiguous(
            f"vanishing order {ell} exceeds root multiplicity {direction.poly_multiplicity} at phi={phi0:.12g}"
        )
    return ell


def find_hyperbolic_directions(m, n=ROOT_GRID):
    """Catalog of hyperbolic directions in [0, 2pi), sorted by angle."""
    if _is_isotropic_symbol(m):
        # eigenvalues mu (eigenvector eta^perp) and lam + 2 mu (eigenvector eta)
        sheet = 1 if m.lam + m.mu > 0 else 2
        return HyperbolicCatalog([], identically_hyperbolic=True, identical_sheet=sheet)
    dirs = []
    for phi, mult in polynomial_roots(m, n):
        ep = eigen_at(m, phi)
        eta = np.array([math.cos(phi), math.sin(phi)])
        a = [abs(float(ep.r1 @ eta)), abs(float(ep.r2 @ eta))]
        sheet = 1 if a[0] <= a[1] else 2
        if a[sheet - 1] >= TOL_ZERO:
            raise RootFindingFailure(f"root phi={phi:.12g} has coupling {a[sheet - 1]:.3e} above tolerance")
        d = HyperbolicDirection(
            phi=phi, sheet=sheet, poly_multiplicity=mult, ell=0,
            kappa_hyp=ep.kappa(sheet), kappa_parab=ep.kappa(3 - sheet),
            coupling_value=a[sheet - 1],
        )
        d.ell = vanishing_order(m, d)
        dirs.append(d)
    return HyperbolicCatalog(dirs)


@dataclass
class A4Result:
    ok: bool
    excluded: list
    gamma_squared: float
    offending: float | None = None
    interpretation: str = A4_INTERPRETATION


def excluded_set(m, catalog):
    """Distinct values kappa_hyp - kappa_parab over all hyperbolic directions."""
    if catalog.identically_hyperbolic:
        vals = [-(m.lam + m.mu)]
    else:
        vals = [d.a4_difference for d in catalog]
    out = []
    for v in sorted(vals):
        if not out or abs(v - out[-1]) > 1e-9 * max(1.0, m.scale):
            out.append(float(v))
    return out


def check_A4(m, catalog=None):
    """Assumption (A4): gamma^2 differs from kappa_hyp - kappa_parab at every hyperbolic direction."""
    if catalog is None:
        catalog = find_hyperbolic_directions(m)
    excluded = excluded_set(m, catalog)
    g2 = m.gamma ** 2
    trace_ref = abs(float(assemble_symbol(m, 0.0).trace))
    offending = None
    for v in excluded:
        if abs(g2 - v) <= TOL_A4 * max(trace_ref, 1e-300):
            offending = v
            break
    return A4Result(ok=offending is None, excluded=excluded, gamma_squared=g2, offending=offending)


__all__ = [
    "A4Result", "HyperbolicCatalog", "HyperbolicDirection",
    "check_A4", "excluded_set", "find_hyperbolic_directions", "hyp_coefficients",
    "hyp_poly", "perp_projection", "polynomial_roots", "vanishing_order",
]


def check_assumptions(m):
    """Run (A1-2), (A3) and, when those hold, (A4).

    Returns ``(report, catalog)``; ``catalog`` is ``None`` when (A1-2) or
    (A3) fails, since eigenvalue labelling is then undefined.
    """
    from .media import AssumptionReport, check_distinct_eigenvalues, check_positivity

    report = AssumptionReport(check_positivity(m), check_distinct_eigenvalues(m))
    if not (report.a1a2_ok and report.a3_ok):
        return report, None
    catalog = find_hyperbolic_directions(m)
    report.a4 = check_A4(m, catalog)
    return report, catalog
