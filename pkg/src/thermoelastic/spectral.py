"""Closed-form eigenanalysis of A(eta), eigenvector branches and coupling functions."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateDirection, NonConvergent
from .media import DEGENERACY_RTOL, assemble_symbol, quadratic_forms


@dataclass(frozen=True)
class EigenPair:
    """Ascending eigenvalues of A(eta) with unit eigenvectors (r1 is perpendicular to r2)."""

    kappa1: float
    kappa2: float
    r1: np.ndarray
    r2: np.ndarray

    def kappa(self, j):
        return self.kappa1 if j == 1 else self.kappa2

    def r(self, j):
        return self.r1 if j == 1 else self.r2


def _canonical_sign(vx, vy):
    """+1/-1 making the second component nonnegative (first if the second is ~0)."""
    tiny = np.abs(vy) <= 1e-14 * np.hypot(vx, vy)
    key = np.where(tiny, vx, vy)
    return np.where(key < 0, -1.0, 1.0)


def eigen_batch(m, phi, check=True):
    """Vectorised eigen-decomposition over an array of angles.

    Returns ``(kappa1, kappa2, r1, r2)`` with ``r*`` of shape ``phi.shape + (2,)``,
    each eigenvector in canonical sign.
    """
    phi = np.asarray(phi, dtype=float)
    A = assemble_symbol(m, phi)
    a11, a12, a22 = (np.broadcast_to(x, phi.shape).astype(float) for x in A)
    tr = a11 + a22
    gap = np.hypot(a11 - a22, 2 * a12)
    if check:
        bad = gap <= DEGENERACY_RTOL * np.abs(tr)
        if np.any(bad):
            k = np.flatnonzero(bad.ravel())[0]
            raise DegenerateDirection(phi.ravel()[k], gap.ravel()[k])
    k2 = 0.5 * (tr + gap)
    det = a11 * a22 - a12 ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        k1 = np.where(k2 > 0, det / np.where(k2 > 0, k2, 1.0), 0.5 * (tr - gap))

    # r1 is orthogonal to the larger-norm row of (A - k1 I)
    row1x, row1y = a11 - k1, a12
    row2x, row2y = a12, a22 - k1
    use1 = np.hypot(row1x, row1y) >= np.hypot(row2x, row2y)
    vx = np.where(use1, -row1y, -row2y)
    vy = np.where(use1, row1x, row2x)
    norm = np.hypot(vx, vy)
    norm = np.where(norm > 0, norm, 1.0)
    vx, vy = vx / norm, vy / norm
    s = _canonical_sign(vx, vy)
    r1 = np.stack([s * vx, s * vy], axis=-1)
    # r2 = rotation of r1 by +90 degrees, then canonical sign
    wx, wy = -r1[..., 1], r1[..., 0]
    s2 = _canonical_sign(wx, wy)
    r2 = np.stack([s2 * wx, s2 * wy], axis=-1)
    return k1, k2, r1, r2


def eigen_at(m, phi):
    """Eigenpair of A(eta) at the angle ``phi``.

    Raises
    ------
    DegenerateDirection
        If the eigenvalue gap is below ``1e-10 * trace`` (assumption (A3) fails here).
    """
    k1, k2, r1, r2 = eigen_batch(m, np.asarray(float(phi)))
    return EigenPair(float(k1), float(k2), np.array(r1), np.array(r2))


def kappa(m, phi, j):
    """Eigenvalue branch ``kappa_j`` (ascending labelling); vectorised in ``phi``."""
    phi = np.asarray(phi, dtype=float)
    A = assemble_symbol(m, phi)
    tr, gap, det = A.trace, A.gap, A.det
    k2 = 0.5 * (tr + gap)
    if j == 2:
        return k2
    return np.where(k2 > 0, det / np.where(k2 > 0, k2, 1.0), 0.5 * (tr - gap))


def kappa_branch(m, j) -> Callable[[float], float]:
    return lambda phi: float(kappa(m, phi, j))


def _continue_signs(r):
    """Flip eigenvectors along axis 0 so consecutive samples have positive overlap."""
    dots = np.einsum("...i,...i->...", r[1:], r[:-1])
    flips = np.where(dots < 0, -1.0, 1.0)
    signs = np.concatenate([[1.0], np.cumprod(flips)])
    return r * signs[:, None]


def coupling(m, phi, j, max_step=2 * np.pi / 2048):
    """Coupling function a_j(eta) = eta . r_j(eta) with the branch-continuous sign.

    The sign of r_j is fixed canonically at phi = 0 and continued along the
    circle to ``phi``; a full turn may flip it (monodromy).
    """
    phi = float(phi)
    n = max(2, int(math.ceil(abs(phi) / max_step)) + 1)
    path = np.linspace(0.0, phi, n)
    _, _, r1, r2 = eigen_batch(m, path)
    r = _continue_signs(r1 if j == 1 else r2)
    eta = np.array([math.cos(phi), math.sin(phi)])
    return float(r[-1] @ eta)


@dataclass
class BranchSample:
    """Eigenvalue and coupling-function samples on a uniform grid over [0, 2pi)."""

    phi: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    monodromy: tuple  # (sheet 1 flips after 2pi, sheet 2 flips after 2pi)

    def a(self, j):
        return self.a1 if j == 1 else self.a2

    def kappa(self, j):
        return self.kappa1 if j == 1 else self.kappa2

    def zero_count(self, j):
        """Sign changes of a_j around the closed circle (monodromy accounted for)."""
        a = self.a(j)
        nz = np.flatnonzero(a)
        if nz.size == 0:
            return 0
        # start the loop at a nonzero sample; samples passed over wrap with the monodromy sign
        k = int(nz[0])
        flip = -1.0 if self.monodromy[j - 1] else 1.0
        a = np.concatenate([a[k:], flip * a[:k]])
        closed = np.append(a, flip * a[0])
        s = np.sign(closed)
        # exact zeros adopt the sign of the preceding sample so they are counted once
        for i in range(1, len(s)):
            if s[i] == 0:
                s[i] = s[i - 1]
        return int(np.count_nonzero(s[1:] * s[:-1] < 0))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phi", "kappa1", "kappa2", "a1", "a2"])
            for row in zip(self.phi, self.kappa1, self.kappa2, self.a1, self.a2):
                w.writerow([f"{v:.17g}" for v in row])


def sample_branch(m, n=1024):
    """Sample both eigenvalue branches and coupling functions on ``n`` angles.

    Eigenvector signs start canonical at phi = 0 and are continued by
    maximising the overlap with the previous sample.
    """
    phi = 2 * np.pi * np.arange(n) / n
    k1, k2, r1, r2 = eigen_batch(m, phi)
    r1 = _continue_signs(r1)
    r2 = _continue_signs(r2)
    eta = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    a1 = np.einsum("ki,ki->k", r1, eta)
    a2 = np.einsum("ki,ki->k", r2, eta)
    # continuing one more step lands back on phi = 0
    _, _, c1, c2 = eigen_batch(m, np.asarray(0.0))
    mono = (bool(r1[-1] @ c1 < 0), bool(r2[-1] @ c2 < 0))
    return BranchSample(phi, k1, k2, a1, a2, r1, r2, mono)


# -- exact derivatives -------------------------------------------------------------

def _form_derivatives(form, phi, order):
    """Derivatives 0..order of alpha c^2 + beta c s + delta s^2 written as p + q cos 2phi + r sin 2phi."""
    alpha, beta, delta = form
    p, q, r = 0.5 * (alpha + delta), 0.5 * (alpha - delta), 0.5 * beta
    out = []
    for n in range(order + 1):
        arg = 2 * phi + n * np.pi / 2
        out.append(2.0 ** n * (q * np.cos(arg) + r * np.sin(arg)) + (p if n == 0 else 0.0))
    return out


def _leibniz(f, g, n):
    return sum(math.comb(n, k) * f[k] * g[n - k] for k in range(n + 1))


def kappa_derivatives(m, phi, j, order=4):
    """Exact derivatives ``d^k kappa_j / dphi^k`` for k = 0..order (order <= 4).

    Uses kappa_j = (tr -+ sqrt(G)) / 2 with G = (a11 - a22)^2 + 4 a12^2; both tr
    and G are trigonometric polynomials, and sqrt(G) is differentiated through
    s^2 = G. Accurate as long as the eigenvalue gap sqrt(G) is nonzero, even when
    it is too small for finite differences. Vectorised in ``phi``.
    """
    if not 0 <= order <= 4:
        raise ValueError("order must be between 0 and 4")
    phi = np.asarray(phi, dtype=float)
    f11, f12, f22 = (_form_derivatives(f, phi, order) for f in quadratic_forms(m))
    tr = [a + b for a, b in zip(f11, f22)]
    d = [a - b for a, b in zip(f11, f22)]
    u = [_leibniz(d, d, n) + 4 * _leibniz(f12, f12, n) for n in range(order + 1)]
    s = [np.sqrt(u[0])]
    with np.errstate(divide="ignore", invalid="ignore"):
        if order >= 1:
            s.append(u[1] / (2 * s[0]))
        if order >= 2:
            s.append((u[2] / 2 - s[1] ** 2) / s[0])
        if order >= 3:
            s.append((u[3] / 2 - 3 * s[1] * s[2]) / s[0])
        if order >= 4:
            s.append((u[4] / 2 - 4 * s[1] * s[3] - 3 * s[2] ** 2) / s[0])
    sign = -1.0 if j == 1 else 1.0
    out = [0.5 * (t + sign * g) for t, g in zip(tr, s)]
    # the smaller root loses digits to cancellation; det / kappa2 is exact
    if j == 1:
        out[0] = kappa(m, phi, 1)
    return out


# -- Taylor coefficients by Richardson extrapolation -------------------------------

def _stencil(f, x, h, k):
    if k == 1:
        return (f(x + h) - f(x - h)) / (2 * h)
    if k == 2:
        return (f(x + h) - 2 * f(x) + f(x - h)) / h ** 2
    if k == 3:
        return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h ** 3)
    if k == 4:
        return (f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / h ** 4
    raise ValueError(f"derivative order {k} not supported (max 4)")


def richardson_derivative(f, x, k, h0=1e-2, con=2.0, ntab=8, safe=2.0):
    """k-th derivative by central differences with Ridders' extrapolation.

    Step sizes are h0, h0/con, h0/con^2, ...; all stencils have even error
    expansions so each tableau column removes one power of h^2.
    Returns ``(estimate, error_estimate)``.
    """
    con2 = con * con
    a = np.zeros((ntab, ntab))
    h = h0
    a[0, 0] = _stencil(f, x, h, k)
    best, err = a[0, 0], math.inf
    for i in range(1, ntab):
        h /= con
        a[0, i] = _stencil(f, x, h, k)
        fac = con2
        for j in range(1, i + 1):
            a[j, i] = (a[j - 1, i] * fac - a[j - 1, i - 1]) / (fac - 1)
            fac *= con2
            errt = max(abs(a[j, i] - a[j - 1, i]), abs(a[j, i] - a[j - 1, i - 1]))
            if errt <= err:
                err, best = errt, a[j, i]
        if abs(a[i, i] - a[i - 1, i - 1]) >= safe * err:
            break
    return float(best), float(err)


@dataclass
class TaylorResult:
    coeffs: np.ndarray
    errors: np.ndarray

    def derivative(self, k):
        return self.coeffs[k] * math.factorial(k)


def taylor_coeffs(f, phi0, order=4, tol=1e-6, h0=1e-2):
    """Coefficients c_k of f(phi) ~ sum c_k (phi - phi0)^k for k <= order.

    Raises
    ------
    NonConvergent
        If some coefficient's extrapolation error exceeds ``tol * max(1, |f(phi0)|, |c_k|)``.
    """
    if not 0 <= order <= 4:
        raise ValueError("order must be between 0 and 4")
    f0 = float(f(phi0))
    coeffs = [f0]
    errors = [0.0]
    bound = tol * max(1.0, abs(f0))
    for k in range(1, order + 1):
        # higher orders lose more to round-off, so they start from a wider step;
        # the tableau is sensitive to the start, so a few are tried
        d, e = min((richardson_derivative(f, phi0, k, h0=h0 * 2 ** (k - 1) * c) for c in (1.0, 0.5, 2.0, 0.25)),
                   key=lambda t: t[1])
        fact = math.factorial(k)
        coeffs.append(d / fact)
        errors.append(e / fact)
        bound_k = max(bound, tol * abs(d / fact))
        if not e / fact <= bound_k:
            raise NonConvergent(
                f"Taylor coefficient {k} at phi0={phi0:.6g}: error {e / fact:.3e} > {bound_k:.3e}"
            )
    return TaylorResult(np.array(coeffs), np.array(errors))
