"""Material description, elastic symbol and the admissibility checks (A1)-(A3).

The elastic symbol is ``A(xi) = D(xi)^T S D(xi)`` with::

        | xi1   0  |            | tau1    lam     sigma1 |
    D = |  0   xi2 |,       S = | lam     tau2    sigma2 |
        | xi2  xi1 |            | sigma1  sigma2  mu     |

so every entry of ``A`` is a binary quadratic form in ``xi``.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import optimize

TOL_CLASS = 1e-12
POSITIVITY_GRID = 4096
DEGENERACY_RTOL = 1e-10

# the relaxed positivity bound for the exceptional family: lam > -EXCEPTIONAL_LAMBDA_BOUND * mu
EXCEPTIONAL_LAMBDA_BOUND = (8.0 - 3.0 * math.sqrt(3.0)) / 4.0

MEDIUM_KEYS = ("tau1", "tau2", "lambda", "sigma1", "sigma2", "mu", "gamma", "kappa")


@dataclass(frozen=True)
class Moduli:
    """Elasticity moduli of a 2D medium plus the thermal parameters.

    ``lam`` is the off-diagonal modulus usually written lambda; in JSON
    documents it is stored under the key ``"lambda"``.
    """

    tau1: float
    tau2: float
    lam: float
    sigma1: float
    sigma2: float
    mu: float
    gamma: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise TypeError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    # -- constructors for the named families -------------------------------

    @classmethod
    def isotropic(cls, lam, mu, gamma=1.0, kappa=1.0):
        tau = lam + 2 * mu
        return cls(tau, tau, lam, 0.0, 0.0, mu, gamma, kappa)

    @classmethod
    def cubic(cls, tau, lam, mu, gamma=1.0, kappa=1.0):
        return cls(tau, tau, lam, 0.0, 0.0, mu, gamma, kappa)

    @classmethod
    def rhombic(cls, tau1, tau2, lam, mu, gamma=1.0, kappa=1.0):
        return cls(tau1, tau2, lam, 0.0, 0.0, mu, gamma, kappa)

    @classmethod
    def exceptional(cls, lam, mu, gamma=1.0, kappa=1.0):
        tau = lam + 2 * mu
        return cls(tau, tau, lam, 0.0, mu, mu, gamma, kappa)

    @classmethod
    def from_dict(cls, data):
        """Build from a flat mapping with the JSON key names; unknown or missing keys raise ``ValueError``."""
        if not isinstance(data, dict):
            raise ValueError("medium document must be a JSON object")
        unknown = sorted(set(data) - set(MEDIUM_KEYS))
        if unknown:
            raise ValueError(f"unknown medium keys: {', '.join(unknown)}")
        missing = [k for k in MEDIUM_KEYS if k not in data]
        if missing:
            raise ValueError(f"missing medium keys: {', '.join(missing)}")
        for k in MEDIUM_KEYS:
            v = data[k]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"medium key {k!r} must be a number, got {v!r}")
        try:
            return cls(
                data["tau1"], data["tau2"], data["lambda"], data["sigma1"],
                data["sigma2"], data["mu"], data["gamma"], data["kappa"],
            )
        except TypeError as exc:
            raise ValueError(str(exc)) from exc

    def to_dict(self):
        return {
            "tau1": self.tau1, "tau2": self.tau2, "lambda": self.lam,
            "sigma1": self.sigma1, "sigma2": self.sigma2, "mu": self.mu,
            "gamma": self.gamma, "kappa": self.kappa,
        }

    def stiffness(self):
        """The symmetric 3x3 stiffness matrix S."""
        return np.array([
            [self.tau1, self.lam, self.sigma1],
            [self.lam, self.tau2, self.sigma2],
            [self.sigma1, self.sigma2, self.mu],
        ])

    @property
    def scale(self):
        """Largest modulus magnitude; the reference for relative tolerances."""
        return max(abs(self.tau1), abs(self.tau2), abs(self.lam),
                   abs(self.sigma1), abs(self.sigma2), abs(self.mu), 1e-300)

    def scaled(self, c):
        """Same medium with all six elastic moduli multiplied by ``c``."""
        return Moduli(c * self.tau1, c * self.tau2, c * self.lam, c * self.sigma1,
                      c * self.sigma2, c * self.mu, self.gamma, self.kappa)


def load_medium(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return Moduli.from_dict(data)


class SymmetryClass(enum.Enum):
    ISOTROPIC = "Isotropic"
    CUBIC = "Cubic"
    RHOMBIC = "Rhombic"
    EXCEPTIONAL_S2 = "ExceptionalS2"
    GENERIC = "Generic"


class SymbolMatrix(NamedTuple):
    """Entries of the symmetric 2x2 matrix A(eta); arrays broadcast."""

    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray

    @property
    def trace(self):
        return self.a11 + self.a22

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12 ** 2

    @property
    def gap(self):
        """Eigenvalue gap sqrt((a11 - a22)^2 + 4 a12^2)."""
        return np.hypot(self.a11 - self.a22, 2 * self.a12)

    def as_array(self):
        a11, a12, a22 = (np.asarray(x, dtype=float) for x in self)
        out = np.empty(np.broadcast(a11, a12, a22).shape + (2, 2))
        out[..., 0, 0] = a11
        out[..., 0, 1] = a12
        out[..., 1, 0] = a12
        out[..., 1, 1] = a22
        return out


def quadratic_forms(m):
    """Coefficients ``(c_xx, c_xy, c_yy)`` of a11, a12, a22 as forms in (x, y)."""
    return (
        (m.tau1, 2 * m.sigma1, m.mu),
        (m.sigma1, m.lam + m.mu, m.sigma2),
        (m.mu, 2 * m.sigma2, m.tau2),
    )


def symbol_at(m, x, y):
    """A(xi) for arbitrary (not necessarily unit) xi = (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xx, xy, yy = x * x, x * y, y * y
    f11, f12, f22 = quadratic_forms(m)
    return SymbolMatrix(
        f11[0] * xx + f11[1] * xy + f11[2] * yy,
        f12[0] * xx + f12[1] * xy + f12[2] * yy,
        f22[0] * xx + f22[1] * xy + f22[2] * yy,
    )


def assemble_symbol(m, phi):
    """A(eta) at eta = (cos phi, sin phi). ``phi`` may be an array."""
    phi = np.asarray(phi, dtype=float)
    return symbol_at(m, np.cos(phi), np.sin(phi))


# -- symmetry classes ---------------------------------------------------------

def _close(a, b, scale, tol=TOL_CLASS):
    return abs(a - b) <= tol * scale


def classify_symmetry(m, tol=TOL_CLASS):
    """Most specific symmetry class whose defining equalities hold."""
    s = m.scale
    sigma_zero = _close(m.sigma1, 0, s, tol) and _close(m.sigma2, 0, s, tol)
    taus_equal = _close(m.tau1, m.tau2, s, tol)
    tau_is_p = _close(m.tau1, m.lam + 2 * m.mu, s, tol) and _close(m.tau2, m.lam + 2 * m.mu, s, tol)
    if sigma_zero:
        if tau_is_p:
            return SymmetryClass.ISOTROPIC
        if taus_equal:
            return SymmetryClass.CUBIC
        return SymmetryClass.RHOMBIC
    if tau_is_p and _close(m.sigma1, 0, s, tol) and _close(m.sigma2, m.mu, s, tol):
        return SymmetryClass.EXCEPTIONAL_S2
    return SymmetryClass.GENERIC


# -- (A1-2) positivity ----------------------------------------------------------

@dataclass
class PositivityResult:
    ok: bool
    method: str
    min_trace: float
    min_trace_phi: float
    min_det: float
    min_det_phi: float
    violated: str | None = None
    closed_form_ok: bool | None = None
    grid_ok: bool | None = None
    strict_ok: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def worst_phi(self):
        if self.violated == "trace":
            return self.min_trace_phi
        return self.min_det_phi


def _grid_minimum(func, n=POSITIVITY_GRID):
    """Minimum of a 2pi-periodic function: dense grid plus bounded refinement."""
    phis = 2 * np.pi * np.arange(n) / n
    vals = func(phis)
    k = int(np.argmin(vals))
    h = 2 * np.pi / n
    res = optimize.minimize_scalar(
        lambda p: float(func(np.asarray(p))), bounds=(phis[k] - h, phis[k] + h),
        method="bounded", options={"xatol": 1e-13},
    )
    if res.fun < vals[k]:
        return float(res.fun), float(np.mod(res.x, 2 * np.pi))
    return float(vals[k]), float(phis[k])


def _positivity_closed_form(m, cls):
    t1, t2, lam, mu = m.tau1, m.tau2, m.lam, m.mu
    if cls in (SymmetryClass.ISOTROPIC, SymmetryClass.CUBIC):
        tau = t1
        return mu > 0 and tau > 0 and (tau - lam) * (tau + lam + 2 * mu) > 0
    if cls is SymmetryClass.RHOMBIC:
        if not (mu > 0 and t1 > 0 and t2 > 0):
            return False
        root = math.sqrt(t1 * t2)
        return (root - lam) * (root + lam + 2 * mu) > 0
    if cls is SymmetryClass.EXCEPTIONAL_S2:
        return mu > 0 and lam > -EXCEPTIONAL_LAMBDA_BOUND * mu
    return None


def check_positivity(m):
    """Assumption (A1-2): A(eta) positive definite for every direction.

    Closed-form per-class inequalities are used where available; Generic and
    ExceptionalS2 media are additionally checked on a dense angular grid.
    Failure is reported in the result, never raised.
    """
    cls = classify_symmetry(m)
    scale = m.scale
    min_tr, phi_tr = _grid_minimum(lambda p: assemble_symbol(m, p).trace)
    min_det, phi_det = _grid_minimum(lambda p: assemble_symbol(m, p).det)
    grid_ok = min_tr > TOL_CLASS * scale and min_det > TOL_CLASS * scale ** 2
    closed = _positivity_closed_form(m, cls)

    if closed is None:
        ok, method = grid_ok, "grid"
    elif cls is SymmetryClass.EXCEPTIONAL_S2:
        ok, method = closed and grid_ok, "closed-form+grid"
    else:
        ok, method = closed, "closed-form"

    violated = None
    if not ok:
        violated = "trace" if min_tr <= TOL_CLASS * scale else "determinant"

    result = PositivityResult(
        ok=ok, method=method, min_trace=min_tr, min_trace_phi=phi_tr,
        min_det=min_det, min_det_phi=phi_det, violated=violated,
        closed_form_ok=closed, grid_ok=grid_ok,
    )
    if cls is SymmetryClass.EXCEPTIONAL_S2:
        result.strict_ok = m.lam > m.mu > 0
        if ok and not result.strict_ok:
            msg = ("exceptional medium satisfies only the relaxed bound "
                   "lambda > -(8 - 3 sqrt 3)/4 mu, not lambda > mu > 0")
            result.notes.append(msg)
            warnings.warn(msg, stacklevel=2)
    return result


# -- (A3) distinct eigenvalues --------------------------------------------------

def form_zeros(alpha, beta, delta, tol=0.0):
    """Angles in [0, 2pi) where alpha c^2 + beta c s + delta s^2 vanishes.

    Returns ``None`` if the form vanishes identically.
    """
    p = 0.5 * (alpha + delta)
    q = 0.5 * (alpha - delta)
    r = 0.5 * beta
    radius = math.hypot(q, r)
    if radius <= tol:
        return None if abs(p) <= tol else []
    x = -p / radius
    if abs(x) > 1 + tol / radius:
        return []
    x = min(1.0, max(-1.0, x))
    psi = math.atan2(r, q)
    acos = math.acos(x)
    out = []
    for base in {psi + acos, psi - acos}:
        for k in range(2):
            phi = float(np.mod(0.5 * base + k * math.pi, 2 * math.pi))
            if not any(abs(phi - o) < 1e-13 or abs(abs(phi - o) - 2 * math.pi) < 1e-13 for o in out):
                out.append(phi)
    return sorted(out)


def degenerate_angles(m, tol=TOL_CLASS):
    """Directions with a double eigenvalue, as common zeros of a12 and a11 - a22.

    Returns ``(angles, everywhere)``; ``everywhere`` is set when A(eta) is a
    multiple of the identity for every eta.
    """
    scale = m.scale
    f12 = quadratic_forms(m)[1]
    fdiff = (m.tau1 - m.mu, 2 * (m.sigma1 - m.sigma2), m.mu - m.tau2)
    z12 = form_zeros(*f12, tol=tol * scale)
    zdiff = form_zeros(*fdiff, tol=tol * scale)
    if z12 is None and zdiff is None:
        return [], True
    if z12 is None:
        return list(zdiff), False
    if zdiff is None:
        return list(z12), False
    phis = np.array(z12)
    if phis.size == 0:
        return [], False
    A = assemble_symbol(m, phis)
    keep = np.abs(A.a11 - A.a22) <= 1e-9 * scale
    return [float(p) for p in phis[keep]], False


@dataclass
class DistinctnessResult:
    ok: bool
    method: str
    degenerate_angles: list
    everywhere: bool
    min_gap: float
    min_gap_phi: float
    closed_form_ok: bool | None = None
    grid_ok: bool | None = None


def _distinct_closed_form(m, cls):
    s = m.scale
    nz = lambda v: abs(v) > TOL_CLASS * s  # noqa: E731
    lam, mu = m.lam, m.mu
    if cls is SymmetryClass.ISOTROPIC:
        return nz(lam + mu)
    if cls is SymmetryClass.CUBIC:
        return nz(lam + mu) and nz(m.tau1 - mu)
    if cls is SymmetryClass.RHOMBIC:
        d1, d2 = m.tau1 - mu, m.tau2 - mu
        if not (nz(d1) and nz(d2)):
            return False
        # lam + mu = 0 only degenerates when tau1 - mu and tau2 - mu share a sign
        if d1 * d2 > 0:
            return nz(lam + mu)
        return True
    if cls is SymmetryClass.EXCEPTIONAL_S2:
        r3 = math.sqrt(3.0)
        return nz(lam + mu) and nz(lam - (r3 - 1) * mu) and nz(lam + (r3 + 1) * mu)
    return None


def check_distinct_eigenvalues(m):
    """Assumption (A3): A(eta) has two distinct eigenvalues for every eta."""
    cls = classify_symmetry(m)
    min_gap, phi_gap = _grid_minimum(lambda p: assemble_symbol(m, p).gap)
    tr = float(assemble_symbol(m, phi_gap).trace)
    grid_ok = min_gap > DEGENERACY_RTOL * abs(tr)
    angles, everywhere = degenerate_angles(m)
    closed = _distinct_closed_form(m, cls)
    if closed is None:
        # a crossing can fall between grid samples; the exact common zeros catch it
        ok, method = grid_ok and not angles and not everywhere, "grid"
    else:
        ok, method = closed, "closed-form"
    if ok:
        angles, everywhere = [], False
    return DistinctnessResult(
        ok=ok, method=method, degenerate_angles=angles, everywhere=everywhere,
        min_gap=min_gap, min_gap_phi=phi_gap, closed_form_ok=closed, grid_ok=grid_ok,
    )


@dataclass
class AssumptionReport:
    """Verdicts for (A1-2), (A3) and (A4); ``a4`` is filled in by the hyperbolic module."""

    positivity: PositivityResult
    distinct: DistinctnessResult
    a4: object = None

    @property
    def a1a2_ok(self):
        return self.positivity.ok

    @property
    def a3_ok(self):
        return self.distinct.ok

    @property
    def a4_ok(self):
        return self.a4 is not None and self.a4.ok

    @property
    def all_ok(self):
        return self.a1a2_ok and self.a3_ok and self.a4_ok

    def first_failure(self):
        if not self.a1a2_ok:
            return "A1-2"
        if not self.a3_ok:
            return "A3"
        if not self.a4_ok:
            return "A4"
        return None
