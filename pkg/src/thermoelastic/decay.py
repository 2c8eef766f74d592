"""Dispersive decay exponents from the hyperbolic-direction data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AssumptionViolated
from .fresnel import tangency_order
from .hyperbolic import check_assumptions

NON_HYPERBOLIC_EXPONENT = Fraction(1)
WAVE_EXPONENT = Fraction(1, 2)


def microlocal_exponent(ell, gamma_bar):
    """Exponent alpha in (1 + t)^-alpha near a hyperbolic direction.

    1/(2 ell) while the coupling vanishes slowly enough (2 ell <= gamma_bar),
    otherwise the tangency order 1/gamma_bar takes over.
    """
    if ell < 1:
        raise ValueError(f"vanishing order must be >= 1, got {ell}")
    if gamma_bar not in (2, 3, 4):
        raise ValueError(f"tangency order must be 2, 3 or 4, got {gamma_bar}")
    if 2 * ell <= gamma_bar:
        return Fraction(1, 2 * ell)
    return Fraction(1, gamma_bar)


def rate_string(exponent):
    return f"t^-{exponent.numerator}" if exponent.denominator == 1 else f"t^-{exponent}"


@dataclass
class DecayEntry:
    phi: float
    sheet: int
    ell: int
    gamma_bar: int
    exponent: Fraction


@dataclass
class DecayReport:
    entries: list
    overall_exponent: Fraction
    assumptions: object = None
    catalog: object = None
    tangency: list = field(default_factory=list)

    @property
    def rate(self):
        return rate_string(self.overall_exponent)


def overall_rate(m):
    """Decay report for a medium: per-direction exponents and their minimum.

    Raises
    ------
    AssumptionViolated
        Naming the first of (A1-2), (A3), (A4) that fails; no rate is given then.
    """
    report, catalog = check_assumptions(m)
    failed = report.first_failure()
    if failed is not None:
        raise AssumptionViolated(failed, _failure_detail(report, failed))
    if catalog.identically_hyperbolic:
        # the eta^perp mode decouples completely and travels as a plain wave
        return DecayReport([], WAVE_EXPONENT, report, catalog)
    entries, tangency = [], []
    for d in catalog:
        t = tangency_order(m, d.phi, d.sheet)
        tangency.append(t)
        entries.append(DecayEntry(d.phi, d.sheet, d.ell, t.gamma_bar,
                                  microlocal_exponent(d.ell, t.gamma_bar)))
    overall = min([e.exponent for e in entries] + [NON_HYPERBOLIC_EXPONENT])
    return DecayReport(entries, overall, report, catalog, tangency)


def _failure_detail(report, failed):
    if failed == "A1-2":
        p = report.positivity
        return f"{p.violated} not positive near phi={p.worst_phi:.6g}"
    if failed == "A3":
        angles = ", ".join(f"{a:.6g}" for a in report.distinct.degenerate_angles)
        return "double eigenvalue " + ("in every direction" if report.distinct.everywhere else f"at phi={angles}")
    a4 = report.a4
    return f"gamma^2={a4.gamma_squared:.6g} equals kappa_hyp - kappa_parab={a4.offending:.6g}"


def _angle_offset(phi, center):
    """Signed distance of phi from center modulo pi (cones are symmetric under xi -> -xi)."""
    return (phi - center + math.pi / 2) % math.pi - math.pi / 2


def sector_exponent(report, center, half_width=0.0):
    """Predicted exponent for data localized in the double cone |phi - center| < half_width (mod pi).

    The slowest rate of any hyperbolic direction inside the cone wins; a
    cone free of hyperbolic directions gets the parabolic rate 1.  With
    ``half_width=0`` only an exact hit on a hyperbolic direction counts.
    """
    if report.catalog is not None and report.catalog.identically_hyperbolic:
        return WAVE_EXPONENT
    reach = max(half_width, 1e-9)
    inside = [e.exponent for e in report.entries if abs(_angle_offset(e.phi, center)) < reach]
    return min(inside + [NON_HYPERBOLIC_EXPONENT])
