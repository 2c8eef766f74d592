"""Full analysis pipeline for one medium and its JSON form.

Floats are written with Python's shortest round-trip repr (``json`` does
this natively) so re-reading a report reproduces every value bit for bit;
exponents are exact rationals stored as ``"p/q"`` plus integer parts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .decay import DecayReport, overall_rate, rate_string
from .errors import AssumptionViolated
from .hyperbolic import check_assumptions
from .media import classify_symmetry


@dataclass
class AnalysisBundle:
    medium: object
    symmetry: object
    assumptions: object
    catalog: object = None
    decay: DecayReport | None = None
    simulation: object = None

    def __post_init__(self):
        if (self.decay is not None) != bool(self.assumptions.all_ok):
            raise ValueError("a decay report is present exactly when all assumptions hold")

    def to_dict(self, degrees=False):
        ang = _angle_formatter(degrees)
        out = {
            "medium": self.medium.to_dict(),
            "symmetry_class": self.symmetry.value,
            "angle_unit": "degrees" if degrees else "radians",
            "assumptions": _assumptions_dict(self.assumptions, ang),
            "hyperbolic": _catalog_dict(self.catalog, self.decay, ang),
            "decay": None,
        }
        if self.decay is not None:
            out["decay"] = {
                "exponent": rational_dict(self.decay.overall_exponent),
                "rate": self.decay.rate,
            }
        if self.simulation is not None:
            out["simulation"] = self.simulation.summary()
        return out

    def to_json(self, degrees=False, indent=2):
        return json.dumps(self.to_dict(degrees), indent=indent, allow_nan=False)


def rational_dict(q):
    q = Fraction(q)
    return {"value": str(q), "numerator": q.numerator, "denominator": q.denominator,
            "rate": rate_string(q)}


def _angle_formatter(degrees):
    def fmt(phi):
        phi = float(phi) % (2 * math.pi)
        return math.degrees(phi) if degrees else phi
    return fmt


def _assumptions_dict(report, ang):
    p, d = report.positivity, report.distinct
    out = {
        "A1-2": {
            "ok": p.ok, "method": p.method, "violated": p.violated,
            "min_trace": p.min_trace, "min_trace_phi": ang(p.min_trace_phi),
            "min_det": p.min_det, "min_det_phi": ang(p.min_det_phi),
            "strict_ok": p.strict_ok, "notes": list(p.notes),
        },
        "A3": {
            "ok": d.ok, "method": d.method, "everywhere": d.everywhere,
            "degenerate_angles": [ang(a) for a in d.degenerate_angles],
            "min_gap": d.min_gap, "min_gap_phi": ang(d.min_gap_phi),
        },
        "A4": None,
    }
    if report.a4 is not None:
        a4 = report.a4
        out["A4"] = {
            "ok": a4.ok, "interpretation": a4.interpretation,
            "gamma_squared": a4.gamma_squared, "excluded": list(a4.excluded),
            "offending": a4.offending,
        }
    out["all_ok"] = bool(report.all_ok)
    out["first_failure"] = report.first_failure()
    return out


def _catalog_dict(catalog, decay, ang):
    if catalog is None:
        return None
    out = {
        "identically_hyperbolic": catalog.identically_hyperbolic,
        "identical_sheet": catalog.identical_sheet,
        "count": len(catalog),
        "total_ell": catalog.total_ell,
        "directions": [],
    }
    entries = {round(e.phi, 12): e for e in decay.entries} if decay is not None else {}
    tangency = {round(t.phi0, 12): t for t in decay.tangency} if decay is not None else {}
    for d in catalog:
        row = {
            "phi": ang(d.phi), "sheet": d.sheet, "multiplicity": d.poly_multiplicity,
            "ell": d.ell, "kappa_hyp": d.kappa_hyp, "kappa_parab": d.kappa_parab,
        }
        e = entries.get(round(d.phi, 12))
        if e is not None:
            row["gamma_bar"] = e.gamma_bar
            row["exponent"] = rational_dict(e.exponent)
            row["tangency_values"] = tangency[round(d.phi, 12)].h_values
        out["directions"].append(row)
    return out


def analyze(m):
    """Run assumptions, hyperbolic catalog, tangency and decay for ``m``.

    Assumption failures are recorded in the bundle (with no decay report)
    rather than raised.
    """
    symmetry = classify_symmetry(m)
    try:
        decay = overall_rate(m)
    except AssumptionViolated:
        report, catalog = check_assumptions(m)
        return AnalysisBundle(m, symmetry, report, catalog, None)
    return AnalysisBundle(m, symmetry, decay.assumptions, decay.catalog, decay)
