"""Command-line front end: ``thermoelastic {check,analyze,plot,simulate}``.

Exit codes: 0 success, 1 input error, 2 assumption violation, 3 unstable
simulation step.  Media are JSON files with the keys tau1, tau2, lambda,
sigma1, sigma2, mu, gamma, kappa; ``fixture:NAME`` selects a built-in medium.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from . import fixtures
from .analysis import analyze, rational_dict
from .decay import sector_exponent
from .errors import AssumptionViolated, ThermoelasticError, UnstableStep
from .fresnel import sheet_point
from .hyperbolic import check_assumptions
from .media import load_medium
from .simulate import evolve, load_config
from .spectral import sample_branch

EXIT_OK, EXIT_INPUT, EXIT_ASSUMPTION, EXIT_UNSTABLE = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; argparse's default code 2 means something else here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _medium(arg):
    if arg.startswith("fixture:"):
        try:
            return fixtures.get(arg.split(":", 1)[1])
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    try:
        return load_medium(arg)
    except (OSError, ValueError, TypeError) as exc:
        raise InputError(f"{arg}: {exc}") from exc


def _fmt_angle(phi, degrees):
    phi = float(phi) % (2 * math.pi)
    return f"{math.degrees(phi):.10g} deg" if degrees else f"{phi:.10g}"


def _write_text(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


# -- check ---------------------------------------------------------------------

def cmd_check(args):
    m = _medium(args.medium)
    report, catalog = check_assumptions(m)
    if args.json:
        bundle = analyze(m)
        print(json.dumps(bundle.to_dict(args.degrees)["assumptions"], indent=2))
        return EXIT_OK if report.all_ok else EXIT_ASSUMPTION
    p, d = report.positivity, report.distinct
    print(f"A1-2 positivity:    {'pass' if p.ok else 'FAIL'} ({p.method}; min det {p.min_det:.6g} "
          f"at phi={_fmt_angle(p.min_det_phi, args.degrees)})")
    for note in p.notes:
        print(f"     note: {note}")
    if d.ok:
        print(f"A3   distinct:      pass ({d.method}; min gap {d.min_gap:.6g})")
    else:
        where = "every direction" if d.everywhere else ", ".join(
            _fmt_angle(a, args.degrees) for a in d.degenerate_angles) or f"phi={_fmt_angle(d.min_gap_phi, args.degrees)}"
        print(f"A3   distinct:      FAIL (double eigenvalue at {where})")
    if report.a4 is None:
        print("A4   coupling:      skipped (needs A1-2 and A3)")
    else:
        a4 = report.a4
        excl = ", ".join(f"{v:.10g}" for v in a4.excluded)
        if a4.ok:
            print(f"A4   coupling:      pass (gamma^2={a4.gamma_squared:.10g} avoids {{{excl}}})")
        else:
            print(f"A4   coupling:      FAIL (gamma^2={a4.gamma_squared:.10g} equals "
                  f"kappa_hyp - kappa_parab={a4.offending:.10g})")
    return EXIT_OK if report.all_ok else EXIT_ASSUMPTION


# -- analyze -------------------------------------------------------------------

def _summary_lines(name, bundle, degrees):
    lines = [f"{name}: {bundle.symmetry.value}"]
    cat = bundle.catalog
    if cat is not None and cat.identically_hyperbolic:
        lines.append("  every direction is hyperbolic (isotropic)")
    elif cat is not None:
        lines.append(f"  {len(cat)} hyperbolic directions, total vanishing order {cat.total_ell}")
        gb = {round(e.phi, 12): e for e in bundle.decay.entries} if bundle.decay else {}
        for h in cat:
            e = gb.get(round(h.phi, 12))
            extra = f" gamma_bar={e.gamma_bar} exponent={e.exponent}" if e else ""
            lines.append(f"    phi={_fmt_angle(h.phi, degrees)} sheet={h.sheet} ell={h.ell}{extra}")
    if bundle.decay is not None:
        lines.append(f"  dispersive decay rate {bundle.decay.rate}")
    else:
        lines.append(f"  assumption {bundle.assumptions.first_failure()} fails; no decay rate")
    return lines


def cmd_analyze(args):
    if args.all_figures:
        targets = [(n, fixtures.get(n)) for n in fixtures.FIGURE_NAMES]
    elif args.medium is None:
        raise InputError("analyze needs a medium file or --all-figures")
    else:
        targets = [(args.medium, _medium(args.medium))]
    docs, code = {}, EXIT_OK
    for name, m in targets:
        bundle = analyze(m)
        docs[name] = bundle.to_dict(args.degrees)
        if bundle.decay is None:
            code = EXIT_ASSUMPTION
            print(f"{name}: assumption {bundle.assumptions.first_failure()} violated", file=sys.stderr)
        if not args.json:
            print("\n".join(_summary_lines(name, bundle, args.degrees)))
    doc = docs if args.all_figures else docs[targets[0][0]]
    text = json.dumps(doc, indent=2, allow_nan=False)
    if args.out:
        _write_text(args.out, text + "\n")
    if args.json:
        print(text)
    return code


# -- plot ----------------------------------------------------------------------

def plot_data(m, n):
    """Rows (phi, s1x, s1y, s2x, s2y, c1x, c1y, c2x, c2y): Fresnel sheets and (2 + a_j) eta."""
    b = sample_branch(m, n)
    eta = np.stack([np.cos(b.phi), np.sin(b.phi)], axis=-1)
    s1, s2 = sheet_point(m, b.phi, 1), sheet_point(m, b.phi, 2)
    c1 = (2 + b.a1)[:, None] * eta
    c2 = (2 + b.a2)[:, None] * eta
    return np.column_stack([b.phi, s1, s2, c1, c2])


PLOT_COLUMNS = ["phi", "s1x", "s1y", "s2x", "s2y", "c1x", "c1y", "c2x", "c2y"]


def write_plot_csv(rows, path):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(PLOT_COLUMNS)
            for r in rows:
                w.writerow([f"{v:.17g}" for v in r])
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def build_svg(rows, size=600):
    pts = rows[:, 1:]
    extent = 1.05 * max(float(np.max(np.abs(pts))), 3.0)
    scale = size / (2 * extent)

    def poly(x, y):
        # SVG y axis points down
        return " ".join(f"{(xi + extent) * scale:.3f},{(extent - yi) * scale:.3f}" for xi, yi in zip(x, y))

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(size),
                     height=str(size), viewBox=f"0 0 {size} {size}")
    ET.SubElement(svg, "rect", width=str(size), height=str(size), fill="white")
    c = extent * scale
    ET.SubElement(svg, "circle", cx=f"{c:.3f}", cy=f"{c:.3f}", r=f"{2 * scale:.3f}",
                  fill="none", stroke="#bbbbbb", **{"stroke-dasharray": "4 4"})
    styles = [("s1", 1, "#1f4e9c", "outer Fresnel sheet"), ("s2", 3, "#c0392b", "inner Fresnel sheet"),
              ("c1", 5, "#5b8ad6", "coupling curve sheet 1"), ("c2", 7, "#e3837a", "coupling curve sheet 2")]
    for ident, col, color, title in styles:
        el = ET.SubElement(svg, "polygon", id=ident, points=poly(pts[:, col - 1], pts[:, col]),
                           fill="none", stroke=color, **{"stroke-width": "1.5"})
        ET.SubElement(el, "title").text = title
    return ET.tostring(svg, encoding="unicode")


def cmd_plot(args):
    m = _medium(args.medium)
    report, _ = check_assumptions(m)
    if not (report.a1a2_ok and report.a3_ok):
        raise AssumptionViolated(report.first_failure(), "plot needs (A1-2) and (A3)")
    if args.grid < 8:
        raise InputError("--grid must be at least 8")
    out = Path(args.out)
    svg_path = out if out.suffix == ".svg" else out.with_suffix(".svg")
    csv_path = svg_path.with_suffix(".csv")
    rows = plot_data(m, args.grid)
    _write_text(svg_path, build_svg(rows) + "\n")
    write_plot_csv(rows, csv_path)
    print(f"wrote {svg_path} and {csv_path} ({len(rows)} angles)")
    return EXIT_OK


# -- simulate ------------------------------------------------------------------

def cmd_simulate(args):
    m = _medium(args.medium)
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError, TypeError) as exc:
        raise InputError(f"{args.config}: {exc}") from exc
    bundle = analyze(m)
    if bundle.decay is None:
        raise AssumptionViolated(bundle.assumptions.first_failure())
    predicted = sector_exponent(bundle.decay, cfg.center, cfg.half_width)
    result = evolve(m, cfg)
    result.extra["predicted"] = rational_dict(predicted)
    prefix = Path(args.out)
    _write_text(prefix.with_suffix(".json"), json.dumps(result.summary(), indent=2, allow_nan=False) + "\n")
    try:
        result.to_csv(prefix.with_suffix(".csv"))
    except OSError as exc:
        raise InputError(f"cannot write {prefix.with_suffix('.csv')}: {exc}") from exc
    lo, hi = result.fit.ci95
    print(f"predicted exponent {predicted} ({float(predicted):.4f}); fitted {result.fit.exponent:.4f} "
          f"+- {result.fit.stderr:.4f} (95% CI [{lo:.4f}, {hi:.4f}], {result.fit.n_points} samples)")
    if args.json:
        print(json.dumps(result.summary(), indent=2, allow_nan=False))
    return EXIT_OK


def build_parser():
    p = _Parser(prog="thermoelastic", description="Dispersive decay analysis for 2D thermo-elastic media.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output on stdout")
        sp.add_argument("--degrees", action="store_true", help="report angles in degrees")

    c = sub.add_parser("check", help="verify assumptions (A1-2), (A3), (A4)")
    c.add_argument("medium")
    common(c)
    c.set_defaults(func=cmd_check)

    a = sub.add_parser("analyze", help="hyperbolic directions, tangency orders and decay rate")
    a.add_argument("medium", nargs="?")
    a.add_argument("--out", help="write the JSON report here")
    a.add_argument("--all-figures", action="store_true", help="analyze every built-in figure medium")
    common(a)
    a.set_defaults(func=cmd_analyze)

    pl = sub.add_parser("plot", help="Fresnel sheets and coupling curves as SVG + CSV")
    pl.add_argument("medium")
    pl.add_argument("--out", required=True, help="SVG path; the CSV goes next to it")
    pl.add_argument("--grid", type=int, default=720, help="number of angles (default 720)")
    common(pl)
    pl.set_defaults(func=cmd_plot)

    s = sub.add_parser("simulate", help="Fourier integration with a fitted sup-norm decay exponent")
    s.add_argument("medium")
    s.add_argument("config")
    s.add_argument("--out", default="simulation", help="output prefix for .csv and .json")
    common(s)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssumptionViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except UnstableStep as exc:
        print(f"error: unstable time step: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except ThermoelasticError as exc:
        # numerical verdicts that could not be reached count as bad input
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
