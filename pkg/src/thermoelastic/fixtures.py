"""Named reference media: the published figure parameter sets plus an isotropic baseline.

The figures fix only the elastic moduli.  Thermal parameters default to
gamma = kappa = 1, except for the two lambda = -2 cubic media: there the
excluded set of (A4) contains 1, so they use gamma = 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

from .media import Moduli


@dataclass(frozen=True)
class Fixture:
    name: str
    medium: Moduli
    description: str


FIXTURES = {
    f.name: f
    for f in [
        Fixture("isotropic", Moduli.isotropic(1.0, 1.0), "isotropic lambda=1, mu=1"),
        Fixture("fig1-upper-left", Moduli.cubic(0.5, 0.0, 1.0), "cubic tau=1/2, lambda=0, mu=1"),
        Fixture("fig1-upper-right", Moduli.cubic(2.5, 0.0, 1.0), "cubic tau=5/2, lambda=0, mu=1"),
        Fixture("fig1-lower-left", Moduli.cubic(0.5, -2.0, 1.0, gamma=0.5),
                "cubic tau=1/2, lambda=-2, mu=1, gamma=1/2"),
        Fixture("fig1-lower-right", Moduli.cubic(2.5, -2.0, 1.0, gamma=0.5),
                "cubic tau=5/2, lambda=-2, mu=1, gamma=1/2"),
        Fixture("fig2a", Moduli.rhombic(4.0, 8.0, 0.5, 1.0), "rhombic tau1=4, tau2=8, lambda=1/2, mu=1"),
        Fixture("fig2b", Moduli.rhombic(1.0 / 3.0, 8.0, 1.0, 1.0), "rhombic tau1=1/3, tau2=8, lambda=1, mu=1"),
        Fixture("fig2c", Moduli.rhombic(2.5, 8.0, 0.5, 1.0), "rhombic tau1=5/2, tau2=8, lambda=1/2, mu=1"),
        Fixture("fig2d", Moduli.rhombic(2.5, 1.5, 0.5, 1.0), "rhombic tau1=5/2, tau2=3/2, lambda=1/2, mu=1"),
        Fixture("fig3", Moduli.exceptional(0.0, 1.0), "exceptional lambda=0, mu=1"),
    ]
}

FIGURE_NAMES = tuple(n for n in FIXTURES if n.startswith("fig"))


def get(name):
    try:
        return FIXTURES[name].medium
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}") from None
