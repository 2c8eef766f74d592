import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import admissible, catalog_or_none, generic_media
from thermoelastic.errors import OrderAmbiguous
from thermoelastic.fresnel import (
    convexity_certificate, curvature_test_values, fresnel_sheets, line_intersections,
    line_intersections_batch, line_polynomial, membership_residual, sheets_to_csv, tangency_order,
)
from thermoelastic.hyperbolic import find_hyperbolic_directions
from thermoelastic.media import Moduli


def crossings_by_sampling(m, p, d, s_max=50.0, n=400_001):
    """Sign changes of det(A(p + s d) - I) along a long sampled segment."""
    s = np.linspace(-s_max, s_max, n)
    pts = np.asarray(p)[None, :] + s[:, None] * np.asarray(d)[None, :]
    f = membership_residual(m, pts)
    return int(np.count_nonzero(np.sign(f[1:]) * np.sign(f[:-1]) < 0))


@pytest.mark.parametrize("m", [Moduli.cubic(0.5, 0, 1), Moduli.rhombic(4, 8, 0.5, 1), Moduli.exceptional(0, 1)])
def test_sheet_points_lie_on_quartic(m):
    for sheet in fresnel_sheets(m, 360):
        assert np.max(np.abs(membership_residual(m, sheet.points))) < 1e-12


def test_isotropic_sheets_are_circles():
    s1, s2 = fresnel_sheets(Moduli.isotropic(1, 1), 90)
    np.testing.assert_allclose(np.hypot(*s1.points.T), 1.0, atol=1e-14)
    np.testing.assert_allclose(np.hypot(*s2.points.T), 1 / math.sqrt(3), atol=1e-14)


def test_rhombic_curvature_value_fig2c():
    # 2 sqrt(kappa) h = 2 (tau2 - lam - mu) = 13
    vals = curvature_test_values(Moduli.rhombic(2.5, 8, 0.5, 1), 0.0, 1)
    assert vals["g"] == pytest.approx(13.0, rel=1e-6)
    assert tangency_order(Moduli.rhombic(2.5, 8, 0.5, 1), 0.0, 1).gamma_bar == 2


def test_flattening_fig2d():
    t = tangency_order(Moduli.rhombic(2.5, 1.5, 0.5, 1), 0.0, 1)
    assert t.gamma_bar == 4


@pytest.mark.parametrize("lam", [0.0, 2.0, 0.7])
def test_exceptional_inflection(lam):
    m = Moduli.exceptional(lam, 1)
    t = tangency_order(m, 0.0, 1)
    assert t.gamma_bar == 3
    assert t.h_values["g_prime"] == pytest.approx(-24.0, rel=1e-5)


def test_ambiguous_band_raises():
    # tau2 chosen so that g = 2(tau2 - lam - mu) falls a few tolerances above zero
    tol = 1e-7 * 3.5
    m = Moduli.rhombic(2.5, 1.5 + 2.5 * tol, 0.5, 1)
    with pytest.raises(OrderAmbiguous):
        tangency_order(m, 0.0, 1)


@settings(max_examples=20, deadline=None)
@given(generic_media())
def test_inner_sheet_tangency_is_two(m):
    assume(admissible(m))
    cat = catalog_or_none(m)
    assume(cat is not None)
    for d in cat:
        if d.sheet == 2:
            assert tangency_order(m, d.phi, 2).gamma_bar == 2


@settings(max_examples=30, deadline=None)
@given(generic_media())
def test_inner_sheet_convex(m):
    if admissible(m):
        assert convexity_certificate(m, 2).ok


def test_small_gap_tangency_uses_exact_derivatives():
    # relative eigenvalue gap ~4e-3 near pi/2: finite differences straddle a branch point
    m = Moduli(1.0, 1.890625, 0.0, 0.5, 0.0, 1.90625)
    t = tangency_order(m, math.pi / 2, 2)
    assert t.gamma_bar == 2 and t.h_values["method"] == "exact"


def test_near_conical_point_still_convex():
    # relative gap ~1e-5: the curvature spike is far narrower than the grid
    assert convexity_certificate(Moduli(1.0, 2.171875, 1.0, 0.0, 0.34375, 2.109375), 2).ok


def test_outer_sheet_inflection_breaks_convexity():
    # the outer sheet of the exceptional medium has an inflection, so it cannot be convex
    res = convexity_certificate(Moduli.exceptional(0, 1), 1)
    assert not res.ok


def test_line_polynomial_matches_residual():
    m = Moduli(2, 3, 0.5, 0.1, -0.2, 1)
    p, d = np.array([0.1, -0.3]), np.array([0.6, 0.8])
    poly = line_polynomial(m, p, d)
    s = np.linspace(-2, 2, 11)
    np.testing.assert_allclose(poly(s), membership_residual(m, p + s[:, None] * d), atol=1e-12)


def test_isotropic_diameter_meets_four_points():
    assert line_intersections(Moduli.isotropic(1, 1), [0, 0], [1, 0]) == 4
    assert line_intersections(Moduli.isotropic(1, 1), [0, 5], [1, 0]) == 0


@settings(max_examples=40, deadline=None)
@given(generic_media(), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(0, math.pi))
def test_line_count_matches_sampling(m, px, py, ang):
    if not admissible(m):
        return
    d = [math.cos(ang), math.sin(ang)]
    n = line_intersections(m, [px, py], d)
    assert n <= 4
    # transversal crossings are seen by sampling; tangencies only by the polynomial
    assert crossings_by_sampling(m, [px, py], d) <= n


def test_batch_line_count_matches_scalar():
    rng = np.random.default_rng(11)
    m = Moduli(2, 3, 0.5, 0.1, -0.2, 1)
    p = rng.uniform(-2, 2, size=(300, 2))
    a = rng.uniform(0, math.pi, 300)
    d = np.stack([np.cos(a), np.sin(a)], axis=-1)
    # include the axis-parallel diameter of the isotropic case's analogue
    p[0], d[0] = (0, 0), (1, 0)
    expected = [line_intersections(m, pp, dd) for pp, dd in zip(p, d)]
    np.testing.assert_array_equal(line_intersections_batch(m, p, d), expected)


def test_sheets_csv(tmp_path):
    p = tmp_path / "s.csv"
    sheets_to_csv(fresnel_sheets(Moduli.cubic(0.5, 0, 1), 16), p)
    rows = p.read_text().splitlines()
    assert rows[0] == "phi,s1x,s1y,s2x,s2y" and len(rows) == 17
