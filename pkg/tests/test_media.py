import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import admissible, generic_media
from thermoelastic.media import (
    EXCEPTIONAL_LAMBDA_BOUND, Moduli, SymmetryClass, assemble_symbol, check_distinct_eigenvalues,
    check_positivity, classify_symmetry, form_zeros, load_medium,
)


def direct_symbol(m, phi):
    """D(eta)^T S D(eta) built literally from the stiffness matrix."""
    x, y = math.cos(phi), math.sin(phi)
    D = np.array([[x, 0.0], [0.0, y], [y, x]])
    return D.T @ m.stiffness() @ D


@given(generic_media(), st.floats(0, 2 * math.pi))
def test_symbol_matches_stiffness_product(m, phi):
    A = assemble_symbol(m, phi)
    ref = direct_symbol(m, phi)
    np.testing.assert_allclose(A.as_array(), ref, atol=1e-12 * m.scale)


def test_isotropic_symbol_eigenvalues():
    m = Moduli.isotropic(1.0, 1.0)
    for phi in np.linspace(0, 2 * np.pi, 13):
        w = np.linalg.eigvalsh(assemble_symbol(m, phi).as_array())
        np.testing.assert_allclose(w, [1.0, 3.0], atol=1e-14)


@pytest.mark.parametrize("m, cls", [
    (Moduli.isotropic(1, 1), SymmetryClass.ISOTROPIC),
    (Moduli.cubic(0.5, 0, 1), SymmetryClass.CUBIC),
    (Moduli.rhombic(4, 8, 0.5, 1), SymmetryClass.RHOMBIC),
    (Moduli.exceptional(0, 1), SymmetryClass.EXCEPTIONAL_S2),
    (Moduli(2, 3, 0.5, 0.1, -0.2, 1), SymmetryClass.GENERIC),
])
def test_classification(m, cls):
    assert classify_symmetry(m) is cls


def test_cubic_positivity_boundary():
    # (tau - lam)(tau + lam + 2 mu) > 0 with mu, tau > 0
    assert check_positivity(Moduli.cubic(2.5, -2, 1)).ok
    assert not check_positivity(Moduli.cubic(1.0, 1.0, 1)).ok
    assert not check_positivity(Moduli.cubic(1.0, -3.0, 1)).ok


def test_exceptional_relaxed_bound_is_sharp():
    mu = 1.0
    edge = -EXCEPTIONAL_LAMBDA_BOUND * mu
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        inside = check_positivity(Moduli.exceptional(edge + 1e-4, mu))
        outside = check_positivity(Moduli.exceptional(edge - 1e-4, mu))
    assert inside.ok and inside.grid_ok
    assert not outside.ok and outside.grid_ok is False


def test_exceptional_fig3_warns_about_strict_bound():
    with pytest.warns(UserWarning, match="relaxed bound"):
        res = check_positivity(Moduli.exceptional(0, 1))
    assert res.ok and res.strict_ok is False


@settings(max_examples=60, deadline=None)
@given(generic_media())
def test_positivity_closed_form_agrees_with_grid(m):
    res = check_positivity(m)
    # eigenvalue oracle on a fine grid
    phis = np.linspace(0, np.pi, 2001)
    w = np.linalg.eigvalsh(assemble_symbol(m, phis).as_array())
    margin = float(w.min())
    assume(abs(margin) > 1e-3)
    assert res.ok == (margin > 0)


@pytest.mark.parametrize("m, ok", [
    (Moduli.cubic(0.5, 0, 1), True),
    (Moduli.cubic(1.0, 0, 1), False),           # tau = mu
    (Moduli.isotropic(-1, 1), False),           # lam + mu = 0
    (Moduli.rhombic(4, 8, 0.5, 1), True),
    (Moduli.rhombic(1, 8, 0.5, 1), False),      # tau1 = mu
    (Moduli.rhombic(0.5, 3, -1, 1), True),      # lam + mu = 0 with opposite signs: diagonal, distinct
    (Moduli.exceptional(math.sqrt(3) - 1, 1), False),
])
def test_distinct_eigenvalues(m, ok):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = check_distinct_eigenvalues(m)
    assert res.ok is ok
    if not ok and res.degenerate_angles:
        for phi in res.degenerate_angles:
            assert assemble_symbol(m, phi).gap < 1e-8 * m.scale


def test_generic_crossing_between_grid_samples():
    # eigenvalues cross at 7pi/12, which no power-of-two grid hits
    m = Moduli(2.0, 2.0, 0.0, 0.5, 0.5, 2.0)
    res = check_distinct_eigenvalues(m)
    assert not res.ok
    assert any(abs(phi - 7 * math.pi / 12) < 1e-12 for phi in res.degenerate_angles)


def test_form_zeros_identically_zero_and_roots():
    assert form_zeros(0.0, 0.0, 0.0) is None
    z = form_zeros(1.0, 0.0, -1.0)  # cos^2 - sin^2
    np.testing.assert_allclose(sorted(z), [k * np.pi / 4 for k in (1, 3, 5, 7)], atol=1e-12)


def test_medium_json_round_trip(tmp_path):
    m = Moduli.rhombic(4, 8, 0.5, 1, gamma=0.3, kappa=2)
    p = tmp_path / "m.json"
    p.write_text(json.dumps(m.to_dict()))
    assert load_medium(p) == m


@pytest.mark.parametrize("doc, msg", [
    ({"tau1": 1}, "missing"),
    ({**Moduli.cubic(1, 0, 2).to_dict(), "rho": 1}, "unknown"),
    ({**Moduli.cubic(1, 0, 2).to_dict(), "mu": "1"}, "number"),
])
def test_medium_schema_errors(doc, msg):
    with pytest.raises(ValueError, match=msg):
        Moduli.from_dict(doc)


def test_thermal_parameters_must_be_positive():
    with pytest.raises(ValueError):
        Moduli.cubic(1, 0, 2, gamma=0.0)
    with pytest.raises(ValueError):
        Moduli.cubic(1, 0, 2, kappa=-1.0)


def test_scaling_preserves_admissibility():
    m = Moduli(2, 3, 0.5, 0.1, -0.2, 1)
    assert admissible(m) and admissible(m.scaled(1e3))
