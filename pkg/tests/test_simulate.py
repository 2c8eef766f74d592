import json
import math

import numpy as np
import pytest

from conftest import decoupled, random_generic
from thermoelastic.errors import InsufficientData, UnstableStep
from thermoelastic.media import Moduli, symbol_at
from thermoelastic.simulate import (
    ModeState, SimConfig, SpectralGrid, cutoff_profile, evolve, fit_exponent, load_config,
    mode_energy, mode_rhs, rk4_step, sqrt_symbol,
)


def random_state(rng, n):
    c = lambda *shape: rng.normal(size=shape) + 1j * rng.normal(size=shape)  # noqa: E731
    return ModeState(c(n, 2), c(n, 2), c(n))


def test_decoupled_heat_mode_decays_exponentially():
    m = decoupled(Moduli.isotropic(1, 1))
    xi = np.array([[1.0, 0.0]])
    s = ModeState(np.zeros((1, 2), complex), np.zeros((1, 2), complex), np.ones(1, complex))
    dt = 1e-3
    for _ in range(1000):
        s = rk4_step(m, xi, s, dt)
    assert abs(s.theta[0] - math.exp(-1.0)) < 1e-12
    assert np.all(s.U == 0) and np.all(s.W == 0)


def test_rhs_matches_written_system():
    m = Moduli(2, 3, 0.5, 0.1, -0.2, 1, gamma=0.7, kappa=1.3)
    rng = np.random.default_rng(0)
    xi = rng.normal(size=(5, 2))
    s = random_state(rng, 5)
    d = mode_rhs(m, xi, s)
    for k in range(5):
        A = symbol_at(m, *xi[k]).as_array()
        np.testing.assert_allclose(d.U[k], s.W[k])
        np.testing.assert_allclose(d.W[k], -A @ s.U[k] - 1j * m.gamma * xi[k] * s.theta[k])
        np.testing.assert_allclose(
            d.theta[k], -m.kappa * (xi[k] @ xi[k]) * s.theta[k] - 1j * m.gamma * (xi[k] @ s.W[k]))


def test_energy_identity_first_order_in_dt():
    rng = np.random.default_rng(1)
    m = random_generic(rng)
    xi = rng.normal(size=(1000, 2))
    s = random_state(rng, 1000)
    exact = -2 * m.kappa * np.sum(xi ** 2, axis=1) * np.abs(s.theta) ** 2
    e0 = mode_energy(m, xi, s)
    errs = []
    for dt in (1e-3, 5e-4):
        fd = (mode_energy(m, xi, rk4_step(m, xi, s, dt)) - e0) / dt
        errs.append(np.abs(fd - exact) / (np.abs(exact) + e0))
    # first-order difference quotient: halving dt halves the error
    ratio = np.median(errs[0] / errs[1])
    assert 1.8 < ratio < 2.2
    assert np.max(errs[1]) < 1e-2


def test_conservative_flow_without_coupling():
    rng = np.random.default_rng(2)
    m = decoupled(random_generic(rng))
    # frequencies in the simulated band |xi| <= 2; RK4 loses about (omega dt)^6 / 72 per step
    ang = rng.uniform(0, 2 * np.pi, 50)
    rad = rng.uniform(0.5, 2.0, 50)
    xi = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=-1)
    s = random_state(rng, 50)
    s.theta[:] = 0
    e0 = mode_energy(m, xi, s)
    dt = 0.002
    for _ in range(50_000):  # T = 100
        s = rk4_step(m, xi, s, dt)
    assert np.max(np.abs(mode_energy(m, xi, s) / e0 - 1)) < 1e-8


def test_sqrt_symbol_squares_back():
    m = Moduli(2, 3, 0.5, 0.1, -0.2, 1)
    xi = np.random.default_rng(3).normal(size=(20, 2))
    A = symbol_at(m, xi[:, 0], xi[:, 1])
    R = sqrt_symbol(A).as_array()
    np.testing.assert_allclose(R @ R, A.as_array(), atol=1e-12)


def test_fit_exponent_on_exact_power_laws():
    t = np.geomspace(1, 100, 40)
    assert fit_exponent(t, t ** -0.5, (1, 100)).exponent == pytest.approx(0.5, abs=1e-12)
    f = fit_exponent(t, (1 + t) ** (-1 / 3), (10, 100))
    assert abs(f.exponent - 1 / 3) < 0.02


def test_fit_exponent_rejects_bad_windows():
    t = np.geomspace(1, 100, 40)
    with pytest.raises(InsufficientData):
        fit_exponent(t, t ** -0.5, (0.5, 100))
    with pytest.raises(InsufficientData):
        fit_exponent(t, t ** -0.5, (90, 100))


def test_cutoff_profile_is_even_and_real():
    cfg = SimConfig(n=64, length=32 * math.pi, center=0.4, half_width=0.5)
    grid = SpectralGrid.build(cfg.n, cfg.length)
    w = cutoff_profile(grid, cfg)
    # w(-xi) = w(xi): index -k maps to (n - k) mod n
    flipped = np.roll(w[::-1, ::-1], 1, axis=(0, 1))
    np.testing.assert_array_equal(w, flipped)
    assert w[0, 0] == 0 and w.max() > 0.5


def small_config(**kw):
    base = dict(n=64, length=32 * math.pi, r0=0.5, r1=2.0, t_final=24.0, n_samples=24, half_width=0.6)
    base.update(kw)
    return SimConfig(**base)


def test_small_run_is_real_and_dissipative():
    res = evolve(Moduli.cubic(0.5, 0, 1), small_config(center=math.pi / 4))
    assert res.max_imag_ratio < 1e-10
    assert res.max_energy_ratio <= 1 + 1e-8
    assert np.all(res.supnorm > 0)
    assert res.times[0] == 0 and res.times[-1] == pytest.approx(24.0)


def test_oversized_step_is_flagged():
    with pytest.raises(UnstableStep):
        evolve(Moduli.isotropic(1, 1), small_config(c_stab=4.0))


def test_dt_above_bound_rejected():
    with pytest.raises(ValueError, match="stability"):
        evolve(Moduli.isotropic(1, 1), small_config(dt=10.0))


def test_config_round_trip(tmp_path):
    cfg = small_config(seed="theta", fit_window=(2, 20))
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg.to_dict()))
    assert load_config(p) == cfg


def test_config_validation():
    with pytest.raises(ValueError, match="unknown"):
        SimConfig.from_dict({"grid": 64})
    with pytest.raises(ValueError):
        SimConfig(seed="pressure")
    with pytest.raises(ValueError):
        SimConfig(n=63)


def test_result_csv(tmp_path):
    res = evolve(Moduli.isotropic(1, 1), small_config())
    p = tmp_path / "r.csv"
    res.to_csv(p)
    rows = p.read_text().splitlines()
    assert rows[0] == "t,supnorm" and len(rows) == len(res.times) + 1
    summary = res.summary()
    assert json.loads(json.dumps(summary))["exponent"] == res.fit.exponent
