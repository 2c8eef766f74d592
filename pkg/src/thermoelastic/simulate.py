"""Fourier-space integration of the type-1 thermo-elastic system.

With the transform convention grad -> i xi, every frequency evolves
independently::

    dU/dt     = W
    dW/dt     = -A(xi) U - i gamma xi theta
    dtheta/dt = -kappa |xi|^2 theta - i gamma xi . W

Initial data live in a smooth double cone around a chosen direction and in
a radial band, mirroring a conical cutoff chi(D).  Only seeded frequencies
are integrated; the rest are zero for all time.  Physical fields are
recovered by inverse FFT on an N x N periodic grid and the sup-norm of the
energy vector (U_t, sqrt(A(D)) U, theta) is fitted against t on log-log axes.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import InsufficientData, UnstableStep
from .media import symbol_at
from .spectral import eigen_at, kappa

# RK4 reaches -2.78 on the negative real axis; keep the diffusive bound inside it
RK4_REAL_AXIS = 2.5
SEEDS = ("velocity", "theta", "both")


@dataclass
class SimConfig:
    n: int = 512
    length: float = 256 * math.pi
    center: float = 0.0
    half_width: float = 0.6
    r0: float = 0.5
    r1: float = 2.0
    t_final: float = 128.0
    dt: float | None = None
    c_stab: float = 0.5
    seed: str = "velocity"
    n_samples: int = 48
    fit_window: tuple | None = None

    def __post_init__(self):
        if self.seed not in SEEDS:
            raise ValueError(f"seed must be one of {SEEDS}, got {self.seed!r}")
        if self.n < 8 or self.n % 2:
            raise ValueError("n must be an even integer >= 8")
        if not 0 < self.half_width < math.pi / 2:
            raise ValueError("half_width must lie in (0, pi/2)")
        if not (self.r1 > 0 and self.r0 < self.r1):
            raise ValueError("radial band needs r0 < r1 and r1 > 0")
        if self.t_final <= 1:
            raise ValueError("t_final must exceed 1")
        if self.fit_window is not None:
            self.fit_window = tuple(float(x) for x in self.fit_window)

    @property
    def window(self):
        return self.fit_window or (self.t_final / 4, self.t_final)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self):
        d = dataclasses.asdict(self)
        if d["fit_window"] is not None:
            d["fit_window"] = list(d["fit_window"])
        return d


def load_config(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValueError("config document must be a JSON object")
    return SimConfig.from_dict(data)


@dataclass
class ModeState:
    """Fourier coefficients at a batch of frequencies: U (..., 2), W (..., 2), theta (...)."""

    U: np.ndarray
    W: np.ndarray
    theta: np.ndarray

    def __add__(self, other):
        return ModeState(self.U + other.U, self.W + other.W, self.theta + other.theta)

    def __mul__(self, c):
        return ModeState(self.U * c, self.W * c, self.theta * c)

    __rmul__ = __mul__

    def copy(self):
        return ModeState(self.U.copy(), self.W.copy(), self.theta.copy())


def _apply_symbol(A, U):
    return np.stack([A.a11 * U[..., 0] + A.a12 * U[..., 1],
                     A.a12 * U[..., 0] + A.a22 * U[..., 1]], axis=-1)


def mode_rhs(m, xi, s, A=None):
    """Time derivative of the mode state at frequencies ``xi`` (shape (..., 2))."""
    xi = np.asarray(xi, dtype=float)
    if A is None:
        A = symbol_at(m, xi[..., 0], xi[..., 1])
    xi_sq = xi[..., 0] ** 2 + xi[..., 1] ** 2
    dW = -_apply_symbol(A, s.U) - 1j * m.gamma * xi * s.theta[..., None]
    dtheta = -m.kappa * xi_sq * s.theta - 1j * m.gamma * np.einsum("...i,...i->...", xi, s.W)
    return ModeState(s.W.copy(), dW, dtheta)


def mode_energy(m, xi, s, A=None):
    """|W|^2 + <A U, U> + |theta|^2 per frequency."""
    xi = np.asarray(xi, dtype=float)
    if A is None:
        A = symbol_at(m, xi[..., 0], xi[..., 1])
    AU = _apply_symbol(A, s.U)
    return (np.sum(np.abs(s.W) ** 2, axis=-1)
            + np.real(np.sum(np.conj(s.U) * AU, axis=-1))
            + np.abs(s.theta) ** 2)


def rk4_step(m, xi, s, dt, A=None):
    k1 = mode_rhs(m, xi, s, A)
    k2 = mode_rhs(m, xi, s + k1 * (dt / 2), A)
    k3 = mode_rhs(m, xi, s + k2 * (dt / 2), A)
    k4 = mode_rhs(m, xi, s + k3 * dt, A)
    return s + (k1 + k2 * 2 + k3 * 2 + k4) * (dt / 6)


def sqrt_symbol(A):
    """Principal square root of a batch of symmetric positive 2x2 matrices."""
    sdet = np.sqrt(np.maximum(A.det, 0.0))
    denom = np.sqrt(A.trace + 2 * sdet)
    return type(A)((A.a11 + sdet) / denom, A.a12 / denom, (A.a22 + sdet) / denom)


def _bump(u):
    """exp(1 - 1/(1 - u^2)) on |u| < 1, zero outside; peak value 1."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def seed_direction(m, phi):
    """Eigenvector of A(eta(phi)) with the smaller coupling |eta . r_j|."""
    ep = eigen_at(m, phi)
    eta = np.array([math.cos(phi), math.sin(phi)])
    return ep.r1 if abs(ep.r1 @ eta) <= abs(ep.r2 @ eta) else ep.r2


@dataclass
class SpectralGrid:
    n: int
    length: float
    kx: np.ndarray
    ky: np.ndarray

    @classmethod
    def build(cls, n, length):
        k = 2 * np.pi * np.fft.fftfreq(n, d=length / n)
        kx, ky = np.meshgrid(k, k, indexing="ij")
        return cls(n, length, kx, ky)


def cutoff_profile(grid, cfg):
    """Smooth cone-times-band weight over the frequency grid (real and even in xi)."""
    rho = np.hypot(grid.kx, grid.ky)
    # fold xi and -xi onto the same representative so the weight is exactly even
    flip = (grid.ky < 0) | ((grid.ky == 0) & (grid.kx < 0))
    ang = np.arctan2(np.where(flip, -grid.ky, grid.ky), np.where(flip, -grid.kx, grid.kx))
    delta = np.mod(ang - cfg.center + np.pi / 2, np.pi) - np.pi / 2
    angular = _bump(delta / cfg.half_width)
    if cfg.r0 > 0:
        radial = _bump((rho - 0.5 * (cfg.r0 + cfg.r1)) / (0.5 * (cfg.r1 - cfg.r0)))
    else:
        # band touching the origin: profile peaks at xi = 0
        radial = _bump(rho / cfg.r1)
    w = angular * radial
    w[0, 0] = 0.0
    # Nyquist row/column have no conjugate partner
    w[cfg.n // 2, :] = 0.0
    w[:, cfg.n // 2] = 0.0
    return w


def stability_bound(m, cfg, xi_max):
    phis = np.linspace(0, np.pi, 721)
    c_max = float(np.sqrt(np.max(kappa(m, phis, 2))))
    wave = cfg.c_stab / (c_max * xi_max)
    heat = cfg.c_stab * RK4_REAL_AXIS / (m.kappa * xi_max ** 2)
    return min(wave, heat)


@dataclass
class FitResult:
    exponent: float
    stderr: float
    n_points: int
    window: tuple

    @property
    def ci95(self):
        return (self.exponent - 1.96 * self.stderr, self.exponent + 1.96 * self.stderr)


def fit_exponent(times, values, window):
    """Least-squares decay exponent: minus the slope of log(values) against log(t).

    Raises
    ------
    InsufficientData
        If the window starts before t = 1 or holds fewer than 10 samples.
    """
    t_lo, t_hi = window
    if t_lo < 1:
        raise InsufficientData(f"fit window must start at t >= 1, got {t_lo}")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    sel = (times >= t_lo * (1 - 1e-12)) & (times <= t_hi * (1 + 1e-12)) & (values > 0)
    if np.count_nonzero(sel) < 10:
        raise InsufficientData(f"only {np.count_nonzero(sel)} samples in window [{t_lo}, {t_hi}]")
    res = stats.linregress(np.log(times[sel]), np.log(values[sel]))
    return FitResult(-float(res.slope), float(res.stderr), int(np.count_nonzero(sel)), (t_lo, t_hi))


@dataclass
class SimResult:
    times: np.ndarray
    supnorm: np.ndarray
    fit: FitResult
    config: SimConfig
    dt: float
    n_modes: int
    max_energy_ratio: float
    max_imag_ratio: float
    extra: dict = field(default_factory=dict)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "supnorm"])
            for t, v in zip(self.times, self.supnorm):
                w.writerow([f"{t:.17g}", f"{v:.17g}"])

    def summary(self):
        return {
            "exponent": self.fit.exponent,
            "stderr": self.fit.stderr,
            "ci95": list(self.fit.ci95),
            "fit_points": self.fit.n_points,
            "fit_window": list(self.fit.window),
            "dt": self.dt,
            "n_modes": self.n_modes,
            "max_energy_ratio": self.max_energy_ratio,
            "max_imag_ratio": self.max_imag_ratio,
            "config": self.config.to_dict(),
            **self.extra,
        }


def _sample_steps(n_steps, dt, t_final, n_samples):
    targets = np.geomspace(1.0, t_final, n_samples)
    idx = np.unique(np.clip(np.round(targets / dt).astype(int), 1, n_steps))
    return np.concatenate([[0], idx])


def _supnorm(grid, mask, fields):
    """Sup over the grid of the Euclidean norm of the real physical fields."""
    total = np.zeros((grid.n, grid.n))
    imag = 0.0
    for coeffs in fields:
        full = np.zeros((grid.n, grid.n), dtype=complex)
        full[mask] = coeffs
        phys = np.fft.ifft2(full)
        imag = max(imag, float(np.max(np.abs(phys.imag))))
        total += phys.real ** 2
    sup = float(np.sqrt(np.max(total)))
    return sup, imag / sup if sup > 0 else 0.0


def evolve(m, cfg=None):
    """Integrate the seeded frequencies with classical RK4 and fit the sup-norm decay.

    Raises
    ------
    UnstableStep
        If some mode's energy exceeds ten times its initial value.
    """
    cfg = cfg or SimConfig()
    grid = SpectralGrid.build(cfg.n, cfg.length)
    weight = cutoff_profile(grid, cfg)
    mask = weight > 0
    xi = np.stack([grid.kx[mask], grid.ky[mask]], axis=-1)
    amp = weight[mask]
    n_modes = int(mask.sum())
    if n_modes == 0:
        raise InsufficientData("cutoff selects no frequencies on this grid")

    A = symbol_at(m, xi[:, 0], xi[:, 1])
    xi_max = float(np.max(np.hypot(xi[:, 0], xi[:, 1])))
    bound = stability_bound(m, cfg, xi_max)
    dt = cfg.dt if cfg.dt is not None else bound
    if dt > bound * (1 + 1e-12):
        raise ValueError(f"dt={dt} exceeds the stability bound {bound:.6g}")
    n_steps = int(math.ceil(cfg.t_final / dt))
    dt = cfg.t_final / n_steps

    U = np.zeros((n_modes, 2), dtype=complex)
    W = np.zeros((n_modes, 2), dtype=complex)
    theta = np.zeros(n_modes, dtype=complex)
    if cfg.seed in ("velocity", "both"):
        W[:] = amp[:, None] * seed_direction(m, cfg.center)[None, :]
    if cfg.seed in ("theta", "both"):
        theta[:] = amp
    s = ModeState(U, W, theta)

    root = sqrt_symbol(A)
    e0 = np.maximum(mode_energy(m, xi, s, A), np.finfo(float).tiny)
    sample_at = set(_sample_steps(n_steps, dt, cfg.t_final, cfg.n_samples).tolist())
    times, sups = [], []
    max_ratio, max_imag = 1.0, 0.0
    for step in range(n_steps + 1):
        if step in sample_at:
            rootU = _apply_symbol(root, s.U)
            sup, imag = _supnorm(grid, mask, [s.W[:, 0], s.W[:, 1], rootU[:, 0], rootU[:, 1], s.theta])
            times.append(step * dt)
            sups.append(sup)
            max_imag = max(max_imag, imag)
        if step == n_steps:
            break
        s = rk4_step(m, xi, s, dt, A)
        if step % 16 == 15 or step == n_steps - 1:
            ratio = float(np.max(mode_energy(m, xi, s, A) / e0))
            max_ratio = max(max_ratio, ratio)
            if ratio > 10:
                raise UnstableStep(f"mode energy grew by {ratio:.3g}x at t={(step + 1) * dt:.4g}")

    times = np.array(times)
    sups = np.array(sups)
    fit = fit_exponent(times, sups, cfg.window)
    return SimResult(times, sups, fit, cfg, dt, n_modes, max_ratio, max_imag)
