"""Time evolution of the temperature fluctuation.

The tendency assembles -u.grad_h theta' - w dtheta_bar/dz (+ eps^2 lap_h theta')
with the velocity solved exactly per mode and the quadratic products formed in
physical space under the 2/3 rule.  Two integrators are provided: classical
RK4 on the full tendency, and an integrating-factor RK4 that treats the
horizontal diffusion term exactly per mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft as sfft

from .grid import (
    TWO_PI,
    Grid,
    PhysicalField,
    SpectralField,
    _lattice,
    forward_transform,
    lp_norm,
)
from .meanstate import mean_gradient
from .velocity import velocity_symbols


class BlowUpError(RuntimeError):
    """Raised when the state leaves the finite range; carries the last good state."""

    def __init__(self, message: str, last_state: "SimState"):
        super().__init__(message)
        self.last_state = last_state


@dataclass(frozen=True)
class InitialSpec:
    """Initial temperature fluctuation.

    kind "analytic-single-mode": amplitude * sin(k . x) for mode = (k1,k2,k3).
    kind "random-band-limited": seeded random field supported on the max-norm
    band kmin <= max|k_i| <= kmax, normalized so its L^6 norm is `amplitude`.
    """

    kind: str = "random-band-limited"
    mode: tuple[int, int, int] = (1, 0, 0)
    amplitude: float = 0.1
    band: tuple[int, int] = (1, 6)
    seed: int = 0


@dataclass(frozen=True)
class SimConfig:
    grid: Grid
    epsilon: float = 0.0
    dt: float | str = "auto"
    t_end: float = 1.0
    integrator: str = "if-rk4"
    dealias: bool = True
    initial: InitialSpec = field(default_factory=InitialSpec)
    diagnostics_every: int = 1
    seed: int = 0
    safety: float = 0.5
    mode_cap: int | None = None  # Galerkin truncation |k_i| <= mode_cap

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.integrator not in ("rk4", "if-rk4"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.diagnostics_every < 1:
            raise ValueError("diagnostics_every must be a positive integer")


@dataclass(frozen=True)
class SimState:
    t: float
    theta: SpectralField


@lru_cache(maxsize=32)
def _workspace(grid: Grid, dealias: bool, mode_cap: int | None):
    kx, ky, kz, kh2, nyquist, two_thirds = _lattice(grid.nx, grid.ny, grid.nz)
    mu, mv, mw, _, _ = velocity_symbols(grid)
    ikx = np.where(kx == -(grid.nx // 2), 0.0, 1j * kx.astype(np.float64))
    iky = np.where(ky == -(grid.ny // 2), 0.0, 1j * ky.astype(np.float64))
    mask = np.broadcast_to(True, grid.shape)
    if dealias:
        mask = mask & two_thirds
    if mode_cap is not None:
        mask = mask & (
            (np.abs(kx) <= mode_cap)
            & (np.abs(ky) <= mode_cap)
            & (np.abs(kz) <= mode_cap)
        )
    lap_h = np.broadcast_to(-kh2, grid.shape)
    return mu, mv, mw, ikx, iky, mask, lap_h


def _advective_rhs(c: np.ndarray, grid: Grid, ws) -> np.ndarray:
    """Spectral tendency of -u.grad_h theta' - w dtheta_bar/dz."""
    mu, mv, mw, ikx, iky, mask, _ = ws
    stack = np.empty((4,) + grid.shape, dtype=np.complex128)
    stack[0] = c
    stack[1] = mu * c
    stack[2] = mv * c
    stack[3] = mw * c
    theta_p, u_p, v_p, w_p = sfft.ifftn(stack * grid.size, axes=(1, 2, 3)).real
    gstack = np.empty((2,) + grid.shape, dtype=np.complex128)
    gstack[0] = ikx * c
    gstack[1] = iky * c
    tx_p, ty_p = sfft.ifftn(gstack * grid.size, axes=(1, 2, 3)).real
    flux = np.mean(theta_p * w_p, axis=(0, 1))
    dtz = mean_gradient(flux)
    nl = u_p * tx_p + v_p * ty_p + w_p * dtz[np.newaxis, np.newaxis, :]
    out = -sfft.fftn(nl) / grid.size
    out = np.where(mask, out, 0.0)
    out[0, 0, :] = 0.0
    return out


def tendency(theta: SpectralField, epsilon: float, dealias: bool = True) -> SpectralField:
    """Full spectral tendency of the evolution equation."""
    if not theta.has_zero_horizontal_mean(tol=1e-10):
        raise ValueError("tendency requires a zero-horizontal-mean field")
    ws = _workspace(theta.grid, dealias, None)
    out = _advective_rhs(theta.coeffs, theta.grid, ws)
    if epsilon != 0.0:
        out = out + epsilon**2 * ws[6] * theta.coeffs
        out[0, 0, :] = 0.0
    return SpectralField(theta.grid, out)


def _rk4_step(c: np.ndarray, dt: float, eps: float, grid: Grid, ws):
    lap_h = ws[6]

    def rhs(x):
        out = _advective_rhs(x, grid, ws)
        if eps != 0.0:
            out = out + eps**2 * lap_h * x
        return out

    k1 = rhs(c)
    k2 = rhs(c + 0.5 * dt * k1)
    k3 = rhs(c + 0.5 * dt * k2)
    k4 = rhs(c + dt * k3)
    return c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _ifrk4_step(c: np.ndarray, dt: float, eps: float, grid: Grid, ws):
    # integrating factor for the diffusive term; RK4 on the advective remainder
    lap_h = ws[6]
    e_half = np.exp(0.5 * dt * eps**2 * lap_h)
    e_full = e_half * e_half
    n1 = _advective_rhs(c, grid, ws)
    u2 = e_half * (c + 0.5 * dt * n1)
    n2 = _advective_rhs(u2, grid, ws)
    u3 = e_half * c + 0.5 * dt * n2
    n3 = _advective_rhs(u3, grid, ws)
    u4 = e_full * c + dt * e_half * n3
    n4 = _advective_rhs(u4, grid, ws)
    return e_full * c + (dt / 6.0) * (
        e_full * n1 + 2.0 * e_half * (n2 + n3) + n4
    )


def step(state: SimState, dt: float, config: SimConfig) -> SimState:
    """Advance one time step; aborts with a blow-up report on NaN/Inf."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    ws = _workspace(config.grid, config.dealias, config.mode_cap)
    c = state.theta.coeffs
    if config.integrator == "rk4":
        out = _rk4_step(c, dt, config.epsilon, config.grid, ws)
    else:
        out = _ifrk4_step(c, dt, config.epsilon, config.grid, ws)
    out[0, 0, :] = 0.0
    if not np.all(np.isfinite(out)):
        raise BlowUpError(
            f"solution blew up at t = {state.t + dt:.6g}", state
        )
    return SimState(state.t + dt, SpectralField(config.grid, out))


def cfl_dt(state: SimState, safety: float, config: SimConfig) -> float:
    """Advective CFL time step with an explicit-diffusion cap for rk4."""
    if not (0.0 < safety <= 1.0):
        raise ValueError("safety must lie in (0, 1]")
    from .grid import inverse_transform
    from .velocity import solve_velocity

    grid = config.grid
    default_cap = 0.1
    caps = [default_cap]
    if config.integrator == "rk4" and config.epsilon > 0:
        kh2_max = (grid.nx // 2) ** 2 + (grid.ny // 2) ** 2
        caps.append(2.8 / (config.epsilon**2 * kh2_max))
    d = solve_velocity(state.theta)
    umax = lp_norm(inverse_transform(d.u), np.inf)
    vmax = lp_norm(inverse_transform(d.v), np.inf)
    dx = TWO_PI / grid.nx
    dy = TWO_PI / grid.ny
    if umax > 0:
        caps.append(dx / umax)
    if vmax > 0:
        caps.append(dy / vmax)
    return safety * min(caps)


def build_initial(grid: Grid, spec: InitialSpec, dealias_field: bool = True) -> SpectralField:
    """Construct the initial spectral state with zero horizontal mean."""
    from .grid import dealias as dealias_op
    from .grid import inverse_transform

    if spec.kind == "analytic-single-mode":
        X, Y, Z = grid.meshgrid()
        k1, k2, k3 = spec.mode
        values = spec.amplitude * np.sin(k1 * X + k2 * Y + k3 * Z)
        F = forward_transform(PhysicalField(grid, values))
    elif spec.kind == "random-band-limited":
        rng = np.random.default_rng(spec.seed)
        F = forward_transform(PhysicalField(grid, rng.standard_normal(grid.shape)))
        kx, ky, kz = grid.wavenumbers()
        kmax_abs = np.maximum(np.maximum(np.abs(kx), np.abs(ky)), np.abs(kz))
        band = (kmax_abs >= spec.band[0]) & (kmax_abs <= spec.band[1])
        F = SpectralField(grid, np.where(band, F.coeffs, 0.0))
    else:
        raise ValueError(f"unknown initial kind {spec.kind!r}")
    c = F.coeffs.copy()
    c[0, 0, :] = 0.0
    F = SpectralField(grid, c)
    if dealias_field:
        F = dealias_op(F)
    if spec.kind == "random-band-limited":
        l6 = lp_norm(inverse_transform(F), 6.0)
        if l6 > 0:
            F = SpectralField(grid, F.coeffs * (spec.amplitude / l6))
    return F


@dataclass
class Trajectory:
    """Result of one run: sampled states and diagnostics at fixed cadence."""

    config: SimConfig
    dt: float
    times: list[float]
    reports: list  # InvariantReport, see invariants module
    states: list[SimState]
    final_state: SimState


def run(
    config: SimConfig,
    store_states: bool = False,
    compute_reports: bool = True,
) -> Trajectory:
    """Integrate to t_end, sampling diagnostics every `diagnostics_every` steps."""
    from .invariants import compute_report

    theta0 = build_initial(config.grid, config.initial, config.dealias)
    if config.mode_cap is not None:
        ws = _workspace(config.grid, config.dealias, config.mode_cap)
        theta0 = SpectralField(config.grid, np.where(ws[5], theta0.coeffs, 0.0))
    state = SimState(0.0, theta0)

    if config.dt == "auto":
        dt = cfl_dt(state, config.safety, config)
    else:
        dt = float(config.dt)
    n_steps = max(1, math.ceil(config.t_end / dt - 1e-12)) if config.t_end > 0 else 0
    if n_steps > 0:
        dt = config.t_end / n_steps

    times = [0.0]
    reports = [compute_report(state, config.epsilon)] if compute_reports else []
    states = [state] if store_states else []

    for i in range(1, n_steps + 1):
        state = step(state, dt, config)
        if i % config.diagnostics_every == 0 or i == n_steps:
            times.append(state.t)
            if compute_reports:
                reports.append(compute_report(state, config.epsilon))
            if store_states:
                states.append(state)
    return Trajectory(config, dt, times, reports, states, state)
