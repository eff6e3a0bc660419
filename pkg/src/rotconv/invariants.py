"""Runtime instantiation of the a priori estimates: norms, energy budget,
anisotropic embedding ratios, Gronwall envelopes and the weak dual norm."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .grid import (
    DOMAIN_VOLUME,
    TWO_PI,
    SpectralField,
    _lattice,
    inverse_transform,
    lp_norm,
    spectral_l2,
)
from .meanstate import heat_flux, mean_gradient, profile_l2
from .velocity import solve_velocity


def dual_norm(theta: SpectralField) -> float:
    """Weak norm || A^{-1/2} theta' ||_2, computed mode-wise."""
    if not theta.has_zero_horizontal_mean(tol=1e-10):
        raise ValueError("dual norm requires zero horizontal mean")
    kh2 = _lattice(theta.grid.nx, theta.grid.ny, theta.grid.nz)[3]
    kh2b = np.broadcast_to(kh2, theta.grid.shape)
    sel = kh2b > 0
    s = np.sum(np.abs(theta.coeffs[sel]) ** 2 / kh2b[sel])
    return float(np.sqrt(DOMAIN_VOLUME * s))


def _slice_lp(values: np.ndarray, p: float) -> np.ndarray:
    """L^p([0,2pi]^2) norm at every z level; values shape (nx, ny, nz)."""
    nx, ny = values.shape[:2]
    w2 = TWO_PI**2 / (nx * ny)
    return (np.sum(np.abs(values) ** p, axis=(0, 1)) * w2) ** (1.0 / p)


def embedding_ratios(theta: SpectralField) -> dict[str, float]:
    """Measured LHS/RHS of the named anisotropic embedding estimates."""
    l2 = spectral_l2(theta)
    if l2 == 0.0:
        raise ValueError("embedding ratios are undefined for the zero field")
    grid = theta.grid
    d = solve_velocity(theta)
    theta_p = inverse_transform(theta)
    u_p = inverse_transform(d.u).values
    v_p = inverse_transform(d.v).values
    w_p = inverse_transform(d.w).values
    kx = grid.wavenumbers()[0]
    ikx = np.where(kx == -(grid.nx // 2), 0.0, 1j * kx.astype(np.float64))
    dxu = sfft.ifftn(ikx * d.u.coeffs * grid.size).real
    dxv = sfft.ifftn(ikx * d.v.coeffs * grid.size).real
    dxw = sfft.ifftn(ikx * d.w.coeffs * grid.size).real

    l3 = lp_norm(theta_p, 3.0)
    l6 = lp_norm(theta_p, 6.0)
    uv_mag = np.sqrt(u_p**2 + v_p**2)
    dxuv_mag = np.sqrt(dxu**2 + dxv**2)
    dV = grid.cell_volume
    l6_uv = float((np.sum(uv_mag**6) * dV) ** (1.0 / 6.0))
    l6_w = float((np.sum(np.abs(w_p) ** 6) * dV) ** (1.0 / 6.0))
    return {
        "ratio_417": float(np.max(_slice_lp(w_p, 3.0))) / l2,
        "ratio_426": float(np.max(_slice_lp(w_p, 6.0))) / max(l3, 1e-300),
        "ratio_429u": l6_uv / max(l6, 1e-300),
        "ratio_429w": l6_w / max(l6, 1e-300),
        "ratio_56": float(np.max(dxuv_mag)) / max(l6, 1e-300),
        "ratio_58": (float(np.max(np.abs(dxw))) + float(np.max(np.abs(w_p))))
        / max(l6, 1e-300),
    }


@dataclass(frozen=True)
class InvariantReport:
    """Per-sample record of norms, budget terms and embedding ratios."""

    t: float
    l2: float
    l3: float
    l6: float
    grad_l3: float
    dual: float
    mean_grad_l2: float
    diss_h: float
    diss_z: float
    ratios: dict[str, float]


def compute_report(state, epsilon: float) -> InvariantReport:
    theta = state.theta
    grid = theta.grid
    d = solve_velocity(theta)
    theta_p = inverse_transform(theta)
    w_p = inverse_transform(d.w)
    flux = heat_flux(theta_p, w_p)
    dtz = mean_gradient(flux)
    mean_grad_l2 = profile_l2(dtz)

    kx, ky, kz, kh2, _, _ = _lattice(grid.nx, grid.ny, grid.nz)
    grad2 = DOMAIN_VOLUME * np.sum(kh2 * np.abs(theta.coeffs) ** 2)
    ikx = np.where(kx == -(grid.nx // 2), 0.0, 1j * kx.astype(np.float64))
    iky = np.where(ky == -(grid.ny // 2), 0.0, 1j * ky.astype(np.float64))
    gx = sfft.ifftn(ikx * theta.coeffs * grid.size).real
    gy = sfft.ifftn(iky * theta.coeffs * grid.size).real
    grad_mag = np.sqrt(gx**2 + gy**2)
    grad_l3 = float((np.sum(grad_mag**3) * grid.cell_volume) ** (1.0 / 3.0))

    return InvariantReport(
        t=state.t,
        l2=spectral_l2(theta),
        l3=lp_norm(theta_p, 3.0),
        l6=lp_norm(theta_p, 6.0),
        grad_l3=grad_l3,
        dual=dual_norm(theta),
        mean_grad_l2=mean_grad_l2,
        diss_h=float(epsilon**2 * grad2),
        diss_z=float(4.0 * np.pi**2 * np.sum(dtz**2) * TWO_PI / dtz.size),
        ratios=embedding_ratios(theta) if spectral_l2(theta) > 0 else {},
    )


def budget_residual_series(times: np.ndarray, l2_series: np.ndarray,
                           diss_total: np.ndarray) -> np.ndarray:
    """Centered-difference residual of d/dt (1/2)||theta'||_2^2 + dissipation.

    Regression-tracked; the fourth-order check uses the integrated residual
    from `integrated_budget_residual`.
    """
    times = np.asarray(times, dtype=np.float64)
    e = 0.5 * np.asarray(l2_series, dtype=np.float64) ** 2
    res = np.full_like(e, np.nan)
    if e.size >= 3:
        dedt = (e[2:] - e[:-2]) / (times[2:] - times[:-2])
        res[1:-1] = dedt + diss_total[1:-1]
    return res


def integrated_budget_residual(times, l2_series, diss_total) -> float:
    """|E(T) - E(0) + integral of dissipation|, Simpson-integrated.

    Both the integrator error and the quadrature error are fourth order in
    the step, so halving dt shrinks this residual by about 16x.
    """
    from scipy.integrate import simpson

    times = np.asarray(times, dtype=np.float64)
    e = 0.5 * np.asarray(l2_series, dtype=np.float64) ** 2
    integral = simpson(np.asarray(diss_total, dtype=np.float64), x=times)
    return float(abs(e[-1] - e[0] + integral))


@dataclass(frozen=True)
class EnvelopeCalibration:
    """Gronwall rate constants calibrated from the initial sample."""

    c_l3: float
    c_l6: float
    c_grad: float


def calibrate(report0: InvariantReport) -> EnvelopeCalibration:
    r = report0.ratios
    return EnvelopeCalibration(
        c_l3=max(r.get("ratio_417", 1.0), 1.0) ** 2,
        c_l6=max(r.get("ratio_426", 1.0), 1.0) ** 2,
        c_grad=max(r.get("ratio_56", 1.0), 1.0)
        + max(r.get("ratio_58", 1.0), 1.0) ** 2,
    )


@dataclass(frozen=True)
class EnvelopeSeries:
    env_l3: np.ndarray  # bounds on l3^3
    env_l6: np.ndarray  # bounds on l6^6
    env_grad: np.ndarray  # bounds on grad_l3^3
    pass_l3: np.ndarray
    pass_l6: np.ndarray
    pass_grad: np.ndarray


def _cumtrapz(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


def gronwall_envelopes(
    reports: list[InvariantReport],
    calibration: EnvelopeCalibration | None = None,
    slack: float = 10.0,
) -> EnvelopeSeries:
    """Growth envelopes for the L3, L6 and gradient-L3 norms.

    Envelope form: norm0^q * (1 + slack * expm1(rate integral)); slack = 1
    recovers the plain exponential bound, slack = 0 pins the envelope at the
    initial value (negative control: any growth fails).
    """
    if not reports:
        raise ValueError("empty report series")
    if calibration is None:
        calibration = calibrate(reports[0])
    t = np.array([r.t for r in reports])
    l2 = np.array([r.l2 for r in reports])
    l3 = np.array([r.l3 for r in reports])
    l6 = np.array([r.l6 for r in reports])
    g3 = np.array([r.grad_l3 for r in reports])

    x3 = calibration.c_l3 * l2[0] ** 2 * t
    env3 = l3[0] ** 3 * (1.0 + slack * np.expm1(x3))
    x6 = calibration.c_l6 * _cumtrapz(l3**2, t)
    env6 = l6[0] ** 6 * (1.0 + slack * np.expm1(x6))
    xg = calibration.c_grad * _cumtrapz(l6**2 + 1.0, t)
    envg = g3[0] ** 3 * (1.0 + slack * np.expm1(xg))

    tol = 1e-12
    return EnvelopeSeries(
        env_l3=env3,
        env_l6=env6,
        env_grad=envg,
        pass_l3=l3**3 <= env3 * (1.0 + tol) + tol,
        pass_l6=l6**6 <= env6 * (1.0 + tol) + tol,
        pass_grad=g3**3 <= envg * (1.0 + tol) + tol,
    )
