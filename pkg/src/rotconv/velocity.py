"""Exact per-mode diagnostic solve: velocity, stream function and vertical
vorticity from the temperature fluctuation, plus the anisotropic multiplier
family that governs every velocity-from-temperature bound.

The diagnostic relations are linear and diagonal in Fourier space:

    u_hat = -k2 k3 / D * theta_hat,   v_hat = k1 k3 / D * theta_hat,
    w_hat = (k1^2+k2^2)^2 / D * theta_hat,   D = k3^2 + (k1^2+k2^2)^3,

with the horizontal-mean sector (k1 = k2 = 0) excluded throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .grid import (
    DOMAIN_VOLUME,
    Grid,
    PhysicalField,
    SpectralField,
    _lattice,
    dealias,
    forward_transform,
    inverse_transform,
    lp_norm,
)

_TINY = 1e-300


@dataclass(frozen=True)
class VelocityDiagnostics:
    """The five diagnostic fields derived from one temperature fluctuation."""

    u: SpectralField
    v: SpectralField
    w: SpectralField
    psi: SpectralField
    omega: SpectralField


@lru_cache(maxsize=32)
def velocity_symbols(grid: Grid):
    """Per-mode multipliers (mu, mv, mw, mpsi, momega) on the grid lattice.

    Nyquist planes are zeroed: those modes have no conjugate partner under the
    real transform, so odd symbols are ill-defined there.
    """
    kx, ky, kz, kh2, nyquist, _ = _lattice(grid.nx, grid.ny, grid.nz)
    kxf = kx.astype(np.float64)
    kyf = ky.astype(np.float64)
    kzf = kz.astype(np.float64)
    denom = kzf**2 + kh2**3
    keep = np.broadcast_to((kh2 > 0) & ~nyquist, grid.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(keep, -kyf * kzf / np.maximum(denom, _TINY), 0.0)
        mv = np.where(keep, kxf * kzf / np.maximum(denom, _TINY), 0.0)
        mw = np.where(keep, kh2**2 / np.maximum(denom, _TINY), 0.0)
        mpsi = np.where(keep, -1j * kzf / np.maximum(denom, _TINY), 0.0)
        momega = np.where(
            keep, 1j * kzf * kh2 / np.maximum(denom, _TINY), 0.0
        )
    for m in (mu, mv, mw, mpsi, momega):
        m.setflags(write=False)
    return mu, mv, mw, mpsi, momega


def solve_velocity(theta: SpectralField) -> VelocityDiagnostics:
    """Solve the linear diagnostic equations exactly, mode by mode."""
    if not theta.has_zero_horizontal_mean():
        raise ValueError("diagnostic solve requires zero horizontal mean")
    mu, mv, mw, mpsi, momega = velocity_symbols(theta.grid)
    c = theta.coeffs
    g = theta.grid
    return VelocityDiagnostics(
        u=SpectralField(g, mu * c),
        v=SpectralField(g, mv * c),
        w=SpectralField(g, mw * c),
        psi=SpectralField(g, mpsi * c),
        omega=SpectralField(g, momega * c),
    )


def residual_check(
    theta: SpectralField, d: VelocityDiagnostics
) -> tuple[float, float]:
    """Relative spectral residuals of the two diagnostic equations.

    r1 checks psi_z = theta' + lap_h w, r2 checks -w_z = lap_h omega, both
    restricted to the retained modes (nonzero horizontal mean, non-Nyquist).
    """
    for f in (d.u, d.v, d.w, d.psi, d.omega):
        if f.grid != theta.grid:
            raise ValueError("grid mismatch between theta and diagnostics")
    kx, ky, kz, kh2, nyquist, _ = _lattice(
        theta.grid.nx, theta.grid.ny, theta.grid.nz
    )
    keep = np.broadcast_to((kh2 > 0) & ~nyquist, theta.grid.shape)
    kzf = kz.astype(np.float64)
    res1 = 1j * kzf * d.psi.coeffs - theta.coeffs + kh2 * d.w.coeffs
    res2 = -1j * kzf * d.w.coeffs + kh2 * d.omega.coeffs
    norm = np.sqrt(DOMAIN_VOLUME * np.sum(np.abs(theta.coeffs[keep]) ** 2))
    denom = max(norm, 1e-30)
    r1 = np.sqrt(DOMAIN_VOLUME * np.sum(np.abs(res1[keep]) ** 2)) / denom
    r2 = np.sqrt(DOMAIN_VOLUME * np.sum(np.abs(res2[keep]) ** 2)) / denom
    return float(r1), float(r2)


def spectral_divergence(d: VelocityDiagnostics) -> float:
    """Max per-mode horizontal divergence |k1 u_hat + k2 v_hat|."""
    kx, ky = d.u.grid.wavenumbers()[:2]
    div = kx * d.u.coeffs + ky * d.v.coeffs
    return float(np.max(np.abs(div)))


@dataclass(frozen=True)
class MultiplierSpec:
    """Member of the anisotropic family
    m(k) = (1+k3^2)^a (k1^2+k2^2)^b / ((k3^2)^c + (k1^2+k2^2)^d),
    zero on the horizontal-mean sector. Exponents are exact rationals so the
    boundedness hypothesis a/c + b/d <= 1 can be decided exactly.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @staticmethod
    def make(a, b, c, d) -> "MultiplierSpec":
        return MultiplierSpec(Fraction(a), Fraction(b), Fraction(c), Fraction(d))


def hypothesis_check(spec: MultiplierSpec) -> bool:
    """Exact rational check of the boundedness hypothesis a/c + b/d <= 1."""
    if spec.c <= 0 or spec.d <= 0:
        raise ValueError("hypothesis requires c > 0 and d > 0")
    return spec.a / spec.c + spec.b / spec.d <= 1


def multiplier_value(spec: MultiplierSpec, k) -> float:
    """Closed-form evaluation at one integer wavenumber triple."""
    k1, k2, k3 = k
    kh2 = float(k1) ** 2 + float(k2) ** 2
    if kh2 == 0.0:
        return 0.0
    num = (1.0 + float(k3) ** 2) ** float(spec.a) * kh2 ** float(spec.b)
    den = (float(k3) ** 2) ** float(spec.c) + kh2 ** float(spec.d)
    return num / den


def multiplier_array(spec: MultiplierSpec, grid: Grid) -> np.ndarray:
    """The symbol evaluated on the whole grid lattice."""
    kx, ky, kz, kh2, _, _ = _lattice(grid.nx, grid.ny, grid.nz)
    kzf = kz.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        num = (1.0 + kzf**2) ** float(spec.a) * np.where(kh2 > 0, kh2, 1.0) ** float(
            spec.b
        )
        den = (kzf**2) ** float(spec.c) + kh2 ** float(spec.d)
        out = np.where(kh2 > 0, num / np.maximum(den, _TINY), 0.0)
    return np.broadcast_to(out, grid.shape)


def lattice_sup(spec: MultiplierSpec, K: int) -> float:
    """Brute-force max of the multiplier over all |k_i| <= K."""
    if K < 8:
        raise ValueError(f"K must be >= 8, got {K}")
    k1 = np.arange(0, K + 1, dtype=np.float64).reshape(-1, 1)
    k2 = np.arange(0, K + 1, dtype=np.float64).reshape(1, -1)
    kh2 = k1**2 + k2**2
    kh2 = np.where(kh2 > 0, kh2, np.nan)  # exclude the horizontal-mean sector
    best = 0.0
    # the multiplier depends only on |k1|, |k2|, k3^2: scan k3 >= 0
    for k3 in range(0, K + 1):
        num = (1.0 + float(k3) ** 2) ** float(spec.a) * kh2 ** float(spec.b)
        den = (float(k3) ** 2) ** float(spec.c) + kh2 ** float(spec.d)
        m = num / den
        best = max(best, float(np.nanmax(m)))
    return best


def empirical_lp_ratio(
    spec: MultiplierSpec,
    p: float,
    trials: int,
    seed: int,
    grid: Grid | None = None,
) -> float:
    """Max of ||m f||_p / ||f||_p over seeded random band-limited fields.

    A numerical lower bound for the multiplier's L^p operator norm; reported
    for regression tracking, nothing is asserted about tightness.
    """
    if not (1.0 < p < np.inf):
        raise ValueError(f"p must lie in (1, inf), got {p}")
    if grid is None:
        grid = Grid(32, 32, 32)
    rng = np.random.default_rng(seed)
    sym = multiplier_array(spec, grid)
    best = 0.0
    for _ in range(trials):
        f = rng.standard_normal(grid.shape)
        F = dealias(forward_transform(PhysicalField(grid, f)))
        c = F.coeffs.copy()
        c[0, 0, :] = 0.0  # the family is zero on the horizontal-mean sector
        F = SpectralField(grid, c)
        denom = lp_norm(inverse_transform(F), p)
        if denom == 0.0:
            continue
        num = lp_norm(inverse_transform(SpectralField(grid, sym * F.coeffs)), p)
        best = max(best, num / denom)
    return best


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spec: MultiplierSpec
    source_anchor: str


# Named members of the family reused by the runtime diagnostics.  Exponents
# are the exact rationals of the corresponding velocity-from-temperature
# bounds; all entries satisfy the boundedness hypothesis.
CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry(
        "w_velocity",
        MultiplierSpec.make(0, 2, 1, 3),
        "vertical velocity symbol w_hat / theta_hat",
    ),
    CatalogEntry(
        "w_supz_l3_sq",
        MultiplierSpec.make("5/9", "13/3", 2, 6),
        "squared symbol bounding the level-wise L3 norm of w by the L2 norm of theta",
    ),
    CatalogEntry(
        "w_l3",
        MultiplierSpec.make("1/4", "13/6", 1, 3),
        "symbol bounding the level-wise L6 norm of w by the L3 norm of theta",
    ),
    CatalogEntry(
        "u_l103",
        MultiplierSpec.make("3/5", "6/5", 1, 3),
        "majorant bounding the L10/3 norm of u by the weak dual norm of theta",
    ),
    CatalogEntry(
        "grad_u_l6",
        MultiplierSpec.make("6/5", "12/5", 2, 6),
        "squared majorant bounding the sup norm of horizontal velocity gradients by the L6 norm of theta",
    ),
    CatalogEntry(
        "dual_w",
        MultiplierSpec.make("1/3", 2, 1, 3),
        "symbol bounding the smoothed weak norm of w by the weak dual norm of theta",
    ),
)


def catalog_json() -> str:
    entries = [
        {
            "name": e.name,
            "a": str(e.spec.a),
            "b": str(e.spec.b),
            "c": str(e.spec.c),
            "d": str(e.spec.d),
            "source_anchor": e.source_anchor,
        }
        for e in CATALOG
    ]
    return json.dumps({"entries": entries}, indent=2)
