import numpy as np
import pytest

from rotconv.evolution import (
    BlowUpError,
    InitialSpec,
    SimConfig,
    SimState,
    build_initial,
    cfl_dt,
    run,
    step,
    tendency,
)
from rotconv.grid import (
    PhysicalField,
    SpectralField,
    forward_transform,
    inverse_transform,
    lp_norm,
    spectral_l2,
)



def single_mode_config(grid, amplitude=1.0, **kw):
    init = InitialSpec(kind="analytic-single-mode", mode=(1, 0, 0), amplitude=amplitude)
    return SimConfig(grid=grid, initial=init, **kw)


def test_config_validation(grid16):
    with pytest.raises(ValueError):
        SimConfig(grid=grid16, epsilon=-1.0)
    with pytest.raises(ValueError):
        SimConfig(grid=grid16, integrator="euler")
    with pytest.raises(ValueError):
        SimConfig(grid=grid16, diagnostics_every=0)


def test_tendency_single_horizontal_mode_is_steady(grid32):
    X, _, _ = grid32.meshgrid()
    theta = forward_transform(PhysicalField(grid32, 0.7 * np.sin(X)))
    assert spectral_l2(tendency(theta, 0.0)) < 1e-14
    t_eps = inverse_transform(tendency(theta, 0.2))
    assert np.max(np.abs(t_eps.values + 0.2**2 * 0.7 * np.sin(X))) < 1e-12


def test_tendency_sinx_cosz_closed_form(grid32):
    X, _, Z = grid32.meshgrid()
    theta = forward_transform(PhysicalField(grid32, np.sin(X) * np.cos(Z)))
    t0 = inverse_transform(tendency(theta, 0.0))
    exact = -(1.0 / 16.0) * np.sin(X) * np.cos(Z) * np.cos(2 * Z)
    assert np.max(np.abs(t0.values - exact)) < 1e-13


def test_tendency_zero_field(grid16):
    theta = SpectralField(grid16, np.zeros(grid16.shape, dtype=complex))
    assert spectral_l2(tendency(theta, 0.3)) == 0.0


def test_steady_state_under_stepping(grid32):
    config = single_mode_config(grid32, epsilon=0.0, dt=1e-2, integrator="rk4")
    state = SimState(0.0, build_initial(grid32, config.initial, config.dealias))
    c0 = state.theta.coeffs.copy()
    for _ in range(100):
        state = step(state, 1e-2, config)
    assert np.max(np.abs(state.theta.coeffs - c0)) < 1e-12


def test_ifrk4_exact_diffusion_factor(grid32):
    eps, dt = 0.3, 0.05
    config = single_mode_config(grid32, epsilon=eps, dt=dt, integrator="if-rk4")
    state = SimState(0.0, build_initial(grid32, config.initial, config.dealias))
    before = state.theta.coeffs[1, 0, 0]
    after = step(state, dt, config).theta.coeffs[1, 0, 0]
    assert abs(after - before * np.exp(-(eps**2) * dt)) < 1e-15


def test_one_step_fourth_order(grid32):
    X, _, Z = grid32.meshgrid()
    theta0 = forward_transform(PhysicalField(grid32, np.sin(X) * np.cos(Z)))
    config = SimConfig(grid=grid32, epsilon=0.0, integrator="rk4")

    def advance(dt, n):
        state = SimState(0.0, theta0)
        for _ in range(n):
            state = step(state, dt, config)
        return state.theta.coeffs

    dt = 0.1
    ref = advance(dt / 64.0, 64)
    err_full = np.max(np.abs(advance(dt, 1) - ref))
    err_half = np.max(np.abs(advance(dt / 2.0, 2) - ref))
    ratio = err_full / err_half
    assert 16.0 * 0.8 <= ratio <= 16.0 * 1.2


def test_step_rejects_bad_dt(grid16):
    config = single_mode_config(grid16)
    state = SimState(0.0, build_initial(grid16, config.initial, True))
    with pytest.raises(ValueError):
        step(state, 0.0, config)


def test_blow_up_reported(grid16):
    init = InitialSpec(kind="random-band-limited", band=(1, 4), amplitude=1e160, seed=0)
    config = SimConfig(grid=grid16, epsilon=0.0, integrator="rk4", initial=init)
    state = SimState(0.0, build_initial(grid16, init, True))
    with pytest.raises(BlowUpError) as info:
        step(state, 1e-3, config)
    assert info.value.last_state.t == 0.0


def test_cfl_zero_state_default_cap(grid16):
    theta = SpectralField(grid16, np.zeros(grid16.shape, dtype=complex))
    config = SimConfig(grid=grid16, epsilon=0.0)
    assert cfl_dt(SimState(0.0, theta), 0.5, config) == pytest.approx(0.05)


def test_cfl_advection_limited(grid32):
    # theta = A sin(x) cos(z) has |v|_max = A/2, |u| = 0
    X, _, Z = grid32.meshgrid()
    config = SimConfig(grid=grid32, epsilon=0.0)

    def dt_for(amp):
        theta = forward_transform(PhysicalField(grid32, amp * np.sin(X) * np.cos(Z)))
        return cfl_dt(SimState(0.0, theta), 1.0, config)

    dy = 2.0 * np.pi / grid32.ny
    assert dt_for(20.0) == pytest.approx(dy / 10.0, rel=1e-10)
    assert dt_for(40.0) == pytest.approx(dt_for(20.0) / 2.0, rel=1e-10)


def test_run_t_end_zero(grid16):
    config = single_mode_config(grid16, t_end=0.0)
    traj = run(config)
    assert traj.final_state.t == 0.0
    assert len(traj.times) == 1


def test_run_steady_state(grid32):
    config = single_mode_config(grid32, epsilon=0.0, dt=0.02, t_end=1.0,
                                integrator="rk4")
    traj = run(config, store_states=True)
    diff = traj.final_state.theta.coeffs - traj.states[0].theta.coeffs
    assert np.sqrt(np.sum(np.abs(diff) ** 2)) * np.sqrt(8 * np.pi**3) <= 1e-10


def test_run_deterministic(grid16):
    init = InitialSpec(kind="random-band-limited", band=(1, 4), amplitude=0.5, seed=5)
    config = SimConfig(grid=grid16, epsilon=0.1, dt=0.05, t_end=0.5, initial=init)
    a = run(config)
    b = run(config)
    assert np.array_equal(a.final_state.theta.coeffs, b.final_state.theta.coeffs)
    assert [r.l2 for r in a.reports] == [r.l2 for r in b.reports]


def test_mean_sector_stays_zero(grid16):
    init = InitialSpec(kind="random-band-limited", band=(1, 4), amplitude=1.0, seed=1)
    config = SimConfig(grid=grid16, epsilon=0.05, dt=0.05, t_end=0.5, initial=init)
    traj = run(config, store_states=True)
    for s in traj.states:
        assert np.max(np.abs(s.theta.coeffs[0, 0, :])) == 0.0


def test_z_independent_sector_keeps_flat_mean(grid16):
    # data with only k3 = 0 modes: the flux is z independent, so the mean
    # gradient vanishes identically along the run
    X, Y, _ = grid16.meshgrid()
    values = np.sin(X) + 0.5 * np.sin(X + Y)
    theta = forward_transform(PhysicalField(grid16, values))
    config = SimConfig(grid=grid16, epsilon=0.0, dt=0.02, integrator="rk4")
    state = SimState(0.0, theta)
    from rotconv.invariants import compute_report

    for _ in range(10):
        state = step(state, 0.02, config)
        assert compute_report(state, 0.0).mean_grad_l2 <= 1e-13


def test_l2_decay_random_runs(grid16):
    for eps in (0.0, 0.1):
        init = InitialSpec(kind="random-band-limited", band=(1, 4), amplitude=1.0, seed=9)
        config = SimConfig(grid=grid16, epsilon=eps, dt=0.02, t_end=0.5,
                           integrator="rk4", initial=init)
        traj = run(config)
        l2 = [r.l2 for r in traj.reports]
        for a, b in zip(l2, l2[1:]):
            assert b <= a + 1e-8 * l2[0]


def test_initial_spec_normalization(grid32):
    spec = InitialSpec(kind="random-band-limited", band=(2, 5), amplitude=0.25, seed=3)
    F = build_initial(grid32, spec, True)
    assert abs(lp_norm(inverse_transform(F), 6.0) - 0.25) < 1e-12
    assert np.max(np.abs(F.coeffs[0, 0, :])) == 0.0
    kx, ky, kz = grid32.wavenumbers()
    kmag = np.maximum(np.maximum(np.abs(kx), np.abs(ky)), np.abs(kz))
    outside = (kmag < 2) | (kmag > 5)
    assert np.max(np.abs(np.where(outside, F.coeffs, 0.0))) == 0.0
    with pytest.raises(ValueError):
        build_initial(grid32, InitialSpec(kind="bogus"), True)
