import numpy as np
import pytest

from drivenchain.semiclassical import (SemiclassicalParams, classical_rhs,
                                       default_grid_axes, energy,
                                       integrate_trajectory, monodromy_matrix,
                                       monodromy_trace, potential_contours,
                                       stability_grid)
from drivenchain.units import TWO_PI, rad_ns_from_mhz

J = rad_ns_from_mhz(11.5)
D0 = 3 * J


def make_params(delta1=D0, omega=None, order=3):
    base = SemiclassicalParams(12, D0, delta1, 1.0, J)
    target = omega if omega is not None else \
        2 * base.small_oscillation_frequency / order
    return SemiclassicalParams(12, D0, delta1, target, J)


def test_small_oscillation_frequency_formula():
    params = make_params()
    expected = (4 * np.pi / 12) * np.sqrt(2 * D0 * J)
    assert params.small_oscillation_frequency == pytest.approx(expected)
    assert params.effective_planck == pytest.approx(TWO_PI / 12)
    # the operating drive equals two thirds of twice Omega
    assert params.drive_angular_frequency == pytest.approx(2 * expected / 3)


def test_fixed_point_has_zero_velocity():
    params = make_params()
    dq, dp = classical_rhs(TWO_PI, 0.0, 1.3, params)
    assert dq == pytest.approx(0.0, abs=1e-15)
    assert dp == pytest.approx(0.0, abs=1e-12)


def test_energy_conservation_without_drive():
    params = make_params(delta1=0.0)
    period = TWO_PI / params.small_oscillation_frequency
    traj = integrate_trajectory(TWO_PI + 0.8, 0.3, 100 * period, period / 256,
                                params)
    e = energy(traj.q, traj.p, params)
    scale = abs(params.dc_amplitude) + 2 * abs(params.hopping)
    assert np.abs(e - e[0]).max() / scale < 1e-6


def test_stationary_fixed_point_trajectory():
    params = make_params()
    traj = integrate_trajectory(TWO_PI, 0.0, 200.0, 0.05, params)
    assert np.abs(traj.q - TWO_PI).max() < 1e-12
    assert np.abs(traj.p).max() < 1e-12


def test_measured_small_oscillation_frequency():
    # zero crossings of a tiny-amplitude orbit against the formula
    params = make_params(delta1=0.0)
    omega_formula = params.small_oscillation_frequency
    period = TWO_PI / omega_formula
    traj = integrate_trajectory(TWO_PI + 1e-5, 0.0, 40 * period, period / 512,
                                params)
    x = traj.q - TWO_PI
    flips = np.where(np.sign(x[:-1]) != np.sign(x[1:]))[0]
    crossing_times = (traj.times[flips]
                      - x[flips] * (traj.times[flips + 1] - traj.times[flips])
                      / (x[flips + 1] - x[flips]))
    measured = TWO_PI / (2 * np.mean(np.diff(crossing_times)))
    assert abs(measured - omega_formula) / omega_formula < 1e-3


def test_trajectory_step_halving_convergence():
    params = make_params(delta1=0.0)
    period = TWO_PI / params.small_oscillation_frequency
    coarse = integrate_trajectory(TWO_PI + 0.5, 0.0, 10 * period, period / 256,
                                  params)
    fine = integrate_trajectory(TWO_PI + 0.5, 0.0, 10 * period, period / 512,
                                params)
    assert abs(coarse.q[-1] - fine.q[-1]) < 1e-6
    assert abs(coarse.p[-1] - fine.p[-1]) < 1e-6


def test_stroboscopic_subset():
    params = make_params()
    period = params.drive_period
    traj = integrate_trajectory(TWO_PI + 0.5, 0.0, 10 * period, period / 64,
                                params)
    strobe = traj.stroboscopic(period)
    assert len(strobe.times) == 11
    assert np.allclose(strobe.times / period, np.arange(11))


def test_static_monodromy_closed_form():
    # constant frequency: tr M = 2 cos(Omega T), always stable
    for factor in (0.6, 1.0, 1.7):
        params = make_params(delta1=0.0)
        omega_small = params.small_oscillation_frequency
        omega_drive = factor * omega_small
        params = make_params(delta1=0.0, omega=omega_drive)
        m = monodromy_matrix(omega_drive, 0.0, params, steps_per_period=4096)
        expected = 2 * np.cos(omega_small * TWO_PI / omega_drive)
        assert np.trace(m) == pytest.approx(expected, abs=1e-8)
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-10)
        assert monodromy_trace(omega_drive, 0.0, params) <= 2.0 + 1e-7


def test_primary_parametric_instability():
    # drive at 2*Omega with small amplitude: inside the widest tongue
    params = make_params(delta1=0.0)
    omega_drive = 2 * params.small_oscillation_frequency
    assert monodromy_trace(omega_drive, 0.15 * D0, params) > 2.0


def test_determinant_exact_where_representable():
    # shear-composition stepping keeps det M = 1 to roundoff wherever the
    # solutions stay O(1); exponentially grown cells are classified
    # unstable and their determinant is preserved structurally instead
    params = make_params()
    omega_small = params.small_oscillation_frequency
    for omega in (0.02 * omega_small, 0.4 * omega_small, 2.9 * omega_small):
        for delta1 in (0.0, D0, 2 * D0):
            m = monodromy_matrix(omega, delta1, params)
            if np.abs(m).max() <= 8.0:
                assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-10)
            else:
                assert abs(np.trace(m)) > 2.0


def test_stability_grid_zero_drive_row_stable():
    params = make_params()
    omega_values, delta1_values = default_grid_axes(params, 40)
    grid = stability_grid(omega_values, delta1_values, params,
                          steps_per_period=512)
    assert np.all(grid.stable[:, 0])           # delta1 = 0 column
    assert grid.abs_trace.shape == (40, 40)


def test_instability_tongues_at_resonant_frequencies():
    # tongues touch the small-amplitude axis at omega = 2*Omega/m; detect
    # unstable cells within one default-grid cell of each location (higher
    # resonances need a bigger amplitude before exceeding the cushion:
    # tongue width shrinks like the m-th power of the modulation)
    params = make_params()
    omega_small = params.small_oscillation_frequency
    cell = 3 * omega_small / 200
    for m, delta1_frac in ((1, 0.1), (2, 0.4), (3, 0.5)):
        center = 2 * omega_small / m
        local = np.linspace(center - cell, center + cell, 41)
        grid = stability_grid(local, [delta1_frac * D0], params,
                              steps_per_period=2048)
        assert np.any(~grid.stable), f"no instability near m={m}"


def test_classification_invariant_under_step_halving():
    params = make_params()
    omega_small = params.small_oscillation_frequency
    omega_values = np.linspace(0.3, 2.8, 31) * omega_small
    delta1_values = np.linspace(0.0, 2 * D0, 11)
    coarse = stability_grid(omega_values, delta1_values, params, 1024)
    fine = stability_grid(omega_values, delta1_values, params, 2048)
    assert np.array_equal(coarse.stable, fine.stable)


def test_grid_refinement_subsampling_exact():
    params = make_params()
    omega_values = np.linspace(0.5, 2.5, 9) * params.small_oscillation_frequency
    delta1_values = np.linspace(0.0, 2 * D0, 7)
    fine = stability_grid(omega_values, delta1_values, params, 256)
    coarse = stability_grid(omega_values[::2], delta1_values[::3], params, 256)
    assert np.array_equal(coarse.abs_trace, fine.abs_trace[::2, ::3])


def test_single_cell_matches_grid_cell():
    params = make_params()
    omega = 1.3 * params.small_oscillation_frequency
    delta1 = 0.7 * D0
    grid = stability_grid([omega], [delta1], params, 512)
    single = monodromy_trace(omega, delta1, params, 512)
    assert grid.abs_trace[0, 0] == single


def test_operating_point_adjacent_to_tongue():
    # the resonance choice m=3 with full drive amplitude sits inside or
    # within one default-grid cell of the third instability tongue
    params = make_params()
    omega_op = params.drive_angular_frequency
    cell = 3 * params.small_oscillation_frequency / 200
    omegas = [omega_op - cell, omega_op, omega_op + cell]
    grid = stability_grid(omegas, [D0], params, 2048)
    assert np.any(~grid.stable)


def test_potential_contour_extrema():
    params = make_params()
    q = np.linspace(0.0, TWO_PI, 65)
    p = np.linspace(-np.pi, np.pi, 65)
    field = potential_contours(q, p, params)
    assert field.max() == pytest.approx(D0 + 2 * J, rel=1e-12)
    # maximum at Q = 0 mod 2*pi, P = 0
    i, j = np.unravel_index(field.argmax(), field.shape)
    assert q[i] in (0.0, TWO_PI) or q[i] == pytest.approx(TWO_PI)
    assert p[j] == pytest.approx(0.0, abs=1e-12)
    # saddle value at (pi, 0)
    iq = np.argmin(np.abs(q - np.pi))
    jp = np.argmin(np.abs(p))
    assert field[iq, jp] == pytest.approx(-D0 + 2 * J, rel=1e-12)


def test_potential_contour_symmetry():
    params = make_params()
    q = np.linspace(-np.pi, np.pi, 33)
    p = np.linspace(-np.pi, np.pi, 33)
    field = potential_contours(q, p, params)
    assert np.allclose(field, field[::-1, ::-1])


def test_params_validation():
    with pytest.raises(ValueError):
        SemiclassicalParams(11, D0, D0, 1.0, J)      # odd N
    with pytest.raises(ValueError):
        SemiclassicalParams(12, -D0, D0, 1.0, J)     # negative product
    with pytest.raises(ValueError):
        SemiclassicalParams(12, D0, D0, 0.0, J)      # zero drive frequency
