import numpy as np
import pytest

from drivenchain.basis import build_sector_basis, fock_state
from drivenchain.hamiltonian import SectorModel
from drivenchain.model import ChainSpec, DriveSpec, build_potential
from drivenchain.propagate import (convergence_probe, evolve_state,
                                   floquet_operator, interval_propagator,
                                   unitarity_defect)
from drivenchain.units import rad_ns_from_mhz

J = rad_ns_from_mhz(11.5)
OMEGA = rad_ns_from_mhz(19.665764062481905)


def make_model(n_sites, profile="cosine", dc=3 * J, ac=3 * J, coupling=J,
               n=1, n_max=1, flat_fraction=1.0):
    chain = ChainSpec.uniform(n_sites, coupling, 0.0, n_max)
    drive = DriveSpec.cosine(n_sites, dc, ac, OMEGA)
    potential = build_potential(profile, n_sites, dc,
                                flat_level_fraction=flat_fraction)
    basis = build_sector_basis(n_sites, n, n_max)
    return SectorModel(chain, drive, potential, basis)


def flat_model_with_disorder(seed=12345, w=3 * J, realization=0):
    from drivenchain.model import DisorderSpec, sample_disorder
    model = make_model(12, "flat")
    disorder = DisorderSpec(12, w, master_seed=seed, realization_count=50)
    return model.with_potential(
        model.potential.with_overlay(sample_disorder(disorder, realization)))


def test_two_site_rabi():
    # two resonant sites: <n_2(t)> = sin^2(J t)
    model = make_model(2, dc=0.0, ac=0.0)
    psi0 = fock_state(model.basis, 1)
    t_samples = np.linspace(0.0, 3 * np.pi / J, 97)
    traj = evolve_state(model, psi0, t_samples, step=0.05)
    pops = np.abs(traj.amplitudes) ** 2 @ model.basis.states
    expected = np.sin(J * traj.times) ** 2
    assert np.abs(pops[:, 1] - expected).max() < 1e-8


def test_diagonal_evolution_keeps_populations():
    model = make_model(4, dc=2 * J, ac=0.0, coupling=0.0)
    psi0 = fock_state(model.basis, 2)
    traj = evolve_state(model, psi0, [0.0, 40.0, 80.0], step=0.5)
    pops = np.abs(traj.amplitudes) ** 2
    assert np.allclose(pops, pops[0])


def test_three_site_chain_matches_diagonalization_oracle():
    # static uniform chain: exact answer by direct eigendecomposition
    model = make_model(3, dc=0.0, ac=0.0)
    psi0 = fock_state(model.basis, 1)
    t_end = np.pi / (np.sqrt(2) * J)
    traj = evolve_state(model, psi0, [t_end], step=t_end / 1024)
    h = model.hamiltonian(0.0)
    evals, evecs = np.linalg.eigh(h)
    exact = (evecs * np.exp(-1j * evals * traj.times[0])) @ \
        (evecs.conj().T @ psi0.amplitudes)
    assert np.abs(np.abs(exact) ** 2 - np.abs(traj.amplitudes[0]) ** 2).max() < 1e-8


def test_sample_snapping_reports_actual_times():
    model = make_model(2, dc=0.0, ac=0.0)
    psi0 = fock_state(model.basis, 1)
    traj = evolve_state(model, psi0, [0.0, 1.0, 2.0], step=0.3)
    assert np.allclose(traj.requested_times, [0.0, 1.0, 2.0])
    assert np.allclose(traj.times, [0.0, 0.9, 2.1])


def test_evolve_state_validation():
    model = make_model(2)
    psi0 = fock_state(model.basis, 1)
    with pytest.raises(ValueError):
        evolve_state(model, psi0, [0.0, 1.0], step=0.0)
    with pytest.raises(ValueError):
        evolve_state(model, psi0, [1.0, 0.5], step=0.1)
    with pytest.raises(ValueError):
        evolve_state(model, psi0, [], step=0.1)


def test_norm_conservation_along_driven_trajectory():
    model = flat_model_with_disorder()
    psi0 = fock_state(model.basis, 3)
    traj = evolve_state(model, psi0, np.arange(0.0, 151.0, 5.0), step=0.2)
    norms = np.linalg.norm(traj.amplitudes, axis=1)
    assert np.abs(norms - 1.0).max() < 1e-10
    total = (np.abs(traj.amplitudes) ** 2 @ model.basis.states).sum(axis=1)
    assert np.abs(total - 1.0).max() < 1e-9


def test_floquet_period_value():
    model = make_model(12)
    op = floquet_operator(model, 64)
    assert op.period == pytest.approx(50.84, abs=0.01)
    assert unitarity_defect(op.matrix) < 1e-10


def test_floquet_static_limit_is_matrix_exponential():
    model = make_model(12, ac=0.0)
    op = floquet_operator(model, 32)
    h = model.hamiltonian(0.0)
    evals, evecs = np.linalg.eigh(h)
    exact = (evecs * np.exp(-1j * evals * op.period)) @ evecs.conj().T
    assert np.abs(op.matrix - exact).max() < 1e-10


def test_floquet_step_halving_converged_at_default():
    # measured step-halving error of the midpoint rule on the driven
    # junction: 3.2e-5 at 256 steps/period, shrinking 4x per doubling
    model = flat_model_with_disorder()
    f256 = floquet_operator(model, 256).matrix
    f512 = floquet_operator(model, 512).matrix
    f1024 = floquet_operator(model, 1024).matrix
    err_256 = np.abs(f256 - f512).max()
    err_512 = np.abs(f512 - f1024).max()
    assert err_256 < 1e-4
    assert 3.0 < err_256 / err_512 < 5.0


def test_composition_of_interval_propagators():
    model = flat_model_with_disorder()
    u_full = interval_propagator(model, 0.0, 40.0, 400).matrix
    u_a = interval_propagator(model, 0.0, 15.0, 150).matrix
    u_b = interval_propagator(model, 15.0, 40.0, 250).matrix
    assert np.abs(u_b @ u_a - u_full).max() < 1e-9


def test_time_reversal_returns_initial_state():
    model = flat_model_with_disorder()
    psi0 = fock_state(model.basis, 3)
    u = interval_propagator(model, 0.0, 60.0, 600).matrix
    roundtrip = u.conj().T @ (u @ psi0.amplitudes)
    assert np.abs(roundtrip - psi0.amplitudes).max() < 1e-8


def test_convergence_probe_driven_model():
    model = flat_model_with_disorder()
    report = convergence_probe(model, tol=1e-8)
    assert report.steps_per_period >= 256
    assert 1.8 <= report.observed_order <= 2.2


def test_convergence_probe_static_model():
    model = make_model(12, ac=0.0)
    report = convergence_probe(model, tol=1e-9, start=1)
    assert report.steps_per_period == 1     # scheme exact for static H


def test_convergence_probe_rejects_bad_tolerance():
    model = make_model(2)
    with pytest.raises(ValueError):
        convergence_probe(model, tol=0.0)
