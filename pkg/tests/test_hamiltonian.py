import numpy as np
import pytest

from drivenchain.basis import build_sector_basis
from drivenchain.hamiltonian import (SectorModel, diagonal_at, hamiltonian_at,
                                     hopping_matrix)
from drivenchain.model import (ChainSpec, DriveSpec, build_potential,
                               diagonal_frequencies)
from drivenchain.units import rad_ns_from_mhz

J = rad_ns_from_mhz(11.5)
U = rad_ns_from_mhz(-250.0)
N = 12


def junction_setup(profile="cosine", n=1, n_max=1, nonlinearity=U):
    chain = ChainSpec.uniform(N, J, nonlinearity, n_max)
    drive = DriveSpec.cosine(N, 3 * J, 3 * J, rad_ns_from_mhz(19.665764))
    potential = build_potential(profile, N, 3 * J)
    basis = build_sector_basis(N, n, n_max)
    return SectorModel(chain, drive, potential, basis)


def test_single_particle_hopping_is_tridiagonal():
    basis = build_sector_basis(N, 1, 1)
    chain = ChainSpec.uniform(N, J)
    hop = hopping_matrix(chain, basis)
    expected = np.diag(np.full(N - 1, J), 1) + np.diag(np.full(N - 1, J), -1)
    assert np.allclose(hop, expected)


def test_bosonic_matrix_element_sqrt2():
    # two bosons on two sites with cutoff 2: <20|H|11> = sqrt(2) J by
    # explicit operator algebra (a1 moves 1->0 with sqrt(1), a2+ 1->2 with
    # sqrt(2))
    basis = build_sector_basis(2, 2, 2)
    chain = ChainSpec.uniform(2, J, 0.0, 2)
    hop = hopping_matrix(chain, basis)
    i20 = basis.index_of((2, 0))
    i11 = basis.index_of((1, 1))
    i02 = basis.index_of((0, 2))
    assert hop[i20, i11] == pytest.approx(np.sqrt(2) * J)
    assert hop[i02, i11] == pytest.approx(np.sqrt(2) * J)
    assert hop[i20, i02] == 0.0
    assert np.allclose(hop, hop.T)


def test_cutoff_blocks_moves():
    # hardcore: no matrix element may create double occupation
    basis = build_sector_basis(3, 2, 1)
    chain = ChainSpec.uniform(3, J)
    hop = hopping_matrix(chain, basis)
    i110 = basis.index_of((1, 1, 0))
    i101 = basis.index_of((1, 0, 1))
    i011 = basis.index_of((0, 1, 1))
    assert hop[i110, i101] == pytest.approx(J)
    assert hop[i101, i011] == pytest.approx(J)
    assert hop[i110, i011] == 0.0     # would need two hops, not one bond


def test_zero_couplings_zero_matrix():
    basis = build_sector_basis(N, 1, 1)
    chain = ChainSpec.uniform(N, 0.0)
    assert np.all(hopping_matrix(chain, basis) == 0.0)


def test_nonlinearity_inert_in_single_excitation_sector():
    model = junction_setup(n=1)
    diag = diagonal_at(5.0, model.chain, model.drive, model.potential, model.basis)
    freqs = diagonal_frequencies(5.0, model.drive, model.potential)
    assert np.allclose(diag, model.basis.states @ freqs)


def test_nonlinearity_counts_double_occupation():
    basis = build_sector_basis(2, 2, 2)
    chain = ChainSpec.uniform(2, J, U, 2)
    drive = DriveSpec.cosine(2, 0.0, 0.0, 1.0)
    potential = build_potential("cosine", 2, 0.0)
    diag = diagonal_at(0.0, chain, drive, potential, basis)
    i20 = basis.index_of((2, 0))
    i11 = basis.index_of((1, 1))
    assert diag[i20] == pytest.approx(U)      # (U/2) * 2 * 1
    assert diag[i11] == pytest.approx(0.0)


def test_static_diagonal_when_ac_off():
    model = junction_setup()
    drive_off = DriveSpec.cosine(N, 3 * J, 0.0, rad_ns_from_mhz(19.665764))
    d0 = diagonal_at(0.0, model.chain, drive_off, model.potential, model.basis)
    d1 = diagonal_at(37.3, model.chain, drive_off, model.potential, model.basis)
    assert np.allclose(d0, d1)


def test_hermiticity_at_random_times():
    model = junction_setup(profile="flat", n=2, n_max=2)
    rng = np.random.default_rng(11)
    for t in rng.uniform(0.0, 200.0, 100):
        snap = hamiltonian_at(t, model.chain, model.drive, model.potential,
                              model.basis)
        assert snap.hermiticity_defect() < 1e-12
        assert np.all(np.isreal(np.diag(snap.matrix)))


def test_single_particle_trace_identity():
    model = junction_setup()
    for t in (0.0, 7.7, 42.0):
        h = model.hamiltonian(t)
        freqs = diagonal_frequencies(t, model.drive, model.potential)
        assert np.trace(h).real == pytest.approx(freqs.sum(), rel=1e-12)


def test_periodicity_elementwise():
    model = junction_setup(profile="flat")
    period = model.drive.period
    for t in (0.0, 11.1, 37.9):
        assert np.allclose(model.hamiltonian(t), model.hamiltonian(t + period),
                           atol=1e-12)


def test_junction_decomposition():
    # full chain equals block-diagonal halves plus the single junction bond
    basis = build_sector_basis(N, 1, 1)
    chain_full = ChainSpec.uniform(N, J)
    couplings_cut = np.full(N - 1, J)
    couplings_cut[5] = 0.0                      # remove the 6-7 bond
    chain_cut = ChainSpec(N, couplings_cut)
    couplings_junction = np.zeros(N - 1)
    couplings_junction[5] = J
    chain_junction = ChainSpec(N, couplings_junction)
    full = hopping_matrix(chain_full, basis)
    parts = hopping_matrix(chain_cut, basis) + hopping_matrix(chain_junction, basis)
    assert np.abs(full - parts).max() < 1e-14


def test_single_particle_limit_matches_tight_binding():
    model = junction_setup()
    t = 3.21
    h = model.hamiltonian(t)
    freqs = diagonal_frequencies(t, model.drive, model.potential)
    expected = (np.diag(freqs).astype(complex)
                + np.diag(np.full(N - 1, J), 1) + np.diag(np.full(N - 1, J), -1))
    assert np.abs(h - expected).max() < 1e-14


def test_sector_model_consistency_checks():
    chain = ChainSpec.uniform(N, J)
    drive = DriveSpec.cosine(N, 0, 0, 1.0)
    potential = build_potential("cosine", N, 0.0)
    with pytest.raises(ValueError):
        SectorModel(chain, drive, potential, build_sector_basis(10, 1, 1))
    with pytest.raises(ValueError):
        SectorModel(chain, drive, potential, build_sector_basis(N, 1, 2))
