"""Dense sector Hamiltonian: static bosonic hopping plus time-dependent diagonal.

The hopping term moves one excitation across a bond with the bosonic matrix
element J_l * sqrt(n_l (n_{l+1} + 1)); moves that would exceed the boson
cutoff are absent.  The diagonal collects the instantaneous site frequencies
and the onsite nonlinearity (U/2) n(n-1).  Both pieces act inside one
excitation sector by construction, so total excitation number is conserved
structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .basis import SectorBasis
from .model import ChainSpec, DriveSpec, PotentialSpec, diagonal_frequencies


@dataclass(frozen=True)
class HamiltonianSnapshot:
    """Dense Hermitian sector Hamiltonian frozen at one instant."""

    matrix: np.ndarray
    time: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())


def hopping_matrix(chain: ChainSpec, basis: SectorBasis) -> np.ndarray:
    """Static hopping matrix of the sector (real symmetric)."""
    dim = basis.dim
    hop = np.zeros((dim, dim))
    states = basis.states
    for col in range(dim):
        v = states[col]
        for bond in range(chain.n_sites - 1):
            # move one excitation from bond -> bond+1
            if v[bond] > 0 and v[bond + 1] < chain.boson_cutoff:
                target = v.copy()
                target[bond] -= 1
                target[bond + 1] += 1
                row = basis.index_map[tuple(int(x) for x in target)]
                element = chain.bond_couplings[bond] * np.sqrt(
                    v[bond] * (v[bond + 1] + 1))
                hop[row, col] += element
                hop[col, row] += element
    return hop


def diagonal_at(t: float, chain: ChainSpec, drive: DriveSpec,
                potential: PotentialSpec, basis: SectorBasis) -> np.ndarray:
    """Diagonal entries at time t: site terms plus the nonlinearity."""
    freqs = diagonal_frequencies(t, drive, potential)
    states = basis.states
    diag = states @ freqs
    if chain.onsite_nonlinearity != 0.0:
        diag = diag + 0.5 * chain.onsite_nonlinearity * (states * (states - 1)).sum(axis=1)
    return np.asarray(diag, dtype=float)


def hamiltonian_at(t: float, chain: ChainSpec, drive: DriveSpec,
                   potential: PotentialSpec, basis: SectorBasis) -> HamiltonianSnapshot:
    """Full sector Hamiltonian H(t) = hopping + diag(site terms)."""
    matrix = hopping_matrix(chain, basis).astype(complex)
    np.fill_diagonal(matrix, matrix.diagonal() + diagonal_at(t, chain, drive, potential, basis))
    return HamiltonianSnapshot(matrix, t)


@dataclass(frozen=True)
class SectorModel:
    """Chain + drive + potential + basis bundled for the propagators."""

    chain: ChainSpec
    drive: DriveSpec
    potential: PotentialSpec
    basis: SectorBasis

    def __post_init__(self):
        n = self.chain.n_sites
        if self.potential.n_sites != n or self.drive.n_sites != n \
                or self.basis.n_sites != n:
            raise ValueError("chain, drive, potential and basis disagree on N")
        if self.basis.boson_cutoff != self.chain.boson_cutoff:
            raise ValueError("basis and chain disagree on the boson cutoff")

    @cached_property
    def hopping(self) -> np.ndarray:
        hop = hopping_matrix(self.chain, self.basis)
        hop.flags.writeable = False
        return hop

    def diagonal(self, t: float) -> np.ndarray:
        return diagonal_at(t, self.chain, self.drive, self.potential, self.basis)

    def hamiltonian(self, t: float) -> np.ndarray:
        h = self.hopping.astype(complex)
        np.fill_diagonal(h, h.diagonal() + self.diagonal(t))
        return h

    def snapshot(self, t: float) -> HamiltonianSnapshot:
        return HamiltonianSnapshot(self.hamiltonian(t), t)

    def with_potential(self, potential: PotentialSpec) -> "SectorModel":
        return SectorModel(self.chain, self.drive, potential, self.basis)
