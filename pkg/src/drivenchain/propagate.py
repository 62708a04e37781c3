"""Time-ordered unitary evolution and the one-period Floquet operator.

The stepper is an exponential midpoint rule: over each step the Hamiltonian
is frozen at the interval midpoint and exponentiated exactly through a
Hermitian eigendecomposition, so every step is unitary up to roundoff and
the global error is O(step^2).  For a static Hamiltonian the scheme is
exact.  Multi-period dynamics uses direct stepping (not powers of the
Floquet operator), so sample times need not be stroboscopic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import QuantumState
from .errors import NumericalError
from .hamiltonian import SectorModel
from .units import TWO_PI

DEFAULT_STEPS_PER_PERIOD = 256
UNITARITY_TOL = 1e-10


def _step_matrix(model: SectorModel, t_mid: float, dt: float) -> np.ndarray:
    h = model.hamiltonian(t_mid)
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * dt)) @ evecs.conj().T


def unitarity_defect(matrix: np.ndarray) -> float:
    dim = matrix.shape[0]
    return float(np.abs(matrix.conj().T @ matrix - np.eye(dim)).max())


def _check_unitary(matrix: np.ndarray, context: str) -> np.ndarray:
    defect = unitarity_defect(matrix)
    if defect > UNITARITY_TOL:
        raise NumericalError(f"{context}: unitarity defect {defect:.3e} exceeds "
                             f"{UNITARITY_TOL}")
    return matrix


@dataclass(frozen=True)
class UnitaryMatrix:
    """Dense propagator over a time interval."""

    matrix: np.ndarray
    t_start: float
    t_end: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class FloquetOperator:
    """One-period propagator U(T) together with the drive period used."""

    matrix: np.ndarray
    period: float
    steps_per_period: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def angular_frequency(self) -> float:
        return TWO_PI / self.period


@dataclass(frozen=True)
class StateTrajectory:
    """States sampled along one evolution.

    ``times`` are the actual (step-aligned) emission times; ``requested_times``
    are what the caller asked for before snapping to the step grid.
    """

    requested_times: np.ndarray
    times: np.ndarray
    amplitudes: np.ndarray      # (len(times), dim)
    basis_tag: str

    def state(self, k: int, basis) -> QuantumState:
        return QuantumState(self.amplitudes[k], basis)


def evolve_state(model: SectorModel, psi0: QuantumState, t_samples,
                 step: float) -> StateTrajectory:
    """Propagate psi0 from t=0, emitting states at the sample times.

    Sample times are snapped to the nearest multiple of ``step``; the
    returned trajectory reports both the requested and the actual times.
    Norm conservation is enforced to 1e-10 at every emission.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    requested = np.asarray(list(t_samples), dtype=float)
    if len(requested) == 0:
        raise ValueError("need at least one sample time")
    if np.any(np.diff(requested) < 0):
        raise ValueError("sample times must be ascending")
    if requested[0] < 0:
        raise ValueError("sample times must be >= 0")
    psi0.check_normalized()

    sample_steps = np.rint(requested / step).astype(int)
    actual = sample_steps * step
    n_steps = int(sample_steps[-1])

    psi = psi0.amplitudes.astype(complex).copy()
    emitted = []
    next_emit = 0
    for k in range(n_steps + 1):
        while next_emit < len(sample_steps) and sample_steps[next_emit] == k:
            norm = np.linalg.norm(psi)
            if abs(norm - 1.0) > 1e-10:
                raise NumericalError(f"norm drifted to {norm} at step {k}")
            emitted.append(psi.copy())
            next_emit += 1
        if k < n_steps:
            u = _step_matrix(model, (k + 0.5) * step, step)
            psi = u @ psi
    amplitudes = np.array(emitted)
    return StateTrajectory(requested, actual, amplitudes, model.basis.tag)


def interval_propagator(model: SectorModel, t_start: float, t_end: float,
                        n_steps: int) -> UnitaryMatrix:
    """Midpoint-exponential propagator over [t_start, t_end] in n_steps."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if t_end <= t_start:
        raise ValueError("t_end must exceed t_start")
    dt = (t_end - t_start) / n_steps
    u = np.eye(model.basis.dim, dtype=complex)
    for k in range(n_steps):
        u = _step_matrix(model, t_start + (k + 0.5) * dt, dt) @ u
    _check_unitary(u, "interval propagator")
    return UnitaryMatrix(u, t_start, t_end)


def floquet_operator(model: SectorModel,
                     steps_per_period: int = DEFAULT_STEPS_PER_PERIOD
                     ) -> FloquetOperator:
    """One-period propagator starting at t=0."""
    if steps_per_period < 1:
        raise ValueError("steps_per_period must be >= 1")
    period = model.drive.period
    u = interval_propagator(model, 0.0, period, steps_per_period)
    return FloquetOperator(u.matrix, period, steps_per_period)


@dataclass(frozen=True)
class ConvergenceReport:
    """Result of the step-count probe for the Floquet operator."""

    steps_per_period: int
    observed_order: float
    errors: tuple               # (steps, |F_steps - F_2*steps|_max) pairs


def convergence_probe(model: SectorModel, tol: float, start: int = 16,
                      max_steps: int = 1 << 15) -> ConvergenceReport:
    """Smallest power-of-two step count whose halving changes F by < tol.

    The midpoint rule converges at second order, so successive errors
    should shrink by about 4x per doubling; the observed order is reported
    for diagnosis.  Raises if the error floor (roundoff) is reached before
    the tolerance.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    steps = max(1, int(start))
    f_coarse = floquet_operator(model, steps).matrix
    errors = []
    while steps <= max_steps:
        f_fine = floquet_operator(model, 2 * steps).matrix
        err = float(np.abs(f_coarse - f_fine).max())
        errors.append((steps, err))
        if err < tol:
            orders = [np.log2(errors[i][1] / errors[i + 1][1])
                      for i in range(len(errors) - 1)]
            observed = float(np.mean(orders)) if orders else float("nan")
            return ConvergenceReport(steps, observed, tuple(errors))
        if len(errors) >= 2 and err > 0.5 * errors[-2][1] and err < 1e-12:
            break
        f_coarse = f_fine
        steps *= 2
    raise NumericalError(
        f"step probe failed to reach tolerance {tol} below {max_steps} "
        f"steps/period; last error {errors[-1][1]:.3e}")
