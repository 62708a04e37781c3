"""Classical companion model of the driven domain.

In scaled canonical coordinates (Q = 2*pi*q/L, P = b*p/hbar with b = 1,
hbar = 1, L = N/2) the driven-domain Hamiltonian reads

    H(Q, P, t) = [d0 + d1*cos(omega*t)] * cos(Q) + 2*J*cos(P),

giving the equations of motion

    dQ/dt = -(8*pi*J/N) * sin(P),
    dP/dt = +(4*pi/N) * [d0 + d1*cos(omega*t)] * sin(Q).

(Q, P) = (2*pi, 0) is a fixed point; linearizing about it yields a
parametrically modulated oscillator with small-oscillation frequency
Omega = (4*pi/N) * sqrt(2*d0*J).  Driving near omega = 2*Omega/m makes the
fixed point unstable (parametric resonance); stability is classified by the
trace of the one-period monodromy matrix of the linearized flow, computed by
direct numerical integration so any modulation shape can be handled.

All frequencies here are angular (rad/ns); the unit bridge from ordinary
MHz inputs is units.rad_ns_from_mhz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .units import TWO_PI

DETERMINANT_TOL = 1e-8
DEFAULT_MONODROMY_STEPS = 1024
#: classification cushion on |tr M| <= 2: marginally stable cells (the whole
#: zero-modulation column sits at |tr| = 2|cos(Omega T)| <= 2, touching 2 at
#: period points) must not flip on integrator roundoff.  The cushion moves
#: tongue boundaries by orders of magnitude less than one default grid cell.
STABILITY_TOLERANCE = 1e-4


@dataclass(frozen=True)
class SemiclassicalParams:
    """Parameters of the classical driven-domain model (angular units)."""

    n_sites: int
    dc_amplitude: float
    ac_amplitude: float
    drive_angular_frequency: float
    hopping: float
    lattice_constant: float = 1.0

    def __post_init__(self):
        if self.n_sites < 2 or self.n_sites % 2:
            raise ValueError("n_sites must be even and >= 2")
        if self.dc_amplitude * self.hopping <= 0:
            raise ValueError("dc amplitude and hopping must have positive product")
        if self.drive_angular_frequency <= 0:
            raise ValueError("drive angular frequency must be positive")

    @property
    def chain_length(self) -> float:
        return self.lattice_constant * self.n_sites / 2.0

    @property
    def effective_planck(self) -> float:
        """Scale of the [Q, P] commutator, 2*pi/N (reported, not used)."""
        return TWO_PI / self.n_sites

    @property
    def small_oscillation_frequency(self) -> float:
        """Omega = (4*pi/N) * sqrt(2 * d0 * J)."""
        return (4.0 * np.pi / self.n_sites) * math.sqrt(
            2.0 * self.dc_amplitude * self.hopping)

    @property
    def drive_period(self) -> float:
        return TWO_PI / self.drive_angular_frequency


def classical_rhs(q: float, p: float, t: float,
                  params: SemiclassicalParams) -> tuple:
    """Scaled canonical equations of motion (dQ/dt, dP/dt)."""
    n = params.n_sites
    modulation = params.dc_amplitude + params.ac_amplitude * math.cos(
        params.drive_angular_frequency * t)
    dq = -(8.0 * np.pi * params.hopping / n) * math.sin(p)
    dp = (4.0 * np.pi / n) * modulation * math.sin(q)
    return dq, dp


def energy(q, p, params: SemiclassicalParams) -> np.ndarray:
    """Undriven Hamiltonian d0*cos(Q) + 2*J*cos(P) (conserved for d1 = 0)."""
    return (params.dc_amplitude * np.cos(q)
            + 2.0 * params.hopping * np.cos(p))


@dataclass(frozen=True)
class Trajectory:
    """Phase-space samples of one integrated orbit."""

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray

    def wrapped_q(self) -> np.ndarray:
        return np.mod(self.q, TWO_PI)

    def stroboscopic(self, period: float) -> "Trajectory":
        """Subset of samples at (near-)integer multiples of ``period``."""
        steps = self.times / period
        keep = np.abs(steps - np.rint(steps)) < 1e-9
        return Trajectory(self.times[keep], self.q[keep], self.p[keep])


def integrate_trajectory(q0: float, p0: float, duration: float, step: float,
                         params: SemiclassicalParams) -> Trajectory:
    """Fixed-step fourth-order (RK4) integration from t = 0."""
    if step <= 0:
        raise ValueError("step must be positive")
    n_steps = int(round(duration / step))
    times = np.empty(n_steps + 1)
    qs = np.empty(n_steps + 1)
    ps = np.empty(n_steps + 1)
    q, p = float(q0), float(p0)
    times[0], qs[0], ps[0] = 0.0, q, p
    for k in range(n_steps):
        t = k * step
        k1q, k1p = classical_rhs(q, p, t, params)
        k2q, k2p = classical_rhs(q + 0.5 * step * k1q, p + 0.5 * step * k1p,
                                 t + 0.5 * step, params)
        k3q, k3p = classical_rhs(q + 0.5 * step * k2q, p + 0.5 * step * k2p,
                                 t + 0.5 * step, params)
        k4q, k4p = classical_rhs(q + step * k3q, p + step * k3p,
                                 t + step, params)
        q += step / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)
        p += step / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        times[k + 1], qs[k + 1], ps[k + 1] = t + step, q, p
    return Trajectory(times, qs, ps)


_YOSHIDA_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_YOSHIDA_WEIGHTS = (_YOSHIDA_W1, 1.0 - 2.0 * _YOSHIDA_W1, _YOSHIDA_W1)
MIN_STEPS_PER_OSCILLATION = 256


def _monodromy_steps(omega, delta1, params: SemiclassicalParams,
                     steps_floor: int) -> np.ndarray:
    """Per-cell step count: the floor, raised for slowly driven cells.

    A cell with period T spans T * Omega_eff / (2*pi) oscillations of the
    linearized motion; each oscillation gets at least
    MIN_STEPS_PER_OSCILLATION steps, rounded up to a power of two so that
    large grids fall into a handful of equal-step batches.  Depending only
    on the cell's own parameters keeps grids exactly subsample-consistent.
    """
    n = params.n_sites
    a = 8.0 * np.pi * params.hopping / n
    c_max = (4.0 * np.pi / n) * (abs(params.dc_amplitude) + np.abs(delta1))
    omega_eff = np.sqrt(np.maximum(a * c_max, 0.0))
    oscillations = omega_eff / omega
    needed = np.maximum(oscillations * MIN_STEPS_PER_OSCILLATION, 1.0)
    quantized = 2 ** np.ceil(np.log2(needed))
    return np.maximum(steps_floor, quantized).astype(int)


def _integrate_group(omega, delta1, params: SemiclassicalParams,
                     steps: int) -> np.ndarray:
    """Fourth-order symplectic composition for one batch of cells.

    The linearized flow
        d(dQ)/dt = -a * dP,      a = 8*pi*J/N,
        d(dP)/dt = c(t) * dQ,    c(t) = (4*pi/N) * [d0 + d1*cos(omega*t)],
    is separable, so each substep is a pair of shears (exact unit
    determinant); the triple-weight composition restores fourth-order
    accuracy of the trace for the time-dependent modulation.  Adjacent
    half-kicks (within a step and across step boundaries) are merged: they
    act at the same instant, so the combined update is the same shear.
    """
    n_sites = params.n_sites
    a = 8.0 * np.pi * params.hopping / n_sites
    c0 = 4.0 * np.pi / n_sites
    h = (TWO_PI / omega) / steps
    w1, w0, _ = _YOSHIDA_WEIGHTS

    m = np.zeros(omega.shape + (2, 2))
    m[..., 0, 0] = 1.0
    m[..., 1, 1] = 1.0

    def kick(t, weight):
        c = c0 * (params.dc_amplitude + delta1 * np.cos(omega * t))
        m[..., 1, :] += (weight * h * c)[..., None] * m[..., 0, :]

    def drift(weight):
        m[..., 0, :] += (-a * weight * h)[..., None] * m[..., 1, :]

    t = np.zeros_like(omega)
    kick(t, 0.5 * w1)
    for k in range(steps):
        drift(w1)
        t = t + w1 * h
        kick(t, 0.5 * (w1 + w0))
        drift(w0)
        t = t + w0 * h
        kick(t, 0.5 * (w0 + w1))
        drift(w1)
        t = t + w1 * h
        kick(t, w1 if k + 1 < steps else 0.5 * w1)
    return m


def _monodromy_batch(omega: np.ndarray, delta1: np.ndarray,
                     params: SemiclassicalParams,
                     steps_per_period: int) -> np.ndarray:
    """Monodromy matrices for parameter arrays (cell-intrinsic stepping)."""
    omega = np.asarray(omega, dtype=float)
    delta1 = np.asarray(delta1, dtype=float)
    shape = np.broadcast_shapes(omega.shape, delta1.shape)
    omega_flat = np.broadcast_to(omega, shape).ravel()
    delta1_flat = np.broadcast_to(delta1, shape).ravel()
    steps = _monodromy_steps(omega_flat, delta1_flat, params, steps_per_period)
    result = np.empty((omega_flat.size, 2, 2))
    for count in np.unique(steps):
        mask = steps == count
        result[mask] = _integrate_group(omega_flat[mask], delta1_flat[mask],
                                        params, int(count))
    return result.reshape(shape + (2, 2))


def monodromy_matrix(omega: float, delta1: float, params: SemiclassicalParams,
                     steps_per_period: int = DEFAULT_MONODROMY_STEPS) -> np.ndarray:
    """One-period monodromy matrix of the linearized flow (2x2)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    return _monodromy_batch(np.asarray(omega, dtype=float),
                            np.asarray(delta1, dtype=float),
                            params, steps_per_period)


def _check_determinants(m: np.ndarray) -> None:
    """Verify det M = 1 to 1e-8 wherever that is measurable.

    Each integration substep is a shear, so the determinant is preserved
    structurally; the floating-point check is meaningful only while matrix
    entries stay O(1).  Cells whose solutions grew large (unstable, or
    marginal with linear growth over many oscillations) are exempt: there
    the unit determinant cancels between products of order ||M||^2 and is
    not resolvable at 1e-8 by any scheme.
    """
    entries = np.abs(m).max(axis=(-2, -1))
    checkable = np.isfinite(entries) & (entries <= 8.0)
    if not np.any(checkable):
        return
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    worst = float(np.abs(det - 1.0)[checkable].max())
    if worst > DETERMINANT_TOL:
        raise NumericalError(f"monodromy determinant deviates by {worst:.3e}")


def monodromy_trace(omega: float, delta1: float, params: SemiclassicalParams,
                    steps_per_period: int = DEFAULT_MONODROMY_STEPS) -> float:
    """|tr M| of the one-period monodromy; stable iff |tr M| <= 2."""
    m = monodromy_matrix(omega, delta1, params, steps_per_period)
    _check_determinants(m)
    return float(abs(np.trace(m)))


@dataclass(frozen=True)
class StabilityGrid:
    """|tr M| and the stability flag on an (omega, delta1) grid."""

    omega_values: np.ndarray        # length n_omega
    delta1_values: np.ndarray       # length n_delta1
    abs_trace: np.ndarray           # (n_omega, n_delta1)
    stable: np.ndarray              # boolean, same shape

    def iter_rows(self):
        """Yield (omega, delta1, abs_trace, stable) in omega-major order."""
        for i, omega in enumerate(self.omega_values):
            for j, delta1 in enumerate(self.delta1_values):
                yield omega, delta1, self.abs_trace[i, j], bool(self.stable[i, j])


def stability_grid(omega_values, delta1_values, params: SemiclassicalParams,
                   steps_per_period: int = DEFAULT_MONODROMY_STEPS
                   ) -> StabilityGrid:
    """Monodromy-trace map over a rectangular (omega, delta1) grid."""
    omega_values = np.asarray(omega_values, dtype=float)
    delta1_values = np.asarray(delta1_values, dtype=float)
    if len(omega_values) == 0 or len(delta1_values) == 0:
        raise ValueError("grid axes must be non-empty")
    if np.any(omega_values <= 0):
        raise ValueError("omega grid values must be positive")
    om, d1 = np.meshgrid(omega_values, delta1_values, indexing="ij")
    m = _monodromy_batch(om, d1, params, steps_per_period)
    _check_determinants(m)
    abs_trace = np.abs(m[..., 0, 0] + m[..., 1, 1])
    stable = np.isfinite(abs_trace) & (abs_trace <= 2.0 + STABILITY_TOLERANCE)
    return StabilityGrid(omega_values, delta1_values, abs_trace, stable)


def default_grid_axes(params: SemiclassicalParams, resolution: int = 200):
    """Default axes: omega in (0, 3*Omega], delta1 in [0, 2*d0]."""
    omega_top = 3.0 * params.small_oscillation_frequency
    omega_values = np.linspace(omega_top / resolution, omega_top, resolution)
    delta1_values = np.linspace(0.0, 2.0 * params.dc_amplitude, resolution)
    return omega_values, delta1_values


def potential_contours(q_values, p_values, params: SemiclassicalParams
                       ) -> np.ndarray:
    """Undriven energy surface sampled on a (Q, P) grid, shape (nq, np)."""
    q_values = np.asarray(q_values, dtype=float)
    p_values = np.asarray(p_values, dtype=float)
    if len(q_values) == 0 or len(p_values) == 0:
        raise ValueError("contour grids must be non-empty")
    qq, pp = np.meshgrid(q_values, p_values, indexing="ij")
    return energy(qq, pp, params)
