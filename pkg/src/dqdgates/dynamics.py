"""Time evolution: generic midpoint propagation, rotating-frame transforms,
the reduced-model Hamiltonians (DDF for cross-resonance, DF for iSWAP), and
a fast split-step simulator for the driven full-space dynamics.

Frequencies are in GHz, times in ns; every propagator is exp(-i*2*pi*h*t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import DeviceParams, DrivePulse, EffectiveModel, dressed_frame
from .device import _sw_block_pieces  # shared dressed-basis operators
from .operators import I2, SIGMA_Z, Operator, expm_hermitian, pauli_string


class DynamicsError(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid, [t_start, t_end] in ns with fixed step."""

    t_start: float
    t_end: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise DynamicsError("step must be positive")
        if (self.t_end - self.t_start) / self.step < 1:
            raise DynamicsError("grid must contain at least one step")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.step))

    @property
    def edges(self) -> np.ndarray:
        return self.t_start + self.step * np.arange(self.n_steps + 1)

    @property
    def midpoints(self) -> np.ndarray:
        return self.edges[:-1] + 0.5 * self.step


# default chosen so 2*pi * (6 GHz scale) * step stays well under 0.1 rad
DEFAULT_STEP = 0.002   # ns


@dataclass(frozen=True)
class FrameTerm:
    """One factor of a composed frame transformation.

    Either ``rate`` (GHz) for V(t) = exp(-i*2*pi*rate*t*G) or ``angle``
    (radians) for the time-independent V = exp(-i*angle*G); the generator
    carries any conventional 1/2.
    """

    generator: np.ndarray
    rate: float | None = None
    angle: float | None = None

    def __post_init__(self):
        g = np.asarray(self.generator, dtype=complex)
        if np.linalg.norm(g - g.conj().T) > 1e-12 * max(np.linalg.norm(g), 1):
            raise DynamicsError("frame generator must be Hermitian")
        object.__setattr__(self, "generator", g)
        if (self.rate is None) == (self.angle is None):
            raise DynamicsError("specify exactly one of rate or angle")

    def unitary(self, t: float) -> np.ndarray:
        if self.rate is not None:
            return expm_hermitian(self.rate * self.generator, t)
        evals, evecs = np.linalg.eigh(self.generator)
        return (evecs * np.exp(-1j * self.angle * evals)) @ evecs.conj().T


@dataclass(frozen=True)
class FrameSpec:
    """Composed frame V(t) = terms[0](t) * terms[1](t) * ..."""

    terms: tuple[FrameTerm, ...] = ()

    def unitary(self, t: float) -> np.ndarray:
        if not self.terms:
            raise DynamicsError("empty frame")
        v = self.terms[0].unitary(t)
        for term in self.terms[1:]:
            v = v @ term.unitary(t)
        return v


def to_frame(u: np.ndarray | Operator, frame: FrameSpec, t: float,
             t0: float = 0.0) -> np.ndarray:
    """Interaction-picture propagator V(t)^dag * u * V(t0)."""
    um = u.mat if isinstance(u, Operator) else np.asarray(u)
    return frame.unitary(t).conj().T @ um @ frame.unitary(t0)


def propagate(h_of_t, grid: TimeGrid) -> list[np.ndarray]:
    """Cumulative propagators on the grid by the midpoint rule.

    ``h_of_t(t)`` must return a Hermitian matrix (ndarray or Operator) of
    fixed dimension; element k of the result propagates from t_start to
    edge k+1 via U <- expm_hermitian(h(t + dt/2), dt) * U.
    """
    dt = grid.step
    out = []
    u = None
    for tm in grid.midpoints:
        h = h_of_t(tm)
        hm = h.mat if isinstance(h, Operator) else np.asarray(h)
        if not np.all(np.isfinite(hm)):
            raise DynamicsError(f"non-finite Hamiltonian at t = {tm} ns")
        step_u = expm_hermitian(hm, dt)
        u = step_u if u is None else step_u @ u
        out.append(u)
    d = out[-1].shape[0]
    if np.linalg.norm(out[-1].conj().T @ out[-1] - np.eye(d)) > 1e-9 * d:
        raise DynamicsError("propagator lost unitarity")
    return out


# ---------------------------------------------------------------------------
# Reduced-model Hamiltonians

@dataclass(frozen=True)
class CrErrors:
    """Quasistatic error terms of the doubly-rotating-frame (DDF) model.

    Signs follow the noisy DDF Hamiltonian
    ``H = (eta + delta_eta)/2 sz1 + delta_omega2/2 sz2
    - (J_tilde - delta_J_tilde)/2 sz1 sx2``, so ``delta_J_tilde`` is the
    *decrease* of the coupling (nominal minus shifted).  ``delta_chi`` acts
    as a y-rotation of qubit 1 applied around the whole sequence and is
    handled by the evaluator, not by this Hamiltonian.
    """

    delta_eta: float = 0.0
    delta_omega2: float = 0.0
    delta_J_tilde: float = 0.0
    delta_chi: float = 0.0
    delta_Omega_x_2: float = 0.0


@dataclass(frozen=True)
class IswapErrors:
    """Quasistatic error terms of the resonant doubly-rotating-frame model.

    ``delta_J`` is additive: the noisy coupling is J + delta_J.
    """

    delta_omega_1: float = 0.0
    delta_omega_2: float = 0.0
    delta_J: float = 0.0

    @property
    def delta_omega_plus(self) -> float:
        return self.delta_omega_1 + self.delta_omega_2

    @property
    def delta_omega_minus(self) -> float:
        return self.delta_omega_1 - self.delta_omega_2


_SZ1 = pauli_string("ZI")
_SZ2 = pauli_string("IZ")
_SX2 = pauli_string("IX")
_ZX = pauli_string("ZX")
_XX = pauli_string("XX")
_YY = pauli_string("YY")

RESONANCE_TOL = 1e-6


def ddf_hamiltonian(model: EffectiveModel,
                    errors: CrErrors = CrErrors()) -> np.ndarray:
    """Noisy cross-resonance Hamiltonian in the diagonalized doubly-rotating
    frame (GHz units, 4x4)."""
    return (
        0.5 * (model.eta + errors.delta_eta) * _SZ1
        + 0.5 * errors.delta_omega2 * _SZ2
        - 0.5 * (model.J_tilde - errors.delta_J_tilde) * _ZX
    )


def ddf_double_drive_hamiltonian(model: EffectiveModel, errors: CrErrors,
                                 omega_x_2: float) -> np.ndarray:
    """DDF Hamiltonian with the simultaneous target-qubit drive term
    (Omega_x_2 + delta) sx2 / 2 added."""
    return ddf_hamiltonian(model, errors) + 0.5 * (
        omega_x_2 + errors.delta_Omega_x_2
    ) * _SX2


def df_iswap_hamiltonian(model: EffectiveModel,
                         errors: IswapErrors = IswapErrors()) -> np.ndarray:
    """Noisy resonant (iSWAP) doubly-rotating-frame Hamiltonian.

    Requires the nominal model to be resonant, omega_1 = omega_2.
    """
    if abs(model.Delta) > RESONANCE_TOL:
        raise DynamicsError(
            f"iSWAP model requires omega_1 = omega_2; detuning "
            f"{model.Delta:.3e} GHz"
        )
    return (
        0.5 * errors.delta_omega_1 * _SZ1
        + 0.5 * errors.delta_omega_2 * _SZ2
        - 0.5 * (model.J + errors.delta_J) * (_XX + _YY)
    )


# ---------------------------------------------------------------------------
# Full-space driven simulation

def _drive_mean(drive: DrivePulse, ta: float, tb: float) -> float:
    """Exact average of the windowed carrier over [ta, tb]."""
    lo = max(ta, drive.window[0])
    hi = min(tb, drive.window[1])
    if hi <= lo:
        return 0.0
    w = 2 * np.pi * drive.frequency
    if w == 0.0:
        integral = drive.amplitude * np.cos(drive.phase) * (hi - lo)
    else:
        integral = drive.amplitude * (
            np.sin(w * hi + drive.phase) - np.sin(w * lo + drive.phase)
        ) / w
    return integral / (tb - ta)


@dataclass(frozen=True)
class FullSimResult:
    """Evolved state columns (dressed basis) at requested sample times."""

    times: np.ndarray            # ns
    states: list[np.ndarray]     # one (dim, n_states) array per time


def evolve_states(params: DeviceParams, drives: list[DrivePulse],
                  grid: TimeGrid, states: np.ndarray,
                  sample_times=None) -> FullSimResult:
    """Evolve state columns under H0 + HI + Hdr(t) in the dressed basis.

    Uses a second-order split step: the static part (dressed H0 plus the
    resonator coupling) is exponentiated once, and each drive contributes a
    diagonal phase with the carrier averaged exactly over half-intervals.
    Both drive operators tau_i^z are diagonal in a common basis, so the
    splitting is exact apart from the static/drive non-commutativity.
    """
    states = np.asarray(states, dtype=complex)
    if states.ndim == 1:
        states = states[:, None]
    frame = dressed_frame(params)
    dim = frame.energies.size
    if states.shape[0] != dim:
        raise DynamicsError(
            f"state dimension {states.shape[0]} != full dimension {dim}"
        )
    norms = np.linalg.norm(states, axis=0)
    if np.any(np.abs(norms - 1) > 1e-9):
        raise DynamicsError("input states must be normalized")

    f = params.n_fock
    v, w_ops = _sw_block_pieces(frame)
    h_static = np.diag(frame.energies) + v

    # simultaneous eigenbasis of the (commuting) drive operators
    q1, q2 = (d.basis_transform for d in frame.dqds)
    tz = {
        1: q1.conj().T @ np.kron(I2, SIGMA_Z) @ q1,
        2: q2.conj().T @ np.kron(I2, SIGMA_Z) @ q2,
    }
    d1, r1 = np.linalg.eigh(tz[1])
    d2, r2 = np.linalg.eigh(tz[2])
    rw = np.kron(np.kron(r1, r2), np.eye(f))
    diag = {
        1: np.kron(np.kron(d1, np.ones(4)), np.ones(f)),
        2: np.kron(np.kron(np.ones(4), d2), np.ones(f)),
    }

    dt = grid.step
    hs_w = rw.conj().T @ h_static @ rw
    evals, evecs = np.linalg.eigh(0.5 * (hs_w + hs_w.conj().T))
    m = (evecs * np.exp(-2j * np.pi * evals * dt)) @ evecs.conj().T

    if sample_times is None:
        sample_times = [grid.t_end]
    sample_times = np.asarray(sorted(float(t) for t in sample_times))
    if sample_times[0] < grid.t_start - 1e-12 or (
        sample_times[-1] > grid.t_end + 1e-12
    ):
        raise DynamicsError("sample times outside the grid")
    sample_idx = np.rint((sample_times - grid.t_start) / dt).astype(int)
    if np.any(np.abs(sample_idx * dt + grid.t_start - sample_times) > 1e-9):
        raise DynamicsError("sample times must lie on grid edges")

    edges = grid.edges
    phase = -2j * np.pi * (dt / 2)
    y = rw.conj().T @ states
    out = []
    next_samples = list(sample_idx)
    if next_samples and next_samples[0] == 0:
        out.append(states.copy())
        next_samples.pop(0)
    for k in range(grid.n_steps):
        ta, tm, tb = edges[k], edges[k] + dt / 2, edges[k + 1]
        acc_a = np.zeros(dim)
        acc_b = np.zeros(dim)
        for drv in drives:
            acc_a = acc_a + _drive_mean(drv, ta, tm) * diag[drv.dot]
            acc_b = acc_b + _drive_mean(drv, tm, tb) * diag[drv.dot]
        y = np.exp(phase * acc_a)[:, None] * y
        y = m @ y
        y = np.exp(phase * acc_b)[:, None] * y
        if next_samples and k + 1 == next_samples[0]:
            out.append(rw @ y)
            next_samples.pop(0)
    return FullSimResult(times=sample_times, states=out)


def full_hamiltonian_handle(params: DeviceParams, drives: list[DrivePulse],
                            dressed: bool = True):
    """Time-dependent Hamiltonian handle for ``propagate``.

    Returns h(t) on the full space, in the dressed product basis by default
    (the bare basis otherwise).
    """
    from .device import assemble_h0, assemble_hdr, assemble_hi

    h_bare = (assemble_h0(params) + assemble_hi(params)).mat
    frame = dressed_frame(params)
    q = frame.transform

    def handle(t: float) -> np.ndarray:
        h = h_bare.copy()
        hdr = assemble_hdr(params, drives, t).mat
        h = h + hdr
        if dressed:
            return q.conj().T @ h @ q
        return h

    return handle
