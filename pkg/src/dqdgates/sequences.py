"""Gate sequences: uncorrected cross-resonance / iSWAP segments and the
corrected 2Qecho, 1Qpartial and 1Qfull constructions.

Sequences are stored in time order (first-applied segment first); the
evaluated unitary is the reverse-order matrix product.  Local pulses are
instantaneous, error-free Pauli rotations (a pi pulse is -i times the
Pauli).  Evolution segments run on the reduced doubly-rotating-frame
models; segment durations always use the nominal coupling, so quasistatic
errors shift the generated angle exactly as they would in the lab.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .device import EffectiveModel
from .dynamics import (
    CrErrors,
    IswapErrors,
    ddf_double_drive_hamiltonian,
    ddf_hamiltonian,
    df_iswap_hamiltonian,
)
from .operators import expm_hermitian, pauli_string, rotation


class SequenceError(ValueError):
    pass


class Scheme(Enum):
    CR = "cr"
    ISWAP = "iswap"


class Correction(Enum):
    UNCORRECTED = "uncorrected"
    TWO_Q_ECHO = "2qecho"
    ONE_Q_PARTIAL = "1qpartial"
    ONE_Q_FULL = "1qfull"


@dataclass(frozen=True)
class SequenceKind:
    scheme: Scheme
    correction: Correction

    def __post_init__(self):
        if (self.scheme is Scheme.ISWAP
                and self.correction is Correction.TWO_Q_ECHO):
            raise SequenceError("2Qecho is defined for the CR scheme only")

    def __str__(self):
        return f"{self.scheme.value}-{self.correction.value}"


@dataclass(frozen=True)
class Evolve:
    """Evolution under a reduced-model Hamiltonian for angle phi.

    kind: 'cr' (control drive only), 'cr2' (simultaneous target drive),
    or 'iswap'.
    """

    kind: str
    phi: float

    def __post_init__(self):
        if self.kind not in ("cr", "cr2", "iswap"):
            raise SequenceError(f"unknown evolution kind {self.kind!r}")
        if not np.isfinite(self.phi):
            raise SequenceError("segment angle must be finite")

    def describe(self) -> str:
        return f"evolve {self.kind} phi={self.phi:.12g}"


@dataclass(frozen=True)
class LocalPulse:
    """Instantaneous single-qubit rotation."""

    axis: str
    qubit: int
    angle: float

    def __post_init__(self):
        if self.axis not in "xyz":
            raise SequenceError("pulse axis must be x, y or z")
        if self.qubit not in (1, 2):
            raise SequenceError("pulse qubit must be 1 or 2")
        if not np.isfinite(self.angle):
            raise SequenceError("pulse angle must be finite")

    def describe(self) -> str:
        return (f"pulse {self.axis}{self.qubit} "
                f"angle={self.angle:.12g}")

    def unitary(self) -> np.ndarray:
        return rotation(self.axis, self.angle, self.qubit)


@dataclass(frozen=True)
class GateSequence:
    """Time-ordered segments realizing one (possibly corrected) gate."""

    kind: SequenceKind
    phi: float
    segments: tuple

    @property
    def evolution_angle(self) -> float:
        return float(sum(s.phi for s in self.segments
                         if isinstance(s, Evolve)))

    @property
    def duration_multiplier(self) -> float:
        """Total evolution time relative to the uncorrected gate of the
        same target angle (local pulses are instantaneous)."""
        return self.evolution_angle / self.phi

    def describe(self) -> str:
        head = f"sequence {self.kind} phi={self.phi:.12g}"
        return "\n".join([head] + [s.describe() for s in self.segments])


def psi_angle(phi: float) -> float:
    """psi(phi) = arccos(cos(phi/2)/2)."""
    return float(np.arccos(np.cos(phi / 2) / 2))


def _pi_pulses(*specs) -> list[LocalPulse]:
    return [LocalPulse(axis, qubit, np.pi) for axis, qubit in specs]


def _one_q_partial_segments(phi: float, kind: str) -> list:
    psi = psi_angle(phi)
    return [
        Evolve(kind, psi - phi / 2),
        LocalPulse("z", 2, np.pi),
        Evolve(kind, 2 * psi + np.pi),
        LocalPulse("z", 2, np.pi),
        Evolve(kind, psi - phi / 2),
    ]


def build_sequence(kind: SequenceKind, phi: float) -> GateSequence:
    """Segment list for the requested construction, exactly as diagrammed."""
    if not 0 < phi <= 2 * np.pi:
        raise SequenceError("phi must lie in (0, 2*pi]")
    evolve_kind = "iswap" if kind.scheme is Scheme.ISWAP else "cr"
    cor = kind.correction
    if cor is Correction.UNCORRECTED:
        segments = [Evolve(evolve_kind, phi)]
    elif cor is Correction.TWO_Q_ECHO:
        segments = (
            _pi_pulses(("y", 1), ("y", 2))
            + [Evolve("cr2", phi / 2)]
            + _pi_pulses(("y", 1), ("y", 2))
            + [Evolve("cr2", phi / 2)]
        )
    elif cor is Correction.ONE_Q_PARTIAL:
        segments = _one_q_partial_segments(phi, evolve_kind)
    elif cor is Correction.ONE_Q_FULL:
        segments = (
            _pi_pulses(("y", 1), ("y", 2))
            + _one_q_partial_segments(phi / 2, evolve_kind)
            + _pi_pulses(("y", 1), ("y", 2))
            + _one_q_partial_segments(phi / 2, evolve_kind)
        )
    else:  # pragma: no cover
        raise SequenceError(f"unknown correction {cor}")
    return GateSequence(kind=kind, phi=phi, segments=tuple(segments))


def _segment_unitary(seg, model: EffectiveModel, errors, omega_x_2):
    if isinstance(seg, LocalPulse):
        return seg.unitary()
    if seg.kind == "iswap":
        if model.J <= 0:
            raise SequenceError("iSWAP segment requires J > 0")
        h = df_iswap_hamiltonian(model, errors)
        duration = seg.phi / (4 * np.pi * model.J)
        return expm_hermitian(h, duration)
    if model.J_tilde <= 0:
        raise SequenceError("cross-resonance segment requires J_tilde > 0")
    if seg.kind == "cr2":
        if omega_x_2 is None:
            raise SequenceError(
                "double-drive segment needs the target-drive amplitude "
                "omega_x_2"
            )
        h = ddf_double_drive_hamiltonian(model, errors, omega_x_2)
    else:
        h = ddf_hamiltonian(model, errors)
    duration = seg.phi / (2 * np.pi * model.J_tilde)
    return expm_hermitian(h, duration)


def evaluate_sequence(seq: GateSequence, model: EffectiveModel,
                      errors=None, omega_x_2: float | None = None
                      ) -> np.ndarray:
    """4x4 unitary of the sequence under the given (noisy) reduced model.

    For the CR scheme a nonzero delta_chi enters as a y-rotation of the
    control qubit wrapping the whole sequence (the noisy frame is
    diagonalized at a slightly different angle).
    """
    is_iswap = seq.kind.scheme is Scheme.ISWAP
    if errors is None:
        errors = IswapErrors() if is_iswap else CrErrors()
    if is_iswap and not isinstance(errors, IswapErrors):
        raise SequenceError("iSWAP sequences take IswapErrors")
    if not is_iswap and not isinstance(errors, CrErrors):
        raise SequenceError("CR sequences take CrErrors")
    u = np.eye(4, dtype=complex)
    for seg in seq.segments:
        u = _segment_unitary(seg, model, errors, omega_x_2) @ u
    if not is_iswap and errors.delta_chi != 0.0:
        r = rotation("y", errors.delta_chi, 1)
        u = r @ u @ r.conj().T
    return u


def target_unitary(seq: GateSequence, model: EffectiveModel,
                   omega_x_2: float | None = None) -> np.ndarray:
    """Zero-noise unitary of the same sequence (the Monte Carlo target)."""
    errors = (IswapErrors() if seq.kind.scheme is Scheme.ISWAP
              else CrErrors())
    return evaluate_sequence(seq, model, errors, omega_x_2)


def one_q_partial_identity(phi: float, eta: float, j_tilde: float
                           ) -> np.ndarray:
    """Closed form of the zero-noise 1Qpartial unitary (up to the global
    phase produced by the exact -i*sigma_z pulses):
    exp(-i*zeta/2 sz1) * exp(-i*(phi+pi)/2 sz1 sx2)."""
    zeta = (4 * psi_angle(phi) + np.pi - phi) * eta / j_tilde
    sz1 = pauli_string("ZI")
    zx = pauli_string("ZX")
    u1 = np.diag(np.exp(-1j * (zeta / 2) * np.diag(sz1)))
    evals, evecs = np.linalg.eigh(zx)
    u2 = (evecs * np.exp(-1j * ((phi + np.pi) / 2) * evals)) @ evecs.conj().T
    return u1 @ u2
