"""Two-qubit process reconstruction and state-averaged gate fidelity.

The process acting on the qubits is reconstructed by evolving a spanning
set of sixteen product inputs, tracing out the orbital and resonator
degrees of freedom, and assembling the images of all two-qubit Pauli
strings by linearity.  Fidelity is Nielsen's state-averaged formula,
optionally maximized over local (single-qubit) rotations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import minimize

from .operators import pauli_string

PAULI_LABELS = [a + b for a in "IXYZ" for b in "IXYZ"]
PAULIS2 = [pauli_string(lbl) for lbl in PAULI_LABELS]

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
ISWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex
)


class FidelityError(ValueError):
    pass


# single-qubit tomography inputs: |0>, |1>, |+>, |+i>
_KET0 = np.array([1, 0], dtype=complex)
_KET1 = np.array([0, 1], dtype=complex)
_KETP = np.array([1, 1], dtype=complex) / np.sqrt(2)
_KETI = np.array([1, 1j], dtype=complex) / np.sqrt(2)
TOMO_STATES = (_KET0, _KET1, _KETP, _KETI)

# C[i, j, s]: expansion of |i><j| in the four input density matrices rho_s
_C = np.zeros((2, 2, 4), dtype=complex)
_C[0, 0, 0] = 1
_C[1, 1, 1] = 1
_C[0, 1, 2], _C[0, 1, 3] = 1, 1j
_C[0, 1, 0] = _C[0, 1, 1] = -(1 + 1j) / 2
_C[1, 0, 2], _C[1, 0, 3] = 1, -1j
_C[1, 0, 0] = _C[1, 0, 1] = -(1 - 1j) / 2


@dataclass(frozen=True)
class SubspaceEmbedding:
    """Identifies the two-qubit computational subspace of the full space.

    ``qubit_axes`` are the subsystem axes carrying the qubits (in qubit
    order); every other axis sits in its index-0 (ground/vacuum) state for
    embedded inputs and is traced out on the way back.
    """

    dims: tuple[int, ...]
    qubit_axes: tuple[int, int] = (0, 2)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        a1, a2 = self.qubit_axes
        if a1 == a2 or not all(0 <= a < len(dims) for a in (a1, a2)):
            raise FidelityError("invalid qubit axes")
        if dims[a1] != 2 or dims[a2] != 2:
            raise FidelityError("qubit axes must have dimension 2")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def block(self) -> np.ndarray:
        """Flat indices of the embedded computational basis states."""
        idx = []
        for b1, b2 in product(range(2), range(2)):
            multi = [0] * len(self.dims)
            multi[self.qubit_axes[0]] = b1
            multi[self.qubit_axes[1]] = b2
            idx.append(int(np.ravel_multi_index(multi, self.dims)))
        return np.array(idx)

    def embed(self, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
        """Full-space state with the qubits in q1 (x) q2, environment in
        its ground/vacuum state."""
        psi = np.zeros(self.dim, dtype=complex)
        four = np.kron(q1, q2)
        psi[self.block] = four
        return psi

    def input_states(self) -> np.ndarray:
        """(dim, 16) columns of tomography inputs, column 4*s1 + s2."""
        cols = np.zeros((self.dim, 16), dtype=complex)
        for s1, q1 in enumerate(TOMO_STATES):
            for s2, q2 in enumerate(TOMO_STATES):
                cols[:, 4 * s1 + s2] = self.embed(q1, q2)
        return cols

    def reduce(self, psi: np.ndarray) -> np.ndarray:
        """4x4 qubit density matrix: trace out all non-qubit axes."""
        n = len(self.dims)
        rest = [a for a in range(n) if a not in self.qubit_axes]
        t = psi.reshape(self.dims).transpose(list(self.qubit_axes) + rest)
        mat = t.reshape(4, -1)
        return mat @ mat.conj().T

    def subspace_population(self, psi: np.ndarray) -> float:
        return float(np.sum(np.abs(psi[self.block]) ** 2))


@dataclass(frozen=True)
class ProcessMap:
    """Images E(sigma_1^j sigma_2^k) of the two-qubit Pauli strings."""

    images: tuple[np.ndarray, ...]      # 16 4x4 arrays, PAULI_LABELS order
    leakage: float = 0.0

    def __post_init__(self):
        if len(self.images) != 16:
            raise FidelityError("a process needs all 16 Pauli images")
        tr_ii = np.trace(self.images[0]).real
        if abs(tr_ii - 4) > 0.02 * 4:
            raise FidelityError(
                f"E(II) trace {tr_ii:.4f} departs from 4 by more than 2%"
            )

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros((4, 4), dtype=complex)
        for p, image in zip(PAULIS2, self.images):
            out += (np.trace(p @ rho) / 4) * image
        return out

    @classmethod
    def from_unitary(cls, u: np.ndarray, leakage: float = 0.0) -> ProcessMap:
        u = np.asarray(u, dtype=complex)
        images = tuple(u @ p @ u.conj().T for p in PAULIS2)
        return cls(images=images, leakage=leakage)

    @classmethod
    def depolarizing(cls) -> ProcessMap:
        images = [np.zeros((4, 4), dtype=complex) for _ in range(16)]
        images[0] = np.eye(4, dtype=complex)
        return cls(images=tuple(images))


@dataclass(frozen=True)
class FidelityReport:
    """Raw and local-rotation-maximized fidelities of one process."""

    fidelity_raw: float
    fidelity_local_max: float
    post_rotations: tuple[np.ndarray, np.ndarray]
    pre_rotations: tuple[np.ndarray, np.ndarray]
    leakage: float = 0.0
    converged: bool = True
    restart_spread: float = 0.0

    def __post_init__(self):
        if self.fidelity_local_max < self.fidelity_raw - 1e-9:
            raise FidelityError(
                "local maximization returned less than the raw fidelity"
            )


def reconstruct_process(full_propagator, embedding: SubspaceEmbedding,
                        evolved: np.ndarray | None = None) -> ProcessMap:
    """Two-qubit process from a full-space propagator (or evolved columns).

    Either pass a (dim, dim) propagator, or pass ``evolved`` directly as
    the (dim, 16) images of ``embedding.input_states()`` (the propagator is
    then ignored and may be None).  Leakage is one minus the mean
    computational-subspace population of the four evolved basis inputs.
    """
    if evolved is None:
        u = np.asarray(full_propagator, dtype=complex)
        if u.shape != (embedding.dim, embedding.dim):
            raise FidelityError(
                f"propagator shape {u.shape} does not match embedding "
                f"dimension {embedding.dim}"
            )
        evolved = u @ embedding.input_states()
    evolved = np.asarray(evolved, dtype=complex)
    if evolved.shape != (embedding.dim, 16):
        raise FidelityError("evolved columns must have shape (dim, 16)")

    rhos = [embedding.reduce(evolved[:, col]) for col in range(16)]
    # basis inputs |00>, |01>, |10>, |11> sit in columns 0, 1, 4, 5
    pops = [embedding.subspace_population(evolved[:, c]) for c in (0, 1, 4, 5)]
    leakage = float(1 - np.mean(pops))

    images = []
    for p in PAULIS2:
        p_r = p.reshape(2, 2, 2, 2)   # indices (i1, i2, j1, j2)
        image = np.zeros((4, 4), dtype=complex)
        for i1, j1, i2, j2 in product(range(2), repeat=4):
            w = p_r[i1, i2, j1, j2]
            if abs(w) < 1e-15:
                continue
            for s1 in range(4):
                c1 = _C[i1, j1, s1]
                if abs(c1) < 1e-15:
                    continue
                for s2 in range(4):
                    c = c1 * _C[i2, j2, s2]
                    if abs(c) < 1e-15:
                        continue
                    image += w * c * rhos[4 * s1 + s2]
        images.append(image)
    return ProcessMap(images=tuple(images), leakage=leakage)


def _check_unitary(target: np.ndarray):
    target = np.asarray(target, dtype=complex)
    if target.shape != (4, 4):
        raise FidelityError("target must be a 4x4 unitary")
    if np.linalg.norm(target.conj().T @ target - np.eye(4)) > 1e-10 * 4:
        raise FidelityError("target is not unitary within 1e-10")
    return target


def average_gate_fidelity(process: ProcessMap, target: np.ndarray) -> float:
    """State-averaged gate fidelity
    1/5 + (1/80) sum_jk tr(U P_jk U^dag E(P_jk))."""
    target = _check_unitary(target)
    total = 0.0
    for p, image in zip(PAULIS2, process.images):
        total += np.trace(target @ p @ target.conj().T @ image).real
    f = 1 / 5 + total / 80
    if f < -1e-6 or f > 1 + 1e-6:
        warnings.warn(f"average fidelity {f} outside [0, 1]; clipping",
                      stacklevel=2)
    return float(np.clip(f, 0.0, 1.0))


def average_gate_fidelity_unitary(u: np.ndarray, target: np.ndarray) -> float:
    """Fast path for a unitary process: (|tr(U^dag V)|^2 + 4) / 20."""
    tr = np.trace(np.asarray(target).conj().T @ np.asarray(u))
    return float((abs(tr) ** 2 + 4) / 20)


def single_qubit_unitary(theta: float, phi: float, lam: float) -> np.ndarray:
    """ZYZ-style parametrization covering SU(2) up to global phase."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ]
    )


def _local_pair(angles: np.ndarray) -> np.ndarray:
    return np.kron(single_qubit_unitary(*angles[0:3]),
                   single_qubit_unitary(*angles[3:6]))


def maximize_over_local(process, target: np.ndarray, restarts: int = 32,
                        seed: int = 0) -> FidelityReport:
    """Maximize fidelity over local rotations (A1 x A2) U (B1 x B2).

    ``process`` is a ProcessMap or a plain 4x4 unitary (scored by the fast
    closed form).  Twelve angles are optimized by multi-start Powell; the
    first start is the un-rotated gate, the rest are seeded uniformly.
    """
    target = _check_unitary(target)
    unitary_input = not isinstance(process, ProcessMap)
    if unitary_input:
        u = np.asarray(process, dtype=complex)
        leakage = 0.0

        def score(x):
            dressed = _local_pair(x[:6]) @ target @ _local_pair(x[6:])
            return average_gate_fidelity_unitary(u, dressed)
    else:
        leakage = process.leakage

        def score(x):
            dressed = _local_pair(x[:6]) @ target @ _local_pair(x[6:])
            return average_gate_fidelity(process, dressed)

    raw = score(np.zeros(12))
    rng = np.random.default_rng(seed)
    starts = [np.zeros(12)]
    starts += [rng.uniform(0, 2 * np.pi, 12) for _ in range(restarts - 1)]
    finals = []
    best_val, best_x = -np.inf, None
    for x0 in starts:
        res = minimize(
            lambda x: -score(x), x0, method="Powell",
            options={"xtol": 1e-8, "ftol": 1e-12, "maxiter": 8000},
        )
        finals.append(-res.fun)
        if -res.fun > best_val:
            best_val, best_x = -res.fun, res.x
    finals.sort(reverse=True)
    spread = finals[0] - finals[min(1, len(finals) - 1)]
    post = (single_qubit_unitary(*best_x[0:3]),
            single_qubit_unitary(*best_x[3:6]))
    pre = (single_qubit_unitary(*best_x[6:9]),
           single_qubit_unitary(*best_x[9:12]))
    return FidelityReport(
        fidelity_raw=raw,
        fidelity_local_max=max(best_val, raw),
        post_rotations=post,
        pre_rotations=pre,
        leakage=leakage,
        converged=spread <= 1e-4,
        restart_spread=float(spread),
    )
