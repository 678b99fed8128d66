"""Dense operator toolkit for small multipartite quantum systems.

All matrices are dense complex numpy arrays.  Frequencies are ordinary
frequencies in GHz, times in ns, so every dynamical phase carries an
explicit factor of 2*pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULIS = {"I": I2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}
PAULI_LABELS_1Q = ("I", "X", "Y", "Z")


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class Operator:
    """A dense matrix together with its tensor-factor dimensions."""

    dims: tuple[int, ...]
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        total = int(np.prod(self.dims))
        if mat.shape != (total, total):
            raise OperatorError(
                f"matrix shape {mat.shape} inconsistent with dims {self.dims}"
            )

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.dims, self.mat.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise OperatorError(f"dims mismatch: {self.dims} vs {other.dims}")
        return Operator(self.dims, self.mat @ other.mat)

    def __add__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise OperatorError(f"dims mismatch: {self.dims} vs {other.dims}")
        return Operator(self.dims, self.mat + other.mat)

    def __sub__(self, other: "Operator") -> "Operator":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "Operator":
        return Operator(self.dims, scalar * self.mat)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        scale = max(np.linalg.norm(self.mat), 1.0)
        return np.linalg.norm(self.mat - self.mat.conj().T) <= tol * scale

    def is_unitary(self, tol: float = UNITARITY_TOL) -> bool:
        d = self.dim
        return np.linalg.norm(self.mat.conj().T @ self.mat - np.eye(d)) <= tol * d


def operator(mat: np.ndarray, dims: Sequence[int] | None = None) -> Operator:
    mat = np.asarray(mat, dtype=complex)
    if dims is None:
        dims = (mat.shape[0],)
    return Operator(tuple(dims), mat)


def identity(dims: Sequence[int]) -> Operator:
    total = int(np.prod(list(dims)))
    return Operator(tuple(dims), np.eye(total, dtype=complex))


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product; dims are concatenated."""
    return Operator(a.dims + b.dims, np.kron(a.mat, b.mat))


def kron_all(*ops: Operator) -> Operator:
    out = ops[0]
    for op in ops[1:]:
        out = kron(out, op)
    return out


def annihilation(n_fock: int) -> Operator:
    """Bosonic annihilation operator truncated to n_fock Fock states."""
    if n_fock < 2:
        raise OperatorError(f"annihilation needs n_fock >= 2, got {n_fock}")
    a = np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), k=1)
    return Operator((n_fock,), a.astype(complex))


def _as_matrix(h) -> tuple[np.ndarray, tuple[int, ...] | None]:
    if isinstance(h, Operator):
        return h.mat, h.dims
    return np.asarray(h, dtype=complex), None


def expm_hermitian(h, t: float):
    """exp(-i * 2*pi * h * t) via eigendecomposition (h in GHz, t in ns).

    The input is symmetrized before diagonalizing; inputs that are not
    Hermitian within tolerance are rejected.
    """
    mat, dims = _as_matrix(h)
    scale = max(np.linalg.norm(mat), 1.0)
    if np.linalg.norm(mat - mat.conj().T) > HERMITICITY_TOL * scale:
        raise OperatorError("expm_hermitian: input is not Hermitian")
    sym = 0.5 * (mat + mat.conj().T)
    evals, evecs = np.linalg.eigh(sym)
    u = (evecs * np.exp(-2j * np.pi * evals * t)) @ evecs.conj().T
    if dims is None:
        return u
    return Operator(dims, u)


def partial_trace(rho, keep: Sequence[int], dims: Sequence[int] | None = None):
    """Trace out all subsystems not in ``keep``.

    ``keep`` indexes into the subsystem list; the result carries the kept
    subsystems in their original relative order.
    """
    if isinstance(rho, Operator):
        mat, dims = rho.mat, rho.dims
        wrap = True
    else:
        mat = np.asarray(rho, dtype=complex)
        if dims is None:
            raise OperatorError("partial_trace of a bare matrix needs dims")
        wrap = False
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or any(k < 0 or k >= n for k in keep):
        raise OperatorError(f"invalid keep set {keep} for {n} subsystems")
    tensor = mat.reshape(dims + dims)
    # trace out dropped subsystems one at a time, highest axis first
    drop = [i for i in range(n) if i not in keep]
    ndims = list(dims)
    for ax in sorted(drop, reverse=True):
        k = len(ndims)
        tensor = np.trace(tensor, axis1=ax, axis2=ax + k)
        ndims.pop(ax)
    total = int(np.prod(ndims))
    out = tensor.reshape(total, total)
    if wrap:
        return Operator(tuple(ndims), out)
    return out


def pauli_string(label: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. ``"ZX"`` -> sigma_z x sigma_x."""
    out = PAULIS[label[0]]
    for ch in label[1:]:
        out = np.kron(out, PAULIS[ch])
    return out


def pauli_decompose(h: np.ndarray, n_qubits: int) -> dict[str, complex]:
    """Coefficients c_P such that h = sum_P c_P * P over all Pauli strings."""
    labels = [""]
    for _ in range(n_qubits):
        labels = [l + ch for l in labels for ch in PAULI_LABELS_1Q]
    d = 2**n_qubits
    return {l: complex(np.trace(pauli_string(l).conj().T @ h) / d) for l in labels}


def rotation(axis: str, angle: float, qubit: int, n_qubits: int = 2) -> np.ndarray:
    """exp(-i * angle/2 * P_qubit) for a single-qubit Pauli axis."""
    if not 1 <= qubit <= n_qubits:
        raise OperatorError(f"qubit index {qubit} out of range")
    if axis.upper() not in ("X", "Y", "Z"):
        raise OperatorError(f"rotation axis must be x, y or z, got {axis!r}")
    label = "".join(
        axis.upper() if q + 1 == qubit else "I" for q in range(n_qubits)
    )
    p = pauli_string(label)
    d = 2**n_qubits
    return np.cos(angle / 2) * np.eye(d, dtype=complex) - 1j * np.sin(angle / 2) * p


def global_phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Frobenius distance between u and v minimized over a global phase."""
    inner = np.trace(u.conj().T @ v)
    phase = inner / abs(inner) if abs(inner) > 1e-300 else 1.0
    return float(np.linalg.norm(u * phase - v))
