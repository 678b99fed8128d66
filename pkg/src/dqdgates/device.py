"""Device model: lab-frame Hamiltonian assembly, dressed single-DQD bases,
and the effective two-qubit model from numerical block diagonalization.

Each double quantum dot (DQD) carries a spin and an orbital (position)
two-level degree of freedom; both dots couple to one common resonator mode.
Subsystem order throughout is (spin1, orbit1, spin2, orbit2, resonator).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .operators import (
    I2,
    SIGMA_X,
    SIGMA_Z,
    Operator,
    OperatorError,
    annihilation,
    kron_all,
    operator,
    pauli_decompose,
)

DEGENERACY_TOL = 1e-9
SW_GAP_TOL = 1e-6
DISPERSIVE_RATIO_MAX = 0.2


class DeviceError(ValueError):
    pass


class DispersiveRegimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DeviceParams:
    """Static device parameters, all frequencies in GHz.

    ``t_c`` is stored so the orbital splitting at epsilon = 0 is 2*t_c.
    """

    omega_r: float
    epsilon: tuple[float, float]
    t_c: tuple[float, float]
    omega_z: tuple[float, float]
    g_ac: tuple[float, float]
    g_x: tuple[float, float]
    n_fock: int = 10

    def __post_init__(self):
        for name in ("epsilon", "t_c", "omega_z", "g_ac", "g_x"):
            val = tuple(float(x) for x in getattr(self, name))
            if len(val) != 2:
                raise DeviceError(f"{name} must have one entry per dot")
            object.__setattr__(self, name, val)
        vals = (self.omega_r, *self.t_c, *self.omega_z, *self.g_ac, *self.g_x,
                *self.epsilon)
        if not all(np.isfinite(v) for v in vals):
            raise DeviceError("all device parameters must be finite")
        if self.omega_r <= 0 or any(v <= 0 for v in self.t_c + self.omega_z):
            raise DeviceError("omega_r, t_c and omega_z must be positive")
        if any(v < 0 for v in self.g_ac + self.g_x):
            raise DeviceError("couplings must be non-negative")
        for i in range(2):
            if not 2 * self.t_c[i] > self.omega_z[i]:
                raise DeviceError(
                    f"dot {i + 1}: requires 2*t_c > omega_z "
                    f"(got {2 * self.t_c[i]} <= {self.omega_z[i]})"
                )
        if self.n_fock < 2:
            raise DeviceError("n_fock must be >= 2")
        self._check_dispersive()

    def _check_dispersive(self):
        for i in range(2):
            dqd = diagonalize_dqd(self, i + 1, _validate=False)
            q = dqd.basis_transform
            tz = q.conj().T @ np.kron(I2, SIGMA_Z) @ q
            # coupling felt by the spin-like transition is g_ac times the
            # hybridization matrix element between the two qubit states
            g_sigma = self.g_ac[i] * abs(tz[0, 2])
            g_tau = self.g_ac[i] * max(abs(tz[0, 1]), abs(tz[2, 3]))
            ratio = max(
                g_sigma / abs(self.omega_r - dqd.omega_sigma),
                g_tau / abs(self.omega_r - dqd.omega_tau),
            )
            if ratio >= DISPERSIVE_RATIO_MAX:
                warnings.warn(
                    f"dot {i + 1}: coupling/detuning ratio {ratio:.3f} >= "
                    f"{DISPERSIVE_RATIO_MAX}; dispersive reduction may be "
                    "inaccurate",
                    DispersiveRegimeWarning,
                    stacklevel=3,
                )


@dataclass(frozen=True)
class DrivePulse:
    """One square-envelope microwave drive of a dot detuning."""

    dot: int                 # 1 or 2
    amplitude: float         # envelope amplitude in GHz
    frequency: float         # carrier frequency in GHz
    phase: float = 0.0       # carrier phase in radians
    window: tuple[float, float] = (0.0, np.inf)   # [t_on, t_off] in ns

    def __post_init__(self):
        if self.dot not in (1, 2):
            raise DeviceError("drive dot index must be 1 or 2")
        if self.amplitude < 0:
            raise DeviceError("drive amplitude must be >= 0")
        t_on, t_off = self.window
        if not t_off > t_on:
            raise DeviceError("drive window must have t_off > t_on")

    def envelope(self, t: float) -> float:
        t_on, t_off = self.window
        if t_on <= t < t_off:
            return self.amplitude
        return 0.0


@dataclass(frozen=True)
class DressedDqd:
    """Spin-orbit hybridized eigenbasis of one DQD."""

    omega_tau: float           # orbit-like transition, GHz
    omega_sigma: float         # spin-like (qubit) transition, GHz
    basis_transform: np.ndarray   # 4x4 unitary, bare (spin x orbit) -> dressed
    energies: np.ndarray       # eigenvalues ordered as the dressed basis

    def __post_init__(self):
        if not (self.omega_tau > self.omega_sigma > 0):
            raise DeviceError(
                f"expected omega_tau > omega_sigma > 0, got "
                f"{self.omega_tau}, {self.omega_sigma}"
            )


@dataclass(frozen=True)
class DriveProjection:
    """A drive operator projected onto the two-qubit subspace."""

    dot: int
    frequency: float
    Omega_x: float
    Omega_z: float
    amplitude: float           # lab-frame envelope amplitude fed in


@dataclass(frozen=True)
class EffectiveModel:
    """Reduced two-qubit model: splittings, exchange and projected drives."""

    omega_1: float
    omega_2: float
    J: float
    drives: tuple[DriveProjection, ...] = ()
    residual_terms: dict | None = None
    sw_residual: float = 0.0

    @property
    def Delta(self) -> float:
        return self.omega_1 - self.omega_2

    def _control(self) -> DriveProjection:
        for d in self.drives:
            if d.dot == 1:
                return d
        raise DeviceError("no drive on dot 1 in this model")

    @property
    def Omega_x_1(self) -> float:
        return self._control().Omega_x

    @property
    def Omega_x_2(self) -> float:
        for d in self.drives:
            if d.dot == 2:
                return d.Omega_x
        raise DeviceError("no drive on dot 2 in this model")

    @property
    def delta_1(self) -> float:
        return self.omega_1 - self._control().frequency

    @property
    def eta(self) -> float:
        return float(np.hypot(self.delta_1, self.Omega_x_1))

    @property
    def chi(self) -> float:
        return float(np.arctan2(self.Omega_x_1, self.delta_1))

    @property
    def J_tilde(self) -> float:
        return self.J * self.Omega_x_1 / self.eta


def dqd_hamiltonian(params: DeviceParams, dot: int) -> np.ndarray:
    """4x4 single-DQD Hamiltonian in the bare (spin x orbit) basis."""
    i = dot - 1
    return (
        0.5 * params.epsilon[i] * np.kron(I2, SIGMA_Z)
        + params.t_c[i] * np.kron(I2, SIGMA_X)
        + 0.5 * params.omega_z[i] * np.kron(SIGMA_Z, I2)
        + params.g_x[i] * np.kron(SIGMA_X, SIGMA_Z)
    )


def _reference_states(params: DeviceParams, dot: int):
    """g_x = 0 product eigenstates used for adiabatic labeling.

    Returns a (4, 4) array whose column 2*i_sigma + i_tau is the product of
    spin state i_sigma (0 = up) and orbital eigenstate i_tau (0 = ground).
    """
    i = dot - 1
    h_orb = 0.5 * params.epsilon[i] * SIGMA_Z + params.t_c[i] * SIGMA_X
    _, orb_vecs = np.linalg.eigh(h_orb)
    spin = np.eye(2, dtype=complex)      # column 0 = |up> (sigma_z = +1)
    refs = np.zeros((4, 4), dtype=complex)
    for i_sigma in range(2):
        for i_tau in range(2):
            refs[:, 2 * i_sigma + i_tau] = np.kron(spin[:, i_sigma],
                                                   orb_vecs[:, i_tau])
    return refs


def diagonalize_dqd(params: DeviceParams, dot: int,
                    _validate: bool = True) -> DressedDqd:
    """Exact eigenbasis of one DQD with adiabatic labeling.

    Dressed basis columns are ordered by (i_sigma, i_tau) with index
    2*i_sigma + i_tau, where i_sigma = 0 is the spin-up-like state and
    i_tau = 0 the orbital ground state.  Each eigenvector's phase is fixed
    by a positive overlap with its g_x = 0 reference state, which keeps the
    basis continuous under parameter sweeps.
    """
    h = dqd_hamiltonian(params, dot)
    evals, evecs = np.linalg.eigh(h)
    gaps = np.diff(np.sort(evals))
    if np.any(gaps < DEGENERACY_TOL):
        raise DeviceError(
            f"dot {dot}: near-degenerate spectrum (min gap {gaps.min():.3e} "
            "GHz); adiabatic labeling is ambiguous"
        )
    refs = _reference_states(params, dot)
    q = np.zeros((4, 4), dtype=complex)
    energies = np.zeros(4)
    used: set[int] = set()
    for col in range(4):
        overlaps = np.abs(refs[:, col].conj() @ evecs)
        for k in np.argsort(-overlaps):
            if k not in used:
                used.add(k)
                break
        v = evecs[:, k]
        ov = refs[:, col].conj() @ v
        v = v * np.exp(-1j * np.angle(ov))
        q[:, col] = v
        energies[col] = evals[k]
    omega_sigma = energies[0] - energies[2]          # (up,gnd) - (down,gnd)
    omega_tau = 0.5 * (energies[1] + energies[3] - energies[0] - energies[2])
    if _validate:
        return DressedDqd(omega_tau, omega_sigma, q, energies)
    return _unchecked_dressed(omega_tau, omega_sigma, q, energies)


def _unchecked_dressed(omega_tau, omega_sigma, q, energies) -> DressedDqd:
    obj = object.__new__(DressedDqd)
    object.__setattr__(obj, "omega_tau", omega_tau)
    object.__setattr__(obj, "omega_sigma", omega_sigma)
    object.__setattr__(obj, "basis_transform", q)
    object.__setattr__(obj, "energies", energies)
    return obj


def _full_dims(params: DeviceParams) -> tuple[int, ...]:
    return (2, 2, 2, 2, params.n_fock)


def assemble_h0(params: DeviceParams) -> Operator:
    """Static Hamiltonian: resonator + both DQDs, bare basis."""
    f = params.n_fock
    a = annihilation(f).mat
    num = operator(a.conj().T @ a, (f,))
    i2 = operator(I2)
    dot_hs = [operator(dqd_hamiltonian(params, d), (2, 2)) for d in (1, 2)]
    h = kron_all(dot_hs[0], i2, i2, operator(np.eye(f), (f,)))
    h = h + kron_all(i2, i2, dot_hs[1], operator(np.eye(f), (f,)))
    h = h + params.omega_r * kron_all(i2, i2, i2, i2, num)
    return h


def _tau_z_full(params: DeviceParams, dot: int) -> Operator:
    f = params.n_fock
    i2 = operator(I2)
    i_f = operator(np.eye(f), (f,))
    tz = operator(SIGMA_Z)
    if dot == 1:
        return kron_all(i2, tz, i2, i2, i_f)
    return kron_all(i2, i2, i2, tz, i_f)


def assemble_hi(params: DeviceParams) -> Operator:
    """Charge-resonator coupling sum_i g_ac_i (a + a^dag) tau_i^z."""
    f = params.n_fock
    a = annihilation(f).mat
    x = operator(a + a.conj().T, (f,))
    i2 = operator(I2)
    tz = operator(SIGMA_Z)
    h = params.g_ac[0] * kron_all(i2, tz, i2, i2, x)
    h = h + params.g_ac[1] * kron_all(i2, i2, i2, tz, x)
    return h


def assemble_hdr(params: DeviceParams, drives: list[DrivePulse],
                 t: float) -> Operator:
    """Microwave drive term at time t (ns); zero outside all windows."""
    h = 0.0 * _tau_z_full(params, 1)
    for d in drives:
        amp = d.envelope(t)
        if amp == 0.0:
            continue
        c = amp * np.cos(2 * np.pi * d.frequency * t + d.phase)
        h = h + c * _tau_z_full(params, d.dot)
    return h


@dataclass(frozen=True)
class DressedFrame:
    """Full-system eigenbasis of H0 and bookkeeping for the qubit block."""

    params: DeviceParams
    dqds: tuple[DressedDqd, DressedDqd]
    transform: np.ndarray        # bare -> dressed, full dimension
    energies: np.ndarray         # H0 eigenvalues in dressed order
    block: np.ndarray            # flat indices of the 4 computational states

    @property
    def dims(self) -> tuple[int, ...]:
        return _full_dims(self.params)


def dressed_frame(params: DeviceParams) -> DressedFrame:
    """Diagonalize H0 as a product of single-DQD dressed bases.

    Dressed dims stay (spin1, orbit1, spin2, orbit2, resonator); the
    computational block is both orbits in their ground state with zero
    photons.
    """
    f = params.n_fock
    d1 = diagonalize_dqd(params, 1)
    d2 = diagonalize_dqd(params, 2)
    transform = np.kron(np.kron(d1.basis_transform, d2.basis_transform),
                        np.eye(f))
    energies = (
        d1.energies[:, None, None]
        + d2.energies[None, :, None]
        + params.omega_r * np.arange(f)[None, None, :]
    ).reshape(-1)
    # dressed per-dot index 2*i_sigma + i_tau: qubit states have i_tau = 0
    block = np.array([(i1 * 4 + i2) * f for i1 in (0, 2) for i2 in (0, 2)])
    return DressedFrame(params, (d1, d2), transform, energies, block)


def schrieffer_wolff(h0, v, block):
    """First-order Schrieffer-Wolff block diagonalization.

    ``h0`` must be diagonal in the working basis; ``v`` is the coupling;
    ``block`` lists the low-energy indices.  Returns the effective block
    Hamiltonian P(h0 + v + [S, v]/2)P, the antihermitian generator S and
    the norm of the off-block coupling left after applying exp(S).
    """
    if isinstance(h0, Operator):
        h0m, vm, dims = h0.mat, v.mat, h0.dims
    else:
        h0m, vm, dims = np.asarray(h0), np.asarray(v), None
    d = h0m.shape[0]
    if np.linalg.norm(h0m - np.diag(np.diag(h0m))) > 1e-10 * max(
        np.linalg.norm(h0m), 1.0
    ):
        raise DeviceError("schrieffer_wolff: h0 must be diagonal")
    energies = np.real(np.diag(h0m))
    block = np.asarray(sorted(set(int(b) for b in block)))
    if block.size == 0 or block.min() < 0 or block.max() >= d:
        raise DeviceError("schrieffer_wolff: invalid block indices")
    mask = np.zeros(d, dtype=bool)
    mask[block] = True
    comp = np.where(~mask)[0]

    s = np.zeros((d, d), dtype=complex)
    for m in block:
        de = energies[m] - energies[comp]
        coupled = np.abs(vm[m, comp]) > 1e-14
        small = coupled & (np.abs(de) < SW_GAP_TOL)
        if np.any(small):
            k = comp[np.argmax(small)]
            raise DeviceError(
                f"schrieffer_wolff: levels {m} and {k} are separated by "
                f"{energies[m] - energies[k]:.3e} GHz but coupled by v"
            )
        row = np.zeros(comp.size, dtype=complex)
        row[coupled] = vm[m, comp][coupled] / de[coupled]
        s[m, comp] = row
        s[comp, m] = -np.conj(row)

    h_eff_full = h0m + vm + 0.5 * (s @ vm - vm @ s)
    h_eff = h_eff_full[np.ix_(block, block)]

    from scipy.linalg import expm

    es = expm(s)
    transformed = es @ (h0m + vm) @ es.conj().T
    residual = float(np.linalg.norm(transformed[np.ix_(block, comp)]))

    if dims is not None:
        return Operator((len(block),), h_eff), Operator(dims, s), residual
    return h_eff, s, residual


def _sw_block_pieces(frame: DressedFrame):
    """Sliced Schrieffer-Wolff ingredients for fast effective-model builds."""
    params = frame.params
    f = params.n_fock
    a = annihilation(f).mat
    x = a + a.conj().T
    i4 = np.eye(4)
    i_f = np.eye(f)
    q1, q2 = frame.dqds[0].basis_transform, frame.dqds[1].basis_transform
    tz_bare = np.kron(I2, SIGMA_Z)
    tz1 = q1.conj().T @ tz_bare @ q1
    tz2 = q2.conj().T @ tz_bare @ q2
    v = (params.g_ac[0] * np.kron(np.kron(tz1, i4), x)
         + params.g_ac[1] * np.kron(np.kron(i4, tz2), x))
    w = {1: np.kron(np.kron(tz1, i4), i_f),
         2: np.kron(np.kron(i4, tz2), i_f)}
    return v, w


def _project_with_sw(frame: DressedFrame, v: np.ndarray,
                     extra: np.ndarray | None = None):
    """Effective 4x4 block of h0 + v (+ first-order dressing of ``extra``)."""
    e = frame.energies
    d = e.size
    block = frame.block
    mask = np.zeros(d, dtype=bool)
    mask[block] = True
    comp = np.where(~mask)[0]
    v_bc = v[np.ix_(block, comp)]
    de = e[block][:, None] - e[comp][None, :]
    if np.any((np.abs(v_bc) > 1e-14) & (np.abs(de) < SW_GAP_TOL)):
        raise DeviceError("effective model: vanishing gap across the block")
    s_bc = np.where(np.abs(v_bc) > 1e-14, v_bc / de, 0.0)
    v_cb = v[np.ix_(comp, block)]
    s_cb = -s_bc.conj().T
    h_blk = (np.diag(e[block]) + v[np.ix_(block, block)]
             + 0.5 * (s_bc @ v_cb - v_bc @ s_cb))
    if extra is None:
        return h_blk, None
    w_blk = (extra[np.ix_(block, block)]
             + s_bc @ extra[np.ix_(comp, block)]
             - extra[np.ix_(block, comp)] @ s_cb)
    return h_blk, w_blk


RESIDUAL_WARN_FRACTION = 0.01


class EffectiveModelWarning(UserWarning):
    pass


def extract_effective_model(params: DeviceParams,
                            drives: list[DrivePulse] = (),
                            warn_residual: bool = True) -> EffectiveModel:
    """Reduced two-qubit model from numerical Schrieffer-Wolff.

    Block-diagonalizes the resonator coupling around the empty-cavity,
    ground-orbital subspace, Pauli-decomposes the 4x4 block and projects
    each drive operator tau_i^z to its sigma_x / sigma_z components.
    """
    frame = dressed_frame(params)
    v, w_ops = _sw_block_pieces(frame)
    h_blk, _ = _project_with_sw(frame, v)
    coeffs = pauli_decompose(h_blk, 2)
    omega_1 = 2 * coeffs["ZI"].real
    omega_2 = 2 * coeffs["IZ"].real
    j = -coeffs["XX"].real
    residuals = {
        k: val.real
        for k, val in coeffs.items()
        if k not in ("II", "ZI", "IZ", "XX", "ZZ") and abs(val) > 1e-15
    }
    if warn_residual and j != 0:
        bad = {k: v_ for k, v_ in residuals.items()
               if abs(v_) > RESIDUAL_WARN_FRACTION * abs(j)}
        if bad:
            warnings.warn(
                f"effective model residual Pauli terms above 1% of J: {bad}",
                EffectiveModelWarning,
                stacklevel=2,
            )

    projections = []
    for d in drives:
        _, w_blk = _project_with_sw(frame, v, extra=w_ops[d.dot])
        wc = pauli_decompose(w_blk, 2)
        lx = "XI" if d.dot == 1 else "IX"
        lz = "ZI" if d.dot == 1 else "IZ"
        projections.append(
            DriveProjection(
                dot=d.dot,
                frequency=d.frequency,
                Omega_x=abs(d.amplitude * wc[lx].real),
                Omega_z=d.amplitude * wc[lz].real,
                amplitude=d.amplitude,
            )
        )
    return EffectiveModel(
        omega_1=omega_1,
        omega_2=omega_2,
        J=j,
        drives=tuple(projections),
        residual_terms=residuals,
    )


@dataclass(frozen=True)
class ModelShift:
    """Exact effective-model differences under one noise draw."""

    nominal: EffectiveModel
    shifted: EffectiveModel
    delta_omega_1: float
    delta_omega_2: float
    delta_J: float
    delta_Omega_x: dict[int, float]      # keyed by dot index
    delta_eta: float | None = None
    delta_chi: float | None = None
    delta_J_tilde: float | None = None   # J_tilde(shifted) - J_tilde(nominal)


def apply_noise(params: DeviceParams, sample) -> DeviceParams:
    """Device parameters shifted by one quasistatic noise draw."""
    eps = tuple(params.epsilon[i] + sample.delta_epsilon[i] for i in range(2))
    tc = tuple(params.t_c[i] + sample.delta_t_c[i] for i in range(2))
    for i in range(2):
        if not 2 * tc[i] > params.omega_z[i]:
            raise DeviceError(
                f"noise sample drives dot {i + 1} out of the 2*t_c > omega_z "
                "regime"
            )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DispersiveRegimeWarning)
        return replace(params, epsilon=eps, t_c=tc)


def shifted_model(params: DeviceParams, drives: list[DrivePulse],
                  sample, nominal: EffectiveModel | None = None
                  ) -> ModelShift:
    """Effective model at noise-shifted (epsilon, t_c), drives held fixed.

    Drive amplitudes and frequencies stay at their programmed values; all
    reported deltas are exact differences shifted - nominal.  Passing a
    precomputed ``nominal`` model skips recomputing it (Monte Carlo path).
    """
    if nominal is None:
        nominal = extract_effective_model(params, drives, warn_residual=False)
    shifted = extract_effective_model(apply_noise(params, sample), drives,
                                      warn_residual=False)
    d_ox = {
        dn.dot: ds.Omega_x - dn.Omega_x
        for dn, ds in zip(nominal.drives, shifted.drives)
    }
    kw = {}
    if any(d.dot == 1 for d in nominal.drives):
        kw = dict(
            delta_eta=shifted.eta - nominal.eta,
            delta_chi=shifted.chi - nominal.chi,
            delta_J_tilde=shifted.J_tilde - nominal.J_tilde,
        )
    return ModelShift(
        nominal=nominal,
        shifted=shifted,
        delta_omega_1=shifted.omega_1 - nominal.omega_1,
        delta_omega_2=shifted.omega_2 - nominal.omega_2,
        delta_J=shifted.J - nominal.J,
        delta_Omega_x=d_ox,
        **kw,
    )


def drive_amplitude_for(params: DeviceParams, dot: int, frequency: float,
                        target_Omega_x: float,
                        bracket: tuple[float, float] = (1e-6, 2.0)) -> float:
    """Envelope amplitude whose projected sigma_x drive equals the target.

    Solved by bisection on the projected amplitude (which is monotone in
    the envelope amplitude).
    """
    def gap(amp):
        drive = DrivePulse(dot=dot, amplitude=amp, frequency=frequency)
        model = extract_effective_model(params, [drive], warn_residual=False)
        return model.drives[0].Omega_x - target_Omega_x

    lo, hi = bracket
    if gap(hi) < 0:
        raise DeviceError(
            f"target Omega_x = {target_Omega_x} GHz unreachable below "
            f"envelope amplitude {hi} GHz"
        )
    return float(brentq(gap, lo, hi, xtol=1e-12))


def zeeman_for_splitting(params: DeviceParams, dot: int, target: float,
                         effective: bool = True) -> float:
    """Zeeman splitting omega_z giving the requested dressed qubit splitting.

    With ``effective=True`` the target refers to the Schrieffer-Wolff
    qubit splitting (including the resonator Lamb shift), otherwise to the
    bare single-DQD dressed splitting.
    """
    def value(wz):
        omz = list(params.omega_z)
        omz[dot - 1] = wz
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DispersiveRegimeWarning)
            p = replace(params, omega_z=tuple(omz))
            if effective:
                m = extract_effective_model(p, warn_residual=False)
                return m.omega_1 if dot == 1 else m.omega_2
            return diagonalize_dqd(p, dot).omega_sigma

    lo, hi = target, min(target + 0.5, 2 * params.t_c[dot - 1] - 1e-6)
    return float(brentq(lambda wz: value(wz) - target, lo, hi, xtol=1e-12))
