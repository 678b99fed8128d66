"""Closed-form quantities of the cross-resonance / iSWAP reduced models:
chi, eta, J_tilde, the psi and zeta angles, lowest-order infidelity
expansions, the eta sweet-spot drive amplitude, and gate-time /
decoherence-penalty helpers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .device import DeviceParams, DrivePulse
from .dynamics import CrErrors, IswapErrors
from .sequences import Correction, Scheme, SequenceKind, build_sequence

__all__ = [
    "AnalyticsError",
    "CrErrors",
    "IswapErrors",
    "ExpansionValidityWarning",
    "closed_forms",
    "psi",
    "zeta",
    "predicted_infidelity",
    "sweet_spot_drive",
    "gate_time_factor",
    "decoherence_penalty",
]


class AnalyticsError(ValueError):
    pass


class ExpansionValidityWarning(UserWarning):
    pass


def closed_forms(delta_1: float, omega_x: float, j: float
                 ) -> tuple[float, float, float]:
    """(chi, eta, J_tilde) for a control drive detuned by delta_1."""
    if delta_1 == 0 and omega_x == 0:
        raise AnalyticsError("chi is undefined at delta_1 = Omega_x = 0")
    chi = float(np.arctan2(omega_x, delta_1))
    eta = float(np.hypot(delta_1, omega_x))
    return chi, eta, j * omega_x / eta


def psi(phi: float) -> float:
    """psi(phi) = arccos(cos(phi/2)/2)."""
    return float(np.arccos(np.cos(phi / 2) / 2))


def zeta(phi: float, eta: float, delta_eta: float, j_tilde: float) -> float:
    """Accumulated control-qubit z phase of 1Qpartial,
    (4 psi + pi - phi)(eta + delta_eta)/J_tilde."""
    return (4 * psi(phi) + np.pi - phi) * (eta + delta_eta) / j_tilde


VALIDITY_RATIO = 0.3

# fitted quartic/cross coefficients of the corrected-sequence expansions
C_1QPARTIAL_ETA = 8.21
C_1QPARTIAL_CROSS = 5.99
C_1QPARTIAL_QUARTIC = 2.02
C_1QFULL_CROSS = 20.41
C_1QFULL_QUARTIC = 8.44
C_ISWAP_FULL_CROSS = 3.00
C_ISWAP_FULL_QUARTIC = 0.25


def _check_ratios(label: str, **ratios: float):
    bad = {k: v for k, v in ratios.items() if abs(v) > VALIDITY_RATIO}
    if bad:
        warnings.warn(
            f"{label}: error ratios outside the lowest-order validity "
            f"window (|ratio| < {VALIDITY_RATIO}): {bad}",
            ExpansionValidityWarning,
            stacklevel=3,
        )


def predicted_infidelity(kind: SequenceKind, ev, j_tilde: float | None = None,
                         j: float | None = None,
                         omega_x_2: float | None = None) -> float:
    """Lowest-order 1 - F of the matching expansion.

    CR kinds take CrErrors plus j_tilde (and omega_x_2 for 2Qecho); iSWAP
    kinds take IswapErrors plus j.  CrErrors.delta_J_tilde follows the
    noisy-Hamiltonian sign convention (coupling decrease).
    """
    if kind.scheme is Scheme.CR:
        if not isinstance(ev, CrErrors):
            raise AnalyticsError("CR expansions take CrErrors")
        if j_tilde is None or j_tilde <= 0:
            raise AnalyticsError("CR expansions need j_tilde > 0")
        r_eta = ev.delta_eta / j_tilde
        r_w2 = ev.delta_omega2 / j_tilde
        r_jt = ev.delta_J_tilde / j_tilde
        if kind.correction is Correction.UNCORRECTED:
            _check_ratios("uncorrected CR", eta=r_eta, omega2=r_w2, jt=r_jt,
                          chi=ev.delta_chi)
            return (np.pi**2 / 20) * r_eta**2 + (2 / 5) * r_w2**2 \
                + (np.pi**2 / 20) * r_jt**2 + (2 / 5) * ev.delta_chi**2
        if kind.correction is Correction.TWO_Q_ECHO:
            if omega_x_2 is None or omega_x_2 <= 0:
                raise AnalyticsError("2Qecho expansion needs omega_x_2 > 0")
            r_w2o = ev.delta_omega2 / omega_x_2
            _check_ratios("2Qecho", omega2=r_w2o, jt=r_jt, chi=ev.delta_chi)
            return (2 / 5) * r_w2o**2 + (np.pi**2 / 20) * r_jt**2 \
                + (2 / 5) * ev.delta_chi**2
        if kind.correction is Correction.ONE_Q_PARTIAL:
            _check_ratios("1Qpartial", eta=r_eta, omega2=r_w2, jt=r_jt,
                          chi=ev.delta_chi)
            return (
                C_1QPARTIAL_ETA * r_eta**2
                + (9 * np.pi**2 / 20) * r_jt**2
                + (2 / 5) * ev.delta_chi**2
                + C_1QPARTIAL_CROSS * r_w2**2 * r_jt
                + C_1QPARTIAL_QUARTIC * r_w2**4
            )
        _check_ratios("1Qfull", omega2=r_w2, jt=r_jt, chi=ev.delta_chi)
        return (
            (5 * np.pi**2 / 4) * r_jt**2
            + (2 / 5) * ev.delta_chi**2
            + C_1QFULL_CROSS * r_w2**2 * r_jt
            + C_1QFULL_QUARTIC * r_w2**4
        )

    if not isinstance(ev, IswapErrors):
        raise AnalyticsError("iSWAP expansions take IswapErrors")
    if j is None or j <= 0:
        raise AnalyticsError("iSWAP expansions need j > 0")
    r_j = ev.delta_J / j
    r_m = ev.delta_omega_minus / j
    r_p = ev.delta_omega_plus / j
    if kind.correction is Correction.UNCORRECTED:
        _check_ratios("uncorrected iSWAP", j=r_j, minus=r_m, plus=r_p)
        return (np.pi**2 / 10) * r_j**2 + (1 / 10) * r_m**2 \
            + (np.pi**2 / 40) * r_p**2
    if kind.correction is Correction.ONE_Q_FULL:
        _check_ratios("iSWAP 1Qfull", j=r_j, minus=r_m)
        return (
            (9 * np.pi**2 / 10) * r_j**2
            + C_ISWAP_FULL_CROSS * r_j * r_m**2
            + C_ISWAP_FULL_QUARTIC * r_m**4
        )
    raise AnalyticsError(f"no expansion for {kind}")


def gate_time_factor(kind: SequenceKind, phi: float) -> float:
    """Duration multiplier of the named construction at target angle phi."""
    return build_sequence(kind, phi).duration_multiplier


def decoherence_penalty(t: float, t2: float, kind: SequenceKind,
                        phi: float) -> float:
    """Relative short-time decoherence penalty exp(-(k^2 - 1) t^2 / T2^2)
    of running the corrected sequence instead of the uncorrected gate of
    duration t."""
    if t < 0 or t2 <= 0:
        raise AnalyticsError("need t >= 0 and t2 > 0")
    k = gate_time_factor(kind, phi)
    return float(np.exp(-(k**2 - 1) * t**2 / t2**2))


@dataclass(frozen=True)
class SweetSpotResult:
    omega_x: float                 # GHz
    sensitivity: float             # sum_i |d eta / d t_ci|, dimensionless
    scan: tuple[tuple[float, float], ...]    # (omega_x, sensitivity) pairs


def sweet_spot_drive(params: DeviceParams, drive: DrivePulse,
                     scan_range: tuple[float, float] = (0.005, 0.08),
                     scan_points: int = 16) -> SweetSpotResult:
    """Control-drive amplitude Omega_1^x minimizing the eta sensitivity.

    The lab-frame envelope amplitude is re-solved for each trial Omega_1^x
    at the nominal parameters and then held fixed while the tunnel
    couplings are perturbed, mirroring how noise enters the experiment.
    Requires Delta = omega_1 - omega_2 > 0 (the sweet spot exists only for
    positive detuning).
    """
    from .device import drive_amplitude_for, extract_effective_model
    from .noise import sensitivity

    if drive.dot != 1:
        raise AnalyticsError("sweet-spot search drives dot 1")
    nominal = extract_effective_model(params, [drive], warn_residual=False)
    if nominal.Delta <= 0:
        raise AnalyticsError(
            f"no sweet spot: requires Delta > 0, got {nominal.Delta:.3e} GHz"
        )

    def sens_at(omega_x: float) -> float:
        amp = drive_amplitude_for(params, 1, drive.frequency, omega_x)
        trial = DrivePulse(dot=1, amplitude=amp, frequency=drive.frequency,
                           phase=drive.phase, window=drive.window)

        def eta_of(p: DeviceParams) -> float:
            m = extract_effective_model(p, [trial], warn_residual=False)
            return m.eta

        return sensitivity(eta_of, params)

    lo, hi = scan_range
    grid = np.linspace(lo, hi, scan_points)
    scan = [(float(x), sens_at(float(x))) for x in grid]
    k = int(np.argmin([s for _, s in scan]))
    if k == 0 or k == len(scan) - 1:
        raise AnalyticsError(
            "sensitivity minimum not interior to the scan range "
            f"[{lo}, {hi}] GHz"
        )
    res = minimize_scalar(
        sens_at, bounds=(grid[k - 1], grid[k + 1]), method="bounded",
        options={"xatol": 1e-5},
    )
    return SweetSpotResult(
        omega_x=float(res.x),
        sensitivity=float(res.fun),
        scan=tuple(scan),
    )
