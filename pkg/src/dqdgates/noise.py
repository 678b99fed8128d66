"""Quasistatic charge noise: Gaussian sampling, finite-difference
parameter sensitivities, and Monte Carlo infidelity sweeps.

Noise enters only as shifts of the detunings and tunnel couplings; each
draw is propagated exactly through the effective model (no linearization).
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .device import (
    DeviceError,
    DeviceParams,
    DispersiveRegimeWarning,
    DrivePulse,
    EffectiveModel,
    ModelShift,
    apply_noise,
    extract_effective_model,
    shifted_model,
)
from .dynamics import CrErrors, IswapErrors
from .fidelity import (
    average_gate_fidelity_unitary,
    maximize_over_local,
)
from .sequences import (
    GateSequence,
    Scheme,
    evaluate_sequence,
    target_unitary,
)


class NoiseError(ValueError):
    pass


# Fig. 4 linkage between the two noise amplitudes: 2 sigma_t = sigma_eps/100
FIG4_SIGMA_RATIO = 1 / 200


@dataclass(frozen=True)
class NoiseSpec:
    """Per-parameter Gaussian widths; independent per dot and parameter."""

    sigma_epsilon: float    # GHz
    sigma_t: float          # GHz

    def __post_init__(self):
        if self.sigma_epsilon < 0 or self.sigma_t < 0:
            raise NoiseError("noise widths must be non-negative")

    @classmethod
    def linked(cls, sigma_epsilon: float) -> NoiseSpec:
        """Tunnel-coupling width tied to the detuning width,
        sigma_t = sigma_epsilon/200."""
        return cls(sigma_epsilon, sigma_epsilon * FIG4_SIGMA_RATIO)


@dataclass(frozen=True)
class NoiseSample:
    """One quasistatic draw, GHz."""

    delta_epsilon: tuple[float, float]
    delta_t_c: tuple[float, float]

    def __post_init__(self):
        vals = (*self.delta_epsilon, *self.delta_t_c)
        if not all(np.isfinite(v) for v in vals):
            raise NoiseError("noise sample entries must be finite")

    @classmethod
    def zero(cls) -> NoiseSample:
        return cls((0.0, 0.0), (0.0, 0.0))


def sample_noise(spec: NoiseSpec, seed: int, n: int) -> list[NoiseSample]:
    """n independent zero-mean Gaussian draws, reproducible per seed."""
    if n < 1:
        raise NoiseError("need at least one sample")
    rng = np.random.default_rng(seed)
    de = rng.normal(0.0, spec.sigma_epsilon, size=(n, 2))
    dt = rng.normal(0.0, spec.sigma_t, size=(n, 2))
    return [
        NoiseSample(tuple(de[k]), tuple(dt[k])) for k in range(n)
    ]


def _perturbed(params: DeviceParams, field: str, dot: int,
               delta: float) -> DeviceParams:
    vals = list(getattr(params, field))
    vals[dot] += delta
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DispersiveRegimeWarning)
        return replace(params, **{field: tuple(vals)})


def sensitivity(quantity, params: DeviceParams, parameter: str = "t_c",
                rel_step: float = 1e-4) -> float:
    """sum_i |d quantity / d p_i| by Richardson-refined central differences.

    ``quantity`` maps DeviceParams to a float; ``parameter`` is "t_c" or
    "epsilon".  Steps are rel_step times the dot's tunnel coupling (the
    natural scale even for epsilon, which is typically zero).
    """
    if parameter not in ("t_c", "epsilon"):
        raise NoiseError("parameter must be 't_c' or 'epsilon'")
    total = 0.0
    for dot in range(2):
        h = rel_step * params.t_c[dot]

        def diff(step):
            up = quantity(_perturbed(params, parameter, dot, +step))
            dn = quantity(_perturbed(params, parameter, dot, -step))
            return (up - dn) / (2 * step)

        d1 = diff(h)
        d2 = diff(h / 2)
        total += abs((4 * d2 - d1) / 3)
    return total


def cr_errors(shift: ModelShift) -> CrErrors:
    """DDF error terms from one exact model shift.

    delta_J_tilde flips sign relative to the raw shifted - nominal
    difference because the noisy DDF Hamiltonian carries the coupling as
    J_tilde - delta_J_tilde.
    """
    return CrErrors(
        delta_eta=shift.delta_eta,
        delta_omega2=shift.delta_omega_2,
        delta_J_tilde=-shift.delta_J_tilde,
        delta_chi=shift.delta_chi,
        delta_Omega_x_2=shift.delta_Omega_x.get(2, 0.0),
    )


def iswap_errors(shift: ModelShift) -> IswapErrors:
    return IswapErrors(
        delta_omega_1=shift.delta_omega_1,
        delta_omega_2=shift.delta_omega_2,
        delta_J=shift.delta_J,
    )


@dataclass(frozen=True)
class MonteCarloResult:
    mean_infidelity: float
    stderr: float
    n: int
    rejected: int


def _score(seq: GateSequence, model: EffectiveModel, errors, omega_x_2,
           target: np.ndarray, local_max: bool, seed: int) -> float:
    u = evaluate_sequence(seq, model, errors, omega_x_2)
    if local_max:
        report = maximize_over_local(u, target, restarts=8, seed=seed)
        return 1.0 - report.fidelity_local_max
    return 1.0 - average_gate_fidelity_unitary(u, target)


def monte_carlo_infidelity(sequence: GateSequence, spec: NoiseSpec,
                           params: DeviceParams,
                           drives: list[DrivePulse] = (),
                           target: np.ndarray | None = None,
                           n: int = 2000, seed: int = 0,
                           omega_x_2: float | None = None,
                           local_max: bool = False,
                           threads: int = 1) -> MonteCarloResult:
    """Mean infidelity of one sequence under quasistatic noise."""
    results = monte_carlo_sweep(
        [sequence], spec, params, drives, targets=None if target is None
        else [target], n=n, seed=seed, omega_x_2=omega_x_2,
        local_max=local_max, threads=threads,
    )
    return results[0]


def monte_carlo_sweep(sequences: list[GateSequence], spec: NoiseSpec,
                      params: DeviceParams, drives: list[DrivePulse] = (),
                      targets: list[np.ndarray] | None = None,
                      n: int = 2000, seed: int = 0,
                      omega_x_2: float | None = None,
                      local_max: bool = False,
                      threads: int = 1) -> list[MonteCarloResult]:
    """Score several sequences on a shared stream of noise draws.

    Each sample's exact model shift is computed once and reused by every
    sequence; samples pushing the device out of its validity regime are
    rejected and counted.  By default each sequence is scored against its
    own zero-noise unitary with the raw (unmaximized) fidelity.
    """
    if not sequences:
        raise NoiseError("no sequences given")
    schemes = {seq.kind.scheme for seq in sequences}
    nominal = extract_effective_model(params, list(drives),
                                      warn_residual=False)
    if targets is None:
        targets = [target_unitary(seq, nominal, omega_x_2)
                   for seq in sequences]
    if len(targets) != len(sequences):
        raise NoiseError("one target per sequence required")
    samples = sample_noise(spec, seed, n)

    def one_sample(item):
        idx, sample = item
        try:
            shift = shifted_model(params, list(drives), sample,
                                  nominal=nominal)
        except DeviceError:
            return None
        errs = {}
        if Scheme.CR in schemes:
            errs[Scheme.CR] = cr_errors(shift)
        if Scheme.ISWAP in schemes:
            errs[Scheme.ISWAP] = iswap_errors(shift)
        return [
            _score(seq, nominal, errs[seq.kind.scheme], omega_x_2, tgt,
                   local_max, seed=seed + idx)
            for seq, tgt in zip(sequences, targets)
        ]

    items = list(enumerate(samples))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one_sample, items))
    else:
        rows = [one_sample(it) for it in items]
    kept = np.array([r for r in rows if r is not None])
    rejected = n - kept.shape[0]
    if kept.size == 0:
        raise NoiseError("all noise samples were rejected")
    out = []
    for col in range(len(sequences)):
        vals = kept[:, col]
        out.append(
            MonteCarloResult(
                mean_infidelity=float(np.mean(vals)),
                stderr=float(np.std(vals, ddof=1) / np.sqrt(vals.size)),
                n=int(vals.size),
                rejected=rejected,
            )
        )
    return out


def loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log(y) vs log(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise NoiseError("log-log slope requires positive data")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def noise_grid(lo: float = 0.01, hi: float = 1.0, points: int = 9
               ) -> np.ndarray:
    """Log-spaced sigma_epsilon grid (GHz) spanning the Fig. 4 axis."""
    return np.geomspace(lo, hi, points)


# re-exported for callers building noisy device parameters directly
__all__ = [
    "NoiseError", "NoiseSpec", "NoiseSample", "sample_noise", "sensitivity",
    "cr_errors", "iswap_errors", "MonteCarloResult",
    "monte_carlo_infidelity", "monte_carlo_sweep", "loglog_slope",
    "noise_grid", "apply_noise",
]
