"""Simulation and analysis of photon-mediated entangling gates between
double-quantum-dot spin qubits: cross-resonance and iSWAP gates, charge
noise sensitivities, and dynamically corrected gate sequences.
"""

from .device import (
    DeviceParams,
    DressedDqd,
    DrivePulse,
    EffectiveModel,
    diagonalize_dqd,
    drive_amplitude_for,
    extract_effective_model,
    shifted_model,
    zeeman_for_splitting,
)
from .dynamics import CrErrors, IswapErrors, TimeGrid
from .fidelity import (
    CNOT,
    ISWAP,
    FidelityReport,
    ProcessMap,
    SubspaceEmbedding,
    average_gate_fidelity,
    maximize_over_local,
    reconstruct_process,
)
from .noise import (
    NoiseSample,
    NoiseSpec,
    monte_carlo_infidelity,
    monte_carlo_sweep,
    sample_noise,
    sensitivity,
)
from .sequences import (
    Correction,
    GateSequence,
    Scheme,
    SequenceKind,
    build_sequence,
    evaluate_sequence,
)
from .config import (
    ConfigError,
    ExperimentConfig,
    load_preset,
    parse_config,
    preset_names,
    serialize,
)
from .analytics import (
    closed_forms,
    decoherence_penalty,
    gate_time_factor,
    predicted_infidelity,
    psi,
    sweet_spot_drive,
    zeta,
)

__version__ = "0.1.0"

__all__ = [
    "DeviceParams", "DressedDqd", "DrivePulse", "EffectiveModel",
    "diagonalize_dqd", "drive_amplitude_for", "extract_effective_model",
    "shifted_model", "zeeman_for_splitting",
    "CrErrors", "IswapErrors", "TimeGrid",
    "CNOT", "ISWAP", "FidelityReport", "ProcessMap", "SubspaceEmbedding",
    "average_gate_fidelity", "maximize_over_local", "reconstruct_process",
    "NoiseSample", "NoiseSpec", "monte_carlo_infidelity",
    "monte_carlo_sweep", "sample_noise", "sensitivity",
    "Correction", "GateSequence", "Scheme", "SequenceKind",
    "build_sequence", "evaluate_sequence",
    "closed_forms", "decoherence_penalty", "gate_time_factor",
    "predicted_infidelity", "psi", "sweet_spot_drive", "zeta",
    "ConfigError", "ExperimentConfig", "load_preset", "parse_config",
    "preset_names", "serialize",
    "__version__",
]
