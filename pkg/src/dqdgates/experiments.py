"""Experiment drivers: turn a validated config into CSV tables and a JSON
run summary.

Each experiment kind maps to one ``run_*`` function returning an
``ExperimentResult``; ``write_outputs`` serializes the tables (one CSV per
table, each stamped with the config hash) plus ``summary.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytics import sweet_spot_drive
from .config import ExperimentConfig
from .device import (DeviceParams, DrivePulse, drive_amplitude_for,
                     extract_effective_model, zeeman_for_splitting)
from .dynamics import TimeGrid, evolve_states
from .fidelity import (CNOT, ISWAP, SubspaceEmbedding, maximize_over_local,
                       reconstruct_process)
from .noise import NoiseSpec, monte_carlo_sweep
from .operators import global_phase_distance
from .sequences import (Correction, GateSequence, Scheme, SequenceKind,
                        build_sequence, evaluate_sequence,
                        one_q_partial_identity)

RESONANCE_TOL = 1e-6


class ExperimentError(RuntimeError):
    """A numerical failure while running an experiment."""


@dataclass
class ExperimentResult:
    """Tables are name -> (header, rows); summary is JSON-serializable."""

    tables: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def resolve_device(cfg: ExperimentConfig) -> DeviceParams:
    """DeviceParams from the [device] section, solving Zeeman targets.

    Targets refer to the effective (Schrieffer-Wolff) qubit splittings;
    the solve is iterated once more because each dot's Lamb shift depends
    weakly on the other dot's Zeeman energy.
    """
    d = cfg.values["device"]
    kwargs = dict(
        omega_r=d["omega_r"],
        epsilon=(d["epsilon_1"], d["epsilon_2"]),
        t_c=(d["two_t_c_1"] / 2, d["two_t_c_2"] / 2),
        g_ac=(d["g_ac_1"], d["g_ac_2"]),
        g_x=(d["g_x_1"], d["g_x_2"]),
        n_fock=d["n_fock"],
    )
    wz = [d["omega_z_1"] or 0.0, d["omega_z_2"] or 0.0]
    targets = (d["target_omega_1"], d["target_omega_2"])
    for dot in (1, 2):
        if targets[dot - 1] is not None:
            wz[dot - 1] = targets[dot - 1]   # starting guess
    params = DeviceParams(omega_z=tuple(wz), **kwargs)
    for _ in range(2):
        changed = False
        for dot in (1, 2):
            if targets[dot - 1] is None:
                continue
            wz[dot - 1] = zeeman_for_splitting(params, dot, targets[dot - 1],
                                               effective=True)
            changed = True
        if not changed:
            break
        params = DeviceParams(omega_z=tuple(wz), **kwargs)
    return params


def resolve_drive(cfg: ExperimentConfig, params: DeviceParams,
                  omega_x: float) -> DrivePulse:
    """Control drive on dot 1 with the projected amplitude ``omega_x``.

    Carrier frequency "auto" means the effective splitting of qubit 2
    (cross-resonance condition).
    """
    dcfg = cfg.values["drive"]
    freq = dcfg["frequency"]
    if freq == "auto":
        freq = extract_effective_model(params, (),
                                       warn_residual=False).omega_2
    t_off = dcfg["t_off"] if dcfg["t_off"] is not None else np.inf
    amp = drive_amplitude_for(params, 1, freq, omega_x)
    return DrivePulse(dot=1, amplitude=amp, frequency=freq,
                      phase=dcfg["phase"], window=(dcfg["t_on"], t_off))


def _sequence_set(scheme: str, phi: float) -> list[GateSequence]:
    if scheme == "cr":
        kinds = [SequenceKind(Scheme.CR, c) for c in
                 (Correction.UNCORRECTED, Correction.TWO_Q_ECHO,
                  Correction.ONE_Q_PARTIAL, Correction.ONE_Q_FULL)]
    else:
        kinds = [SequenceKind(Scheme.ISWAP, c) for c in
                 (Correction.UNCORRECTED, Correction.ONE_Q_FULL)]
    return [build_sequence(k, phi) for k in kinds]


def run_cr_fidelity(cfg: ExperimentConfig) -> ExperimentResult:
    """Full-space CR gate simulation: populations, leakage, and the
    local-maximized CNOT fidelity at the end of the drive window."""
    params = resolve_device(cfg)
    sim = cfg.values["simulation"]
    omega_x = cfg.get("drive", "omega_x_1")
    if omega_x is None:
        raise ExperimentError("cr-fidelity needs drive omega_x_1")
    drive = resolve_drive(cfg, params, omega_x)
    model = extract_effective_model(params, (drive,), warn_residual=False)

    t_end = sim["t_end"]
    if t_end is None:
        t_end = (np.pi / 2) / (2 * np.pi * model.J_tilde)
    step = sim["step"]
    n_steps = int(round(t_end / step))
    grid = TimeGrid(0.0, n_steps * step, step)

    dims = [2, 2, 2, 2, params.n_fock]
    emb = SubspaceEmbedding(dims)
    states = emb.input_states()
    k = max(1, sim["sample_points"])
    idx = np.unique(np.round(np.linspace(1, n_steps, k)).astype(int))
    sample_times = idx * step
    sim_out = evolve_states(params, [drive], grid, states,
                            sample_times=sample_times)

    rows = []
    final_proc = None
    for t, cols in zip(sim_out.times, sim_out.states):
        proc = reconstruct_process(None, emb, evolved=cols)
        pops = np.real(np.diag(emb.reduce(cols[:, 0])))
        rows.append([t, *pops, proc.leakage])
        final_proc = proc
    report = maximize_over_local(final_proc, CNOT,
                                 restarts=sim["restarts"], seed=cfg.seed)

    tables = {"timeseries": (
        ["t_ns", "p00", "p01", "p10", "p11", "leakage"], rows)}
    summary = {
        "omega_1": model.omega_1, "omega_2": model.omega_2,
        "J": model.J, "J_tilde": model.J_tilde, "eta": model.eta,
        "chi": model.chi, "Omega_x_1": model.Omega_x_1,
        "drive_amplitude": drive.amplitude,
        "drive_frequency": drive.frequency,
        "t_end_ns": float(sim_out.times[-1]),
        "fidelity_raw": report.fidelity_raw,
        "fidelity_local_max": report.fidelity_local_max,
        "leakage": report.leakage,
        "converged": report.converged,
        "restart_spread": report.restart_spread,
    }
    return ExperimentResult(tables=tables, summary=summary)


def run_sensitivities(cfg: ExperimentConfig) -> ExperimentResult:
    """Charge-noise sensitivities of the effective-model parameters along
    a tunnel-coupling sweep with the qubit splittings re-targeted."""
    from .noise import sensitivity

    sweep = cfg.values["sweep"]
    scheme = sweep["scheme"]
    grid = np.linspace(sweep["two_t_c_min"], sweep["two_t_c_max"],
                       sweep["two_t_c_points"])
    rows = []
    for two_t_c in grid:
        values = dict(cfg.values)
        values["device"] = dict(values["device"],
                                two_t_c_1=two_t_c, two_t_c_2=two_t_c)
        sub = ExperimentConfig(values=values)
        params = resolve_device(sub)
        if scheme == "cr":
            omega_x = cfg.get("drive", "omega_x_1")
            if omega_x is None:
                raise ExperimentError("cr sensitivities need omega_x_1")
            drive = resolve_drive(sub, params, omega_x)
            drives = (drive,)

            def q(attr):
                def quantity(p):
                    m = extract_effective_model(p, drives,
                                                warn_residual=False)
                    return getattr(m, attr)
                return quantity

            model = extract_effective_model(params, drives,
                                            warn_residual=False)
            rows.append([two_t_c, model.J_tilde,
                         sensitivity(q("eta"), params),
                         sensitivity(q("omega_2"), params),
                         sensitivity(q("chi"), params),
                         sensitivity(q("J_tilde"), params)])
        else:
            def q(attr):
                def quantity(p):
                    m = extract_effective_model(p, (),
                                                warn_residual=False)
                    return getattr(m, attr)
                return quantity

            model = extract_effective_model(params, (),
                                            warn_residual=False)
            rows.append([two_t_c, model.J,
                         sensitivity(q("J"), params),
                         sensitivity(q("omega_1"), params),
                         sensitivity(q("omega_2"), params)])
    if scheme == "cr":
        header = ["two_t_c_ghz", "j_tilde_ghz", "sens_eta", "sens_omega_2",
                  "sens_chi", "sens_j_tilde"]
    else:
        header = ["two_t_c_ghz", "j_ghz", "sens_j", "sens_omega_1",
                  "sens_omega_2"]
    summary = {"scheme": scheme, "points": len(rows)}
    return ExperimentResult(tables={"sensitivities": (header, rows)},
                            summary=summary)


def run_noise_sweep(cfg: ExperimentConfig, threads: int = 1
                    ) -> ExperimentResult:
    """Monte Carlo mean infidelity versus charge-noise strength for the
    applicable pulse sequences."""
    params = resolve_device(cfg)
    sweep = cfg.values["sweep"]
    noise = cfg.values["noise"]
    scheme = sweep["scheme"]
    phi = sweep["phi"]
    if phi is None:
        phi = np.pi if scheme == "iswap" else np.pi / 2

    drives = ()
    omega_x_2 = cfg.get("drive", "omega_x_2")
    if scheme == "cr":
        omega_x = cfg.get("drive", "omega_x_1")
        if omega_x is None:
            raise ExperimentError("cr noise sweep needs omega_x_1")
        drives = (resolve_drive(cfg, params, omega_x),)

    seqs = _sequence_set(scheme, phi)
    sigmas = np.geomspace(noise["sigma_min"], noise["sigma_max"],
                          noise["sigma_points"])
    rows = []
    means = {str(s.kind): [] for s in seqs}
    for sigma in sigmas:
        spec = NoiseSpec(sigma_epsilon=sigma,
                         sigma_t=sigma * noise["sigma_t_ratio"])
        results = monte_carlo_sweep(seqs, spec, params, drives=drives,
                                    n=noise["samples"], seed=cfg.seed,
                                    omega_x_2=omega_x_2, threads=threads)
        for seq, res in zip(seqs, results):
            rows.append([sigma, str(seq.kind), res.mean_infidelity,
                         res.stderr, res.n, res.rejected])
            means[str(seq.kind)].append(res.mean_infidelity)

    slopes = {}
    log_s = np.log(sigmas[:3])
    for name, vals in means.items():
        vals = np.asarray(vals)
        slopes[name] = float(np.polyfit(log_s, np.log(vals[:3]), 1)[0])
    summary = {"scheme": scheme, "phi": phi,
               "sigma_grid": [float(s) for s in sigmas],
               "small_sigma_slopes_first3": slopes,
               "mean_infidelity": {k: [float(v) for v in vs]
                                   for k, vs in means.items()}}
    header = ["sigma_epsilon_ghz", "sequence", "mean_infidelity", "stderr",
              "n", "rejected"]
    return ExperimentResult(tables={"noise_sweep": (header, rows)},
                            summary=summary)


def run_sweet_spot(cfg: ExperimentConfig) -> ExperimentResult:
    """Scan the control-drive amplitude for the eta-sensitivity minimum."""
    from .noise import sensitivity

    params = resolve_device(cfg)
    sweep = cfg.values["sweep"]
    freq = extract_effective_model(params, (),
                                   warn_residual=False).omega_2
    probe = DrivePulse(
        dot=1, amplitude=drive_amplitude_for(params, 1, freq, 0.015),
        frequency=freq)
    result = sweet_spot_drive(
        params, probe,
        scan_range=(sweep["omega_x_min"], sweep["omega_x_max"]),
        scan_points=sweep["omega_x_points"])

    def eta_at_probe(p):
        return extract_effective_model(p, (probe,),
                                       warn_residual=False).eta

    sens_ref = sensitivity(eta_at_probe, params)
    rows = [[x, s] for x, s in result.scan]
    summary = {"omega_x_opt_ghz": result.omega_x,
               "sens_eta_opt": result.sensitivity,
               "sens_eta_at_15mhz": sens_ref,
               "suppression_factor": sens_ref / result.sensitivity}
    return ExperimentResult(
        tables={"sweet_spot_scan": (["omega_x_ghz", "sens_eta"], rows)},
        summary=summary)


def run_sequence_check(cfg: ExperimentConfig) -> ExperimentResult:
    """Zero-noise residuals and duration factors for every sequence that
    the configured device supports."""
    params = resolve_device(cfg)
    sim = cfg.values["simulation"]
    phi = cfg.get("sweep", "phi") or np.pi / 2
    omega_x_2 = cfg.get("drive", "omega_x_2")

    omega_x = cfg.get("drive", "omega_x_1")
    if omega_x is None:
        raise ExperimentError("sequence check needs omega_x_1")
    drive = resolve_drive(cfg, params, omega_x)
    model = extract_effective_model(params, (drive,), warn_residual=False)
    model_res = extract_effective_model(params, (), warn_residual=False)

    rows = []
    seqs = _sequence_set("cr", phi)
    if abs(model_res.Delta) <= RESONANCE_TOL:
        seqs += _sequence_set("iswap", phi)
    for seq in seqs:
        is_iswap = seq.kind.scheme is Scheme.ISWAP
        m = model_res if is_iswap else model
        u = evaluate_sequence(seq, m, omega_x_2=omega_x_2)
        if seq.kind.correction is Correction.ONE_Q_PARTIAL:
            ref = one_q_partial_identity(phi, m.eta, m.J_tilde)
            residual = global_phase_distance(u, ref)
        else:
            residual = float("nan")
        target = ISWAP if is_iswap else CNOT
        report = maximize_over_local(u, target, restarts=sim["restarts"],
                                     seed=cfg.seed)
        rows.append([str(seq.kind), phi, seq.duration_multiplier,
                     residual, report.fidelity_local_max,
                     int(report.converged)])
    header = ["sequence", "phi", "duration_factor", "identity_residual",
              "fidelity_local_max", "converged"]
    return ExperimentResult(
        tables={"sequence_check": (header, rows)},
        summary={"phi": phi, "sequences": [r[0] for r in rows]})


RUNNERS = {
    "cr-fidelity": run_cr_fidelity,
    "sensitivities": run_sensitivities,
    "noise-sweep": run_noise_sweep,
    "sweet-spot": run_sweet_spot,
    "sequence-check": run_sequence_check,
}


def run(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Dispatch to the configured experiment kind."""
    runner = RUNNERS[cfg.kind]
    if cfg.kind == "noise-sweep":
        return runner(cfg, threads=threads)
    return runner(cfg)


def _format(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_outputs(result: ExperimentResult, cfg: ExperimentConfig,
                  outdir: str | Path) -> list[Path]:
    """Write one CSV per table plus summary.json; returns written paths.

    Each CSV starts with a comment line recording the config hash, then
    the header row.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (header, rows) in result.tables.items():
        path = outdir / f"{name}.csv"
        with open(path, "w") as f:
            f.write(f"# config_hash={cfg.config_hash}\n")
            f.write(",".join(header) + "\n")
            for row in rows:
                f.write(",".join(_format(v) for v in row) + "\n")
        written.append(path)
    summary = dict(result.summary)
    summary["experiment"] = cfg.kind
    summary["seed"] = cfg.seed
    summary["config_hash"] = cfg.config_hash
    path = outdir / "summary.json"
    with open(path, "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    written.append(path)
    return written
