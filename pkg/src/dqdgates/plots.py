"""Render the experiment CSV tables to PNG figures.

Plotting is an optional convenience layered on the documented column
contract; every figure is derived from the same rows written to disk.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import ExperimentResult  # noqa: E402


def _columns(table, names):
    header, rows = table
    idx = [header.index(n) for n in names]
    return [[row[i] for row in rows] for i in idx]


def render(kind: str, result: ExperimentResult, outdir: str | Path
           ) -> list[Path]:
    """Write the figures for one experiment; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    renderer = _RENDERERS.get(kind)
    if renderer is None:
        return []
    return renderer(result, outdir)


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _render_cr_fidelity(result, outdir):
    t, p00, p01, p10, p11, leak = _columns(
        result.tables["timeseries"],
        ["t_ns", "p00", "p01", "p10", "p11", "leakage"])
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
    for label, p in [("00", p00), ("01", p01), ("10", p10), ("11", p11)]:
        ax1.plot(t, p, marker="o", label=rf"$|{label}\rangle$")
    ax1.set_ylabel("population (from |00⟩)")
    ax1.legend(fontsize=8)
    ax2.plot(t, leak, marker="s", color="tab:red")
    ax2.set_xlabel("time (ns)")
    ax2.set_ylabel("leakage")
    f = result.summary.get("fidelity_local_max")
    if f is not None:
        ax1.set_title(f"CNOT fidelity (local max) = {f:.4f}")
    return [_save(fig, outdir / "cr_fidelity.png")]


def _render_sensitivities(result, outdir):
    header, _ = result.tables["sensitivities"]
    names = [n for n in header if n.startswith("sens_")]
    cols = _columns(result.tables["sensitivities"], ["two_t_c_ghz"] + names)
    x, series = cols[0], cols[1:]
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, y in zip(names, series):
        ax.semilogy(x, y, marker="o", label=name[len("sens_"):])
    ax.set_xlabel(r"$2t_c$ (GHz)")
    ax.set_ylabel(r"$\sum_i |\partial x/\partial t_{c,i}|$")
    ax.legend(fontsize=8)
    return [_save(fig, outdir / "sensitivities.png")]


def _render_noise_sweep(result, outdir):
    header, rows = result.tables["noise_sweep"]
    i_s, i_seq, i_m, i_e = (header.index(n) for n in
                            ("sigma_epsilon_ghz", "sequence",
                             "mean_infidelity", "stderr"))
    series: dict = {}
    for row in rows:
        series.setdefault(row[i_seq], []).append(
            (row[i_s], row[i_m], row[i_e]))
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, pts in series.items():
        s, m, e = zip(*pts)
        ax.errorbar(s, m, yerr=e, marker="o", capsize=2, label=name)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\sigma_\epsilon$ (GHz)")
    ax.set_ylabel("mean infidelity")
    ax.legend(fontsize=8)
    return [_save(fig, outdir / "noise_sweep.png")]


def _render_sweet_spot(result, outdir):
    x, s = _columns(result.tables["sweet_spot_scan"],
                    ["omega_x_ghz", "sens_eta"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy([v * 1e3 for v in x], s, marker="o")
    opt = result.summary.get("omega_x_opt_ghz")
    if opt is not None:
        ax.axvline(opt * 1e3, color="tab:red", ls="--",
                   label=f"optimum {opt * 1e3:.1f} MHz")
        ax.legend(fontsize=8)
    ax.set_xlabel(r"$\Omega_1^x$ (MHz)")
    ax.set_ylabel(r"$\sum_i |\partial\eta/\partial t_{c,i}|$")
    return [_save(fig, outdir / "sweet_spot.png")]


_RENDERERS = {
    "cr-fidelity": _render_cr_fidelity,
    "sensitivities": _render_sensitivities,
    "noise-sweep": _render_noise_sweep,
    "sweet-spot": _render_sweet_spot,
}
