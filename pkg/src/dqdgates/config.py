"""Line-oriented experiment configuration: ``key = value`` entries under
``[section]`` headers, hash comments, full validation with line numbers.

Every recognized key is listed in ``SCHEMA``; unknown sections or keys are
rejected.  ``parse_config`` collects all problems instead of stopping at
the first one.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources

EXPERIMENTS = (
    "cr-fidelity",
    "sensitivities",
    "noise-sweep",
    "sweet-spot",
    "sequence-check",
)

_AUTO = object()


def _parse_float(s: str) -> float:
    return float(s)


def _parse_float_or_auto(s: str):
    if s.strip().lower() == "auto":
        return "auto"
    return float(s)


def _parse_int(s: str) -> int:
    return int(s)


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_str(s: str) -> str:
    return s.strip()


# section -> key -> (parser, required, default)
SCHEMA = {
    "experiment": {
        "kind": (_parse_str, True, None),
        "seed": (_parse_int, False, 0),
    },
    "device": {
        "omega_r": (_parse_float, True, None),
        "epsilon_1": (_parse_float, False, 0.0),
        "epsilon_2": (_parse_float, False, 0.0),
        "two_t_c_1": (_parse_float, True, None),
        "two_t_c_2": (_parse_float, True, None),
        "omega_z_1": (_parse_float, False, None),
        "omega_z_2": (_parse_float, False, None),
        "target_omega_1": (_parse_float, False, None),
        "target_omega_2": (_parse_float, False, None),
        "g_ac_1": (_parse_float, True, None),
        "g_ac_2": (_parse_float, True, None),
        "g_x_1": (_parse_float, True, None),
        "g_x_2": (_parse_float, True, None),
        "n_fock": (_parse_int, False, 10),
    },
    "drive": {
        "omega_x_1": (_parse_float, False, None),
        "omega_x_2": (_parse_float, False, None),
        "frequency": (_parse_float_or_auto, False, "auto"),
        "phase": (_parse_float, False, 0.0),
        "t_on": (_parse_float, False, 0.0),
        "t_off": (_parse_float, False, None),
    },
    "simulation": {
        "t_end": (_parse_float, False, None),
        "step": (_parse_float, False, 0.002),
        "sample_points": (_parse_int, False, 8),
        "restarts": (_parse_int, False, 32),
    },
    "noise": {
        "sigma_min": (_parse_float, False, 0.01),
        "sigma_max": (_parse_float, False, 1.0),
        "sigma_points": (_parse_int, False, 9),
        "samples": (_parse_int, False, 2000),
        "sigma_t_ratio": (_parse_float, False, 1 / 200),
    },
    "sweep": {
        "scheme": (_parse_str, False, "cr"),
        "phi": (_parse_float, False, None),
        "two_t_c_min": (_parse_float, False, 6.5),
        "two_t_c_max": (_parse_float, False, 9.0),
        "two_t_c_points": (_parse_int, False, 11),
        "omega_x_min": (_parse_float, False, 0.005),
        "omega_x_max": (_parse_float, False, 0.08),
        "omega_x_points": (_parse_int, False, 16),
    },
}

REQUIRED_SECTIONS = ("experiment", "device")


class ConfigError(ValueError):
    """Raised with the full list of problems found in a config."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(problems))


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description (all frequencies GHz, times ns)."""

    values: dict          # section -> key -> parsed value
    text: str = ""

    def get(self, section: str, key: str):
        return self.values[section][key]

    @property
    def kind(self) -> str:
        return self.values["experiment"]["kind"]

    @property
    def seed(self) -> int:
        return self.values["experiment"]["seed"]

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(serialize(self).encode()).hexdigest()[:16]


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate; raises ConfigError listing every problem."""
    problems: list[str] = []
    values: dict = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SCHEMA:
                problems.append(f"line {lineno}: unknown section [{section}]")
                section = None
            else:
                values.setdefault(section, {})
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value'")
            continue
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if section is None:
            problems.append(f"line {lineno}: key {key!r} outside any section")
            continue
        schema = SCHEMA[section]
        if key not in schema:
            problems.append(
                f"line {lineno}: unknown key {key!r} in section [{section}]"
            )
            continue
        if key in values[section]:
            problems.append(f"line {lineno}: duplicate key {key!r}")
            continue
        parser = schema[key][0]
        try:
            values[section][key] = parser(val)
        except ValueError:
            problems.append(
                f"line {lineno}: cannot parse {key} = {val!r}"
            )

    for section in REQUIRED_SECTIONS:
        if section not in values:
            problems.append(f"missing required section [{section}]")
    for section, schema in SCHEMA.items():
        present = section in values
        sec = values.setdefault(section, {})
        for key, (_, required, default) in schema.items():
            if key not in sec:
                if required and present:
                    problems.append(
                        f"missing required key {key} in [{section}]"
                    )
                sec[key] = default

    problems.extend(_semantic_checks(values))
    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(values=values, text=text)


def _semantic_checks(values: dict) -> list[str]:
    problems = []
    exp = values.get("experiment", {})
    kind = exp.get("kind")
    if kind is not None and kind not in EXPERIMENTS:
        problems.append(
            f"unknown experiment kind {kind!r}; expected one of "
            + ", ".join(EXPERIMENTS)
        )
    dev = values.get("device", {})
    for dot in (1, 2):
        wz = dev.get(f"omega_z_{dot}")
        tgt = dev.get(f"target_omega_{dot}")
        if wz is None and tgt is None and dev:
            problems.append(
                f"device: give omega_z_{dot} or target_omega_{dot}"
            )
        if wz is not None and tgt is not None:
            problems.append(
                f"device: omega_z_{dot} and target_omega_{dot} are "
                "mutually exclusive"
            )
    for name in ("two_t_c_1", "two_t_c_2", "omega_r"):
        v = dev.get(name)
        if v is not None and v <= 0:
            problems.append(f"device: {name} must be positive")
    noise = values.get("noise", {})
    if noise.get("samples") is not None and noise["samples"] < 1:
        problems.append("noise: samples must be >= 1")
    sim = values.get("simulation", {})
    if sim.get("step") is not None and sim["step"] <= 0:
        problems.append("simulation: step must be positive")
    sweep = values.get("sweep", {})
    if sweep.get("scheme") not in (None, "cr", "iswap"):
        problems.append("sweep: scheme must be 'cr' or 'iswap'")
    return problems


def serialize(config: ExperimentConfig) -> str:
    """Canonical text form; parse(serialize(c)) equals c."""
    lines = []
    for section in SCHEMA:
        sec = config.values.get(section, {})
        entries = [(k, v) for k, v in sec.items() if v is not None]
        if not entries:
            continue
        lines.append(f"[{section}]")
        for key, val in entries:
            if isinstance(val, bool):
                val = "true" if val else "false"
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{key} = {val}")
        lines.append("")
    return "\n".join(lines)


def load_preset(name: str) -> ExperimentConfig:
    """Bundled preset by name (fig1, fig2a, fig2b, fig4a, fig4b,
    sweet-spot, sequence-check)."""
    pkg = resources.files("dqdgates") / "presets" / f"{name}.cfg"
    try:
        text = pkg.read_text()
    except FileNotFoundError:
        raise ConfigError([f"unknown preset {name!r}"]) from None
    return parse_config(text)


def preset_names() -> list[str]:
    folder = resources.files("dqdgates") / "presets"
    return sorted(p.name[:-4] for p in folder.iterdir()
                  if p.name.endswith(".cfg"))
