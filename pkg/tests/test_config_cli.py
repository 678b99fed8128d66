"""Config parsing, presets, CLI plumbing and output contracts."""

import json

import pytest

from dqdgates.cli import main
from dqdgates.config import (ConfigError, load_preset, parse_config,
                             preset_names, serialize)

GOOD = """\
[experiment]
kind = sensitivities
seed = 3

[device]
omega_r = 6.0
two_t_c_1 = 7.0
two_t_c_2 = 7.0
omega_z_1 = 5.96
omega_z_2 = 5.94
g_ac_1 = 0.04
g_ac_2 = 0.04
g_x_1 = 0.2
g_x_2 = 0.2

[drive]
omega_x_1 = 0.02

[sweep]
scheme = cr
two_t_c_min = 7.0
two_t_c_max = 7.5
two_t_c_points = 2
"""


def test_parse_and_roundtrip():
    cfg = parse_config(GOOD)
    assert cfg.kind == "sensitivities"
    assert cfg.seed == 3
    assert cfg.get("device", "n_fock") == 10   # default filled in
    again = parse_config(serialize(cfg))
    assert again.values == cfg.values
    assert again.config_hash == cfg.config_hash


def test_errors_carry_line_numbers():
    text = "\n".join([
        "[experiment]",
        "kind = cr-fidelity",
        "kind = cr-fidelity",        # line 3: duplicate
        "wibble = 1",                # line 4: unknown key
        "[nonsense]",                # line 5: unknown section
        "[device]",
        "omega_r = abc",             # line 7: bad float
    ])
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    problems = "\n".join(err.value.problems)
    assert "line 3: duplicate key 'kind'" in problems
    assert "line 4: unknown key 'wibble'" in problems
    assert "line 5: unknown section [nonsense]" in problems
    assert "line 7: cannot parse omega_r" in problems


def test_mutually_exclusive_zeeman_keys():
    text = GOOD.replace("omega_z_1 = 5.96",
                        "omega_z_1 = 5.96\ntarget_omega_1 = 5.96")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert any("mutually exclusive" in p for p in err.value.problems)


def test_all_presets_parse():
    names = preset_names()
    assert {"fig1", "fig2a", "fig2b", "fig4a", "fig4b", "sweet-spot",
            "sequence-check"} <= set(names)
    for name in names:
        cfg = load_preset(name)
        assert cfg.kind in ("cr-fidelity", "sensitivities", "noise-sweep",
                            "sweet-spot", "sequence-check")


def test_cli_rejects_bad_config(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("[experiment]\nkind = sensitivities\n")
    code = main(["sensitivities", "--config", str(path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "missing required section [device]" in err


def test_cli_rejects_kind_mismatch(tmp_path, capsys):
    path = tmp_path / "mismatch.cfg"
    path.write_text(GOOD)
    code = main(["noise-sweep", "--config", str(path)])
    assert code == 2
    assert "subcommand" in capsys.readouterr().err


def test_cli_signals_numerical_failure(tmp_path, capsys):
    # an unreachably large drive target makes the amplitude solve fail
    path = tmp_path / "hot.cfg"
    path.write_text(GOOD.replace("omega_x_1 = 0.02", "omega_x_1 = 0.9"))
    code = main(["sensitivities", "--config", str(path),
                 "--out", str(tmp_path / "out")])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_cli_writes_contracted_outputs(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text(GOOD)
    out = tmp_path / "out"
    code = main(["sensitivities", "--config", str(path),
                 "--out", str(out), "--plot"])
    assert code == 0
    csv_path = out / "sensitivities.csv"
    lines = csv_path.read_text().splitlines()
    cfg = parse_config(GOOD)
    assert lines[0] == f"# config_hash={cfg.config_hash}"
    assert lines[1].split(",")[:2] == ["two_t_c_ghz", "j_tilde_ghz"]
    assert len(lines) == 2 + 2   # comment, header, two sweep points

    summary = json.loads((out / "summary.json").read_text())
    assert summary["config_hash"] == cfg.config_hash
    assert summary["experiment"] == "sensitivities"
    assert summary["seed"] == 3
    assert (out / "sensitivities.png").exists()
    printed = capsys.readouterr().out
    assert str(csv_path) in printed


def test_cli_seed_override(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(GOOD)
    out = tmp_path / "out2"
    assert main(["sensitivities", "--config", str(path),
                 "--out", str(out), "--seed", "11"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["seed"] == 11


def test_cli_threads_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DQDGATES_THREADS", "banana")
    path = tmp_path / "run.cfg"
    path.write_text(GOOD)
    assert main(["sensitivities", "--config", str(path)]) == 2
    assert "DQDGATES_THREADS" in capsys.readouterr().err
