import json
import os
from pathlib import Path

import numpy as np
import pytest

from edgemodes.cli import (
    ConfigError,
    RunConfig,
    SCHEMA_VERSION,
    main,
    params_hash,
    parse_config,
    run,
    validate_options,
    write_csv,
)


def test_minimal_config_fills_documented_defaults():
    cfg = RunConfig.from_dict({"scenario": "spectrum", "options": {"g": 0.8, "L": 12}})
    assert cfg.options["J"] == 0.5
    assert cfg.options["T"] == 200
    assert cfg.options["pad_factor"] == 8


def test_round_trip_identity():
    cfg = RunConfig.from_dict({"scenario": "pairing", "outdir": "/tmp/x",
                               "options": {"g": 0.85, "L": 6, "h_values": [0.0, 0.1]}})
    again = RunConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert params_hash(again) == params_hash(cfg)


def test_unknown_keys_rejected_with_paths():
    with pytest.raises(ConfigError, match="options.gg"):
        RunConfig.from_dict({"scenario": "spectrum", "options": {"g": 0.8, "gg": 1}})
    with pytest.raises(ConfigError, match="top-level"):
        RunConfig.from_dict({"scenario": "spectrum", "options": {"g": 0.8}, "extra": 1})
    with pytest.raises(ConfigError, match="unknown scenario"):
        RunConfig.from_dict({"scenario": "teleport", "options": {}})


def test_required_key_enforced():
    with pytest.raises(ConfigError, match="options.g"):
        validate_options("spectrum", {"L": 12})


def test_conflicting_drive_parameters_rejected():
    with pytest.raises(ConfigError, match="zeta"):
        validate_options("spectrum", {"g": 0.8, "zeta_over_pi": 1.0})


def test_interface_units_converted(tmp_path):
    cfg = RunConfig.from_dict({
        "scenario": "disorder-sweep", "outdir": str(tmp_path),
        "options": {"g": 0.8, "L": 6, "T": 40, "n_instances": 2,
                    "delta_over_pi": [0.0, 0.1]},
    })
    assert run(cfg) == 0
    data = json.loads((tmp_path / "results.json").read_text())
    deltas = [p["delta"] for p in data["tables"]["points"]]
    assert deltas[1] == pytest.approx(0.1 * np.pi)


def test_run_writes_schema_files(tmp_path):
    cfg = RunConfig.from_dict({"scenario": "spectrum", "outdir": str(tmp_path),
                               "options": {"g": 0.7, "L": 6, "T": 64}})
    assert run(cfg) == 0
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["schema_version"] == SCHEMA_VERSION
    assert meta["params_hash"] == params_hash(cfg)
    assert "units" in meta and "created_utc" in meta
    csv_lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert csv_lines[0] == "t,czz"
    assert len(csv_lines) == 65


def test_byte_identical_reruns(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        cfg = RunConfig.from_dict({"scenario": "dynamics", "outdir": str(out),
                                   "options": {"g": 0.75, "L": 6, "T": 30, "seed": 11}})
        assert run(cfg) == 0
    assert (out1 / "dynamics.csv").read_bytes() == (out2 / "dynamics.csv").read_bytes()


def test_different_seed_changes_data(tmp_path):
    blobs = []
    for seed in (1, 2):
        out = tmp_path / str(seed)
        cfg = RunConfig.from_dict({"scenario": "dynamics", "outdir": str(out),
                                   "options": {"g": 0.75, "L": 6, "T": 30, "seed": seed}})
        run(cfg)
        blobs.append((out / "dynamics.csv").read_bytes())
    assert blobs[0] != blobs[1]


def test_oversize_fails_fast_with_error_record(tmp_path):
    # dynamics runs on the dense engine, which caps the chain length
    cfg = RunConfig.from_dict({"scenario": "dynamics", "outdir": str(tmp_path),
                               "options": {"g": 0.8, "L": 40, "T": 16}})
    assert run(cfg) == 1
    record = json.loads((tmp_path / "error.json").read_text())
    assert record["error"] == "SizeCapError" and "message" in record


def test_no_writes_outside_outdir(tmp_path, monkeypatch):
    outdir = tmp_path / "only_here"
    workdir = tmp_path / "cwd"
    workdir.mkdir()
    monkeypatch.chdir(workdir)
    cfg = RunConfig.from_dict({"scenario": "pairing", "outdir": str(outdir),
                               "options": {"g": 0.9, "L": 4, "h_values": [0.0]}})
    assert run(cfg) == 0
    assert sorted(p.name for p in workdir.iterdir()) == []
    assert (outdir / "meta.json").exists()


def test_cli_main_flags(tmp_path):
    rcode = main(["spectrum", "--g", "0.8", "--L", "6", "--T", "32",
                  "--out", str(tmp_path / "r")])
    assert rcode == 0
    assert (tmp_path / "r" / "spectrum.csv").exists()


def test_cli_config_file_with_flag_override(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "scenario": "spectrum", "outdir": str(tmp_path / "from_file"),
        "options": {"g": 0.7, "L": 6, "T": 32},
    }))
    rcode = main(["spectrum", "--config", str(cfg_file), "--T", "64"])
    assert rcode == 0
    meta = json.loads((tmp_path / "from_file" / "meta.json").read_text())
    assert meta["params"]["T"] == 64
    assert meta["params"]["g"] == 0.7


def test_cli_env_var_default_outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("EDGEMODES_OUTDIR", str(tmp_path / "envout"))
    rcode = main(["pairing", "--g", "0.9", "--L", "4", "--h-values", "0.0"])
    assert rcode == 0
    assert (tmp_path / "envout" / "pairing.csv").exists()


def test_cli_bad_config_returns_2(capsys):
    rcode = main(["spectrum", "--L", "6"])  # g is required
    assert rcode == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "ConfigError"


def test_write_csv_precision(tmp_path):
    path = tmp_path / "x.csv"
    write_csv(path, {"a": np.array([1 / 3]), "k": np.array([7])})
    text = path.read_text().splitlines()
    assert text[1].startswith("0.33333333333333331")
    assert text[1].endswith(",7")
    with pytest.raises(ValueError):
        write_csv(path, {"a": np.arange(3), "b": np.arange(4)})
