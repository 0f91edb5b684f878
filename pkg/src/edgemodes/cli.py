"""Command-line entry point, configuration parsing, and the stable result
file schema.

Every invocation runs one scenario and writes, inside the chosen output
directory, a ``meta.json`` (schema version, seed, parameter hash, units,
timestamp), one CSV file per columnar block (floats at 17 significant
digits), and a ``results.json`` for nested tables. Field angles cross this
boundary in units of pi (keys ending in ``_over_pi``) and are converted to
radians internally. Identical configuration and seed reproduce the CSV data
blocks byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, experiments

SCHEMA_VERSION = "1.0.0"
OUTDIR_ENV = "EDGEMODES_OUTDIR"

UNITS = {
    "h": "radians (interface keys *_over_pi are divided by pi)",
    "omega": "radians per cycle",
    "t": "drive cycles",
    "rates": "per cycle",
    "cycle_ns": "nanoseconds per cycle",
}


class ConfigError(ValueError):
    """Malformed or contradictory run configuration."""


# Per-scenario option schema: {key: (default, type)}. None defaults are
# required keys; list types take JSON arrays or comma-separated flags.
_COMMON = {"seed": (0, int)}
SCENARIOS: dict[str, dict] = {
    "spectrum": {**_COMMON, "g": (None, float), "L": (12, int), "T": (200, int),
                 "J": (0.5, float), "pad_factor": (8, int)},
    "splitting": {**_COMMON, "g_values": ([0.7, 0.8, 0.9], list),
                  "L_values": (list(range(6, 25, 2)), list), "J": (0.5, float)},
    "dynamics": {**_COMMON, "g": (0.75, float), "L": (12, int), "T": (180, int),
                 "J": (0.5, float), "n_instances": (1, int), "h_scale_over_pi": (1.0, float)},
    "disorder-sweep": {**_COMMON, "g": (0.8, float), "L": (12, int), "T": (150, int),
                       "J": (0.5, float), "n_instances": (40, int),
                       "delta_over_pi": ([0.0, 0.02, 0.05, 0.1], list)},
    "xy": {**_COMMON, "zeta_over_pi": (1.0, float), "L": (12, int), "T": (100, int),
           "n_instances": (40, int), "delta_over_pi": ([0.0, 0.02, 0.05], list)},
    "lindblad": {**_COMMON, "g": (0.8, float), "L": (8, int), "T": (300, int),
                 "J": (0.5, float), "gamma_phi": (0.01, float), "gamma_d": (0.0046, float),
                 "n_strings": (5, int), "n_instances": (6, int), "transient": (100, int)},
    "reconstruct": {**_COMMON, "g": (0.8, float), "L": (12, int), "J": (0.5, float),
                    "engine": ("statevector", str), "gamma_phi": (0.0, float),
                    "gamma_d": (0.0, float), "n_shots": (None, int),
                    "n_instances": (1, int), "delta_over_pi": (0.0, float),
                    "window": ([100, 200], list), "taper": ("hann", str),
                    "side": ("left", str)},
    "pairing": {**_COMMON, "g": (0.9, float), "L": (8, int), "J": (0.5, float),
                "h_values": ([0.0, 0.05, 0.1, 0.2, 0.3], list)},
}


@dataclass(frozen=True)
class RunConfig:
    """One validated scenario invocation; round-trips through dicts exactly."""

    scenario: str
    options: dict
    outdir: str
    seed: int = 0

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "outdir": self.outdir, "seed": self.seed,
                "options": dict(self.options)}

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {"scenario", "outdir", "seed", "options"}
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
        if "scenario" not in raw:
            raise ConfigError("missing key: scenario")
        scenario = raw["scenario"]
        options = dict(raw.get("options", {}))
        options.setdefault("seed", raw.get("seed", 0))
        validated = validate_options(scenario, options)
        return cls(scenario=scenario, options=validated,
                   outdir=raw.get("outdir") or os.environ.get(OUTDIR_ENV, "."),
                   seed=int(validated["seed"]))


def validate_options(scenario: str, options: dict) -> dict:
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}")
    schema = SCENARIOS[scenario]
    extra = set(options) - set(schema)
    if extra:
        raise ConfigError(f"unknown keys for {scenario}: {sorted(f'options.{k}' for k in extra)}")
    if scenario != "xy" and "zeta_over_pi" in options:
        raise ConfigError("zeta_over_pi is only valid for the xy scenario")
    out = {}
    for key, (default, typ) in schema.items():
        if key in options and options[key] is not None:
            val = options[key]
            try:
                if typ is list:
                    val = list(val)
                else:
                    val = typ(val)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"options.{key}: cannot interpret {options[key]!r}") from exc
            out[key] = val
        elif default is not None:
            out[key] = default
        elif key == "n_shots":
            out[key] = None
        else:
            raise ConfigError(f"options.{key} is required for {scenario}")
    return out


def params_hash(config: RunConfig) -> str:
    payload = {"scenario": config.scenario, "options": config.options}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=_json_default)
    return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"not JSON serializable: {type(obj)}")


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    arrays = [np.atleast_1d(np.asarray(columns[n])) for n in names]
    n_rows = arrays[0].shape[0]
    if any(a.shape[0] != n_rows for a in arrays):
        raise ValueError("CSV columns must share a length")
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n_rows):
            cells = []
            for a in arrays:
                v = a[i]
                if np.iscomplexobj(a):
                    cells.append(format_float(float(v.real)) + ("+" if v.imag >= 0 else "-")
                                 + format_float(abs(float(v.imag))) + "j")
                elif isinstance(v, (np.floating, float)):
                    cells.append(format_float(float(v)))
                else:
                    cells.append(str(int(v)))
            fh.write(",".join(cells) + "\n")


def write_result(config: RunConfig, result: dict) -> list[Path]:
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    meta = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "scenario": config.scenario,
        "seed": config.seed,
        "params": config.options,
        "params_hash": params_hash(config),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "units": UNITS,
        "meta": result.get("meta", {}),
    }
    meta_path = outdir / "meta.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n")
    written.append(meta_path)
    if result.get("columns"):
        csv_path = outdir / f"{config.scenario.replace('-', '_')}.csv"
        write_csv(csv_path, result["columns"])
        written.append(csv_path)
    tables = result.get("tables") or {}
    if tables:
        res_path = outdir / "results.json"
        payload = {"schema_version": SCHEMA_VERSION, "params_hash": meta["params_hash"],
                   "tables": tables}
        res_path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
        written.append(res_path)
    return written


# ---------------------------------------------------------------------------
# Scenario dispatch
# ---------------------------------------------------------------------------

def run_scenario(config: RunConfig) -> dict:
    o = config.options
    s = config.scenario
    if s == "spectrum":
        return experiments.scenario_spectroscopy(o["g"], o["L"], T=o["T"], J=o["J"],
                                                 pad_factor=o["pad_factor"])
    if s == "splitting":
        rows = []
        for g in o["g_values"]:
            curve = experiments.splitting_curve(float(g), np.array(o["L_values"]), J=o["J"])
            for Lv, d in zip(curve["L"], curve["delta"]):
                rows.append({"g": float(g), "L": int(Lv), "delta": float(d),
                             "fit_slope": curve["fit_slope"],
                             "theory_slope": curve["theory_slope"]})
        cols = {k: np.array([r[k] for r in rows]) for k in ("g", "L", "delta", "fit_slope", "theory_slope")}
        return {"columns": cols, "tables": {}, "meta": {"scenario": "splitting", "J": o["J"]}}
    if s == "dynamics":
        return experiments.scenario_edge_vs_bulk(L=o["L"], g=o["g"], J=o["J"], T=o["T"],
                                                 seed=o["seed"], n_instances=o["n_instances"],
                                                 h_scale=o["h_scale_over_pi"] * np.pi)
    if s == "disorder-sweep":
        deltas = np.array([float(d) for d in o["delta_over_pi"]]) * np.pi
        if o["g"] < o["J"]:
            return experiments.scenario_zero_mem(g=o["g"], delta_grid=deltas, L=o["L"], T=o["T"],
                                                 J=o["J"], n_instances=o["n_instances"], seed=o["seed"])
        return experiments.scenario_noise_resilience("kicked_ising", deltas, L=o["L"], T=o["T"],
                                                     g=o["g"], J=o["J"],
                                                     n_instances=o["n_instances"], seed=o["seed"])
    if s == "xy":
        deltas = np.array([float(d) for d in o["delta_over_pi"]]) * np.pi
        return experiments.scenario_noise_resilience("xy", deltas, L=o["L"], T=o["T"],
                                                     zeta=o["zeta_over_pi"] * np.pi,
                                                     n_instances=o["n_instances"], seed=o["seed"])
    if s == "lindblad":
        return experiments.scenario_lindblad_decay(g=o["g"], L=o["L"], gamma_phi=o["gamma_phi"],
                                                   gamma_d=o["gamma_d"], T=o["T"], J=o["J"],
                                                   n_strings=o["n_strings"],
                                                   n_instances=o["n_instances"], seed=o["seed"],
                                                   transient=o["transient"])
    if s == "reconstruct":
        return experiments.scenario_reconstruction(
            g=o["g"], L=o["L"], J=o["J"], engine=o["engine"], gamma_phi=o["gamma_phi"],
            gamma_d=o["gamma_d"], n_shots=o["n_shots"], n_instances=o["n_instances"],
            delta=o["delta_over_pi"] * np.pi, window=tuple(int(w) for w in o["window"]),
            taper=o["taper"], side=o["side"], seed=o["seed"])
    if s == "pairing":
        return experiments.scenario_pairing(g=o["g"], L=o["L"],
                                            h_values=np.array([float(h) for h in o["h_values"]]),
                                            J=o["J"])
    raise ConfigError(f"unhandled scenario {s!r}")


def run(config: RunConfig) -> int:
    """Execute the scenario and write result files; returns the exit status."""
    try:
        result = run_scenario(config)
        write_result(config, result)
        return 0
    except Exception as exc:  # error record is part of the CLI contract
        record = {"error": type(exc).__name__, "message": str(exc),
                  "scenario": config.scenario, "schema_version": SCHEMA_VERSION}
        sys.stderr.write(json.dumps(record) + "\n")
        try:
            outdir = Path(config.outdir)
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / "error.json").write_text(json.dumps(record, indent=2) + "\n")
        except OSError:
            pass
        return 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_scenario_parser(sub, name: str) -> None:
    p = sub.add_parser(name, help=f"run the {name} scenario")
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--out", help=f"output directory (default ${OUTDIR_ENV} or .)")
    for key, (default, typ) in SCENARIOS[name].items():
        flag = "--" + key.replace("_", "-")
        if typ is list:
            p.add_argument(flag, default=None,
                           help=f"comma-separated values (default {default})")
        else:
            p.add_argument(flag, type=typ if default is not None or key == "n_shots" else typ,
                           default=None, help=f"default {default}")


def parse_config(argv: list[str] | None = None) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="edgemodes",
        description="Desk-scale simulations of Majorana edge modes in a kicked Ising qubit chain.",
    )
    parser.add_argument("--version", action="version", version=f"edgemodes {__version__}")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        _add_scenario_parser(sub, name)
    ns = parser.parse_args(argv)
    raw: dict = {"scenario": ns.scenario, "options": {}}
    if ns.config:
        loaded = json.loads(Path(ns.config).read_text())
        if loaded.get("scenario", ns.scenario) != ns.scenario:
            raise ConfigError(f"config file is for scenario {loaded.get('scenario')!r}, "
                              f"command line says {ns.scenario!r}")
        raw["options"].update(loaded.get("options", {}))
        raw["outdir"] = loaded.get("outdir")
        if "seed" in loaded:
            raw["seed"] = loaded["seed"]
    for key in SCENARIOS[ns.scenario]:
        val = getattr(ns, key, None)
        if val is not None:
            if SCENARIOS[ns.scenario][key][1] is list and isinstance(val, str):
                val = [float(x) for x in val.split(",")]
            raw["options"][key] = val
    if ns.out:
        raw["outdir"] = ns.out
    if raw.get("outdir") is None:
        raw["outdir"] = os.environ.get(OUTDIR_ENV, ".")
    return RunConfig.from_dict(raw)


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        sys.stderr.write(json.dumps({"error": "ConfigError", "message": str(exc)}) + "\n")
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
