"""Deterministic batch rendering of the four standard figure kinds.

Inputs are run directories written by the simulation CLI: ``meta.json``
(with a pinned schema version), one CSV per columnar block, and an optional
``results.json`` with nested tables. Renderers validate the schema version
and required columns, never mutate inputs, and produce images whose bytes
depend only on the recipe and the input files (fixed style, no timestamps).

Figure kinds:
  zmap          heatmap of <Z_j(t)> over cycles and sites (dynamics runs)
  spectral_map  Fourier amplitude vs (omega/pi, g) from a set of spectrum runs
  numax         normalized peak height vs disorder strength (sweep runs)
  coeff_ladder  log-scale coefficient ladder with sign markers and theory line
"""

from __future__ import annotations

import glob as globlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SUPPORTED_SCHEMA_MAJOR = 1

FIGURE_KINDS = ("zmap", "spectral_map", "numax", "coeff_ladder")

_RC = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.titlesize": 10,
    "svg.hashsalt": "edgemode-plots",
    "path.simplify": False,
}


class SchemaVersionError(ValueError):
    """Result files carry an unsupported schema major version."""


class MissingColumnError(KeyError):
    """A required CSV column or table field is absent."""


class EmptyDataError(ValueError):
    """The data block has no rows; no image is produced."""


@dataclass(frozen=True)
class FigureRecipe:
    """What to render: input run directories (glob), figure kind, output path."""

    kind: str
    inputs: str | tuple[str, ...]
    out: str
    options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "FigureRecipe":
        known = {"kind", "inputs", "out", "options"}
        extra = set(raw) - known
        if extra:
            raise ValueError(f"unknown recipe keys: {sorted(extra)}")
        inputs = raw["inputs"]
        if isinstance(inputs, list):
            inputs = tuple(inputs)
        return cls(kind=raw["kind"], inputs=inputs, out=raw["out"],
                   options=dict(raw.get("options", {})))


def _parse_cell(cell: str):
    try:
        return float(cell)
    except ValueError:
        return complex(cell)


def read_csv(path: Path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise EmptyDataError(f"{path} is empty")
    names = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:] if line]
    cols: dict[str, np.ndarray] = {}
    for i, name in enumerate(names):
        cols[name] = np.array([_parse_cell(r[i]) for r in rows])
    return cols


def check_schema(meta: dict, source: Path) -> None:
    version = str(meta.get("schema_version", ""))
    major = version.split(".")[0]
    if not major.isdigit() or int(major) != SUPPORTED_SCHEMA_MAJOR:
        raise SchemaVersionError(
            f"{source}: schema_version {version!r} unsupported "
            f"(reader handles major {SUPPORTED_SCHEMA_MAJOR})")


def load_run(run_dir: str | Path) -> dict:
    """Load one run directory: meta, CSV columns, nested tables."""
    run_dir = Path(run_dir)
    meta_path = run_dir / "meta.json"
    if not meta_path.exists():
        raise FileNotFoundError(f"{run_dir} has no meta.json")
    meta = json.loads(meta_path.read_text())
    check_schema(meta, meta_path)
    out = {"meta": meta, "columns": {}, "tables": {}, "dir": run_dir}
    for csv_path in sorted(run_dir.glob("*.csv")):
        out["columns"].update(read_csv(csv_path))
    results_path = run_dir / "results.json"
    if results_path.exists():
        results = json.loads(results_path.read_text())
        check_schema(results, results_path)
        out["tables"] = results.get("tables", {})
    return out


def _expand_inputs(inputs: str | tuple[str, ...]) -> list[Path]:
    patterns = [inputs] if isinstance(inputs, str) else list(inputs)
    dirs: list[Path] = []
    for pat in patterns:
        matches = sorted(globlib.glob(pat))
        if not matches:
            raise FileNotFoundError(f"no inputs match {pat!r}")
        dirs.extend(Path(m) for m in matches)
    return dirs


def _require(columns: dict, names: list[str], source: str) -> None:
    missing = [n for n in names if n not in columns]
    if missing:
        raise MissingColumnError(f"{source}: missing columns {missing}")


def _nonempty(arr: np.ndarray, source: str) -> None:
    if arr.size == 0:
        raise EmptyDataError(f"{source}: empty data block")


# ---------------------------------------------------------------------------
# Renderers
# ---------------------------------------------------------------------------

def _render_zmap(runs: list[dict], ax) -> None:
    run = runs[0]
    cols = run["columns"]
    _require(cols, ["t"], str(run["dir"]))
    sites = sorted((int(k[1:]) for k in cols if k.startswith("z") and k[1:].isdigit()))
    if not sites:
        raise MissingColumnError(f"{run['dir']}: no z<j> columns")
    _nonempty(cols["t"], str(run["dir"]))
    z = np.stack([np.real(cols[f"z{j}"]) for j in sites], axis=1)
    im = ax.imshow(z, aspect="auto", origin="lower", cmap="RdBu_r", vmin=-1, vmax=1,
                   extent=(0.5, len(sites) + 0.5, 0, z.shape[0]))
    ax.set_xlabel("site")
    ax.set_ylabel("cycle t")
    ax.set_title("edge vs bulk <Z_j(t)>")
    plt.colorbar(im, ax=ax, label="<Z>")


def _render_spectral_map(runs: list[dict], ax) -> None:
    points = []
    omega_ref = None
    for run in runs:
        spec_tab = run["tables"].get("spectrum")
        if spec_tab is None or "omega" not in spec_tab or "nu" not in spec_tab:
            raise MissingColumnError(f"{run['dir']}: results.json lacks spectrum.omega/nu")
        g = run["meta"].get("params", {}).get("g")
        if g is None:
            raise MissingColumnError(f"{run['dir']}: meta.json lacks params.g")
        omega = np.asarray(spec_tab["omega"], dtype=float)
        nu = np.asarray(spec_tab["nu"], dtype=float)
        _nonempty(nu, str(run["dir"]))
        if omega_ref is None:
            omega_ref = omega
        elif omega.shape != omega_ref.shape or not np.allclose(omega, omega_ref):
            raise ValueError(f"{run['dir']}: frequency grid differs between runs")
        points.append((float(g), nu))
    points.sort(key=lambda p: p[0])
    gs = np.array([p[0] for p in points])
    numap = np.stack([p[1] for p in points], axis=0)
    mesh = ax.pcolormesh(omega_ref / np.pi, gs, numap, shading="nearest", cmap="viridis")
    ax.set_xlabel("omega / pi")
    ax.set_ylabel("g")
    ax.set_title("Fourier amplitude nu(omega, g)")
    plt.colorbar(mesh, ax=ax, label="nu")


def _render_numax(runs: list[dict], ax) -> None:
    for run in runs:
        cols = run["columns"]
        _require(cols, ["delta_over_pi", "nu_max_normalized"], str(run["dir"]))
        x = np.real(cols["delta_over_pi"])
        y = np.real(cols["nu_max_normalized"])
        _nonempty(x, str(run["dir"]))
        meta = run["meta"].get("meta", {})
        label = meta.get("model") or meta.get("scenario") or run["dir"].name
        if meta.get("g") is not None:
            label += f" g={meta['g']}"
        if meta.get("zeta") is not None:
            label += f" zeta/pi={meta['zeta'] / np.pi:g}"
        ax.semilogy(x, y, marker="o", label=label)
    ax.set_xlabel("delta / pi")
    ax.set_ylabel("nu_max / nu_max(0)")
    ax.set_ylim(top=1.5)
    ax.set_title("disorder resilience of the edge peak")
    ax.legend(loc="lower left", fontsize=8)


def _render_coeff_ladder(runs: list[dict], ax) -> None:
    run = runs[0]
    cols = run["columns"]
    needed = ["n", "alpha_z", "alpha_y", "alpha_z_theory", "alpha_y_theory",
              "measured_z", "measured_y"]
    _require(cols, needed, str(run["dir"]))
    n = np.real(cols["n"]).astype(int)
    _nonempty(n, str(run["dir"]))
    for kind, color in (("z", "C0"), ("y", "C1")):
        alpha = np.real(cols[f"alpha_{kind}"])
        theory = np.real(cols[f"alpha_{kind}_theory"])
        measured = np.real(cols[f"measured_{kind}"]).astype(bool)
        ax.semilogy(n, np.abs(theory), "-", color=color, lw=1,
                    label=f"|alpha_{kind.upper()}| theory")
        pos = measured & (alpha >= 0)
        neg = measured & (alpha < 0)
        ax.semilogy(n[pos], np.abs(alpha[pos]), "o", color=color, mfc=color, ms=5)
        ax.semilogy(n[neg], np.abs(alpha[neg]), "o", color=color, mfc="white", ms=5)
    ax.set_xlabel("site n from the edge")
    ax.set_ylabel("|alpha|")
    ax.set_title("edge-operator expansion (filled: +, open: -)")
    ax.legend(loc="upper right", fontsize=8)


_RENDERERS = {
    "zmap": _render_zmap,
    "spectral_map": _render_spectral_map,
    "numax": _render_numax,
    "coeff_ladder": _render_coeff_ladder,
}


def render(recipe: FigureRecipe) -> Path:
    """Render one figure; returns the written image path.

    The output format follows the ``out`` suffix (png or svg). All figure
    parameters come from the recipe; inputs are never modified.
    """
    if recipe.kind not in _RENDERERS:
        raise ValueError(f"unknown figure kind {recipe.kind!r}; choose from {FIGURE_KINDS}")
    runs = [load_run(d) for d in _expand_inputs(recipe.inputs)]
    out = Path(recipe.out)
    if out.suffix.lower() not in (".png", ".svg"):
        raise ValueError(f"output must be .png or .svg, got {out.suffix!r}")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        try:
            _RENDERERS[recipe.kind](runs, ax)
            fig.tight_layout()
            out.parent.mkdir(parents=True, exist_ok=True)
            if out.suffix.lower() == ".svg":
                fig.savefig(out, format="svg", metadata={"Date": None, "Creator": None})
            else:
                fig.savefig(out, format="png", metadata={"Software": None})
        finally:
            plt.close(fig)
    return out
