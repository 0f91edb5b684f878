import json
import shutil
from pathlib import Path

import pytest

from edgemode_plots import (
    EmptyDataError,
    FigureRecipe,
    MissingColumnError,
    SchemaVersionError,
    load_run,
    render,
)
from edgemode_plots.cli import main

GOLDEN = Path(__file__).parents[1] / "golden"

RECIPES = {
    "zmap": FigureRecipe("zmap", str(GOLDEN / "dynamics"), out=""),
    "spectral_map": FigureRecipe("spectral_map", str(GOLDEN / "spectrum_g*"), out=""),
    "numax": FigureRecipe("numax", (str(GOLDEN / "sweep_ki"), str(GOLDEN / "sweep_xy")), out=""),
    "coeff_ladder": FigureRecipe("coeff_ladder", str(GOLDEN / "reconstruct"), out=""),
}


def _with_out(recipe: FigureRecipe, out: Path) -> FigureRecipe:
    return FigureRecipe(recipe.kind, recipe.inputs, str(out), recipe.options)


@pytest.mark.parametrize("kind", sorted(RECIPES))
def test_renders_all_figure_kinds(kind, tmp_path):
    out = render(_with_out(RECIPES[kind], tmp_path / f"{kind}.png"))
    data = out.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 5_000


@pytest.mark.parametrize("kind", sorted(RECIPES))
def test_byte_deterministic(kind, tmp_path):
    a = render(_with_out(RECIPES[kind], tmp_path / "a.png")).read_bytes()
    b = render(_with_out(RECIPES[kind], tmp_path / "b.png")).read_bytes()
    assert a == b


def test_svg_output_deterministic(tmp_path):
    a = render(_with_out(RECIPES["coeff_ladder"], tmp_path / "a.svg")).read_bytes()
    b = render(_with_out(RECIPES["coeff_ladder"], tmp_path / "b.svg")).read_bytes()
    assert a == b
    assert b"<svg" in a
    assert b"dc:date" not in a


def test_schema_version_mismatch_named_error(tmp_path):
    bad = tmp_path / "run"
    shutil.copytree(GOLDEN / "dynamics", bad)
    meta = json.loads((bad / "meta.json").read_text())
    meta["schema_version"] = "2.0.0"
    (bad / "meta.json").write_text(json.dumps(meta))
    with pytest.raises(SchemaVersionError, match="2.0.0"):
        render(FigureRecipe("zmap", str(bad), str(tmp_path / "x.png")))


def test_missing_column_reported_by_name(tmp_path):
    bad = tmp_path / "run"
    shutil.copytree(GOLDEN / "sweep_ki", bad)
    csv = (bad / "disorder_sweep.csv").read_text().splitlines()
    header = csv[0].replace("nu_max_normalized", "numax_norm")
    (bad / "disorder_sweep.csv").write_text("\n".join([header] + csv[1:]) + "\n")
    with pytest.raises(MissingColumnError, match="nu_max_normalized"):
        render(FigureRecipe("numax", str(bad), str(tmp_path / "x.png")))


def test_empty_data_block_no_image(tmp_path):
    bad = tmp_path / "run"
    shutil.copytree(GOLDEN / "dynamics", bad)
    header = (bad / "dynamics.csv").read_text().splitlines()[0]
    (bad / "dynamics.csv").write_text(header + "\n")
    out = tmp_path / "x.png"
    with pytest.raises(EmptyDataError):
        render(FigureRecipe("zmap", str(bad), str(out)))
    assert not out.exists()


def test_inputs_never_mutated(tmp_path):
    src = GOLDEN / "reconstruct"
    before = {p.name: p.read_bytes() for p in src.iterdir()}
    render(_with_out(RECIPES["coeff_ladder"], tmp_path / "x.png"))
    after = {p.name: p.read_bytes() for p in src.iterdir()}
    assert before == after


def test_unknown_kind_and_bad_suffix(tmp_path):
    with pytest.raises(ValueError, match="figure kind"):
        render(FigureRecipe("pie", str(GOLDEN / "dynamics"), str(tmp_path / "x.png")))
    with pytest.raises(ValueError, match="png or .svg"):
        render(FigureRecipe("zmap", str(GOLDEN / "dynamics"), str(tmp_path / "x.pdf")))
    with pytest.raises(FileNotFoundError):
        render(FigureRecipe("zmap", str(tmp_path / "nothing*"), str(tmp_path / "x.png")))


def test_load_run_shapes():
    run = load_run(GOLDEN / "spectrum_g0.60")
    assert run["meta"]["scenario"] == "spectrum"
    assert "czz" in run["columns"]
    assert "spectrum" in run["tables"]


def test_recipe_from_dict_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown recipe"):
        FigureRecipe.from_dict({"kind": "zmap", "inputs": "x", "out": "y.png", "color": "red"})


def test_cli_with_recipe_file(tmp_path, capsys):
    recipes = [
        {"kind": "zmap", "inputs": str(GOLDEN / "dynamics"), "out": str(tmp_path / "z.png")},
        {"kind": "numax", "inputs": [str(GOLDEN / "sweep_ki"), str(GOLDEN / "sweep_xy")],
         "out": str(tmp_path / "n.png")},
    ]
    rfile = tmp_path / "recipes.json"
    rfile.write_text(json.dumps(recipes))
    assert main([str(rfile)]) == 0
    assert (tmp_path / "z.png").exists() and (tmp_path / "n.png").exists()


def test_cli_flags_and_error_record(tmp_path, capsys):
    assert main(["--kind", "coeff_ladder", "--inputs", str(GOLDEN / "reconstruct"),
                 "--out", str(tmp_path / "c.png")]) == 0
    capsys.readouterr()
    assert main(["--kind", "zmap", "--inputs", str(tmp_path / "missing*"),
                 "--out", str(tmp_path / "x.png")]) == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "FileNotFoundError"
