"""Batch figure renderer: one process, one or many recipes.

Usage:
  edgemode-plots recipes.json             # file with one recipe or a list
  edgemode-plots --kind zmap --inputs runs/dyn --out fig/zmap.png
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .render import FIGURE_KINDS, FigureRecipe, render


def _recipes_from_file(path: str) -> list[FigureRecipe]:
    raw = json.loads(Path(path).read_text())
    items = raw if isinstance(raw, list) else [raw]
    return [FigureRecipe.from_dict(item) for item in items]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="edgemode-plots",
                                     description="Render figures from edgemodes result files.")
    parser.add_argument("recipes", nargs="?", help="JSON recipe file (object or list)")
    parser.add_argument("--kind", choices=FIGURE_KINDS)
    parser.add_argument("--inputs", action="append",
                        help="input run directory or glob (repeatable)")
    parser.add_argument("--out", help="output image path (.png or .svg)")
    ns = parser.parse_args(argv)
    try:
        if ns.recipes:
            recipes = _recipes_from_file(ns.recipes)
        else:
            if not (ns.kind and ns.inputs and ns.out):
                parser.error("need a recipe file or --kind/--inputs/--out")
            recipes = [FigureRecipe(kind=ns.kind, inputs=tuple(ns.inputs), out=ns.out)]
        for recipe in recipes:
            path = render(recipe)
            print(path)
    except Exception as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
