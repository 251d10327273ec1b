"""figs <recipe-path> --out <dir>: render one declarative figure recipe."""

from __future__ import annotations

import argparse
import sys

from .recipes import RecipeError, load_recipe
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="figs", description=__doc__)
    parser.add_argument("recipe", help="path to a recipe JSON document")
    parser.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)
    try:
        recipe = load_recipe(args.recipe)
        paths = render(recipe, args.out)
    except RecipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
