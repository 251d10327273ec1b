"""Render a figure recipe to SVG and PNG, plus a plotted-data audit dump.

Rendering is a pure function of the input CSV bytes: identical inputs produce
byte-identical SVG and PNG (fixed style, salted SVG ids, stripped metadata).
Every plotted value is written verbatim to <id>_data.csv so a reviewer can
diff it against the input rows; the renderer itself does no arithmetic.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import Table, match, read_table
from .recipes import FigureRecipe, RecipeError

_RC = {
    "figure.figsize": (4.8, 3.4),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.fonttype": "path",
}


def _select_rows(table: Table, filters: dict, recipe_id: str) -> list[int]:
    for col in filters:
        table.column(col, recipe_id)   # raises on unknown columns
    picked = []
    for i, row in enumerate(table.rows):
        ok = True
        for col, wanted in filters.items():
            idx = table.columns.index(col)
            if not match(row[idx], wanted):
                ok = False
                break
        if ok:
            picked.append(i)
    return picked


def _render_lines(recipe: FigureRecipe, tables, ax, dump):
    for s in recipe.series:
        table = tables[s.input]
        ycol = s.y or recipe.y
        if ycol is None:
            raise RecipeError(f"recipe {recipe.id!r}: series {s.label!r} has no y column")
        rows = _select_rows(table, s.filter, recipe.id)
        if not rows:
            raise RecipeError(
                f"recipe {recipe.id!r}: series {s.label!r} selects no rows "
                f"of {table.path.name}")
        table.column(recipe.x, recipe.id)   # validate both columns up front
        table.column(ycol, recipe.id)
        xi = table.columns.index(recipe.x)
        yi = table.columns.index(ycol)
        pairs = [(table.rows[i][xi], table.rows[i][yi])
                 for i in rows if table.rows[i][yi] != ""]
        if not pairs:
            raise RecipeError(
                f"recipe {recipe.id!r}: series {s.label!r} has only empty "
                f"{ycol!r} values in {table.path.name}")
        ax.plot([float(x) for x, _ in pairs], [float(y) for _, y in pairs],
                s.mpl_style, label=s.label)
        for x, y in pairs:
            dump.append((s.label, x, "", y))
    ax.legend(frameon=False)


def _render_heatmap(recipe: FigureRecipe, tables, ax, fig, dump):
    table = tables[0]
    xs = table.floats(recipe.x, recipe.id)
    ycol = recipe.y or "p"
    ys = table.floats(ycol, recipe.id)
    vs = table.floats(recipe.value, recipe.id)
    if not xs:
        raise RecipeError(f"recipe {recipe.id!r}: {table.path.name} has no rows")
    xu = np.unique(xs)
    yu = np.unique(ys)
    if len(xu) * len(yu) != len(vs):
        raise RecipeError(
            f"recipe {recipe.id!r}: {table.path.name} is not a full grid "
            f"({len(xu)} x {len(yu)} != {len(vs)} rows)")
    grid = np.full((len(yu), len(xu)), np.nan)
    xs_idx = np.searchsorted(xu, xs)
    ys_idx = np.searchsorted(yu, ys)
    grid[ys_idx, xs_idx] = vs
    lim = float(np.max(np.abs(grid)))
    mesh = ax.pcolormesh(xu, yu, grid, cmap="RdBu_r", vmin=-lim, vmax=lim,
                         shading="nearest", rasterized=True)
    fig.colorbar(mesh, ax=ax)
    ax.set_aspect("equal")
    for x, y, v in zip(table.column(recipe.x, recipe.id),
                       table.column(ycol, recipe.id),
                       table.column(recipe.value, recipe.id)):
        dump.append(("field", x, y, v))


def render(recipe: FigureRecipe, out_dir) -> dict:
    """Render one recipe; returns {'svg': path, 'png': path, 'data': path}."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tables = [read_table(p, recipe.id) for p in recipe.inputs]
    dump: list[tuple[str, str, str, str]] = []
    with matplotlib.rc_context(_RC):
        matplotlib.rcParams["svg.hashsalt"] = recipe.id
        fig, ax = plt.subplots()
        try:
            if recipe.kind == "lines":
                _render_lines(recipe, tables, ax, dump)
            else:
                _render_heatmap(recipe, tables, ax, fig, dump)
            ax.set_xscale(recipe.xscale)
            ax.set_yscale(recipe.yscale)
            ax.set_xlabel(recipe.xlabel)
            ax.set_ylabel(recipe.ylabel)
            if recipe.title:
                ax.set_title(recipe.title)
            fig.tight_layout()
            svg_path = out_dir / f"{recipe.id}.svg"
            png_path = out_dir / f"{recipe.id}.png"
            fig.savefig(svg_path, metadata={"Date": None})
            fig.savefig(png_path, metadata={"Software": None})
        finally:
            plt.close(fig)
    data_path = out_dir / f"{recipe.id}_data.csv"
    lines = ["series,x,y,value"]
    lines += [f"{label},{x},{y},{v}" for label, x, y, v in dump]
    data_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return {"svg": svg_path, "png": png_path, "data": data_path}
