"""Declarative figure recipes.

A recipe is a JSON document naming its input CSV files (paths relative to the
recipe file), the columns to plot, and per-series row filters.  Recipes hold
no data and the renderer performs no arithmetic beyond plotting transforms,
so every plotted value can be traced back to an input row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


class RecipeError(ValueError):
    """Malformed recipe or recipe/CSV mismatch; message names the recipe."""


_KINDS = ("lines", "heatmap")
_STYLES = {"solid": "-", "dashed": "--", "dotted": ":", "dashdot": "-."}


@dataclass(frozen=True)
class Series:
    input: int
    label: str
    y: str | None = None          # per-series override of the recipe's y column
    filter: dict = field(default_factory=dict)
    style: str = "solid"

    def __post_init__(self):
        if self.style not in _STYLES:
            raise RecipeError(f"unknown line style {self.style!r}")

    @property
    def mpl_style(self) -> str:
        return _STYLES[self.style]


@dataclass(frozen=True)
class FigureRecipe:
    id: str
    kind: str
    inputs: tuple[Path, ...]
    x: str
    y: str | None = None
    value: str | None = None      # heatmap cell column
    series: tuple[Series, ...] = ()
    xscale: str = "linear"
    yscale: str = "linear"
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise RecipeError(f"recipe {self.id!r}: unknown kind {self.kind!r}")
        if self.kind == "lines" and not self.series:
            raise RecipeError(f"recipe {self.id!r}: lines need at least one series")
        if self.kind == "heatmap" and self.value is None:
            raise RecipeError(f"recipe {self.id!r}: heatmap needs a value column")
        for s in self.series:
            if not 0 <= s.input < len(self.inputs):
                raise RecipeError(
                    f"recipe {self.id!r}: series input {s.input} out of range")


def load_recipe(path) -> FigureRecipe:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RecipeError(f"recipe {path.name}: invalid JSON ({exc})") from exc
    known = {"id", "kind", "inputs", "x", "y", "value", "series",
             "xscale", "yscale", "xlabel", "ylabel", "title"}
    unknown = set(doc) - known
    if unknown:
        raise RecipeError(f"recipe {path.name}: unknown keys {sorted(unknown)}")
    try:
        series = tuple(Series(**entry) for entry in doc.get("series", ()))
        inputs = tuple((path.parent / p).resolve() for p in doc["inputs"])
        return FigureRecipe(
            id=doc["id"], kind=doc["kind"], inputs=inputs, x=doc["x"],
            y=doc.get("y"), value=doc.get("value"), series=series,
            xscale=doc.get("xscale", "linear"), yscale=doc.get("yscale", "linear"),
            xlabel=doc.get("xlabel", ""), ylabel=doc.get("ylabel", ""),
            title=doc.get("title", ""))
    except KeyError as exc:
        raise RecipeError(f"recipe {path.name}: missing key {exc}") from exc
    except TypeError as exc:
        raise RecipeError(f"recipe {path.name}: {exc}") from exc
