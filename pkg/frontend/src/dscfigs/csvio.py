"""Reader for the dscqed CSV schema: '#' comment block, header row, data."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .recipes import RecipeError


@dataclass(frozen=True)
class Table:
    path: Path
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def column(self, name: str, recipe_id: str) -> list[str]:
        if name not in self.columns:
            raise RecipeError(
                f"recipe {recipe_id!r}: column {name!r} not in {self.path.name} "
                f"(have {', '.join(self.columns)})")
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def floats(self, name: str, recipe_id: str) -> list[float]:
        return [float(v) for v in self.column(name, recipe_id)]


def read_table(path, recipe_id: str) -> Table:
    path = Path(path)
    if not path.exists():
        raise RecipeError(f"recipe {recipe_id!r}: input {path} does not exist")
    header = None
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        for record in csv.reader(line for line in fh if not line.startswith("#")):
            if not record:
                continue
            if header is None:
                header = tuple(record)
            else:
                rows.append(tuple(record))
    if header is None:
        raise RecipeError(f"recipe {recipe_id!r}: {path.name} has no header row")
    return Table(path=path, columns=header, rows=tuple(rows))


def match(value: str, wanted) -> bool:
    """Filter comparison: numeric when both sides parse, string otherwise."""
    try:
        return abs(float(value) - float(wanted)) <= 1e-9 * max(1.0, abs(float(wanted)))
    except (TypeError, ValueError):
        return value == str(wanted)
