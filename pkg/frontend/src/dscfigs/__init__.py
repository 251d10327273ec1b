"""Static figure rendering for dscqed CSV output, driven by declarative
JSON recipes.  See recipes/ for the bundled set."""

from .recipes import FigureRecipe, RecipeError, Series, load_recipe  # noqa: F401
from .render import render  # noqa: F401

__version__ = "0.1.0"
