"""Figures for the debonding simulator's CSV/JSON artifacts."""

from .figures import (
    SchemaError,
    energy_decay,
    front_convergence,
    jump_diagram,
    save_figure,
)

__all__ = [
    "SchemaError",
    "energy_decay",
    "front_convergence",
    "jump_diagram",
    "save_figure",
]
