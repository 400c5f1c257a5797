"""Error taxonomy shared by the library and the command line front end.

Three failure classes map onto the CLI exit codes: configuration problems
(exit 1) raise :class:`ValidationError`, qualitative hypotheses that a
requested computation needs raise :class:`PreconditionError`, and runtime
numerical failures (non-convergence, range exhaustion, instability) raise
:class:`NumericalError`.  Every class serializes to a machine-readable JSON
object.
"""

from __future__ import annotations

from typing import Any


class DebondError(Exception):
    """Base class; carries a JSON-serializable payload."""

    exit_code = 2

    def to_json(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self)}


class ValidationError(DebondError):
    """Invalid configuration data.

    Parameters
    ----------
    pointer : str
        JSON pointer to the offending field (for example ``/params/ds``).
    message : str
        Human-readable description of the problem.
    """

    exit_code = 1

    def __init__(self, pointer: str, message: str):
        super().__init__(message)
        self.pointer = pointer

    def __str__(self) -> str:
        return f"{self.pointer}: {self.args[0]}"

    def to_json(self) -> dict[str, Any]:
        return {
            "error": "ValidationError",
            "path": self.pointer,
            "message": self.args[0],
        }


class PreconditionError(DebondError):
    """A qualitative hypothesis required by the computation fails.

    Parameters
    ----------
    flag : str
        Name of the failed condition flag (``K0`` ... ``K3``, ``KW``).
    message : str
        Explanation of what the flag means and why it is needed.
    """

    exit_code = 1

    def __init__(self, flag: str, message: str):
        super().__init__(message)
        self.flag = flag

    def __str__(self) -> str:
        return f"condition {self.flag} failed: {self.args[0]}"

    def to_json(self) -> dict[str, Any]:
        return {
            "error": "PreconditionError",
            "flag": self.flag,
            "message": self.args[0],
        }


class NumericalError(DebondError):
    """Runtime numerical failure (divergence, exhausted range, instability)."""

    exit_code = 2
