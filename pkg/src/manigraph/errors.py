"""Exception types shared across the package."""

from __future__ import annotations


class ManigraphError(Exception):
    """Base class for all package-specific errors."""


class InputError(ManigraphError):
    """Malformed user input: files, flag values, or argument domains."""


class ParseError(InputError):
    """A text input failed to parse; carries the offending location."""

    def __init__(self, path: str, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


class DisconnectedGraphError(ManigraphError):
    """The operation needs one connected component.

    Carries the component count so callers can report it. The usual fix is
    to extract the largest connected component before embedding.
    """

    def __init__(self, message: str, n_components: int | None = None):
        super().__init__(message)
        self.n_components = n_components


class ConvergenceError(ManigraphError):
    """An iterative solver ran out of iterations.

    The best-effort result and its diagnostics are attached so callers can
    inspect or accept partial output.
    """

    def __init__(self, message: str, result=None, diagnostics: dict | None = None):
        super().__init__(message)
        self.result = result
        self.diagnostics = diagnostics or {}
