# lib/errors.py
"""
Exceções do laboratório.

Everything raised on purpose by the library derives from ``RdLabError`` so the
CLI can map it to an exit status; the ``ValueError``/``KeyError`` mixins keep
the usual ``except ValueError`` call sites working.
"""

from __future__ import annotations

from typing import Any, List, Optional


class RdLabError(Exception):
    """Base de todas as falhas esperadas."""


class UsageError(RdLabError, ValueError):
    """Bad arguments: mixed-group operands, negative radii, etc."""


class CatalogError(RdLabError, ValueError):
    """Unknown catalog name or invalid parameters (also: corrupt catalog data)."""


class BudgetExceededError(RdLabError):
    """Element budget hit while building a ball table."""

    def __init__(self, message: str, completed_radius: int, partial: Any = None):
        super().__init__(message)
        self.completed_radius = completed_radius
        self.partial = partial


class OutOfTableError(RdLabError, KeyError):
    """Element or coset outside the tabulated radius."""

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class NotInSubgroupError(RdLabError, ValueError):
    """A non-member was passed where an element of N is required."""


class UnknownLengthError(RdLabError):
    """Word length not resolvable within twice the table radius."""

    def __init__(self, element: Any, bound: int):
        super().__init__(f"length of {element!r} unknown beyond {bound}")
        self.element = element
        self.bound = bound


class ConfigError(RdLabError, ValueError):
    """Config parse/validation failure with line or field diagnostics."""

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        return base + "\n" + "\n".join(f"  - {d}" for d in self.diagnostics)


class CheckFailedError(RdLabError):
    """An exact identity or a certified inequality failed."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report
