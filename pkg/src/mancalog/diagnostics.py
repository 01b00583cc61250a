from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Span:
    """Source region; lines and columns are 1-based, ``end_col`` exclusive."""

    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"

    def cover(self, other: Span) -> Span:
        start = min((self.line, self.col), (other.line, other.col))
        end = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return Span(self.file, start[0], start[1], end[0], end[1])


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    span: Optional[Span] = None
    location: str = ""

    def __str__(self) -> str:
        where = str(self.span) if self.span else self.location or "<program>"
        return f"{where}: {self.severity}: {self.message}"


def error(message: str, span: Span | None = None, location: str = "") -> Diagnostic:
    return Diagnostic("error", message, span, location)
