from __future__ import annotations

import re
from dataclasses import dataclass

from ..diagnostics import Diagnostic, Span, error

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+(?:\.\d+|/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct><->|<-|->|[<>\[\](),;:@&|!\-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", "punct" or "eof"
    text: str
    span: Span

    def is_(self, text: str) -> bool:
        return self.kind != "eof" and self.text == text


def decode(source, filename: str) -> tuple[str | None, list[Diagnostic]]:
    if isinstance(source, (bytes, bytearray, memoryview)):
        try:
            return bytes(source).decode("utf-8"), []
        except UnicodeDecodeError as exc:
            text = bytes(source)[: exc.start].decode("utf-8")
            line = text.count("\n") + 1
            col = len(text) - (text.rfind("\n") + 1) + 1
            return None, [error("input is not valid UTF-8", Span(filename, line, col, line, col + 1))]
    return source, []


def tokenize(text: str, filename: str = "<string>") -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, line_start, pos = 1, 0, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            diags.append(error(f"unexpected character {ch!r}", Span(filename, line, col, line, col + 1)))
            pos += 1
            continue
        kind = m.lastgroup
        end = m.end()
        if kind == "nl":
            line += 1
            line_start = end
        elif kind in ("number", "ident", "punct"):
            span = Span(filename, line, col, line, col + (end - pos))
            tokens.append(Token(kind, m.group(), span))
        pos = end
    col = pos - line_start + 1
    tokens.append(Token("eof", "", Span(filename, line, col, line, col)))
    return tokens, diags
