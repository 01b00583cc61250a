from __future__ import annotations


class MancalogError(Exception):
    """Base class for errors raised by this package."""


class EngineError(MancalogError):
    pass


class ResourceLimitError(EngineError):
    """The fixpoint iteration exceeded its configured cap."""


class QueryError(MancalogError):
    pass


class ValidationError(MancalogError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class ParseError(MancalogError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))
