"""Recursive-descent parsers for graph (.mcg), program (.mcp) and query (.mcq) files.

Each statement is parsed independently; a syntax error is recorded and the
parser resumes after the next ``;`` so that one run reports every problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from ..diagnostics import Diagnostic, Span, error
from ..errors import ParseError
from ..intervals import EMPTY, WeightInterval, to_rational
from ..model import (
    FALSE,
    TRUE,
    And,
    Component,
    Formula,
    Graph,
    GraphError,
    Label,
    NetworkAtom,
    Not,
    Or,
    component_key,
)
from ..program import (
    Fact,
    FracThreshold,
    InfluenceFunction,
    IntegrityConstraint,
    NeighborCriterion,
    Program,
    Rule,
    Suppress,
    Table,
    Tip,
    validate_program,
)
from .lexer import Token, decode, tokenize

TMAX = "tmax"
MAX_DEPTH = 200


class _Abort(Exception):
    """Unwinds out of the current statement after a syntax error."""


@dataclass(frozen=True)
class GraphDocument:
    """A parsed graph plus its label declarations and inline non-fluent annotations."""

    graph: Graph
    labels: tuple[Label, ...] = ()
    annotations: tuple[tuple[Component, NetworkAtom], ...] = ()

    def facts(self, t_max: int) -> tuple[Fact, ...]:
        return tuple(Fact(atom, c, 0, t_max) for c, atom in self.annotations)

    def vocabulary(self) -> dict[str, Label]:
        return {lab.name: lab for lab in self.labels}


@dataclass(frozen=True)
class EntailsQuery:
    fact: Fact
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class TightQuery:
    label: str
    component: Component
    t: int
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class ConsistencyQuery:
    span: Optional[Span] = field(default=None, compare=False)


Query = Union[EntailsQuery, TightQuery, ConsistencyQuery]


class _Parser:
    def __init__(self, source, filename: str, vocabulary=None):
        self.filename = filename
        self.diags: list[Diagnostic] = []
        text, decode_diags = decode(source, filename)
        self.diags.extend(decode_diags)
        if text is None:
            self.tokens = []
        else:
            self.tokens, lex_diags = tokenize(text, filename)
            self.diags.extend(lex_diags)
        self.pos = 0
        self.depth = 0
        self.vocab: dict[str, Label] = dict(vocabulary or {})
        self.declared: list[Label] = list(self.vocab.values())

    # -- token plumbing --

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, span: Span | None = None):
        self.diags.append(error(message, span or self.tok.span))
        raise _Abort()

    def describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def expect(self, text: str) -> Token:
        if not self.tok.is_(text):
            self.fail(f"expected {text!r}, found {self.describe(self.tok)}")
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.tok.is_(text):
            self.advance()
            return True
        return False

    def ident(self, what: str) -> Token:
        if self.tok.kind != "ident":
            self.fail(f"expected {what}, found {self.describe(self.tok)}")
        return self.advance()

    def name(self, what: str) -> Token:
        """An identifier or unsigned integer used as a node id."""
        tok = self.tok
        if tok.kind == "ident" or (tok.kind == "number" and tok.text.isdigit()):
            return self.advance()
        self.fail(f"expected {what}, found {self.describe(tok)}")

    def recover(self):
        while self.tok.kind != "eof" and not self.tok.is_(";"):
            self.advance()
        self.accept(";")

    def statements(self, handlers):
        if not self.tokens:
            return
        while self.tok.kind != "eof":
            tok = self.tok
            handler = handlers.get(tok.text) if tok.kind == "ident" else None
            try:
                if handler is None:
                    self.fail(f"expected a statement keyword ({', '.join(handlers)}), found {self.describe(tok)}")
                self.advance()
                handler(tok)
                self.expect(";")
            except _Abort:
                self.recover()

    # -- shared grammar --

    def rational(self) -> Fraction:
        tok = self.tok
        if tok.kind != "number":
            self.fail(f"expected a rational number, found {self.describe(tok)}")
        self.advance()
        try:
            return to_rational(tok.text)
        except ValueError as exc:
            self.fail(f"malformed interval literal: {exc}", tok.span)

    def natural(self, what: str = "a natural number") -> int:
        tok = self.tok
        if tok.kind != "number" or not tok.text.isdigit():
            self.fail(f"expected {what}, found {self.describe(tok)}")
        self.advance()
        return int(tok.text)

    def interval(self) -> WeightInterval:
        start = self.tok
        if self.accept("empty"):
            return EMPTY
        if self.accept("["):
            lo_open = False
        elif self.accept("("):
            lo_open = True
        else:
            self.fail(f"expected an interval, found {self.describe(start)}")
        lo = self.rational()
        self.expect(",")
        hi = self.rational()
        if self.accept("]"):
            hi_open = False
        elif self.accept(")"):
            hi_open = True
        else:
            self.fail(f"expected ']' or ')', found {self.describe(self.tok)}")
        if lo > 1 or hi > 1:
            self.fail("malformed interval literal: endpoints must lie in [0, 1]", start.span.cover(self.tokens[self.pos - 1].span))
        return WeightInterval(lo, hi, lo_open, hi_open)

    def label_ref(self) -> tuple[Label, Token]:
        tok = self.ident("a label name")
        lab = self.vocab.get(tok.text)
        if lab is None:
            self.fail(f"unknown label {tok.text}", tok.span)
        return lab, tok

    def atom(self) -> NetworkAtom:
        self.expect("<")
        lab, _ = self.label_ref()
        self.expect(",")
        bnd = self.interval()
        self.expect(">")
        return NetworkAtom(lab, bnd)

    def label_decl(self, kw: Token):
        tok = self.ident("a label name")
        kind = self.ident("'fluent' or 'nonfluent'")
        if kind.text not in ("fluent", "nonfluent"):
            self.fail(f"expected 'fluent' or 'nonfluent', found {kind.text!r}", kind.span)
        lab = Label(tok.text, kind.text == "fluent")
        prior = self.vocab.get(tok.text)
        if prior is not None and prior != lab:
            self.fail(f"label {tok.text} redeclared with different fluency", tok.span)
        if prior is None:
            self.vocab[tok.text] = lab
            self.declared.append(lab)

    def component(self, nodes=None) -> tuple[Component, Span]:
        first = self.name("a node id")
        if self.accept("->"):
            second = self.name("a node id")
            return (first.text, second.text), first.span.cover(second.span)
        return first.text, first.span

    def formula(self) -> Formula:
        left = self.conj()
        while self.accept("|"):
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.accept("&"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        self.depth += 1
        try:
            if self.depth > MAX_DEPTH:
                self.fail(f"formula nested deeper than {MAX_DEPTH} levels")
            return self._unary()
        finally:
            self.depth -= 1

    def _unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        if self.accept("TRUE"):
            return TRUE
        if self.accept("FALSE"):
            return FALSE
        if self.accept("("):
            inner = self.formula()
            self.expect(")")
            return inner
        if self.tok.is_("<"):
            return self.atom()
        self.fail(f"expected a formula, found {self.describe(self.tok)}")

    def finish(self):
        if any(d.severity == "error" for d in self.diags):
            raise ParseError(self.diags)


# -- graphs -----------------------------------------------------------------


class _GraphParser(_Parser):
    def __init__(self, source, filename, vocabulary=None):
        super().__init__(source, filename, vocabulary)
        self.nodes: list[str] = []
        self.node_spans: dict[str, Span] = {}
        self.edges: list[tuple[str, str, Span, Span]] = []
        self.annotations: list[tuple[Component, NetworkAtom, Span]] = []

    def annotations_for(self, c: Component):
        if not self.accept(":"):
            return
        while True:
            start = self.tok.span
            atom = self.atom()
            span = start.cover(self.tokens[self.pos - 1].span)
            if atom.label.fluent:
                self.fail(f"graph annotations must use non-fluent labels; {atom.label.name} is fluent", span)
            self.annotations.append((c, atom, span))
            if not self.accept(","):
                break

    def node_decl(self, kw: Token):
        tok = self.name("a node id")
        if tok.text in self.node_spans:
            self.fail(f"duplicate node id {tok.text}", tok.span)
        self.nodes.append(tok.text)
        self.node_spans[tok.text] = tok.span
        self.annotations_for(tok.text)

    def edge_decl(self, kw: Token):
        src = self.name("a node id")
        if self.accept("<->"):
            both = True
        elif self.accept("->"):
            both = False
        else:
            self.fail(f"expected '->' or '<->', found {self.describe(self.tok)}")
        dst = self.name("a node id")
        self.edges.append((src.text, dst.text, src.span, dst.span))
        mark = len(self.annotations)
        self.annotations_for((src.text, dst.text))
        if both:
            self.edges.append((dst.text, src.text, dst.span, src.span))
            for c, atom, span in self.annotations[mark:]:
                self.annotations.append(((dst.text, src.text), atom, span))

    def run(self) -> GraphDocument:
        self.statements({"label": self.label_decl, "node": self.node_decl, "edge": self.edge_decl})
        if not self.nodes and not any(d.severity == "error" for d in self.diags):
            self.diags.append(error("graph must contain at least one node", self.tok.span if self.tokens
                                    else Span(self.filename, 1, 1, 1, 1)))
        seen: set[tuple[str, str]] = set()
        edges = []
        for u, v, su, sv in self.edges:
            bad = False
            for end, sp in ((u, su), (v, sv)):
                if end not in self.node_spans:
                    self.diags.append(error(f"edge endpoint {end} is not a declared node", sp))
                    bad = True
            if bad:
                continue
            if u == v:
                self.diags.append(error(f"self-loop on {u} is not allowed", su))
                continue
            if (u, v) in seen:
                self.diags.append(error(f"duplicate edge {u} -> {v}", su))
                continue
            seen.add((u, v))
            edges.append((u, v))
        notes: dict[tuple[Component, str], NetworkAtom] = {}
        for c, atom, span in self.annotations:
            key = (c, atom.label.name)
            if key in notes and notes[key] != atom:
                self.diags.append(error(f"conflicting annotations for {atom.label.name}", span))
            notes.setdefault(key, atom)
        self.finish()
        graph = Graph(self.nodes, edges)
        ordered = tuple((c, a) for (c, _), a in sorted(notes.items(), key=lambda kv: (component_key(kv[0][0]), kv[0][1])))
        return GraphDocument(graph, tuple(self.declared), ordered)


def parse_graph(source, filename: str = "<graph>") -> GraphDocument:
    """Parse graph text; raises ``ParseError`` carrying every diagnostic."""
    try:
        return _GraphParser(source, filename).run()
    except GraphError as exc:  # pragma: no cover - guarded by the checks above
        raise ParseError([error(str(exc), Span(filename, 1, 1, 1, 1))]) from exc


# -- programs ---------------------------------------------------------------


class _ProgramParser(_Parser):
    def __init__(self, source, filename, vocabulary=None):
        super().__init__(source, filename, vocabulary)
        self.t_max: Optional[int] = None
        self.tmax_span: Optional[Span] = None
        self.facts: list[tuple] = []
        self.ics: list[IntegrityConstraint] = []
        self.rules: list[Rule] = []

    def time(self):
        if self.tok.is_(TMAX):
            self.advance()
            return TMAX
        return self.natural("a time point or 'tmax'")

    def window(self):
        self.expect("[")
        t1 = self.time()
        self.expect(",")
        t2 = self.time()
        self.expect("]")
        return t1, t2

    def tmax_decl(self, kw: Token):
        value = self.natural()
        if self.t_max is not None and self.t_max != value:
            self.fail("tmax declared twice with different values", kw.span)
        self.t_max = value
        self.tmax_span = kw.span

    def fact_decl(self, kw: Token):
        self.expect("(")
        atom = self.atom()
        self.expect(",")
        c, _ = self.component()
        self.expect(")")
        self.expect("@")
        t1, t2 = self.window()
        span = kw.span.cover(self.tokens[self.pos - 1].span)
        self.facts.append((atom, c, t1, t2, span))

    def ic_decl(self, kw: Token):
        head = self.atom()
        self.expect("<-")
        body = [self.atom()]
        while self.accept("&"):
            body.append(self.atom())
        span = kw.span.cover(self.tokens[self.pos - 1].span)
        self.ics.append(IntegrityConstraint(head, tuple(body), span))

    def ifl(self) -> InfluenceFunction:
        tok = self.ident("an influence function")
        try:
            if tok.text in ("tip", "suppress"):
                self.expect("(")
                value = self.rational()
                self.expect(")")
                return Tip(value) if tok.text == "tip" else Suppress(value)
            if tok.text == "frac":
                self.expect("(")
                theta = self.rational()
                self.expect(",")
                bnd = self.interval()
                self.expect(")")
                return FracThreshold(theta, bnd)
            if tok.text == "table":
                self.expect("(")
                self.expect("default")
                default = self.interval()
                rows = []
                seen = set()
                while self.accept(","):
                    start = self.expect("(")
                    q = self.natural()
                    self.expect(",")
                    e = self.natural()
                    self.expect(")")
                    self.expect(":")
                    if (q, e) in seen:
                        self.fail(f"duplicate table entry ({q}, {e})", start.span)
                    seen.add((q, e))
                    rows.append(((q, e), self.interval()))
                self.expect(")")
                return Table(tuple(rows), default)
        except ValueError as exc:
            self.fail(str(exc), tok.span)
        self.fail(f"unknown influence function {tok.text!r} (expected tip, suppress, frac or table)", tok.span)

    def rule_decl(self, kw: Token):
        head, head_tok = self.label_ref()
        self.expect("<-")
        delta = self.natural("a delay")
        self.expect("-")
        self.expect("if")
        target = self.formula()
        self.expect("via")
        self.expect("edge")
        g_edge = self.formula()
        self.expect("node")
        g_node = self.formula()
        self.expect("having")
        h = self.formula()
        self.expect("using")
        ifl = self.ifl()
        span = kw.span.cover(self.tokens[self.pos - 1].span)
        self.rules.append(Rule(head, delta, target, NeighborCriterion(g_edge, g_node, h, ifl), span))

    def query_decl(self, kw: Token):
        self.fail("query statements belong in a query file", kw.span)

    def run(self, graph: Graph | None) -> Program:
        self.statements({
            "label": self.label_decl,
            "tmax": self.tmax_decl,
            "fact": self.fact_decl,
            "ic": self.ic_decl,
            "rule": self.rule_decl,
            "query": self.query_decl,
        })
        self.finish()
        t_max = self.t_max if self.t_max is not None else 0
        facts = []
        for atom, c, t1, t2, span in self.facts:
            t1 = t_max if t1 == TMAX else t1
            t2 = t_max if t2 == TMAX else t2
            facts.append(Fact(atom, c, t1, t2, span))
        program = Program(tuple(self.declared), tuple(facts), tuple(self.ics), tuple(self.rules), t_max)
        diags = validate_program(program, graph)
        if diags:
            raise ParseError(self.diags + diags)
        return program


def parse_program(source, vocabulary=None, filename: str = "<program>", graph: Graph | None = None) -> Program:
    """Parse and validate program text.

    ``vocabulary`` is a mapping or iterable of labels (e.g. from a parsed
    graph); ``graph`` enables the component-existence checks.
    """
    if vocabulary is not None and not isinstance(vocabulary, dict):
        vocabulary = {lab.name: lab for lab in vocabulary}
    return _ProgramParser(source, filename, vocabulary).run(graph)


# -- queries ----------------------------------------------------------------


class _QueryParser(_Parser):
    def __init__(self, source, filename, program: Program):
        super().__init__(source, filename, {lab.name: lab for lab in program.labels})
        self.t_max = program.t_max
        self.queries: list[Query] = []

    def time(self) -> int:
        if self.accept(TMAX):
            return self.t_max
        return self.natural("a time point or 'tmax'")

    def query_decl(self, kw: Token):
        kind = self.ident("'entails', 'tight' or 'consistent'")
        if kind.text == "entails":
            self.expect("(")
            atom = self.atom()
            self.expect(",")
            c, _ = self.component()
            self.expect(")")
            self.expect("@")
            self.expect("[")
            t1 = self.time()
            self.expect(",")
            t2 = self.time()
            self.expect("]")
            span = kw.span.cover(self.tokens[self.pos - 1].span)
            self.queries.append(EntailsQuery(Fact(atom, c, t1, t2, span), span))
        elif kind.text == "tight":
            self.expect("(")
            _, label_tok = self.label_ref()
            self.expect(",")
            c, _ = self.component()
            self.expect(")")
            self.expect("@")
            t = self.time()
            span = kw.span.cover(self.tokens[self.pos - 1].span)
            self.queries.append(TightQuery(label_tok.text, c, t, span))
        elif kind.text == "consistent":
            self.queries.append(ConsistencyQuery(kw.span.cover(kind.span)))
        else:
            self.fail(f"unknown query kind {kind.text!r}", kind.span)

    def run(self) -> list[Query]:
        self.statements({"query": self.query_decl})
        self.finish()
        return self.queries


def parse_queries(source, program: Program, filename: str = "<queries>") -> list[Query]:
    return _QueryParser(source, filename, program).run()


def load_model(graph_source, program_source, graph_file: str = "<graph>",
               program_file: str = "<program>") -> tuple[Graph, Program]:
    """Parse a graph and a program together, folding graph annotations into facts."""
    doc = parse_graph(graph_source, graph_file)
    program = parse_program(program_source, doc.vocabulary(), program_file, doc.graph)
    present = set(program.facts)
    merged = program.with_facts(f for f in doc.facts(program.t_max) if f not in present)
    diags = validate_program(merged, doc.graph)
    if diags:
        raise ParseError(diags)
    return doc.graph, merged
