"""Command-line entry point.

Exit status: 0 consistent, 1 parse/validation/usage error, 2 inconsistent.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .analytics import edge_list, node_table, shell_decomposition, threshold_subgraph
from .dsl import load_model, parse_graph, parse_queries
from .dsl.jsonio import component_to_json, interpretation_to_json, interval_to_json
from .dsl.parser import ConsistencyQuery, EntailsQuery, TightQuery
from .dsl.serialize import serialize_atom, serialize_component, serialize_interval
from .engine import FixpointResult
from .errors import MancalogError, ParseError, QueryError, ValidationError
from .intervals import to_rational
from .membership import (
    histogram_to_csv,
    membership_histogram,
    parse_membership,
    result_from_csv,
    result_to_csv,
    result_to_json,
    solve_membership,
)
from .queries import Solver

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONSISTENT = 2


@dataclass
class RunConfig:
    mode: str
    inputs: dict[str, Path]
    out: Optional[Path] = None
    canonical: bool = False
    threads: Optional[int] = None
    trace: bool = False
    max_iters: Optional[int] = None
    params: dict = field(default_factory=dict)


class _Run:
    """Collects artifacts and writes them (plus a manifest) at the end."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.texts = {name: path.read_bytes() for name, path in cfg.inputs.items()}
        self.started = time.perf_counter()
        self.artifacts: dict[str, str] = {}
        self.iterations: Optional[int] = None

    def text(self, name: str) -> bytes:
        return self.texts[name]

    def emit(self, filename: str, content: str, stdout: bool = False):
        if self.cfg.out is not None:
            self.artifacts[filename] = content
        elif stdout:
            sys.stdout.write(content)

    def finish(self, status: int):
        if self.cfg.out is None:
            return
        out = self.cfg.out
        out.mkdir(parents=True, exist_ok=True)
        for filename, content in self.artifacts.items():
            (out / filename).write_text(content, encoding="utf-8")
        manifest = {
            "version": __version__,
            "command": self.cfg.mode,
            "inputs": {
                name: {"path": str(self.cfg.inputs[name]), "sha256": hashlib.sha256(data).hexdigest()}
                for name, data in self.texts.items()
            },
            "params": {
                "canonical": self.cfg.canonical,
                "threads": self.cfg.threads,
                "max_iters": self.cfg.max_iters,
                "trace": self.cfg.trace,
                **self.cfg.params,
            },
            "iterations": self.iterations,
            "exit_status": status,
            "wall_time": time.perf_counter() - self.started,
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _describe_witness(fix: FixpointResult) -> str:
    t, c, label = fix.witness
    return f"inconsistent: bound of {label} on {serialize_component(c)} at time {t} is empty"


def _fixpoint_options(cfg: RunConfig) -> dict:
    return {"threads": cfg.threads, "max_iters": cfg.max_iters, "trace": cfg.trace}


def _trace_lines(fix: FixpointResult) -> str:
    return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in fix.trace)


def _model_json(fix: FixpointResult) -> dict:
    doc = {"consistent": fix.consistent, "iterations": fix.iterations}
    if fix.consistent:
        doc["model"] = interpretation_to_json(fix.model)
    else:
        t, c, label = fix.witness
        doc["witness"] = {"t": t, "component": component_to_json(c), "label": label}
    return doc


def cmd_fixpoint(cfg: RunConfig) -> int:
    run = _Run(cfg)
    g, p = load_model(run.text("graph"), run.text("program"), str(cfg.inputs["graph"]), str(cfg.inputs["program"]))
    solver = Solver(p, g, cfg.canonical, **_fixpoint_options(cfg))
    fix = solver.result
    run.iterations = fix.iterations
    run.emit("model.json", _dump(_model_json(fix)), stdout=True)
    if cfg.trace:
        run.emit("trace.jsonl", _trace_lines(fix))
    status = EXIT_OK if fix.consistent else EXIT_INCONSISTENT
    if not fix.consistent:
        print(_describe_witness(fix), file=sys.stderr)
    else:
        print(f"consistent after {fix.iterations} iteration(s)", file=sys.stderr)
    run.finish(status)
    return status


def _answer(solver: Solver, q) -> tuple[str, dict]:
    if isinstance(q, ConsistencyQuery):
        res = solver.consistency()
        line = "consistent" if solver.consistent else _describe_witness(solver.result)
        return line, {"query": "consistent", "result": res.kind}
    if isinstance(q, EntailsQuery):
        f = q.fact
        res = solver.entails(f)
        text = f"entails ({serialize_atom(f.atom)}, {serialize_component(f.component)}) @ [{f.t1}, {f.t2}]"
        doc = {"query": text, "result": res.kind, "vacuous": res.vacuous}
        if res.bound is not None:
            doc["bound"] = interval_to_json(res.bound)
            doc["at"] = res.witness[0]
            return f"{text}: {res.status} (bound at t={res.witness[0]} is {serialize_interval(res.bound)})", doc
        return f"{text}: {res.status}", doc
    if isinstance(q, TightQuery):
        text = f"tight ({q.label}, {serialize_component(q.component)}) @ {q.t}"
        if not solver.consistent:
            return f"{text}: no bound (program inconsistent)", {"query": text, "result": "inconsistent"}
        res = solver.tight_bound(q.component, q.label, q.t)
        return f"{text}: {serialize_interval(res.bound)}", {"query": text, "result": res.kind,
                                                               "bound": interval_to_json(res.bound)}
    raise QueryError(f"unsupported query {q!r}")


def cmd_query(cfg: RunConfig) -> int:
    run = _Run(cfg)
    g, p = load_model(run.text("graph"), run.text("program"), str(cfg.inputs["graph"]), str(cfg.inputs["program"]))
    queries = parse_queries(run.text("queries"), p, str(cfg.inputs["queries"]))
    solver = Solver(p, g, cfg.canonical, **_fixpoint_options(cfg))
    run.iterations = solver.result.iterations
    answers = []
    for q in queries:
        line, doc = _answer(solver, q)
        print(line)
        answers.append(doc)
    run.emit("answers.json", _dump({"consistent": solver.consistent, "answers": answers}))
    if cfg.trace:
        run.emit("trace.jsonl", _trace_lines(solver.result))
    status = EXIT_OK if solver.consistent else EXIT_INCONSISTENT
    run.finish(status)
    return status


def _analysis(run: _Run, res, graph, group: str, threshold) -> None:
    sub = threshold_subgraph(res, graph, group, threshold)
    run.emit("subgraph.edges", edge_list(sub))
    if sub.nodes:
        run.emit("shells.csv", node_table(sub, shell_decomposition(sub)), stdout=True)
    else:
        print(f"no node of {group} reaches degree {threshold}; shell table skipped", file=sys.stderr)


def cmd_membership(cfg: RunConfig) -> int:
    run = _Run(cfg)
    doc = parse_graph(run.text("graph"), str(cfg.inputs["graph"]))
    prob = parse_membership(run.text("membership"), doc.graph, str(cfg.inputs["membership"]))
    res, fix = solve_membership(prob, threads=cfg.threads, trace=cfg.trace)
    run.iterations = fix.iterations
    run.emit("membership.csv", result_to_csv(res), stdout=True)
    run.emit("membership.json", _dump(result_to_json(res)))
    run.emit("histogram.csv", histogram_to_csv(membership_histogram(res, cfg.params["bin_width"])))
    if cfg.trace:
        run.emit("trace.jsonl", _trace_lines(fix))
    group, threshold = cfg.params.get("group"), cfg.params.get("threshold")
    if group is not None and threshold is not None:
        _analysis(run, res, doc.graph, group, to_rational(threshold))
    run.finish(EXIT_OK)
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    run = _Run(cfg)
    doc = parse_graph(run.text("graph"), str(cfg.inputs["graph"]))
    res = result_from_csv(run.text("result").decode("utf-8"))
    _analysis(run, res, doc.graph, cfg.params["group"], to_rational(cfg.params["threshold"]))
    run.finish(EXIT_OK)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mancalog", description="Evaluate interval-valued network logic programs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p: argparse.ArgumentParser, engine: bool = True):
        p.add_argument("--out", type=Path, help="directory for output artifacts and the run manifest")
        if engine:
            p.add_argument("--threads", type=int, help="worker threads (default: machine parallelism)")
            p.add_argument("--trace", action="store_true", help="write per-iteration trace.jsonl")
            p.add_argument("--max-iters", type=int, dest="max_iters", help="override the iteration cap")

    fp = sub.add_parser("fixpoint", help="compute the minimal model")
    fp.add_argument("graph", type=Path)
    fp.add_argument("program", type=Path)
    fp.add_argument("--canonical", action="store_true", help="carry bounds forward across unconstrained times")
    common(fp)

    qp = sub.add_parser("query", help="answer consistency, entailment and tight-bound queries")
    qp.add_argument("graph", type=Path)
    qp.add_argument("program", type=Path)
    qp.add_argument("queries", type=Path)
    qp.add_argument("--canonical", action="store_true")
    common(qp)

    mp = sub.add_parser("membership", help="infer degrees of group membership")
    mp.add_argument("graph", type=Path)
    mp.add_argument("membership", type=Path)
    mp.add_argument("--bin-width", dest="bin_width", default="1/10", help="histogram bin width (default 1/10)")
    mp.add_argument("--group")
    mp.add_argument("--threshold")
    common(mp)

    ap = sub.add_parser("analyze", help="threshold subgraph and shell decomposition of a membership result")
    ap.add_argument("graph", type=Path)
    ap.add_argument("result", type=Path, help="membership.csv from a previous run")
    ap.add_argument("--group", required=True)
    ap.add_argument("--threshold", required=True)
    common(ap, engine=False)
    return parser


_INPUTS = {
    "fixpoint": ("graph", "program"),
    "query": ("graph", "program", "queries"),
    "membership": ("graph", "membership"),
    "analyze": ("graph", "result"),
}
_COMMANDS = {"fixpoint": cmd_fixpoint, "query": cmd_query, "membership": cmd_membership, "analyze": cmd_analyze}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    params = {}
    for key in ("bin_width", "group", "threshold"):
        if getattr(args, key, None) is not None:
            params[key] = getattr(args, key)
    return RunConfig(
        mode=args.mode,
        inputs={name: getattr(args, name) for name in _INPUTS[args.mode]},
        out=args.out,
        canonical=getattr(args, "canonical", False),
        threads=getattr(args, "threads", None),
        trace=getattr(args, "trace", False),
        max_iters=getattr(args, "max_iters", None),
        params=params,
    )


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args)
    if cfg.threads is not None and cfg.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    for name, path in cfg.inputs.items():
        if not path.is_file():
            print(f"error: {name} file not found: {path}", file=sys.stderr)
            return EXIT_ERROR
    for key in ("bin_width", "threshold"):
        if key in cfg.params:
            try:
                to_rational(cfg.params[key])
            except (TypeError, ValueError) as exc:
                print(f"error: --{key.replace('_', '-')}: {exc}", file=sys.stderr)
                return EXIT_ERROR
    if ("group" in cfg.params) != ("threshold" in cfg.params):
        print("error: --group and --threshold must be given together", file=sys.stderr)
        return EXIT_ERROR
    try:
        return _COMMANDS[cfg.mode](cfg)
    except (ParseError, ValidationError) as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_ERROR
    except (MancalogError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
