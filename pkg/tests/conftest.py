from pathlib import Path

import pytest

from mancalog.dsl import load_model, parse_graph

DATA = Path(__file__).resolve().parent.parent / "data"


def read(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def running_example():
    """Graph and program of the 8-person network with rules R1-R3."""
    return load_model(read("gsoc.mcg"), read("running.mcp"), "gsoc.mcg", "running.mcp")


@pytest.fixture
def facts_demo():
    return load_model(read("facts_demo.mcg"), read("facts_demo.mcp"))


@pytest.fixture
def star_graph():
    return parse_graph(read("star.mcg")).graph


def pytest_terminal_summary(terminalreporter):
    """Print one line per acceptance criterion when the acceptance suite ran."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
