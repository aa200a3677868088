import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from lyapform import Cochain1, TransitionGraph  # noqa: E402

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def build(n, edges, weights):
    g = TransitionGraph.from_edges(n, edges)
    return g, Cochain1.of(g, weights)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
