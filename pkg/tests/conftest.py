import re
from itertools import combinations

import numpy as np
import pytest
from hypothesis import strategies as st

from mcip.graph import UndirectedGraph
from mcip.io import load_graph, read_table_csv


@pytest.fixture(scope="session")
def fig1():
    return load_graph("fig1.graph")


@pytest.fixture(scope="session")
def fig2():
    return load_graph("fig2.graph")


@pytest.fixture(scope="session")
def fig3():
    return load_graph("fig3.graph")


@pytest.fixture(scope="session")
def fig4():
    return load_graph("fig4.graph")


@pytest.fixture(scope="session")
def reinis():
    return read_table_csv("reinis.csv")


def graph_from_bits(n, bits):
    labels = [f"v{i}" for i in range(n)]
    pairs = list(combinations(labels, 2))
    return UndirectedGraph(labels, [p for p, b in zip(pairs, bits) if b])


def all_graphs(max_n):
    for n in range(1, max_n + 1):
        m = n * (n - 1) // 2
        for code in range(2 ** m):
            yield graph_from_bits(n, [(code >> i) & 1 for i in range(m)])


def random_graphs(count, lo, hi, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(lo, hi + 1))
        yield graph_from_bits(n, rng.random(n * (n - 1) // 2) < rng.uniform(0.2, 0.8))


def random_chordal_graph(rng, n):
    """Each new vertex joins a random subset of an earlier clique, which keeps the graph chordal."""
    labels = [f"x{i}" for i in range(n)]
    cliques = [{labels[0]}]
    edges = []
    for v in labels[1:]:
        base = sorted(cliques[int(rng.integers(len(cliques)))])
        attach = [u for u in base if rng.random() < 0.6]
        edges += [(u, v) for u in attach]
        cliques.append(set(attach) | {v})
    return UndirectedGraph(labels, edges)


def random_table(rng, labels, low=0, high=30, max_levels=3):
    from mcip.loglinear import ContingencyTable
    variables = [(v, [f"l{j}" for j in range(int(rng.integers(2, max_levels + 1)))]) for v in labels]
    shape = [len(lv) for _, lv in variables]
    return ContingencyTable(variables, rng.integers(low, high, size=shape).astype(float))


@st.composite
def graphs(draw, min_vertices=1, max_vertices=8):
    n = draw(st.integers(min_vertices, max_vertices))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    return graph_from_bits(n, bits)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion for the terminal summary."""
    lines = request.config._acceptance_lines

    def record(number, title, ok, detail="", skipped=False):
        status = "SKIP" if skipped else "PASS" if ok else "FAIL"
        lines.append((number, f"[{status}] criterion {number:>2}: {title}  {detail}".rstrip()))
        print(lines[-1][1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(lines, key=lambda x: (int(re.match(r"\d+", str(x[0])).group()), str(x[0]))):
            terminalreporter.write_line(line)
