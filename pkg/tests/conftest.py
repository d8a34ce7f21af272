import pytest

from sleepsis.graph import build_from_edges, complete_graph, generate_price, ring_graph, star_graph


@pytest.fixture(scope="session")
def price200():
    return generate_price(200, 2, seed=7)


@pytest.fixture(scope="session")
def price1000():
    return generate_price(1000, 2, seed=0)


@pytest.fixture(scope="session")
def small_graphs(price200):
    return {
        "K3": complete_graph(3),
        "star1+5": star_graph(5),
        "ring10": ring_graph(10),
        "price200": price200,
    }


@pytest.fixture
def path2():
    return build_from_edges(2, [(0, 1)])


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record the one-line verdict of an acceptance criterion."""

    def _report(number, title, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
