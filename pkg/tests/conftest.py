from __future__ import annotations

import pytest

from netindex.galois import Matrix, make_field
from netindex.netcode import LinearNetworkCode
from netindex.network import validate_network

GF2 = make_field(2)
GF3 = make_field(3)
GF4 = make_field(2, 2)
GF5 = make_field(5)


def path_raw(length: int = 3) -> dict:
    verts = [f"v{i}" for i in range(length + 1)]
    edges = [{"id": i + 1, "tail": verts[i], "head": verts[i + 1]} for i in range(length)]
    return {"k": 1, "vertices": verts, "edges": edges, "demands": {str(length): 1}}


def relay_code(net, F=GF2, n: int = 1) -> LinearNetworkCode:
    sel = Matrix.selector(F, n, 1, [1])
    return LinearNetworkCode(F, n, net, {e: sel for e in net.edge_ids})


def butterfly_network_raw() -> dict:
    """Classic two-source butterfly network: both sinks want both messages."""
    edges = [
        ("s1", "a"), ("s2", "b"),
        ("a", "t1"), ("a", "c"), ("b", "c"), ("b", "t2"),
        ("c", "d"), ("d", "t1"), ("d", "t2"),
        ("t1", "o1"), ("t1", "o2"), ("t2", "o3"), ("t2", "o4"),
    ]
    verts = sorted({v for e in edges for v in e})
    return {
        "k": 2,
        "vertices": verts,
        "edges": [{"id": i, "tail": t, "head": h} for i, (t, h) in enumerate(edges, start=1)],
        "demands": {"10": 1, "11": 2, "12": 1, "13": 2},
    }


def butterfly_network_code(net, F=GF2) -> LinearNetworkCode:
    x1 = Matrix.from_rows(F, [[1], [0]])
    x2 = Matrix.from_rows(F, [[0], [1]])
    s = Matrix.from_rows(F, [[1], [1]])
    by_tail = {"s1": x1, "s2": x2, "a": x1, "b": x2, "c": s, "d": s}
    coeffs = {}
    for e in net.edges:
        if e.id in net.demands:
            coeffs[e.id] = x1 if net.demands[e.id] == 1 else x2
        else:
            coeffs[e.id] = by_tail[e.tail]
    return LinearNetworkCode(F, 1, net, coeffs)


@pytest.fixture
def path3():
    return validate_network(path_raw(3))


@pytest.fixture
def butterfly_net():
    return validate_network(butterfly_network_raw())


# --- acceptance criteria report ----------------------------------------------

_CRITERIA: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.skipped:
        reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else str(rep.longrepr)
        _CRITERIA[number] = ("SKIP", title, reason.removeprefix("Skipped: "))
    elif rep.failed:
        _CRITERIA[number] = ("FAIL", title, f"failed during {rep.when}")
    elif rep.when == "call" and number not in _CRITERIA:
        _CRITERIA[number] = ("PASS", title, "")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title, note = _CRITERIA[number]
        line = f"{status} criterion {number}: {title}"
        if note:
            line += f" ({note})"
        terminalreporter.write_line(line)
