"""Packaged instances, the non-Pappus construction and its (2, 3) vector code.

Topologies that only exist as drawings ship as JSON under ``data/`` and are
read, never synthesized here.  ``CODEX_DATA_DIR`` points the loaders at a
different directory.
"""

from __future__ import annotations

import itertools
import json
import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import MissingSubnetworkFile, UnknownInstance
from .galois import Matrix, make_field, matrix_rank, vstack
from .index import IndexInstance, validate_index_instance
from .netcode import LinearNetworkCode, TableNetworkCode, network_code_from_json
from .network import NetworkInstance, validate_network
from .solver import MatroidSpec

NAMES = ("butterfly", "m-network", "non-pappus", "dfz-n3")


def data_dir() -> Path:
    override = os.environ.get("CODEX_DATA_DIR")
    if override:
        return Path(override)
    return Path(str(resources.files("netindex") / "data"))


def _read(name: str) -> dict:
    path = data_dir() / name
    with open(path) as fh:
        return json.load(fh)


def manifest() -> dict:
    return _read("manifest.json")


def builtin_instance(name: str) -> NetworkInstance | IndexInstance:
    if name not in NAMES:
        raise UnknownInstance(f"unknown instance {name!r}; known: {', '.join(NAMES)}")
    if name == "non-pappus":
        return build_non_pappus()
    entry = manifest()[name]
    raw = _read(entry["path"])
    if entry["kind"] == "index":
        return validate_index_instance(raw)
    return validate_network(raw)


# --- non-Pappus ------------------------------------------------------------


@dataclass(frozen=True)
class NonPappusLines:
    S0: tuple[frozenset[int], ...]
    S1: tuple[frozenset[int], ...]


def non_pappus_lines() -> NonPappusLines:
    s0 = [{1, 2, 3}, {1, 5, 7}, {3, 5, 9}, {2, 4, 7}, {4, 5, 6}, {2, 6, 9}, {1, 6, 8}, {3, 4, 8}]
    S0 = tuple(frozenset(s) for s in s0)
    S1 = tuple(frozenset(t) for t in itertools.combinations(range(1, 10), 3) if frozenset(t) not in S0)
    return NonPappusLines(S0, S1)


def build_non_pappus(path: str | os.PathLike | None = None) -> NetworkInstance:
    """Complete the packaged subnetwork: one node per independent triple, fed by
    its three points, with three output edges demanding x1, x2, x3."""
    src = Path(path) if path is not None else data_dir() / manifest()["non-pappus"]["path"]
    try:
        with open(src) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise MissingSubnetworkFile(f"non-Pappus subnetwork file not found: {src}") from None
    vertices = list(raw["vertices"])
    edges = [dict(e) for e in raw["edges"]]
    demands = dict(raw["demands"])
    next_id = max(e["id"] for e in edges) + 1
    for I in non_pappus_lines().S1:
        node = "n_" + "".join(str(i) for i in sorted(I))
        vertices.append(node)
        for i in sorted(I):
            edges.append({"id": next_id, "tail": f"n{i}", "head": node})
            next_id += 1
        for msg in (1, 2, 3):
            edges.append({"id": next_id, "tail": node, "head": "sink"})
            demands[str(next_id)] = msg
            next_id += 1
    return validate_network({"k": 3, "vertices": vertices, "edges": edges, "demands": demands})


# coordinates of x1 = (x, y), x2 = (w, z), x3 = (u, v), in that order
_VARS = ("x", "y", "w", "z", "u", "v")
_NON_PAPPUS_FORMS = {
    1: ("x", "y"),
    2: ("x+w", "y+z"),
    3: ("w", "z"),
    4: ("x+u+2z", "y+2v+w+z"),
    5: ("u", "v"),
    6: ("x+2u+2v+2z", "y+u+w+z"),
    7: ("x+v", "y+u+2v"),
    8: ("x+u+w+z", "y+2v+w"),
    9: ("u+w", "v+z"),
}


def _form_column(expr: str) -> list[int]:
    col = [0] * len(_VARS)
    for term in expr.split("+"):
        m = re.fullmatch(r"(\d*)([a-z])", term.strip())
        coef = int(m.group(1)) if m.group(1) else 1
        col[_VARS.index(m.group(2))] += coef
    return [c % 3 for c in col]


def non_pappus_functions() -> dict[int, Matrix]:
    """f_1..f_9 as 6 x 2 coefficient matrices over GF(3) (row-vector convention)."""
    F = make_field(3)
    out = {}
    for i, forms in _NON_PAPPUS_FORMS.items():
        cols = [_form_column(f) for f in forms]
        out[i] = Matrix(F, 6, 2, tuple(cols[j][r] for r in range(6) for j in range(2)))
    return out


_POINT = re.compile(r"n(\d)$")


def non_pappus_vector_code(network: NetworkInstance | None = None) -> LinearNetworkCode:
    """Every edge leaving (or entering) point node n_i carries f_i; outputs carry their demand."""
    net = network if network is not None else build_non_pappus()
    F = make_field(3)
    fs = non_pappus_functions()
    coeffs = {}
    for e in net.edges:
        if e.id in net.demands:
            coeffs[e.id] = Matrix.selector(F, 2, 3, [net.demands[e.id]])
            continue
        m = _POINT.match(e.head) or _POINT.match(e.tail)
        coeffs[e.id] = fs[int(m.group(1))]
    return LinearNetworkCode(F, 2, net, coeffs)


def check_multilinear_representation(functions: Mapping[int, Matrix], lines: NonPappusLines | None = None, n: int = 2) -> dict:
    """Rank checks for an n-dimensional multilinear representation of a rank-3 matroid.

    Singletons must have rank n, pairs 2n, dependent lines 2n and every
    other triple 3n.  Matrices may be given as (nk) x n or n x (nk).
    """
    lines = lines or non_pappus_lines()
    mats = {i: (M if M.cols == n else M.T) for i, M in functions.items()}
    points = sorted(mats)

    def rank(idx) -> int:
        return matrix_rank(vstack([mats[i].T for i in idx]))

    violations = []
    checked = 0
    for i in points:
        checked += 1
        if rank([i]) != n:
            violations.append({"set": [i], "rank": rank([i]), "expected": n})
    for pair in itertools.combinations(points, 2):
        checked += 1
        r = rank(pair)
        if r != 2 * n:
            violations.append({"set": list(pair), "rank": r, "expected": 2 * n})
    dependent = set(lines.S0)
    for tri in itertools.combinations(points, 3):
        checked += 1
        want = 2 * n if frozenset(tri) in dependent else 3 * n
        r = rank(tri)
        if r != want:
            violations.append({"set": list(tri), "rank": r, "expected": want})
    return {"checked": checked, "violations": violations, "ok": not violations}


# --- matroids --------------------------------------------------------------


def non_pappus_matroid() -> MatroidSpec:
    L = non_pappus_lines()
    return MatroidSpec(9, 3, L.S0, L.S1, True, "non-pappus")


def pappus_matroid() -> MatroidSpec:
    """The non-Pappus lines plus the ninth line {7, 8, 9}."""
    L = non_pappus_lines()
    extra = frozenset({7, 8, 9})
    return MatroidSpec(9, 3, L.S0 + (extra,), tuple(s for s in L.S1 if s != extra), True, "pappus")


def uniform_matroid(rank: int, size: int) -> MatroidSpec:
    bases = tuple(frozenset(s) for s in itertools.combinations(range(1, size + 1), rank))
    return MatroidSpec(size, rank, (), bases, True, f"U{rank},{size}")


def fano_matroid(non_fano: bool = False) -> MatroidSpec:
    lines = [{1, 2, 3}, {1, 4, 5}, {2, 4, 6}, {3, 4, 7}, {1, 6, 7}, {2, 5, 7}, {3, 5, 6}]
    if non_fano:
        lines = lines[:-1]
    dep = tuple(frozenset(s) for s in lines)
    ind = tuple(frozenset(t) for t in itertools.combinations(range(1, 8), 3) if frozenset(t) not in dep)
    return MatroidSpec(7, 3, dep, ind, True, "non-fano" if non_fano else "fano")


MATROIDS = {
    "non-pappus": non_pappus_matroid,
    "pappus": pappus_matroid,
    "u23": lambda: uniform_matroid(2, 3),
    "fano": fano_matroid,
    "non-fano": lambda: fano_matroid(True),
}


def named_matroid(name: str) -> MatroidSpec:
    if name not in MATROIDS:
        raise UnknownInstance(f"unknown matroid {name!r}; known: {', '.join(MATROIDS)}")
    return MATROIDS[name]()


# --- packaged codes --------------------------------------------------------


def m_network_routing_code(network: NetworkInstance | None = None) -> LinearNetworkCode:
    net = network if network is not None else builtin_instance("m-network")
    return network_code_from_json(_read(manifest()["m-network"]["code_n2"]), net)


def dfz_table_code(network: NetworkInstance | None = None) -> TableNetworkCode | None:
    """The (2, 4) non-linear code for N3 if a table file is present, else None."""
    name = manifest()["dfz-n3"].get("table_code")
    if not name or not (data_dir() / name).exists():
        return None
    net = network if network is not None else builtin_instance("dfz-n3")
    return network_code_from_json(_read(name), net)
