"""Regenerate the JSON files under src/netindex/data.

The figure-only topologies are written out once from the wiring tables
below and then kept under version control; the package only reads them.
Run from the repository root:  python3 tools/build_data.py
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "netindex" / "data"


class Builder:
    """Edge list builder where a named channel is one edge into a hub vertex.

    Everything leaving the hub carries the channel's value, so a channel
    computed from several others is a vertex ``c:<name>`` fed by their hubs
    with a single edge ``c:<name> -> <name>``.
    """

    def __init__(self, k: int):
        self.k = k
        self.vertices: list[str] = []
        self.edges: list[tuple[str, str]] = []
        self.demands: dict[int, int] = {}

    def vertex(self, v: str) -> str:
        if v not in self.vertices:
            self.vertices.append(v)
        return v

    def edge(self, tail: str, head: str) -> int:
        self.vertex(tail)
        self.vertex(head)
        self.edges.append((tail, head))
        return len(self.edges)

    def message(self, msg: int, hub: str) -> None:
        self.edge(f"src{msg}", hub)

    def channel(self, name: str, origins: list[str]) -> None:
        if len(origins) == 1:
            self.edge(origins[0], name)
        else:
            mid = f"c:{name}"
            for o in origins:
                self.edge(o, mid)
            self.edge(mid, name)

    def sink(self, name: str, origins: list[str], wants: list[int], terminal: str) -> None:
        for o in origins:
            self.edge(o, name)
        for w in wants:
            self.demands[self.edge(name, terminal)] = w

    def to_json(self, **extra) -> dict:
        out = dict(extra)
        out.update(
            {
                "k": self.k,
                "vertices": self.vertices,
                "edges": [{"id": i, "tail": t, "head": h} for i, (t, h) in enumerate(self.edges, start=1)],
                "demands": {str(e): m for e, m in sorted(self.demands.items())},
            }
        )
        return out


def butterfly() -> dict:
    return {
        "_source": "butterfly index instance (transcription); check: the broadcast {x1+x2+x3, x1+x4} decodes every client",
        "k": 4,
        "clients": [
            {"wants": 1, "has": [2, 3]},
            {"wants": 2, "has": [1, 3]},
            {"wants": 3, "has": [1, 2]},
            {"wants": 4, "has": [1]},
        ],
    }


def m_network() -> tuple[dict, dict]:
    """Two sources (a, b) and (c, d), shared relays U1, U3, two crossed bottleneck gadgets."""
    b = Builder(4)
    for msg, hub in ((1, "S1"), (2, "S1"), (3, "S2"), (4, "S2")):
        b.message(msg, hub)
    b.channel("U1", ["S1"])
    b.channel("U3", ["S2"])
    for g in ("", "'"):
        b.channel("P" + g, ["S1"])
        b.channel("Q" + g, ["S2"])
        b.channel("W" + g, ["P" + g, "Q" + g])
        b.channel("V" + g, ["P" + g, "Q" + g])
    # gadget 1 pairs (W: a, c), (V: b, d); gadget 2 pairs (W': a, d), (V': b, c)
    wants = {"W": (1, 3), "V": (2, 4), "W'": (1, 4), "V'": (2, 3)}
    for ch, (left, right) in wants.items():
        b.sink(f"t:U1+{ch}", ["U1", ch], [left], "T")
        b.sink(f"t:{ch}+U3", [ch, "U3"], [right], "T")
    net = b.to_json(_source="M-network (reconstruction; see README)")

    # block length 2 routing over GF(2): every edge forwards two half-messages
    halves = {"a": (1, 0), "a'": (1, 1), "b": (2, 0), "b'": (2, 1), "c": (3, 0), "c'": (3, 1), "d": (4, 0), "d'": (4, 1)}
    carry = {
        "U1": ("a", "b"), "U3": ("c", "d"),
        "P": ("a'", "b'"), "Q": ("c'", "d'"), "W": ("a'", "c'"), "V": ("b'", "d'"),
        "P'": ("a'", "b'"), "Q'": ("c'", "d'"), "W'": ("a'", "d'"), "V'": ("b'", "c'"),
    }
    n, k = 2, 4

    def cols(parts):
        rows = [[0] * n for _ in range(n * k)]
        for j, p in enumerate(parts):
            msg, half = halves[p]
            rows[(msg - 1) * n + half][j] = 1
        return rows

    full = {1: ("a", "a'"), 2: ("b", "b'"), 3: ("c", "c'"), 4: ("d", "d'")}
    coeffs = {}
    for eid, (tail, head) in enumerate(b.edges, start=1):
        if eid in b.demands:
            parts = full[b.demands[eid]]
        elif tail.startswith("src"):
            parts = full[int(tail[3:])]
        elif head in carry:
            parts = carry[head]
        else:
            parts = carry[tail]
        coeffs[str(eid)] = cols(parts)
    code = {
        "_source": "block length 2 routing solution for the reconstructed M-network",
        "field": {"p": 2, "degree": 1},
        "n": 2,
        "edges": coeffs,
    }
    return net, code


S0 = [{1, 2, 3}, {1, 5, 7}, {3, 5, 9}, {2, 4, 7}, {4, 5, 6}, {2, 6, 9}, {1, 6, 8}, {3, 4, 8}]


def non_pappus_subnetwork() -> dict:
    """Points 1, 3, 5 carry x1, x2, x3; six derived points and two checking sinks."""
    b = Builder(3)
    b.message(1, "n1")
    b.message(2, "n3")
    b.message(3, "n5")
    for p, (u, v) in {2: (1, 3), 7: (1, 5), 4: (2, 7), 6: (4, 5), 9: (2, 6), 8: (1, 6)}.items():
        b.channel(f"n{p}", [f"n{u}", f"n{v}"])
    # lines {3,5,9} and {3,4,8}: x2 must be recoverable from the other two points
    b.sink("t:5+9", ["n5", "n9"], [2], "sink")
    b.sink("t:4+8", ["n4", "n8"], [2], "sink")
    return b.to_json(
        _source="fixed subnetwork of the non-Pappus network (reconstruction; see README)",
        _partial="completed by build_non_pappus; not a valid network on its own",
    )


FANO_POINTS = {1: (1, 0, 0), 2: (0, 1, 0), 3: (1, 1, 0), 4: (0, 0, 1), 5: (1, 0, 1), 6: (0, 1, 1), 7: (1, 1, 1)}


def dfz_n3() -> dict:
    """Fano part and non-Fano part sharing the three messages a, b, c."""
    b = Builder(3)
    for msg, hub in ((1, "a"), (2, "b"), (3, "c")):
        b.message(msg, hub)
    parts = {
        "F": ({3: (1, 2), 5: (1, 4), 6: (3, 5), 7: (3, 4)}, [((4, 6), 2), ((6, 7), 1), ((5, 7), 2)]),
        "N": ({3: (1, 2), 5: (1, 4), 6: (2, 4), 7: (3, 4)}, [((6, 7), 1), ((5, 7), 2)]),
    }
    lines_f = [{1, 2, 3}, {1, 4, 5}, {2, 4, 6}, {3, 4, 7}, {1, 6, 7}, {2, 5, 7}, {3, 5, 6}]
    lines = {"F": lines_f, "N": lines_f[:-1]}
    for tag, (derived, sinks) in parts.items():
        name = {1: "a", 2: "b", 4: "c"}
        for p in (3, 5, 6, 7):
            name[p] = f"{tag}{p}"
        for p, (u, v) in derived.items():
            b.channel(name[p], [name[u], name[v]])
        for (u, v), want in sinks:
            b.sink(f"t:{tag}{u}+{v}", [name[u], name[v]], [want], "sink")
        for tri in itertools.combinations(range(1, 8), 3):
            if set(tri) not in lines[tag]:
                b.sink(f"{tag}_{''.join(map(str, tri))}", [name[i] for i in tri], [1, 2, 3], "sink")
    return b.to_json(_source="Fano / non-Fano network N3 (reconstruction; see README)")


MANIFEST = {
    "butterfly": {"path": "butterfly.json", "kind": "index", "describes": "butterfly index instance"},
    "m-network": {"path": "m-network.json", "kind": "network", "describes": "M-network (reconstruction)", "code_n2": "m-network-code-n2.json"},
    "non-pappus": {"path": "non-pappus-subnetwork.json", "kind": "network", "describes": "non-Pappus subnetwork, completed in code"},
    "dfz-n3": {"path": "dfz-n3.json", "kind": "network", "describes": "Fano / non-Fano network N3 (reconstruction); the (2,4) table is not shipped", "table_code": "dfz-n3-code-2-4.json"},
}


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    m_net, m_code = m_network()
    files = {
        "butterfly.json": butterfly(),
        "m-network.json": m_net,
        "m-network-code-n2.json": m_code,
        "non-pappus-subnetwork.json": non_pappus_subnetwork(),
        "dfz-n3.json": dfz_n3(),
        "manifest.json": MANIFEST,
    }
    for name, obj in files.items():
        (DATA / name).write_text(json.dumps(obj, indent=1) + "\n")
        print("wrote", name)


if __name__ == "__main__":
    main()
