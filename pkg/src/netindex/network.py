"""Instances N(G(V,E), X, delta) of the network coding problem.

Edges are the objects that carry symbols.  An input edge has a tail with no
incoming edges, an output edge a head with no outgoing edges.  After
validation the edges are numbered 1..m with the k input edges first (edge i
carries message i) and the d output edges last.
"""

from __future__ import annotations

import functools
import heapq
import logging
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .errors import (
    BadIndexing,
    CyclicGraph,
    DemandNotOnto,
    DemandOnNonOutputEdge,
    DuplicateMessageSource,
    InputCountMismatch,
    InputOutputOverlap,
    MissingDemand,
    UnknownVertex,
    UsageError,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Edge:
    id: int
    tail: str
    head: str


@dataclass(frozen=True)
class EdgeParents:
    edge: int
    parents: tuple[int, ...]

    @property
    def in_degree(self) -> int:
        return len(self.parents)


@dataclass(frozen=True, eq=False)
class NetworkInstance:
    """A validated network.  Build through :func:`validate_network`."""

    k: int
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    demands: Mapping[int, int]
    sources: Mapping[int, int]
    # file id -> id in this instance; identity unless the loader re-indexed
    id_map: Mapping[int, int] = field(default_factory=dict)
    parents: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    inputs: tuple[int, ...] = ()
    outputs: tuple[int, ...] = ()

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def d(self) -> int:
        return len(self.outputs)

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.edges)

    def edge(self, eid: int) -> Edge:
        return self._by_id[eid]

    @functools.cached_property
    def _by_id(self) -> dict[int, Edge]:
        return {e.id: e for e in self.edges}

    def edge_parents(self, eid: int) -> EdgeParents:
        return EdgeParents(eid, self.parents[eid])

    def interior(self) -> tuple[int, ...]:
        io = set(self.inputs) | set(self.outputs)
        return tuple(e.id for e in self.edges if e.id not in io)

    def is_canonical(self) -> bool:
        return _indexing_problem(self) is None

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "k": self.k,
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "tail": e.tail, "head": e.head} for e in self.edges],
            "demands": {str(e): self.demands[e] for e in sorted(self.demands)},
        }
        default = dict(zip(sorted(self.inputs), range(1, self.k + 1)))
        if dict(self.sources) != default:
            out["sources"] = {str(e): self.sources[e] for e in sorted(self.sources)}
        return out


def _parse(raw: Mapping[str, Any]):
    try:
        k = int(raw["k"])
        edge_objs = raw["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"network needs 'k' and 'edges': {exc}") from None
    edges = []
    seen = set()
    for obj in edge_objs:
        if isinstance(obj, Mapping):
            e = Edge(int(obj["id"]), str(obj["tail"]), str(obj["head"]))
        else:
            eid, tail, head = obj
            e = Edge(int(eid), str(tail), str(head))
        if e.id in seen:
            raise UsageError(f"duplicate edge id {e.id}")
        if e.id < 1:
            raise UsageError(f"edge ids are positive, got {e.id}")
        seen.add(e.id)
        edges.append(e)
    edges.sort(key=lambda e: e.id)
    if "vertices" in raw and raw["vertices"] is not None:
        vertices = [str(v) for v in raw["vertices"]]
        if len(set(vertices)) != len(vertices):
            raise UsageError("duplicate vertex names")
        known = set(vertices)
        for e in edges:
            for v in (e.tail, e.head):
                if v not in known:
                    raise UnknownVertex(f"edge {e.id} references unknown vertex {v!r}")
    else:
        vertices = []
        for e in edges:
            for v in (e.tail, e.head):
                if v not in vertices:
                    vertices.append(v)
    demands = {int(key): int(val) for key, val in dict(raw.get("demands", {})).items()}
    sources = raw.get("sources")
    if sources is not None:
        sources = {int(key): int(val) for key, val in dict(sources).items()}
    return k, vertices, edges, demands, sources


def _vertex_order(vertices: Sequence[str], edges: Sequence[Edge]) -> list[str]:
    indeg = {v: 0 for v in vertices}
    succ: dict[str, list[str]] = {v: [] for v in vertices}
    for e in edges:
        indeg[e.head] += 1
        succ[e.tail].append(e.head)
    pos = {v: i for i, v in enumerate(vertices)}
    heap = [(pos[v], v) for v in vertices if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, (pos[w], w))
    if len(order) != len(vertices):
        stuck = sorted(v for v in vertices if indeg[v] > 0)
        raise CyclicGraph(f"graph has a directed cycle through {stuck[:5]}")
    return order


def _indexing_problem(inst: NetworkInstance) -> str | None:
    ids = [e.id for e in inst.edges]
    m, d = len(ids), len(inst.outputs)
    if ids != list(range(1, m + 1)):
        return "edge ids are not 1..m"
    for eid, msg in inst.sources.items():
        if eid != msg:
            return f"input edge {eid} carries message {msg}; input edge i must carry x_i"
    if set(inst.outputs) != set(range(m - d + 1, m + 1)):
        return f"output edges must be {m - d + 1}..{m}"
    return None


def validate_network(raw: Mapping[str, Any] | NetworkInstance, *, strict: bool = False) -> NetworkInstance:
    """Check every structural invariant and return the validated instance.

    Without ``strict`` a network whose ids do not follow the input-first /
    output-last convention is re-indexed (``id_map`` records the change).
    """
    if isinstance(raw, NetworkInstance):
        raw = raw.to_json()
    k, vertices, edges, demands, sources = _parse(raw)
    _vertex_order(vertices, edges)

    in_deg = {v: 0 for v in vertices}
    out_deg = {v: 0 for v in vertices}
    into: dict[str, list[int]] = {v: [] for v in vertices}
    for e in edges:
        out_deg[e.tail] += 1
        in_deg[e.head] += 1
        into[e.head].append(e.id)
    inputs = tuple(e.id for e in edges if in_deg[e.tail] == 0)
    outputs = tuple(e.id for e in edges if out_deg[e.head] == 0)
    overlap = set(inputs) & set(outputs)
    if overlap:
        raise InputOutputOverlap(f"edges {sorted(overlap)} are both input and output edges")
    if len(inputs) != k:
        raise InputCountMismatch(f"k = {k} but the graph has {len(inputs)} input edges {list(inputs)}")

    if sources is None:
        sources = dict(zip(inputs, range(1, k + 1)))
    else:
        if set(sources) != set(inputs):
            raise DuplicateMessageSource(f"sources must cover exactly the input edges {list(inputs)}")
        msgs = list(sources.values())
        if len(set(msgs)) != len(msgs):
            raise DuplicateMessageSource("two input edges carry the same message")
        if set(msgs) != set(range(1, k + 1)):
            raise UsageError(f"source messages must be 1..{k}")

    for eid, msg in demands.items():
        if eid not in outputs:
            raise DemandOnNonOutputEdge(f"edge {eid} has a demand but is not an output edge")
        if not 1 <= msg <= k:
            raise UsageError(f"edge {eid} demands unknown message {msg}")
    missing = [e for e in outputs if e not in demands]
    if missing:
        raise MissingDemand(f"output edges {missing} have no demand")
    if set(demands.values()) != set(range(1, k + 1)):
        absent = sorted(set(range(1, k + 1)) - set(demands.values()))
        raise DemandNotOnto(f"messages {absent} are demanded by no output edge")

    by_id = {e.id: e for e in edges}
    parents = {e.id: tuple(sorted(into[e.tail])) for e in edges}
    inst = NetworkInstance(
        k=k,
        vertices=tuple(vertices),
        edges=tuple(edges),
        demands=dict(sorted(demands.items())),
        sources=dict(sorted(sources.items())),
        id_map={e: e for e in by_id},
        parents=parents,
        inputs=tuple(sorted(inputs, key=lambda e: sources[e])),
        outputs=tuple(sorted(outputs)),
    )
    problem = _indexing_problem(inst)
    if problem is not None:
        if strict:
            raise BadIndexing(problem)
        log.info("re-indexing network edges: %s", problem)
        inst = canonical_reindex(inst)
    return inst


def topological_order(inst: NetworkInstance) -> tuple[int, ...]:
    """Edges ordered parents-first, ties broken by smallest edge id."""
    children: dict[int, list[int]] = {e.id: [] for e in inst.edges}
    pending = {}
    for e in inst.edges:
        ps = inst.parents[e.id]
        pending[e.id] = len(ps)
        for p in ps:
            children[p].append(e.id)
    heap = [e for e, c in pending.items() if c == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        e = heapq.heappop(heap)
        order.append(e)
        for c in children[e]:
            pending[c] -= 1
            if pending[c] == 0:
                heapq.heappush(heap, c)
    return tuple(order)


def canonical_reindex(inst: NetworkInstance) -> NetworkInstance:
    """Renumber edges: inputs by carried message, interior and outputs in topological order."""
    topo = topological_order(inst)
    inputs = sorted(inst.inputs, key=lambda e: inst.sources[e])
    outs = set(inst.outputs)
    ins = set(inst.inputs)
    interior = [e for e in topo if e not in ins and e not in outs]
    outputs = [e for e in topo if e in outs]
    new_of = {old: new for new, old in enumerate(inputs + interior + outputs, start=1)}
    by_id = {e.id: e for e in inst.edges}
    edges = tuple(Edge(new_of[old], by_id[old].tail, by_id[old].head) for old in inputs + interior + outputs)
    raw = {
        "k": inst.k,
        "vertices": list(inst.vertices),
        "edges": [{"id": e.id, "tail": e.tail, "head": e.head} for e in edges],
        "demands": {str(new_of[e]): msg for e, msg in inst.demands.items()},
    }
    out = validate_network(raw, strict=True)
    id_map = {orig: new_of[cur] for orig, cur in inst.id_map.items()}
    object.__setattr__(out, "id_map", id_map)
    return out


def load_network(path, *, strict: bool = False) -> NetworkInstance:
    import json

    with open(path) as fh:
        return validate_network(json.load(fh), strict=strict)
