"""(n, q) network codes and the N1/N2/N3 checks.

A code stores one global encoding function per edge.  Linear codes keep an
(n*k) x n coefficient matrix ``C_e`` so that ``f_e(X) = X_flat @ C_e``, where
``X_flat = (x_11..x_1n, ..., x_k1..x_kn)``.  Table codes keep the value of
``f_e`` on every message tuple, listed in lexicographic input order, and need
no field structure on the alphabet.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Sequence

from .errors import N1Violation, N2Violation, N3Violation, ShapeMismatch, TableTooLarge, UsageError
from .galois import FieldSpec, Matrix, field_from_json, hstack, matrix_rank, solve_left
from .network import NetworkInstance, topological_order

TABLE_CAP = 2**20


# --- symbol packing --------------------------------------------------------


def pack(symbols: Sequence[int], q: int) -> int:
    """Base-q integer of a symbol block, first symbol most significant."""
    v = 0
    for s in symbols:
        v = v * q + s
    return v


def unpack(value: int, q: int, length: int) -> tuple[int, ...]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        value, out[i] = divmod(value, q)
    return tuple(out)


def flatten_messages(X: Sequence, k: int, n: int) -> tuple[int, ...]:
    """Accept either k blocks of n symbols or one flat row of n*k symbols."""
    if len(X) == k and all(isinstance(b, (list, tuple)) for b in X):
        if any(len(b) != n for b in X):
            raise ShapeMismatch(f"each message block needs {n} symbols")
        return tuple(int(s) for b in X for s in b)
    if len(X) == n * k and not any(isinstance(s, (list, tuple)) for s in X):
        return tuple(int(s) for s in X)
    raise ShapeMismatch(f"expected {k} blocks of {n} symbols")


# --- codes -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LinearNetworkCode:
    field: FieldSpec
    n: int
    network: NetworkInstance
    coeffs: Mapping[int, Matrix]

    def __post_init__(self) -> None:
        net = self.network
        if set(self.coeffs) != set(net.edge_ids):
            missing = sorted(set(net.edge_ids) - set(self.coeffs))
            extra = sorted(set(self.coeffs) - set(net.edge_ids))
            raise ShapeMismatch(f"code edges do not match network (missing {missing}, extra {extra})")
        for e, C in self.coeffs.items():
            if C.field != self.field:
                raise ShapeMismatch(f"edge {e} matrix is over {C.field}, code over {self.field}")
            if C.shape != (self.n * net.k, self.n):
                raise ShapeMismatch(f"edge {e} matrix has shape {C.shape}, expected {(self.n * net.k, self.n)}")

    @property
    def q(self) -> int:
        return self.field.q

    def evaluate(self, X: Sequence) -> dict[int, tuple[int, ...]]:
        row = flatten_messages(X, self.network.k, self.n)
        if any(not 0 <= s < self.q for s in row):
            raise ShapeMismatch(f"message symbols must lie in GF({self.q})")
        return {e: C.vecmul(row) for e, C in self.coeffs.items()}

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "n": self.n,
            "edges": {str(e): self.coeffs[e].to_lists() for e in sorted(self.coeffs)},
        }


@dataclass(frozen=True, eq=False)
class TableNetworkCode:
    q: int
    n: int
    network: NetworkInstance
    # packed block value of f_e for each input index, lexicographic input order
    tables: Mapping[int, tuple[int, ...]]

    def __post_init__(self) -> None:
        net = self.network
        if set(self.tables) != set(net.edge_ids):
            raise ShapeMismatch("table code must define every edge of the network")
        size = self.input_count
        top = self.q**self.n
        for e, t in self.tables.items():
            if len(t) != size:
                raise ShapeMismatch(f"edge {e} table has {len(t)} entries, expected {size}")
            if any(not 0 <= v < top for v in t):
                raise ShapeMismatch(f"edge {e} table holds a value outside the alphabet")

    @property
    def input_count(self) -> int:
        return self.q ** (self.n * self.network.k)

    def input_index(self, row: Sequence[int]) -> int:
        return pack(row, self.q)

    def evaluate(self, X: Sequence) -> dict[int, tuple[int, ...]]:
        row = flatten_messages(X, self.network.k, self.n)
        if any(not 0 <= s < self.q for s in row):
            raise ShapeMismatch(f"message symbols must lie in 0..{self.q - 1}")
        idx = pack(row, self.q)
        return {e: unpack(t[idx], self.q, self.n) for e, t in self.tables.items()}

    def value(self, edge: int, row: Sequence[int]) -> tuple[int, ...]:
        return unpack(self.tables[edge][pack(row, self.q)], self.q, self.n)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "edges": {str(e): [list(unpack(v, self.q, self.n)) for v in self.tables[e]] for e in sorted(self.tables)},
        }


NetworkCode = LinearNetworkCode | TableNetworkCode


def evaluate_network_code(code: NetworkCode, X: Sequence) -> dict[int, tuple[int, ...]]:
    return code.evaluate(X)


def all_inputs(q: int, length: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(q), repeat=length)


# --- certificates ----------------------------------------------------------


@dataclass(frozen=True)
class LocalEncodingCertificate:
    """Local encodings derived while checking N3.

    Linear codes get combiner blocks with ``C_e = sum_a C_a @ T_a``; table
    codes get a quotient table from parent values to the edge value.
    """

    kind: str
    n: int
    parents: Mapping[int, tuple[int, ...]]
    combiners: Mapping[int, Mapping[int, Matrix]] = field(default_factory=dict)
    quotients: Mapping[int, Mapping[tuple[tuple[int, ...], ...], tuple[int, ...]]] = field(default_factory=dict)
    gf: FieldSpec | None = None

    def local(self, edge: int, parent_values: Sequence[Sequence[int]]) -> tuple[int, ...]:
        """Apply the local encoding of ``edge`` to its parents' values."""
        if self.kind == "linear":
            add = self.gf._add
            acc = [0] * self.n
            for p, val in zip(self.parents[edge], parent_values):
                contrib = self.combiners[edge][p].vecmul(val)
                acc = [add[a][b] for a, b in zip(acc, contrib)]
            return tuple(acc)
        key = tuple(tuple(v) for v in parent_values)
        return self.quotients[edge][key]

    def replay(self, network: NetworkInstance, X_flat: Sequence[int]) -> dict[int, tuple[int, ...]]:
        """Recompute every edge value from the messages through local encodings only."""
        n = self.n
        vals: dict[int, tuple[int, ...]] = {}
        for e in topological_order(network):
            if e in network.sources:
                m = network.sources[e]
                vals[e] = tuple(X_flat[(m - 1) * n : m * n])
            else:
                vals[e] = self.local(e, [vals[p] for p in self.parents[e]])
        return vals


def validate_network_code(code: NetworkCode) -> LocalEncodingCertificate:
    """Check N1, N2 and N3; return the local encodings that witness N3."""
    if isinstance(code, LinearNetworkCode):
        return _validate_linear(code)
    return _validate_table(code)


def _validate_linear(code: LinearNetworkCode) -> LocalEncodingCertificate:
    net, F, n = code.network, code.field, code.n
    for e in net.inputs:
        want = Matrix.selector(F, n, net.k, [net.sources[e]])
        if code.coeffs[e] != want:
            raise N1Violation(e, detail=f"input edge must carry x_{net.sources[e]}")
    for e in net.outputs:
        want = Matrix.selector(F, n, net.k, [net.demands[e]])
        if code.coeffs[e] != want:
            raise N2Violation(e, detail=f"output edge must carry x_{net.demands[e]}")
    combiners: dict[int, dict[int, Matrix]] = {}
    for e in topological_order(net):
        if e in net.sources:
            continue
        ps = net.parents[e]
        stacked = hstack([code.coeffs[p] for p in ps])
        # stacked @ T = C_e  <=>  T^T @ stacked^T = C_e^T
        Tt = solve_left(stacked.T, code.coeffs[e].T)
        if Tt is None:
            r_par = matrix_rank(stacked)
            r_all = matrix_rank(hstack([stacked, code.coeffs[e]]))
            raise N3Violation(
                e,
                witness={"parent_rank": r_par, "rank_with_edge": r_all},
                detail=f"f_e is not a linear function of its parents (rank {r_par} -> {r_all})",
            )
        T = Tt.T
        combiners[e] = {p: T.submatrix(i * n, (i + 1) * n, 0, n) for i, p in enumerate(ps)}
    return LocalEncodingCertificate("linear", n, dict(net.parents), combiners=combiners, gf=F)


def _validate_table(code: TableNetworkCode) -> LocalEncodingCertificate:
    net, q, n, k = code.network, code.q, code.n, code.network.k
    inputs = list(all_inputs(q, n * k))
    for e in net.inputs:
        m = net.sources[e]
        t = code.tables[e]
        for idx, row in enumerate(inputs):
            if t[idx] != pack(row[(m - 1) * n : m * n], q):
                raise N1Violation(e, witness=row, detail=f"input edge must carry x_{m}")
    for e in net.outputs:
        m = net.demands[e]
        t = code.tables[e]
        for idx, row in enumerate(inputs):
            if t[idx] != pack(row[(m - 1) * n : m * n], q):
                raise N2Violation(e, witness=row, detail=f"output edge must carry x_{m}")
    quotients: dict[int, dict] = {}
    for e in topological_order(net):
        if e in net.sources:
            continue
        ps = net.parents[e]
        tabs = [code.tables[p] for p in ps]
        own = code.tables[e]
        seen: dict[tuple, tuple[int, int]] = {}
        for idx in range(len(inputs)):
            key = tuple(t[idx] for t in tabs)
            prev = seen.get(key)
            if prev is None:
                seen[key] = (own[idx], idx)
            elif prev[0] != own[idx]:
                raise N3Violation(
                    e,
                    witness=(inputs[prev[1]], inputs[idx]),
                    detail="two inputs agree on every parent edge but differ on this edge",
                )
        quotients[e] = {
            tuple(unpack(v, q, n) for v in key): unpack(val, q, n) for key, (val, _) in seen.items()
        }
    return LocalEncodingCertificate("table", n, dict(net.parents), quotients=quotients)


def linear_to_table(code: LinearNetworkCode, cap: int = TABLE_CAP) -> TableNetworkCode:
    q, n, k = code.q, code.n, code.network.k
    size = q ** (n * k)
    if size > cap:
        raise TableTooLarge(f"q^(nk) = {size} exceeds the table cap {cap}")
    rows = list(all_inputs(q, n * k))
    tables = {}
    for e, C in code.coeffs.items():
        tables[e] = tuple(pack(C.vecmul(r), q) for r in rows)
    return TableNetworkCode(q, n, code.network, tables)


# --- JSON ------------------------------------------------------------------


def _edge_key(network: NetworkInstance, key: Any) -> int:
    eid = int(key)
    if eid not in network.id_map:
        raise UsageError(f"code refers to unknown edge {key}")
    return network.id_map[eid]


def network_code_from_json(obj: Mapping[str, Any], network: NetworkInstance) -> NetworkCode:
    if "field" in obj:
        F = field_from_json(obj["field"])
        coeffs = {_edge_key(network, key): Matrix.from_rows(F, rows, int(obj["n"])) for key, rows in obj["edges"].items()}
        return LinearNetworkCode(F, int(obj["n"]), network, coeffs)
    if "q" in obj:
        q, n = int(obj["q"]), int(obj["n"])
        tables = {}
        for key, entries in obj["edges"].items():
            vals = []
            for v in entries:
                if isinstance(v, (list, tuple)):
                    if len(v) != n:
                        raise ShapeMismatch(f"table entry {v} is not a block of {n} symbols")
                    vals.append(pack(v, q))
                else:
                    vals.append(int(v))
            tables[_edge_key(network, key)] = tuple(vals)
        return TableNetworkCode(q, n, network, tables)
    raise UsageError("network code JSON needs either 'field' (linear) or 'q' (table)")
