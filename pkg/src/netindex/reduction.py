"""Network coding instance -> index coding instance, and codes in both directions.

Index messages are laid out as Z = (x_1..x_k, y_1..y_m): message k+i is the
per-edge message y_i.  The five client families are

    R1 (x_i, {y_i})          input edges
    R2 (y_i, {x_i})          input edges
    R3 (y_i, parents' y's)   non-input edges
    R4 (delta(e_i), {y_i})   output edges
    R5 (y_i, X)              every edge
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    CodeError,
    InvalidNetworkCode,
    N3Failure,
    ShapeMismatch,
    SingularM,
    StructureViolation,
)
from .galois import Matrix, hstack, invert_matrix, vstack
from .index import Client, IndexInstance, validate_index_instance
from .indexcode import DecoderCertificate, LinearIndexCode, TableIndexCode, block, side_values
from .netcode import (
    LinearNetworkCode,
    LocalEncodingCertificate,
    TableNetworkCode,
    validate_network_code,
)
from .network import NetworkInstance

FAMILIES = ("R1", "R2", "R3", "R4", "R5")


@dataclass(frozen=True, eq=False)
class ReductionMap:
    network: NetworkInstance
    message_names: tuple[str, ...]
    # family name -> indices into the (sorted) client list of the index instance
    client_families: Mapping[str, tuple[int, ...]]
    # client index -> (family, edge id)
    provenance: Mapping[int, tuple[str, int]]

    @property
    def k(self) -> int:
        return self.network.k

    @property
    def m(self) -> int:
        return self.network.m

    def y(self, edge: int) -> int:
        """Index-message id of y for the given edge."""
        return self.network.k + edge

    def to_json(self) -> dict:
        return {
            "message_names": list(self.message_names),
            "client_families": {f: list(self.client_families[f]) for f in FAMILIES},
        }


def _family_clients(network: NetworkInstance) -> list[tuple[str, int, Client]]:
    k = network.k
    X = tuple(range(1, k + 1))
    y = lambda e: k + e  # noqa: E731
    out = []
    for i in network.inputs:
        out.append(("R1", i, Client(i, (y(i),))))
    for i in network.inputs:
        out.append(("R2", i, Client(y(i), (i,))))
    for e in network.edge_ids:
        if e not in network.inputs:
            out.append(("R3", e, Client(y(e), tuple(sorted(y(p) for p in network.parents[e])))))
    for e in network.outputs:
        out.append(("R4", e, Client(network.demands[e], (y(e),))))
    for e in network.edge_ids:
        out.append(("R5", e, Client(y(e), X)))
    return out


def reduce_instance(network: NetworkInstance) -> tuple[IndexInstance, ReductionMap]:
    """Build I_N.  The network must be canonically indexed."""
    if not network.is_canonical():
        raise ShapeMismatch("reduce_instance needs a canonically indexed network")
    k, m = network.k, network.m
    fam = _family_clients(network)
    names = [f"x{i}" for i in range(1, k + 1)] + [f"y{i}" for i in range(1, m + 1)]
    raw = {"k": k + m, "clients": [c.to_json() for _, _, c in fam], "names": names}
    # R2 and R5 coincide when k = 1; the repeat is expected here
    inst = validate_index_instance(raw, warn_duplicates=False)

    # match each family client to a position in the sorted list; repeated
    # clients (R2 and R5 coincide when k = 1) take successive positions
    free: dict[Client, list[int]] = defaultdict(list)
    for pos, c in enumerate(inst.clients):
        free[c].append(pos)
    families: dict[str, list[int]] = {f: [] for f in FAMILIES}
    provenance = {}
    for name, edge, c in fam:
        pos = free[c].pop(0)
        families[name].append(pos)
        provenance[pos] = (name, edge)
    rmap = ReductionMap(network, tuple(names), {f: tuple(v) for f, v in families.items()}, provenance)
    return inst, rmap


# --- lifting ---------------------------------------------------------------


def _checked(code) -> LocalEncodingCertificate:
    try:
        return validate_network_code(code)
    except CodeError as exc:
        raise InvalidNetworkCode(f"network code does not validate: {exc}") from exc


def lift_linear_code(
    code: LinearNetworkCode, rmap: ReductionMap, instance: IndexInstance | None = None
) -> tuple[LinearIndexCode, list[DecoderCertificate]]:
    """g_i(Z) = y_i + f_{e_i}(X) for every edge; returns the code and one decoder per client.

    The decoders follow the five families: g_i - y_i, g_i - x_i, g_i minus the
    local encoding of (g_j - y_j) over the parents, g_i - y_i, and
    g_i - f_{e_i}(X).
    """
    cert = _checked(code)
    net, F, n, k, m = code.network, code.field, code.n, code.network.k, code.network.m
    if net is not rmap.network and net.to_json() != rmap.network.to_json():
        raise InvalidNetworkCode("code and reduction map refer to different networks")
    x_part = hstack([code.coeffs[e] for e in net.edge_ids])
    y_part = Matrix.identity(F, n * m)
    G = vstack([x_part, y_part])
    icode = LinearIndexCode(F, n, k + m, n * m, G)

    if instance is None:
        instance = reduce_instance(net)[0]
    I_n = Matrix.identity(F, n)
    minus = F._neg[1]
    certs = []
    for pos, client in enumerate(instance.clients):
        fam, e = rmap.provenance[pos]
        # P picks combinations of g-blocks, Q of side-information blocks
        P_blocks = {e: I_n}
        Q_blocks: dict[int, Matrix] = {}
        if fam in ("R1", "R4"):
            Q_blocks[rmap.y(e)] = I_n.scale(minus)
        elif fam == "R2":
            Q_blocks[e] = I_n.scale(minus)
        elif fam == "R3":
            for p in net.parents[e]:
                T = cert.combiners[e][p]
                # y_e = g_e - sum_p (g_p - y_p) T_p
                P_blocks[p] = T.scale(minus)
                Q_blocks[rmap.y(p)] = T
        else:
            for j in range(1, k + 1):
                Q_blocks[j] = code.coeffs[e].rows_block(j - 1, n).scale(minus)
        P = vstack([P_blocks.get(j, Matrix.zeros(F, n, n)) for j in range(1, m + 1)])
        Q = vstack([Q_blocks.get(h, Matrix.zeros(F, n, n)) for h in client.has], F, n)
        certs.append(DecoderCertificate(pos, "linear", P=P, Q=Q))
    return icode, certs


def lift_table_code(
    code: TableNetworkCode, rmap: ReductionMap, instance: IndexInstance | None = None
) -> TableIndexCode:
    """Non-linear lift: g_i = y_i + f_{e_i}(X) with componentwise addition mod q."""
    cert = _checked(code)
    net, q, n, k, m = code.network, code.q, code.n, code.network.k, code.network.m
    if net is not rmap.network and net.to_json() != rmap.network.to_json():
        raise InvalidNetworkCode("code and reduction map refer to different networks")
    edges = net.edge_ids

    def plus(a, b):
        return tuple((s + t) % q for s, t in zip(a, b))

    def minus(a, b):
        return tuple((s - t) % q for s, t in zip(a, b))

    def encode(Z):
        X = tuple(Z[: n * k])
        out = []
        for e in edges:
            out.extend(plus(block(Z, k + e, n), code.value(e, X)))
        return tuple(out)

    def g_block(out, e):
        return tuple(out[(e - 1) * n : e * n])

    if instance is None:
        instance = reduce_instance(net)[0]
    decoders = {}
    for pos, client in enumerate(instance.clients):
        fam, e = rmap.provenance[pos]
        has = client.has
        if fam in ("R1", "R2", "R4"):
            # the side information is the single block masking g_e
            func = lambda out, side, e=e: minus(g_block(out, e), side[:n])  # noqa: E731
        elif fam == "R3":
            parents = net.parents[e]

            def func(out, side, e=e, parents=parents, has=has):
                vals = []
                for p in parents:
                    at = has.index(k + p)
                    vals.append(minus(g_block(out, p), side[at * n : (at + 1) * n]))
                return minus(g_block(out, e), cert.local(e, vals))

        else:
            func = lambda out, side, e=e: minus(g_block(out, e), code.value(e, tuple(side)))  # noqa: E731
        decoders[pos] = DecoderCertificate(pos, "table", func=func)
    return TableIndexCode(q, n, k + m, n * m, encoder=encode, decoders=decoders)


def check_certificates(
    code: TableIndexCode | LinearIndexCode,
    instance: IndexInstance,
    certs: Mapping[int, DecoderCertificate] | Sequence[DecoderCertificate],
    inputs,
) -> list[tuple[int, tuple[int, ...]]]:
    """Run each client's decoder on the given inputs; return (client, input) failures."""
    if not isinstance(certs, Mapping):
        certs = {c.client: c for c in certs}
    n = code.n
    failures = []
    for Z in inputs:
        out = code.encode(Z)
        for pos, client in enumerate(instance.clients):
            got = certs[pos].decode(out, side_values(Z, client.has, n))
            if tuple(got) != block(Z, client.wants, n):
                failures.append((pos, tuple(Z)))
    return failures


def random_inputs(q: int, length: int, count: int, seed: int) -> list[tuple[int, ...]]:
    rng = random.Random(seed)
    return [tuple(rng.randrange(q) for _ in range(length)) for _ in range(count)]


# --- lowering --------------------------------------------------------------


def lower_index_code(code: LinearIndexCode, rmap: ReductionMap) -> LinearNetworkCode:
    """Recover a linear network code from an index code on I_N with l = n*m."""
    net, F, n = rmap.network, code.field, code.n
    k, m = net.k, net.m
    if code.k != k + m:
        raise ShapeMismatch(f"index code has {code.k} messages, I_N has {k + m}")
    if code.l != n * m:
        raise ShapeMismatch(f"lowering needs l = n*m = {n * m} symbols, got {code.l}")
    G = code.G
    A = G.submatrix(0, n * k, 0, n * m)
    M = G.submatrix(n * k, n * (k + m), 0, n * m)
    Minv = invert_matrix(M)
    if Minv is None:
        raise SingularM("the y-part of the code is singular, so some R5 client cannot decode")
    C = A @ Minv
    inputs, outputs = set(net.inputs), set(net.outputs)
    coeffs = {}
    for i in net.edge_ids:
        Ci = C.cols_block(i - 1, n)
        if i in inputs or i in outputs:
            own = i if i in inputs else net.demands[i]
            for j in range(1, k + 1):
                blk = Ci.rows_block(j - 1, n)
                if j != own and not blk.is_zero():
                    raise StructureViolation(f"edge {i}: block C[{j}] is nonzero, code does not meet the bound in the required form")
            if invert_matrix(Ci.rows_block(own - 1, n)) is None:
                raise StructureViolation(f"edge {i}: block C[{own}] is singular")
            coeffs[i] = Matrix.selector(F, n, k, [own])
        else:
            coeffs[i] = Ci
    lowered = LinearNetworkCode(F, n, net, coeffs)
    try:
        validate_network_code(lowered)
    except CodeError as exc:
        raise N3Failure(f"lowered code fails validation: {exc}") from exc
    return lowered
