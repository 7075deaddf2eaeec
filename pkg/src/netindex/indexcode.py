"""(n, q) index codes: decodability (I1), decoder certificates and rates.

``l`` counts transmitted symbols, so a linear code is an (n*k) x l matrix G
with ``f(Z) = Z_flat @ G`` and its rate is ``l / n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .errors import InstanceTooLarge, InvalidCode, ShapeMismatch, Undecodable, UsageError
from .galois import FieldSpec, Matrix, field_from_json, hstack, matrix_rank, solve_left
from .index import Client, IndexInstance, RateReport, compute_mu
from .netcode import TABLE_CAP, pack, unpack

BRUTE_FORCE_CAP = 4096


@dataclass(frozen=True, eq=False)
class LinearIndexCode:
    field: FieldSpec
    n: int
    k: int
    l: int
    G: Matrix

    def __post_init__(self) -> None:
        if self.G.shape != (self.n * self.k, self.l):
            raise ShapeMismatch(f"G has shape {self.G.shape}, expected {(self.n * self.k, self.l)}")
        if self.G.field != self.field:
            raise ShapeMismatch("G is over a different field")

    @property
    def q(self) -> int:
        return self.field.q

    def encode(self, Z_flat: Sequence[int]) -> tuple[int, ...]:
        return self.G.vecmul(Z_flat)

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "n": self.n, "k": self.k, "l": self.l, "G": self.G.to_lists()}


@dataclass(frozen=True, eq=False)
class TableIndexCode:
    """General index code over the alphabet {0..q-1}.

    Either ``table`` lists the packed l-symbol output for every input in
    lexicographic order, or ``encoder`` computes it.  ``decoders`` may carry
    per-client certificates supplied by whoever built the code.
    """

    q: int
    n: int
    k: int
    l: int
    table: tuple[int, ...] | None = None
    encoder: Callable[[Sequence[int]], tuple[int, ...]] | None = None
    decoders: Mapping[int, "DecoderCertificate"] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.table is None and self.encoder is None:
            raise UsageError("table index code needs a table or an encoder")
        if self.table is not None and len(self.table) != self.q ** (self.n * self.k):
            raise ShapeMismatch(f"encoding table has {len(self.table)} entries, expected {self.q ** (self.n * self.k)}")

    def encode(self, Z_flat: Sequence[int]) -> tuple[int, ...]:
        if self.table is not None:
            return unpack(self.table[pack(Z_flat, self.q)], self.q, self.l)
        return tuple(self.encoder(Z_flat))

    def to_json(self) -> dict:
        size = self.q ** (self.n * self.k)
        if size > TABLE_CAP:
            raise InstanceTooLarge(f"cannot tabulate {size} inputs")
        if self.table is not None:
            tab = [list(unpack(v, self.q, self.l)) for v in self.table]
        else:
            tab = [list(self.encode(z)) for z in itertools.product(range(self.q), repeat=self.n * self.k)]
        return {"q": self.q, "n": self.n, "k": self.k, "l": self.l, "table": tab}


IndexCode = LinearIndexCode | TableIndexCode


@dataclass(frozen=True, eq=False)
class DecoderCertificate:
    """How one client recovers its demand.

    Linear: ``Z_x = f(Z) @ P + Z_H @ Q``.  Table: ``mapping`` sends the pair
    (code output, side values) to the demanded block.  Structured decoders
    built alongside a code may instead supply ``func``.
    """

    client: int
    kind: str
    P: Matrix | None = None
    Q: Matrix | None = None
    mapping: Mapping[tuple[tuple[int, ...], tuple[int, ...]], tuple[int, ...]] | None = None
    func: Callable[[Sequence[int], Sequence[int]], tuple[int, ...]] | None = None

    def decode(self, code_output: Sequence[int], side: Sequence[int]) -> tuple[int, ...]:
        if self.kind == "linear":
            out = self.P.vecmul(code_output)
            if self.Q.rows:
                add = self.P.field._add
                out = tuple(add[a][b] for a, b in zip(out, self.Q.vecmul(side)))
            return out
        if self.func is not None:
            return tuple(self.func(code_output, side))
        return self.mapping[(tuple(code_output), tuple(side))]

    def to_json(self) -> dict:
        if self.kind == "linear":
            return {"client": self.client, "P": self.P.to_lists(), "Q": self.Q.to_lists()}
        return {"client": self.client, "kind": self.kind}


def side_values(Z_flat: Sequence[int], has: Sequence[int], n: int) -> tuple[int, ...]:
    return tuple(s for h in has for s in Z_flat[(h - 1) * n : h * n])


def block(Z_flat: Sequence[int], msg: int, n: int) -> tuple[int, ...]:
    return tuple(Z_flat[(msg - 1) * n : msg * n])


def _check_shapes(code: IndexCode, instance: IndexInstance) -> None:
    if code.k != instance.k:
        raise ShapeMismatch(f"code has k = {code.k}, instance has k = {instance.k}")


def linear_client_certificate(code: LinearIndexCode, client: Client, index: int) -> DecoderCertificate:
    F, n, k = code.field, code.n, code.k
    E_x = Matrix.selector(F, n, k, [client.wants])
    E_H = Matrix.selector(F, n, k, list(client.has))
    A = hstack([code.G, E_H])
    # A @ [P; Q] = E_x  <=>  [P; Q]^T @ A^T = E_x^T
    sol = solve_left(A.T, E_x.T)
    if sol is None:
        r_a = matrix_rank(A)
        r_ax = matrix_rank(hstack([A, E_x]))
        raise Undecodable(
            index,
            witness={"rank_code_and_side": r_a, "rank_with_demand": r_ax},
            detail=f"x{client.wants} is not in the span of the code and side information (rank {r_a} -> {r_ax})",
        )
    PQ = sol.T
    return DecoderCertificate(index, "linear", P=PQ.submatrix(0, code.l, 0, n), Q=PQ.submatrix(code.l, PQ.rows, 0, n))


def validate_index_code(
    code: IndexCode,
    instance: IndexInstance,
    *,
    cap: int = TABLE_CAP,
    certificates: Sequence[DecoderCertificate] | None = None,
) -> list[DecoderCertificate]:
    """Check (I1) for every client, in client order; raise Undecodable on the first failure.

    For linear codes, ``certificates`` may offer candidate decoders (for
    example those built by a lift).  Each one is checked as an exact matrix
    identity, and a client whose candidate fails is solved from scratch.
    """
    _check_shapes(code, instance)
    if isinstance(code, LinearIndexCode):
        offered = {c.client: c for c in certificates or () if c.kind == "linear"}
        out = []
        for i, c in enumerate(instance.clients):
            cand = offered.get(i)
            if cand is not None and verify_linear_certificate(code, c, cand):
                out.append(cand)
            else:
                out.append(linear_client_certificate(code, c, i))
        return out
    return _partition_check(code, instance, cap)


def verify_linear_certificate(code: LinearIndexCode, client: Client, cert: DecoderCertificate) -> bool:
    """Check E_x = G P + E_H Q exactly, touching only the nonzero rows of P."""
    F, n, G = code.field, code.n, code.G
    add, mul = F._add, F._mul
    N = G.rows
    acc = [[0] * n for _ in range(N)]
    for t in range(cert.P.rows):
        prow = cert.P.row(t)
        if not any(prow):
            continue
        col = G.col(t)
        for r, g in enumerate(col):
            if g:
                mg = mul[g]
                a = acc[r]
                for c, p in enumerate(prow):
                    if p:
                        a[c] = add[a[c]][mg[p]]
    for hi, h in enumerate(client.has):
        for t in range(n):
            qrow = cert.Q.row(hi * n + t)
            a = acc[(h - 1) * n + t]
            for c, v in enumerate(qrow):
                a[c] = add[a[c]][v]
    base = (client.wants - 1) * n
    for r in range(N):
        for c in range(n):
            want = 1 if r == base + c else 0
            if acc[r][c] != want:
                return False
    return True


def brute_force_decodability(code: IndexCode, instance: IndexInstance) -> list[DecoderCertificate]:
    """Ground truth by exhaustive partition of all q^(nk) inputs."""
    _check_shapes(code, instance)
    return _partition_check(code, instance, BRUTE_FORCE_CAP)


def _partition_check(code: IndexCode, instance: IndexInstance, cap: int) -> list[DecoderCertificate]:
    q, n, k = code.q, code.n, code.k
    size = q ** (n * k)
    if size > cap:
        raise InstanceTooLarge(f"q^(nk) = {size} inputs exceeds the cap {cap}")
    inputs = list(itertools.product(range(q), repeat=n * k))
    outputs = [code.encode(z) for z in inputs]
    certs = []
    for idx, client in enumerate(instance.clients):
        seen: dict[tuple, tuple[tuple[int, ...], int]] = {}
        for zi, z in enumerate(inputs):
            key = (outputs[zi], side_values(z, client.has, n))
            want = block(z, client.wants, n)
            prev = seen.get(key)
            if prev is None:
                seen[key] = (want, zi)
            elif prev[0] != want:
                raise Undecodable(
                    idx,
                    witness=(inputs[prev[1]], z),
                    detail=f"two inputs agree on the broadcast and side information but differ on x{client.wants}",
                )
        certs.append(DecoderCertificate(idx, "table", mapping={key: v for key, (v, _) in seen.items()}))
    return certs


def rate_report(
    code: IndexCode, instance: IndexInstance, *, certificates: Sequence[DecoderCertificate] | None = None
) -> RateReport:
    try:
        validate_index_code(code, instance, certificates=certificates)
    except Undecodable as exc:
        raise InvalidCode(str(exc)) from exc
    mu = compute_mu(instance)
    rate = Fraction(code.l, code.n)
    if rate < mu:
        raise InvalidCode(f"rate {rate} below mu = {mu}: a decodable code cannot do this")
    return RateReport(code.n, code.q, code.l, rate, mu, rate == mu, isinstance(code, LinearIndexCode))


def index_code_from_json(obj: Mapping[str, Any]) -> IndexCode:
    n, k, l = int(obj["n"]), int(obj["k"]), int(obj["l"])
    if "field" in obj:
        F = field_from_json(obj["field"])
        return LinearIndexCode(F, n, k, l, Matrix.from_rows(F, obj["G"], l))
    if "q" in obj:
        q = int(obj["q"])
        tab = []
        for v in obj["table"]:
            tab.append(pack(v, q) if isinstance(v, (list, tuple)) else int(v))
        return TableIndexCode(q, n, k, l, table=tuple(tab))
    raise UsageError("index code JSON needs 'field' (linear) or 'q' (table)")
