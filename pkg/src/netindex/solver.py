"""Exhaustive searches: linear network codes, linear index codes, matroid representations.

Every search is a deterministic backtracking over a canonical enumeration,
so "exhausted" is a proof of non-existence over the given field and the node
count is reproducible.  Running out of budget is reported separately and
proves nothing.
"""

from __future__ import annotations

import functools
import itertools
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .errors import BudgetExhausted, NoCodeUpToMax, RetryLimit, UsageError
from .galois import FieldSpec, Matrix, rref
from .index import IndexInstance, RateReport, compute_mu
from .indexcode import LinearIndexCode, rate_report
from .netcode import LinearNetworkCode, validate_network_code
from .network import NetworkInstance, topological_order, validate_network

log = logging.getLogger(__name__)

FOUND, EXHAUSTED, BUDGET = "found", "exhausted", "budget"


@dataclass(frozen=True)
class SearchConfig:
    field: FieldSpec
    n: int = 1
    l: int | None = None
    l_max: int | None = None
    budget_nodes: int = 10**9
    budget_secs: float | None = None
    symmetry: bool = True
    workers: int = 1

    def __post_init__(self) -> None:
        if self.budget_nodes <= 0:
            raise UsageError("node budget must be positive")
        if self.budget_secs is not None and self.budget_secs <= 0:
            raise UsageError("time budget must be positive")
        if self.n < 1:
            raise UsageError("block length n must be at least 1")
        if self.workers < 1:
            raise UsageError("worker count must be at least 1")


@dataclass
class SearchResult:
    outcome: str
    nodes: int
    elapsed_ms: int
    code: Any = None
    detail: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.outcome == FOUND

    def to_json(self, *, deterministic: bool = False) -> dict:
        code = self.code
        if code is not None and hasattr(code, "to_json"):
            code = code.to_json()
        out = {"outcome": self.outcome, "nodes": self.nodes, "elapsed_ms": 0 if deterministic else self.elapsed_ms, "code": code}
        if self.detail:
            out["detail"] = self.detail
        return out


class _OutOfBudget(Exception):
    pass


class _Counter:
    def __init__(self, limit: int, secs: float | None):
        self.nodes = 0
        self.limit = limit
        self.deadline = None if secs is None else time.monotonic() + secs

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise _OutOfBudget
        if self.deadline is not None and not self.nodes & 1023 and time.monotonic() > self.deadline:
            raise _OutOfBudget


class _Search:
    """Base for the backtracking searches.

    ``first_choice`` pins the first branching point to one candidate, which
    is how the top level is split across workers.  ``first_width`` records
    how many candidates that branching point had.
    """

    def __init__(self, config: SearchConfig, first_choice: int | None = None):
        self.config = config
        self.counter = _Counter(config.budget_nodes, config.budget_secs)
        self.first_choice = first_choice
        self.first_width: int | None = None
        self.probe = first_choice == -1

    def branch(self, candidates: Sequence) -> Iterable:
        if self.first_width is None:
            self.first_width = len(candidates)
            if self.probe:
                return ()
            if self.first_choice is not None:
                candidates = candidates[self.first_choice : self.first_choice + 1]
        return candidates

    def solve(self):  # pragma: no cover - overridden
        raise NotImplementedError

    def run(self) -> tuple[str, int, Any]:
        try:
            sol = self.solve()
        except _OutOfBudget:
            return BUDGET, self.counter.nodes, None
        return (FOUND if sol is not None else EXHAUSTED), self.counter.nodes, sol


def _run_piece(factory: Callable[..., _Search], args: tuple, config: SearchConfig, choice: int):
    s = factory(*args, config, first_choice=choice)
    return s.run()


def _drive(factory: Callable[..., _Search], args: tuple, config: SearchConfig) -> tuple[str, int, Any, int]:
    """Run a search, optionally split at its first branching point.

    The split result is the same as the sequential one: the first branch in
    canonical order that succeeds wins, and the node count is the sum over
    that branch and every branch before it.
    """
    t0 = time.monotonic()
    if config.workers > 1:
        probe = factory(*args, config, first_choice=-1)
        status, base_nodes, sol = probe.run()
        width = probe.first_width
        if width is not None and width > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                pieces = list(pool.map(_run_piece, *zip(*[(factory, args, config, i) for i in range(width)])))
            nodes = 0
            for status, cnt, sol in pieces:
                nodes += cnt
                if status != EXHAUSTED:
                    break
            else:
                status, sol = EXHAUSTED, None
            if nodes > config.budget_nodes:
                status, sol = BUDGET, None
            return status, nodes, sol, int((time.monotonic() - t0) * 1000)
    status, nodes, sol = factory(*args, config).run()
    return status, nodes, sol, int((time.monotonic() - t0) * 1000)


# --- linear algebra on tuples ----------------------------------------------


def _span_basis(F: FieldSpec, vectors: Sequence[Sequence[int]], length: int) -> list[tuple[int, ...]]:
    red, piv = rref(F, vectors, length)
    return [tuple(r) for r in red[: len(piv)]]


def _rank(F: FieldSpec, vectors: Sequence[Sequence[int]], length: int) -> int:
    if not vectors:
        return 0
    return len(rref(F, vectors, length)[1])


@functools.lru_cache(maxsize=None)
def subspace_coordinates(F: FieldSpec, dim: int, r: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Every dim-dimensional subspace of F^r, as dim x r matrices in reduced row echelon form.

    Listed by pivot set, then entries lexicographically; for dim = 1 these are
    the projective points with leading coordinate 1.
    """
    q = F.q
    out = []
    for pivots in itertools.combinations(range(r), dim):
        free = [(i, j) for i in range(dim) for j in range(pivots[i] + 1, r) if j not in pivots]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * r for _ in range(dim)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            out.append(tuple(tuple(row) for row in rows))
    return tuple(out)


def _combine(F: FieldSpec, coef: Sequence[int], basis: Sequence[Sequence[int]], length: int) -> tuple[int, ...]:
    add, mul = F._add, F._mul
    acc = [0] * length
    for c, b in zip(coef, basis):
        if c:
            m = mul[c]
            for j, v in enumerate(b):
                if v:
                    acc[j] = add[acc[j]][m[v]]
    return tuple(acc)


# --- network codes ---------------------------------------------------------


def _useful_edges(net: NetworkInstance) -> set[int]:
    """Edges with an output edge downstream (or that are outputs)."""
    children: dict[int, list[int]] = {e: [] for e in net.edge_ids}
    for e, ps in net.parents.items():
        for p in ps:
            children[p].append(e)
    useful = set(net.outputs)
    for e in reversed(topological_order(net)):
        if any(c in useful for c in children[e]):
            useful.add(e)
    return useful


def _check_first_order(net: NetworkInstance) -> list[int]:
    """Non-output edges, parents first, greedily finishing some output's ancestry as early as possible."""
    outs = set(net.outputs)
    inner = [e for e in topological_order(net) if e not in outs]
    anc: dict[int, set[int]] = {}
    for e in topological_order(net):
        a = set()
        for p in net.parents[e]:
            a |= anc[p]
            if p not in net.sources:
                a.add(p)
        anc[e] = a
    remaining = {o: len(anc[o]) for o in net.outputs}
    feeds: dict[int, list[int]] = {e: [] for e in inner}
    for o in net.outputs:
        for a in anc[o]:
            feeds[a].append(o)
    pending = {e: len(net.parents[e]) for e in inner}
    children: dict[int, list[int]] = {e: [] for e in inner}
    for e in inner:
        for p in net.parents[e]:
            children[p].append(e)
    ready = {e for e in inner if pending[e] == 0}
    order = []
    big = len(inner) + 1
    while ready:
        e = min(ready, key=lambda x: (min((remaining[o] for o in feeds[x]), default=big), x))
        ready.discard(e)
        order.append(e)
        for o in feeds[e]:
            remaining[o] -= 1
        for c in children[e]:
            pending[c] -= 1
            if pending[c] == 0:
                ready.add(c)
    return order


class _NetworkSearch(_Search):
    """Assign each edge an n-dimensional space of global coding columns.

    Inputs are fixed selectors, outputs are only checked (their demand must
    lie in the parents' span).  Any other edge may as well carry a maximal
    subspace of its parents' span: the whole span when it has dimension at
    most n, otherwise one of its n-dimensional subspaces.  Enlarging an edge
    never hurts anything downstream, so this loses no solutions.
    """

    def __init__(self, net: NetworkInstance, config: SearchConfig, first_choice: int | None = None):
        super().__init__(config, first_choice)
        self.net = net
        self.F = config.field
        self.n = config.n
        self.L = self.n * net.k
        self.order = _check_first_order(net)
        self.useful = _useful_edges(net)
        # check each output as soon as its last parent is assigned
        pos = {e: i for i, e in enumerate(self.order)}
        self.checks: dict[int, list[int]] = {}
        for o in net.outputs:
            last = max(pos[p] for p in net.parents[o])
            self.checks.setdefault(last, []).append(o)
        self.cols: dict[int, tuple[tuple[int, ...], ...]] = {}

    def _selector_cols(self, msg: int) -> tuple[tuple[int, ...], ...]:
        n, L = self.n, self.L
        return tuple(tuple(1 if j == (msg - 1) * n + t else 0 for j in range(L)) for t in range(n))

    def _parent_basis(self, e: int) -> list[tuple[int, ...]]:
        vecs = [c for p in self.net.parents[e] for c in self.cols[p] if any(c)]
        return _span_basis(self.F, vecs, self.L) if vecs else []

    def _outputs_ok(self, idx: int) -> bool:
        for o in self.checks.get(idx, ()):
            vecs = [c for p in self.net.parents[o] for c in self.cols[p] if any(c)]
            r = _rank(self.F, vecs, self.L)
            if _rank(self.F, vecs + list(self._selector_cols(self.net.demands[o])), self.L) != r:
                return False
        return True

    def solve(self):
        return self._step(0)

    def _step(self, idx: int):
        net, n, L = self.net, self.n, self.L
        zero = (0,) * L
        while idx < len(self.order):
            e = self.order[idx]
            if e in net.sources:
                self.cols[e] = self._selector_cols(net.sources[e])
            else:
                basis = self._parent_basis(e)
                r = len(basis)
                if r <= n or e not in self.useful:
                    # no choice to make: the whole span, or a fixed pick for dead-end edges
                    chosen = basis[:n]
                    self.cols[e] = tuple(chosen) + (zero,) * (n - len(chosen))
                else:
                    for coef in self.branch(subspace_coordinates(self.F, n, r)):
                        self.counter.tick()
                        self.cols[e] = tuple(_combine(self.F, row, basis, L) for row in coef)
                        if self._outputs_ok(idx):
                            found = self._step(idx + 1)
                            if found is not None:
                                return found
                    return None
            if not self._outputs_ok(idx):
                return None
            idx += 1
        return self._assemble()

    def _assemble(self) -> LinearNetworkCode:
        F, n, net = self.F, self.n, self.net
        coeffs = {}
        for e in net.edge_ids:
            if e in net.outputs:
                coeffs[e] = Matrix.selector(F, n, net.k, [net.demands[e]])
            else:
                cols = self.cols[e]
                coeffs[e] = Matrix(F, self.L, n, tuple(cols[t][j] for j in range(self.L) for t in range(n)))
        return LinearNetworkCode(F, n, net, coeffs)


def search_network_code(network: NetworkInstance, config: SearchConfig) -> SearchResult:
    """Search for a linear (n, q) network code with n = config.n."""
    status, nodes, code, ms = _drive(_NetworkSearch, (network,), config)
    if code is not None:
        validate_network_code(code)
    log.info("network code search over %s, n=%d: %s after %d nodes", config.field, config.n, status, nodes)
    return SearchResult(status, nodes, ms, code, {"field": str(config.field), "n": config.n})


def search_scalar_network_code(network: NetworkInstance, field_: FieldSpec, config: SearchConfig | None = None) -> SearchResult:
    base = config or SearchConfig(field_)
    cfg = SearchConfig(field_, 1, base.l, base.l_max, base.budget_nodes, base.budget_secs, base.symmetry, base.workers)
    return search_network_code(network, cfg)


# --- index codes -----------------------------------------------------------


class _IndexSearch(_Search):
    """Enumerate column spaces of G: G^T in reduced row echelon form, column by column.

    Column j has a 1 at its pivot row, zeros above it and zeros at every
    earlier pivot; earlier columns must be zero at the new pivot.  Each
    l-dimensional column space is therefore visited exactly once.
    """

    def __init__(self, instance: IndexInstance, config: SearchConfig, first_choice: int | None = None):
        super().__init__(config, first_choice)
        self.inst = instance
        self.F = config.field
        self.n = config.n
        self.N = self.n * instance.k
        self.l = config.l
        n = self.n
        unit = lambda i: tuple(1 if j == i else 0 for j in range(self.N))  # noqa: E731
        self.side = [[unit((h - 1) * n + t) for h in c.has for t in range(n)] for c in instance.clients]
        self.want = [[unit((c.wants - 1) * n + t) for t in range(n)] for c in instance.clients]

    def _deficit(self, cols: list[tuple[int, ...]], i: int) -> int:
        base = cols + self.side[i]
        r = _rank(self.F, base, self.N)
        return _rank(self.F, base + self.want[i], self.N) - r

    def _feasible(self, cols: list[tuple[int, ...]]) -> bool:
        remaining = self.l - len(cols)
        return all(self._deficit(cols, i) <= remaining for i in range(len(self.inst.clients)))

    def _columns(self, cols: list[tuple[int, ...]], pivots: list[int]) -> list[tuple[tuple[int, ...], int]]:
        N, q = self.N, self.F.q
        start = pivots[-1] + 1 if pivots else 0
        # leave room for the pivots of the columns still to come
        last = N - (self.l - len(cols))
        out = []
        for p in range(start, last + 1):
            if any(c[p] for c in cols):
                continue
            free = [j for j in range(p + 1, N)]
            for vals in itertools.product(range(q), repeat=len(free)):
                v = [0] * N
                v[p] = 1
                for j, x in zip(free, vals):
                    v[j] = x
                out.append((tuple(v), p))
        return out

    def solve(self):
        if self.l >= self.N:
            # the identity broadcast decodes everything
            self.counter.tick()
            return [tuple(1 if j == i else 0 for j in range(self.N)) for i in range(self.N)] + [(0,) * self.N] * (self.l - self.N)
        return self._step([], [])

    def _step(self, cols, pivots):
        if len(cols) == self.l:
            return list(cols)
        for v, p in self.branch(self._columns(cols, pivots)):
            self.counter.tick()
            nxt = cols + [v]
            if self._feasible(nxt):
                found = self._step(nxt, pivots + [p])
                if found is not None:
                    return found
        return None


def search_linear_index_code(instance: IndexInstance, config: SearchConfig) -> SearchResult:
    """Search for a linear (n, q) index code with exactly config.l transmitted symbols."""
    if config.l is None or config.l < 0:
        raise UsageError("index code search needs a length l >= 0")
    status, nodes, cols, ms = _drive(_IndexSearch, (instance,), config)
    code = None
    if cols is not None:
        F, N, l = config.field, config.n * instance.k, config.l
        G = Matrix(F, N, l, tuple(cols[j][i] for i in range(N) for j in range(l)))
        code = LinearIndexCode(F, config.n, instance.k, l, G)
        rate_report(code, instance)
    log.info("index code search over %s, n=%d, l=%d: %s after %d nodes", config.field, config.n, config.l, status, nodes)
    return SearchResult(status, nodes, ms, code, {"field": str(config.field), "n": config.n, "l": config.l})


def min_linear_index_length(instance: IndexInstance, config: SearchConfig) -> tuple[RateReport, LinearIndexCode, list[SearchResult]]:
    """Smallest l (in symbols) with a linear code, trying l = n*mu, n*mu + 1, ...

    Raises BudgetExhausted if some shorter length stayed undecided, and
    NoCodeUpToMax if every length up to l_max was exhausted.
    """
    n = config.n
    mu = compute_mu(instance)
    l_max = config.l_max if config.l_max is not None else n * instance.k
    runs = []
    for l in range(n * mu, l_max + 1):
        cfg = SearchConfig(config.field, n, l, l_max, config.budget_nodes, config.budget_secs, config.symmetry, config.workers)
        res = search_linear_index_code(instance, cfg)
        runs.append(res)
        if res.outcome == BUDGET:
            raise BudgetExhausted(f"length {l} undecided after {res.nodes} nodes")
        if res.found:
            return rate_report(res.code, instance), res.code, runs
    raise NoCodeUpToMax(f"no linear code with l <= {l_max} over {config.field}")


# --- matroids --------------------------------------------------------------


@dataclass(frozen=True)
class MatroidSpec:
    """Rank-r matroid given by required dependent and independent sets.

    A set listed as dependent must have rank below its size, one listed as
    independent must have full rank.  ``simple`` additionally asks every
    pair of elements to be independent.
    """

    size: int
    rank: int
    dependent: tuple[frozenset[int], ...]
    independent: tuple[frozenset[int], ...]
    simple: bool = True
    name: str = ""

    def __post_init__(self) -> None:
        seen = set()
        for s in self.dependent + self.independent:
            if not s or min(s) < 1 or max(s) > self.size:
                raise UsageError(f"set {sorted(s)} is outside the ground set 1..{self.size}")
            if s in seen:
                raise UsageError(f"set {sorted(s)} listed twice")
            seen.add(s)

    @classmethod
    def from_lists(cls, size: int, rank: int, dependent, independent, simple: bool = True, name: str = "") -> "MatroidSpec":
        return cls(size, rank, tuple(frozenset(s) for s in dependent), tuple(frozenset(s) for s in independent), simple, name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "rank": self.rank,
            "dependent": [sorted(s) for s in self.dependent],
            "independent": [sorted(s) for s in self.independent],
            "simple": self.simple,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MatroidSpec":
        return cls.from_lists(int(obj["size"]), int(obj["rank"]), obj.get("dependent", []), obj.get("independent", []), bool(obj.get("simple", True)), obj.get("name", ""))


def _projective_points(F: FieldSpec, r: int) -> list[tuple[int, ...]]:
    return [row[0] for row in subspace_coordinates(F, 1, r)]


class _MatroidSearch(_Search):
    def __init__(self, spec: MatroidSpec, config: SearchConfig, first_choice: int | None = None):
        super().__init__(config, first_choice)
        self.spec = spec
        self.F = config.field
        r = spec.rank
        self.fixed: dict[int, tuple[int, ...]] = {}
        if config.symmetry:
            self._normalize()
        free = [e for e in range(1, spec.size + 1) if e not in self.fixed]
        # greedy order: next element is the one closing the most constraints
        placed = set(self.fixed)
        order = []
        sets = spec.dependent + spec.independent
        while free:
            best = max(free, key=lambda e: (sum(1 for s in sets if e in s and s - {e} <= placed), -e))
            order.append(best)
            placed.add(best)
            free.remove(best)
        self.order = order
        done = set(self.fixed)
        self.due: dict[int, list[tuple[frozenset[int], bool]]] = {}
        for e in order:
            done.add(e)
            self.due[e] = [(s, True) for s in spec.dependent if e in s and s <= done]
            self.due[e] += [(s, False) for s in spec.independent if e in s and s <= done]
        self.points = _projective_points(self.F, r)

    def _normalize(self) -> None:
        """Send the first required-independent basis to unit vectors and, when
        possible, a point in general position with it to the all-ones vector."""
        spec, r = self.spec, self.spec.rank
        bases = sorted((s for s in spec.independent if len(s) == r), key=sorted)
        if not bases:
            return
        basis = sorted(bases[0])
        for i, e in enumerate(basis):
            self.fixed[e] = tuple(1 if j == i else 0 for j in range(r))
        indep = set(spec.independent)
        for d in range(1, spec.size + 1):
            if d in basis:
                continue
            if all(frozenset(set(basis) - {b} | {d}) in indep for b in basis):
                self.fixed[d] = (1,) * r
                break

    def _consistent(self, assign: dict[int, tuple[int, ...]]) -> bool:
        # constraints among the fixed points themselves
        fixed = set(self.fixed)
        for s in self.spec.dependent:
            if s <= fixed and _rank(self.F, [assign[e] for e in s], self.spec.rank) >= len(s):
                return False
        for s in self.spec.independent:
            if s <= fixed and _rank(self.F, [assign[e] for e in s], self.spec.rank) < len(s):
                return False
        return True

    def solve(self):
        assign = dict(self.fixed)
        if self.spec.simple and len(set(assign.values())) < len(assign):
            return None
        if not self._consistent(assign):
            return None
        return self._step(0, assign)

    def _step(self, idx: int, assign: dict[int, tuple[int, ...]]):
        if idx == len(self.order):
            return dict(assign)
        e = self.order[idx]
        used = set(assign.values()) if self.spec.simple else set()
        r = self.spec.rank
        for v in self.branch(self.points):
            self.counter.tick()
            if v in used:
                continue
            assign[e] = v
            ok = True
            for s, dep in self.due[e]:
                rk = _rank(self.F, [assign[x] for x in s], r)
                if (rk >= len(s)) if dep else (rk < len(s)):
                    ok = False
                    break
            if ok:
                found = self._step(idx + 1, assign)
                if found is not None:
                    return found
            del assign[e]
        return None


def check_matroid_witness(spec: MatroidSpec, F: FieldSpec, vectors: dict[int, Sequence[int]]) -> list[str]:
    """Independent rank check of a claimed representation; returns violations."""
    r = spec.rank
    bad = []
    for e in range(1, spec.size + 1):
        if e not in vectors or not any(vectors[e]):
            bad.append(f"element {e} has no nonzero vector")
    for s in spec.dependent:
        if _rank(F, [vectors[e] for e in s], r) >= len(s):
            bad.append(f"{sorted(s)} should be dependent")
    for s in spec.independent:
        if _rank(F, [vectors[e] for e in s], r) < len(s):
            bad.append(f"{sorted(s)} should be independent")
    if spec.simple:
        for a, b in itertools.combinations(range(1, spec.size + 1), 2):
            if _rank(F, [vectors[a], vectors[b]], r) < 2:
                bad.append(f"{{{a}, {b}}} is a parallel pair")
    return bad


def search_matroid_representation(spec: MatroidSpec, config: SearchConfig) -> SearchResult:
    status, nodes, sol, ms = _drive(_MatroidSearch, (spec,), config)
    witness = None
    if sol is not None:
        witness = {str(e): list(sol[e]) for e in sorted(sol)}
        bad = check_matroid_witness(spec, config.field, sol)
        if bad:  # pragma: no cover - would be a search bug
            raise AssertionError(f"matroid search returned an invalid witness: {bad[:3]}")
    log.info("matroid %s over %s: %s after %d nodes", spec.name or "?", config.field, status, nodes)
    detail = {"field": str(config.field), "matroid": spec.name}
    if status == EXHAUSTED:
        detail["note"] = f"no representation over {config.field}; other fields are not covered by this run"
    return SearchResult(status, nodes, ms, witness, detail)


# --- random solvable networks ----------------------------------------------


def _random_matrix(F: FieldSpec, rows: int, cols: int, rng: random.Random) -> Matrix:
    return Matrix(F, rows, cols, tuple(rng.randrange(F.q) for _ in range(rows * cols)))


def generate_random_solvable_network(
    seed: int,
    field_: FieldSpec,
    n: int = 1,
    *,
    k: int | None = None,
    relays: int | None = None,
    max_edges: int = 12,
    retries: int = 200,
) -> tuple[NetworkInstance, LinearNetworkCode]:
    """A random DAG together with a linear code that solves it.

    Local encodings are drawn at random in topological order; output edges
    are then attached only where a message selector lies in the span of a
    vertex's incoming edges, so the demands are met by construction.
    """
    rng = random.Random(seed)
    for _ in range(retries):
        kk = k if k is not None else rng.randint(1, 2)
        V = relays if relays is not None else rng.randint(1, 4)
        got = _try_random_network(rng, field_, n, kk, V, max_edges)
        if got is not None:
            return got
    raise RetryLimit(f"no solvable network after {retries} attempts (seed {seed})")


def _try_random_network(rng: random.Random, F: FieldSpec, n: int, k: int, V: int, max_edges: int):
    verts = [f"v{i}" for i in range(1, V + 1)]
    edges: list[tuple[str, str]] = []
    for j in range(1, k + 1):
        # the first vertex must be fed, or its out-edges would become inputs
        edges.append((f"s{j}", verts[0 if j == 1 else rng.randrange(min(V, 2))]))
    for i in range(V - 1):
        for _ in range(rng.randint(1, 2)):
            edges.append((verts[i], verts[rng.randrange(i + 1, V)]))
    for i in range(1, V):
        if not any(h == verts[i] for _, h in edges):
            edges.append((verts[rng.randrange(i)], verts[i]))

    # global coding matrices for the pre-output edges
    L = n * k
    coeffs: list[Matrix] = []
    into: dict[str, list[int]] = {}
    for idx, (t, h) in enumerate(edges):
        if t.startswith("s"):
            coeffs.append(Matrix.selector(F, n, k, [int(t[1:])]))
        else:
            acc = Matrix.zeros(F, L, n)
            for p in into.get(t, []):
                acc = acc + coeffs[p] @ _random_matrix(F, n, n, rng)
            coeffs.append(acc)
        into.setdefault(h, []).append(idx)

    def reachable(v: str) -> list[int]:
        ps = into.get(v, [])
        stacked = [c for p in ps for c in (coeffs[p].col(j) for j in range(n))]
        r = _rank(F, stacked, L)
        ok = []
        for msg in range(1, k + 1):
            sel = Matrix.selector(F, n, k, [msg])
            if _rank(F, stacked + [sel.col(j) for j in range(n)], L) == r:
                ok.append(msg)
        return ok

    outs: list[tuple[str, int]] = []
    out_deg = {v: 0 for v in verts}
    for t, _ in edges:
        if t in out_deg:
            out_deg[t] += 1
    for v in verts:
        if out_deg[v] == 0:
            ok = reachable(v)
            if not ok:
                return None
            outs.append((v, rng.choice(ok)))
    demanded = {msg for _, msg in outs}
    for msg in range(1, k + 1):
        if msg not in demanded:
            cands = [v for v in verts if msg in reachable(v)]
            outs.append((rng.choice(cands), msg))
    if rng.random() < 0.5:
        v = rng.choice(verts)
        ok = reachable(v)
        if ok:
            outs.append((v, rng.choice(ok)))
    if len(edges) + len(outs) > max_edges:
        return None

    raw_edges = [{"id": i + 1, "tail": t, "head": h} for i, (t, h) in enumerate(edges)]
    demands = {}
    for j, (v, msg) in enumerate(outs):
        eid = len(edges) + j + 1
        raw_edges.append({"id": eid, "tail": v, "head": f"t{j + 1}"})
        demands[str(eid)] = msg
    net = validate_network({"k": k, "edges": raw_edges, "demands": demands})
    code_coeffs = {net.id_map[i + 1]: coeffs[i] for i in range(len(edges))}
    for j, (_, msg) in enumerate(outs):
        code_coeffs[net.id_map[len(edges) + j + 1]] = Matrix.selector(F, n, k, [msg])
    code = LinearNetworkCode(F, n, net, code_coeffs)
    validate_network_code(code)
    return net, code
