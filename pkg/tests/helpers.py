"""Random instance builders shared by several test modules."""

from __future__ import annotations

import itertools
import random


def random_dag_raw(seed: int, edges_target: int = 20, k: int = 2, shuffle_ids: bool = True) -> dict:
    """A random valid network; edge ids are shuffled unless told otherwise."""
    rng = random.Random(seed)
    V = max(3, edges_target // 3)
    verts = [f"v{i}" for i in range(V)]
    pairs = [(f"s{j}", verts[0] if j == 1 else verts[rng.randrange(V // 2)]) for j in range(1, k + 1)]
    for i in range(1, V):
        pairs.append((verts[rng.randrange(i)], verts[i]))
    while len(pairs) < edges_target - 2:
        a, b = sorted(rng.sample(range(V), 2))
        pairs.append((verts[a], verts[b]))
    tails = {t for t, _ in pairs}
    for v in verts:
        if v not in tails:
            pairs.append((v, "t"))
    while sum(1 for _, h in pairs if h == "t") < k:
        pairs.append((verts[-1], "t"))
    ids = list(range(1, len(pairs) + 1))
    if shuffle_ids:
        rng.shuffle(ids)
    edges = [{"id": i, "tail": t, "head": h} for i, (t, h) in zip(ids, pairs)]
    outs = [e["id"] for e in edges if e["head"] == "t"]
    demands = {str(e): (j % k) + 1 for j, e in enumerate(outs)}
    return {"k": k, "vertices": [f"s{j}" for j in range(1, k + 1)] + verts + ["t"], "edges": edges, "demands": demands}


def random_index_pair(rng: random.Random, cap: int = 4096):
    """Random (instance, linear code) with q^(n k) within the exhaustive cap."""
    from netindex.galois import Matrix, make_field
    from netindex.index import validate_index_instance
    from netindex.indexcode import LinearIndexCode

    while True:
        F = rng.choice([make_field(2), make_field(3), make_field(2, 2), make_field(5)])
        n = rng.choice([1, 1, 2])
        k = rng.randint(1, 5)
        if F.q ** (n * k) <= cap:
            break
    clients = []
    for _ in range(rng.randint(1, 2 * k)):
        w = rng.randint(1, k)
        has = [h for h in range(1, k + 1) if h != w and rng.random() < 0.4]
        clients.append({"wants": w, "has": has})
    inst = validate_index_instance({"k": k, "clients": clients}, warn_duplicates=False)
    l = rng.randint(0, n * k)
    # sparse entries make undecodable clients common enough to matter
    G = Matrix(F, n * k, l, tuple(rng.randrange(F.q) if rng.random() < 0.5 else 0 for _ in range(n * k * l)))
    return inst, LinearIndexCode(F, n, k, l, G)


def plain_representation(spec, F) -> dict | None:
    """Plain backtracking over projective points.

    Only elements 1 and 2 are pinned to the first two unit vectors, which
    loses nothing because they are independent in every spec used here and
    GL(r) moves any independent pair there.  No frame point is fixed.
    """
    pts = [p for p in itertools.product(range(F.q), repeat=spec.rank) if any(p) and p[next(i for i, v in enumerate(p) if v)] == 1]
    dep = set(spec.dependent)
    due = {i: [s for s in dep | set(spec.independent) if max(s) == i] for i in range(1, spec.size + 1)}

    def nonsingular(vs):
        # every listed set here is square (size = rank), so a Leibniz determinant suffices
        det = 0
        for perm in itertools.permutations(range(len(vs))):
            term = 1
            for row, col in enumerate(perm):
                term = F.mul(term, vs[row][col])
            inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
            det = F.add(det, F.neg(term) if inversions % 2 else term)
        return det != 0

    def rec(assign):
        i = len(assign) + 1
        if i > spec.size:
            return dict(assign)
        for p in pts:
            if p in assign.values():
                continue
            assign[i] = p
            ok = True
            for s in due[i]:
                full = nonsingular([assign[j] for j in sorted(s)])
                if full == (s in dep):
                    ok = False
                    break
            if ok:
                got = rec(assign)
                if got:
                    return got
            del assign[i]
        return None

    units = [tuple(int(i == j) for j in range(spec.rank)) for i in range(2)]
    return rec({1: units[0], 2: units[1]})


def kernel_decodable_clients(code, instance) -> list[int]:
    """Clients that fail I1, found through the left kernel of G.

    For G = [A; I] (a lifted code) the left kernel is {(a, -a A)}.  A client
    (x, H) decodes iff every kernel vector that vanishes on the H rows also
    vanishes on the x rows, i.e. rank [K_H | K_x] = rank K_H.
    """
    from netindex.galois import Matrix, hstack, matrix_rank

    F, n, G = code.field, code.n, code.G
    top = G.rows - G.cols
    A = G.submatrix(0, top, 0, G.cols)
    assert G.submatrix(top, G.rows, 0, G.cols) == Matrix.identity(F, G.cols)
    K = hstack([Matrix.identity(F, top), A.scale(F.neg(1))])
    assert (K @ G).is_zero()

    def cols(msgs):
        idx = [(m - 1) * n + t for m in msgs for t in range(n)]
        return Matrix(F, K.rows, len(idx), tuple(K[r, c] for r in range(K.rows) for c in idx))

    bad = []
    for pos, c in enumerate(instance.clients):
        K_H = cols(c.has)
        if matrix_rank(hstack([K_H, cols([c.wants])], F, K.rows)) != matrix_rank(K_H):
            bad.append(pos)
    return bad
