from __future__ import annotations

import itertools
import random

import pytest

from netindex.errors import InvalidNetworkCode, N3Failure, ShapeMismatch, SingularM, StructureViolation
from netindex.galois import Matrix, block_assemble, invert_matrix
from netindex.index import Client, compute_mu
from netindex.indexcode import LinearIndexCode, brute_force_decodability, rate_report, validate_index_code
from netindex.netcode import LinearNetworkCode, TableNetworkCode, linear_to_table
from netindex.network import validate_network
from netindex.reduction import (
    check_certificates,
    lift_linear_code,
    lift_table_code,
    lower_index_code,
    random_inputs,
    reduce_instance,
)
from netindex.solver import generate_random_solvable_network

from conftest import GF2, GF3, butterfly_network_code, path_raw, relay_code
from helpers import random_dag_raw


def test_path_reduction_counts(path3):
    inst, rmap = reduce_instance(path3)
    assert inst.k == 4 and len(inst.clients) == 8
    sizes = {f: len(v) for f, v in rmap.client_families.items()}
    assert sizes == {"R1": 1, "R2": 1, "R3": 2, "R4": 1, "R5": 3}
    assert rmap.message_names == ("x1", "y1", "y2", "y3")


def test_two_edge_path_reduction():
    net = validate_network(path_raw(2))
    inst, rmap = reduce_instance(net)
    assert inst.k == 3 and len(inst.clients) == 6


def test_family_contents(butterfly_net):
    net = butterfly_net
    inst, rmap = reduce_instance(net)
    k, m = net.k, net.m
    sizes = {f: len(v) for f, v in rmap.client_families.items()}
    assert sizes == {"R1": k, "R2": k, "R3": m - k, "R4": net.d, "R5": m}
    X = tuple(range(1, k + 1))
    for pos, (fam, e) in rmap.provenance.items():
        c = inst.clients[pos]
        expected = {
            "R1": Client(e, (k + e,)),
            "R2": Client(k + e, (e,)),
            "R3": Client(k + e, tuple(sorted(k + p for p in net.parents[e]))),
            "R4": Client(net.demands.get(e, 0), (k + e,)),
            "R5": Client(k + e, X),
        }[fam]
        assert c == expected
    assert sorted(rmap.provenance) == list(range(len(inst.clients)))


@pytest.mark.parametrize("seed", range(20))
def test_mu_equals_edge_count(seed):
    net = validate_network(random_dag_raw(seed, 14, k=1 + seed % 3))
    inst, _ = reduce_instance(net)
    assert compute_mu(inst) == net.m


def test_reduce_needs_canonical_network(path3):
    from netindex.network import NetworkInstance

    raw = path_raw(3)
    for e in raw["edges"]:
        e["id"] = 4 - e["id"]
    raw["demands"] = {"1": 1}
    net = validate_network(raw)
    weird = NetworkInstance(net.k, net.vertices, tuple(reversed(net.edges)), {1: 1}, {3: 1}, {}, {}, (3,), (1,))
    with pytest.raises(ShapeMismatch):
        reduce_instance(weird)


def test_lift_path_relay(path3):
    inst, rmap = reduce_instance(path3)
    icode, certs = lift_linear_code(relay_code(path3), rmap, inst)
    # g_i = y_i + x_1 for every edge
    expected = Matrix.from_rows(GF2, [[1, 1, 1], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert icode.G == expected and icode.l == 3
    rep = rate_report(icode, inst, certificates=certs)
    assert rep.rate == rep.mu == 3 and rep.achieves_bound
    brute_force_decodability(icode, inst)


def test_lift_certificates_are_exact(butterfly_net):
    code = butterfly_network_code(butterfly_net)
    inst, rmap = reduce_instance(butterfly_net)
    icode, certs = lift_linear_code(code, rmap, inst)
    from netindex.indexcode import verify_linear_certificate

    assert all(verify_linear_certificate(icode, c, cert) for c, cert in zip(inst.clients, certs))
    assert not check_certificates(icode, inst, certs, random_inputs(2, inst.k, 300, seed=5))


def test_lift_rejects_invalid_code(path3):
    code = relay_code(path3)
    coeffs = dict(code.coeffs)
    coeffs[3] = Matrix.zeros(GF2, 1, 1)
    _, rmap = reduce_instance(path3)
    with pytest.raises(InvalidNetworkCode):
        lift_linear_code(LinearNetworkCode(GF2, 1, path3, coeffs), rmap)
    with pytest.raises(InvalidNetworkCode):
        lift_table_code(linear_to_table(LinearNetworkCode(GF2, 1, path3, coeffs)), rmap)


def test_lower_recovers_relay(path3):
    inst, rmap = reduce_instance(path3)
    icode, _ = lift_linear_code(relay_code(path3, GF3), rmap, inst)
    low = lower_index_code(icode, rmap)
    assert all(low.coeffs[e] == relay_code(path3, GF3).coeffs[e] for e in path3.edge_ids)


def _random_invertible(F, size, rng):
    while True:
        T = Matrix(F, size, size, tuple(rng.randrange(F.q) for _ in range(size * size)))
        if invert_matrix(T) is not None:
            return T


@pytest.mark.parametrize("seed", range(15))
def test_lower_after_column_mixing(seed):
    rng = random.Random(seed)
    F = GF3 if seed % 2 else GF2
    n = 1 + seed % 2
    net, code = generate_random_solvable_network(seed, F, n)
    inst, rmap = reduce_instance(net)
    icode, _ = lift_linear_code(code, rmap, inst)
    T = _random_invertible(F, icode.l, rng)
    mixed = LinearIndexCode(F, n, icode.k, icode.l, icode.G @ T)
    validate_index_code(mixed, inst)
    low = lower_index_code(mixed, rmap)
    assert all(low.coeffs[e] == code.coeffs[e] for e in net.interior())
    # lift . lower . lift = lift on the global functions
    again, _ = lift_linear_code(low, rmap, inst)
    assert again.G == icode.G


def test_lower_keeps_invertible_input_block_literal(path3):
    """C_ii only has to be invertible; the lowered input edge is still x_i."""
    inst, rmap = reduce_instance(path3)
    icode, _ = lift_linear_code(relay_code(path3, GF3), rmap, inst)
    # scale the first output column by 2: input block becomes 2, still invertible
    D = block_assemble([[Matrix.identity(GF3, 1).scale(2) if i == j == 0 else Matrix.identity(GF3, 1) if i == j else Matrix.zeros(GF3, 1, 1) for j in range(3)] for i in range(3)])
    scaled = LinearIndexCode(GF3, 1, 4, 3, icode.G @ D)
    low = lower_index_code(scaled, rmap)
    assert low.coeffs[1] == Matrix.identity(GF3, 1)


def test_lower_errors(path3):
    inst, rmap = reduce_instance(path3)
    icode, _ = lift_linear_code(relay_code(path3), rmap, inst)
    short = LinearIndexCode(GF2, 1, 4, 2, icode.G.submatrix(0, 4, 0, 2))
    with pytest.raises(ShapeMismatch):
        lower_index_code(short, rmap)
    rows = icode.G.to_lists()
    rows[3] = rows[2]  # y3 row equal to y2 row: M singular
    with pytest.raises(SingularM):
        lower_index_code(LinearIndexCode(GF2, 1, 4, 3, Matrix.from_rows(GF2, rows)), rmap)


def test_lower_structure_violation(butterfly_net):
    code = butterfly_network_code(butterfly_net)
    inst, rmap = reduce_instance(butterfly_net)
    icode, _ = lift_linear_code(code, rmap, inst)
    rows = icode.G.to_lists()
    rows[1][0] = 1  # x2 leaks into g_1, an input-edge column
    with pytest.raises(StructureViolation):
        lower_index_code(LinearIndexCode(GF2, 1, icode.k, icode.l, Matrix.from_rows(GF2, rows)), rmap)


def test_lower_reports_n3_failure(butterfly_net):
    """A G with the right shape and structure but a non-local interior edge."""
    code = butterfly_network_code(butterfly_net)
    inst, rmap = reduce_instance(butterfly_net)
    icode, _ = lift_linear_code(code, rmap, inst)
    rows = icode.G.to_lists()
    # edge 3 leaves vertex a (fed by x1 only); make it carry x1 + x2
    rows[1][2] = 1
    with pytest.raises(N3Failure):
        lower_index_code(LinearIndexCode(GF2, 1, icode.k, icode.l, Matrix.from_rows(GF2, rows)), rmap)


def test_table_lift_matches_linear_lift(path3):
    code = relay_code(path3)
    inst, rmap = reduce_instance(path3)
    lin, _ = lift_linear_code(code, rmap, inst)
    tab = lift_table_code(linear_to_table(code), rmap, inst)
    for Z in itertools.product(range(2), repeat=4):
        assert tab.encode(Z) == lin.encode(Z)
    assert not check_certificates(tab, inst, tab.decoders, itertools.product(range(2), repeat=4))
    brute_force_decodability(tab, inst)


def test_table_lift_nonlinear_code():
    """A genuinely non-linear relay over the alphabet {0,1,2,3} without field structure."""
    net = validate_network(path_raw(3))
    perm = (2, 0, 3, 1)  # a bijection, so edge 3 can undo it
    tables = {1: (0, 1, 2, 3), 2: perm, 3: (0, 1, 2, 3)}
    code = TableNetworkCode(4, 1, net, tables)
    inst, rmap = reduce_instance(net)
    tab = lift_table_code(code, rmap, inst)
    assert not check_certificates(tab, inst, tab.decoders, itertools.product(range(4), repeat=4))
    brute_force_decodability(tab, inst)
    rep = rate_report(tab, inst)
    assert rep.achieves_bound and not rep.linear


@pytest.mark.parametrize("seed", range(8))
def test_table_lift_random_inputs(seed):
    net, code = generate_random_solvable_network(seed, GF3, 1)
    inst, rmap = reduce_instance(net)
    tab = lift_table_code(linear_to_table(code), rmap, inst)
    inputs = random_inputs(3, inst.k, 200, seed)
    assert not check_certificates(tab, inst, tab.decoders, inputs)


def test_reduction_map_json(path3):
    _, rmap = reduce_instance(path3)
    obj = rmap.to_json()
    assert obj["client_families"]["R5"] == list(rmap.client_families["R5"])
    assert obj["message_names"][0] == "x1"
