from __future__ import annotations

import random
from fractions import Fraction

import pytest

from netindex.errors import InstanceTooLarge, InvalidCode, ShapeMismatch, Undecodable
from netindex.galois import Matrix, invert_matrix, make_field
from netindex.index import validate_index_instance
from netindex.indexcode import (
    LinearIndexCode,
    TableIndexCode,
    brute_force_decodability,
    index_code_from_json,
    rate_report,
    validate_index_code,
    verify_linear_certificate,
)
from netindex.instances import builtin_instance

from conftest import GF2, GF3
from helpers import random_index_pair


def butterfly_code() -> LinearIndexCode:
    # columns: x1 + x2 + x3 and x1 + x4
    G = Matrix.from_rows(GF2, [[1, 1], [1, 0], [1, 0], [0, 1]])
    return LinearIndexCode(GF2, 1, 4, 2, G)


def test_butterfly_code_decodes_everyone():
    inst = builtin_instance("butterfly")
    certs = validate_index_code(butterfly_code(), inst)
    assert len(certs) == len(inst.clients) == 4
    for c, cert in zip(inst.clients, certs):
        assert verify_linear_certificate(butterfly_code(), c, cert)


def test_butterfly_brute_force_agrees():
    inst = builtin_instance("butterfly")
    certs = brute_force_decodability(butterfly_code(), inst)
    assert len(certs) == 4


def test_butterfly_rate():
    rep = rate_report(butterfly_code(), builtin_instance("butterfly"))
    assert rep.rate == Fraction(2) and rep.mu == 1 and not rep.achieves_bound
    assert rep.to_json()["lambda_star"] == "2"


def test_selector_code_single_client():
    inst = validate_index_instance({"k": 2, "clients": [{"wants": 1, "has": []}]})
    code = LinearIndexCode(GF3, 1, 2, 1, Matrix.selector(GF3, 1, 2, [1]))
    validate_index_code(code, inst)


def test_zero_code_is_undecodable():
    inst = validate_index_instance({"k": 2, "clients": [{"wants": 1, "has": [2]}]})
    code = LinearIndexCode(GF2, 1, 2, 1, Matrix.zeros(GF2, 2, 1))
    with pytest.raises(Undecodable) as info:
        validate_index_code(code, inst)
    assert info.value.client == 0
    with pytest.raises(Undecodable) as info:
        brute_force_decodability(code, inst)
    assert info.value.client == 0
    a, b = info.value.witness
    assert a[0] != b[0]
    with pytest.raises(InvalidCode):
        rate_report(code, inst)


def test_identity_broadcast_no_side_information():
    inst = validate_index_instance({"k": 3, "clients": [{"wants": i, "has": []} for i in (1, 2, 3)]})
    code = LinearIndexCode(GF2, 1, 3, 3, Matrix.identity(GF2, 3))
    rep = rate_report(code, inst)
    assert rep.rate == 3 and rep.mu == 3 and rep.achieves_bound


def test_missing_one_clients_information_both_reject_same_client():
    inst = builtin_instance("butterfly")
    # drop x4 from the second transmission: only client wanting x4 fails
    G = Matrix.from_rows(GF2, [[1, 1], [1, 0], [1, 0], [0, 0]])
    code = LinearIndexCode(GF2, 1, 4, 2, G)
    with pytest.raises(Undecodable) as lin:
        validate_index_code(code, inst)
    with pytest.raises(Undecodable) as brute:
        brute_force_decodability(code, inst)
    assert lin.value.client == brute.value.client == 3


def _first_failure(fn, code, inst):
    try:
        fn(code, inst)
        return None
    except Undecodable as exc:
        return exc.client


@pytest.mark.parametrize("seed", range(100))
def test_rank_test_matches_exhaustive_partition(seed):
    rng = random.Random(seed)
    inst, code = random_index_pair(rng)
    got = _first_failure(validate_index_code, code, inst)
    assert got == _first_failure(brute_force_decodability, code, inst)
    if got is None:
        # anything decodable obeys l/n >= mu
        assert rate_report(code, inst).rate >= rate_report(code, inst).mu


@pytest.mark.parametrize("seed", range(20))
def test_invertible_column_mix_preserves_decodability(seed):
    rng = random.Random(seed)
    inst, code = random_index_pair(rng)
    F, l = code.field, code.l
    while True:
        T = Matrix(F, l, l, tuple(rng.randrange(F.q) for _ in range(l * l)))
        if invert_matrix(T) is not None:
            break
    mixed = LinearIndexCode(F, code.n, code.k, l, code.G @ T)
    assert _first_failure(validate_index_code, code, inst) == _first_failure(validate_index_code, mixed, inst)


def test_certificate_identity_is_exact():
    inst = builtin_instance("butterfly")
    code = butterfly_code()
    cert = validate_index_code(code, inst)[0]
    c = inst.clients[0]
    E_x = Matrix.selector(GF2, 1, 4, [c.wants])
    E_H = Matrix.selector(GF2, 1, 4, list(c.has))
    assert code.G @ cert.P + E_H @ cert.Q == E_x


def test_wrong_certificate_is_replaced():
    inst = builtin_instance("butterfly")
    code = butterfly_code()
    good = validate_index_code(code, inst)
    bogus = [type(c)(c.client, "linear", P=c.P.scale(0), Q=c.Q) for c in good]
    assert not verify_linear_certificate(code, inst.clients[0], bogus[0])
    again = validate_index_code(code, inst, certificates=bogus)
    assert all(verify_linear_certificate(code, cl, ce) for cl, ce in zip(inst.clients, again))


def test_table_code_path():
    inst = builtin_instance("butterfly")
    lin = butterfly_code()
    tab = TableIndexCode(2, 1, 4, 2, encoder=lin.encode)
    certs = validate_index_code(tab, inst)
    assert len(certs) == 4
    obj = tab.to_json()
    again = index_code_from_json(obj)
    assert isinstance(again, TableIndexCode)
    assert [again.encode(z) for z in [(1, 0, 1, 1), (0, 1, 1, 0)]] == [(0, 0), (0, 0)]
    assert rate_report(again, inst).to_json()["lambda"] == "2"


def test_brute_force_cap():
    inst = validate_index_instance({"k": 13, "clients": [{"wants": 1, "has": []}]})
    code = LinearIndexCode(GF2, 1, 13, 1, Matrix.selector(GF2, 1, 13, [1]))
    with pytest.raises(InstanceTooLarge):
        brute_force_decodability(code, inst)


def test_shape_checks():
    with pytest.raises(ShapeMismatch):
        LinearIndexCode(GF2, 1, 4, 2, Matrix.zeros(GF2, 4, 3))
    inst = validate_index_instance({"k": 3, "clients": []})
    with pytest.raises(ShapeMismatch):
        validate_index_code(butterfly_code(), inst)


def test_linear_json_round_trip():
    code = butterfly_code()
    again = index_code_from_json(code.to_json())
    assert again.G == code.G and again.field == code.field
    F4 = make_field(2, 2)
    c4 = LinearIndexCode(F4, 2, 1, 1, Matrix.from_rows(F4, [[3], [2]]))
    assert index_code_from_json(c4.to_json()).G == c4.G
