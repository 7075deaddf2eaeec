"""Command-line front end: one subcommand per operation.

Results go to stdout as JSON, a one-line summary goes to stderr.  Exit
codes: 0 success or found, 1 validation failure or none exists, 2 budget
ran out, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Any, Sequence

from . import instances
from .errors import (
    BudgetExhausted,
    NetIndexError,
    NoCodeUpToMax,
    UsageError,
    ValidationError,
)
from .galois import FieldSpec, Matrix, make_field
from .index import IndexInstance, compute_mu, validate_index_instance
from .indexcode import index_code_from_json, rate_report
from .netcode import LinearNetworkCode, NetworkCode, network_code_from_json, validate_network_code
from .network import NetworkInstance, validate_network
from .reduction import lift_linear_code, lift_table_code, lower_index_code, reduce_instance
from .solver import (
    BUDGET,
    FOUND,
    MatroidSpec,
    SearchConfig,
    generate_random_solvable_network,
    min_linear_index_length,
    search_linear_index_code,
    search_matroid_representation,
    search_network_code,
)

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2, which means "budget" here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# --- input helpers ---------------------------------------------------------


def parse_field(text: str) -> FieldSpec:
    """``p``, ``p,degree`` or ``p,degree,c0:c1:...`` (reduction polynomial, low to high)."""
    parts = [s.strip() for s in text.split(",")]
    try:
        p = int(parts[0])
        degree = int(parts[1]) if len(parts) > 1 else 1
        poly = [int(c) for c in parts[2].split(":")] if len(parts) > 2 else None
    except ValueError:
        raise UsageError(f"cannot parse field {text!r}; expected p[,degree[,poly]]") from None
    if len(parts) > 3:
        raise UsageError(f"cannot parse field {text!r}; expected p[,degree[,poly]]")
    return make_field(p, degree, poly)


def parse_seeds(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise UsageError(f"cannot parse seeds {text!r}; expected A..B") from None
    if b < a:
        raise UsageError(f"empty seed range {text!r}")
    return range(a, b + 1)


def read_json(path: str) -> Any:
    if path == "-":
        return json.load(sys.stdin)
    p = Path(path)
    if not p.exists():
        raise UsageError(f"file not found: {path}")
    with open(p) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path} is not valid JSON: {exc}") from None


def load_net(path: str, strict: bool = False) -> NetworkInstance:
    return validate_network(read_json(path), strict=strict)


def load_index(path: str) -> IndexInstance:
    return validate_index_instance(read_json(path))


def netcode_json(code: NetworkCode) -> dict:
    """Code JSON keyed by the edge ids of the file the network came from."""
    out = code.to_json()
    back = {new: old for old, new in code.network.id_map.items()}
    if any(old != new for new, old in back.items()):
        out["edges"] = {str(back[int(e)]): v for e, v in out["edges"].items()}
    return out


def emit(obj: Any) -> None:
    sys.stdout.write(json.dumps(obj, indent=1, sort_keys=False) + "\n")


def say(msg: str) -> None:
    print(msg, file=sys.stderr)


def config_from(args: argparse.Namespace, F: FieldSpec | None = None) -> SearchConfig:
    return SearchConfig(
        F or parse_field(args.field),
        n=args.n,
        l=getattr(args, "l", None),
        l_max=getattr(args, "l_max", None),
        budget_nodes=args.budget_nodes,
        budget_secs=args.budget_secs,
        workers=args.workers,
    )


def search_exit(outcome: str) -> int:
    return EXIT_OK if outcome == FOUND else EXIT_BUDGET if outcome == BUDGET else EXIT_FAIL


# --- subcommands -----------------------------------------------------------


def cmd_validate_network(args) -> int:
    net = load_net(args.network, args.strict_indexing)
    emit(net.to_json())
    say(f"valid network: k={net.k}, {net.m} edges, {net.d} output edges")
    return EXIT_OK


def cmd_validate_netcode(args) -> int:
    net = load_net(args.network, args.strict_indexing)
    code = network_code_from_json(read_json(args.code), net)
    validate_network_code(code)
    emit({"valid": True, "n": code.n, "q": code.q, "edges": net.m})
    say(f"network code satisfies N1-N3 ({net.m} edges, n={code.n}, q={code.q})")
    return EXIT_OK


def cmd_validate_index(args) -> int:
    inst = load_index(args.instance)
    emit(inst.to_json())
    say(f"valid index instance: k={inst.k}, {len(inst.clients)} clients")
    return EXIT_OK


def cmd_validate_indexcode(args) -> int:
    inst = load_index(args.instance)
    code = index_code_from_json(read_json(args.code))
    report = rate_report(code, inst)
    emit(report.to_json())
    say(f"index code decodes all {len(inst.clients)} clients; rate {report.rate}, mu {report.mu}")
    return EXIT_OK


def cmd_mu(args) -> int:
    raw = read_json(args.instance)
    if "edges" in raw:
        inst = reduce_instance(validate_network(raw))[0]
    else:
        inst = validate_index_instance(raw)
    emit(compute_mu(inst))
    return EXIT_OK


def cmd_reduce(args) -> int:
    net = load_net(args.network, args.strict_indexing)
    inst, rmap = reduce_instance(net)
    emit(inst.to_json())
    if args.map_out:
        Path(args.map_out).write_text(json.dumps(rmap.to_json(), indent=1) + "\n")
    say(f"index instance with {inst.k} messages and {len(inst.clients)} clients")
    return EXIT_OK


def cmd_lift(args) -> int:
    net = load_net(args.network, args.strict_indexing)
    code = network_code_from_json(read_json(args.code), net)
    inst, rmap = reduce_instance(net)
    if isinstance(code, LinearNetworkCode):
        icode, certs = lift_linear_code(code, rmap, inst)
        report = rate_report(icode, inst, certificates=certs)
        emit(icode.to_json())
        say(f"lifted to an index code with l={icode.l}; rate {report.rate} = mu {report.mu}")
        return EXIT_OK
    icode = lift_table_code(code, rmap, inst)
    emit(icode.to_json())
    say(f"lifted table code with l={icode.l}")
    return EXIT_OK


def cmd_lower(args) -> int:
    net = load_net(args.network, args.strict_indexing)
    _, rmap = reduce_instance(net)
    icode = index_code_from_json(read_json(args.code))
    lowered = lower_index_code(icode, rmap)
    emit(netcode_json(lowered))
    say(f"lowered to a network code on {net.m} edges")
    return EXIT_OK


def cmd_search_netcode(args) -> int:
    net = load_net(args.network, args.strict_indexing)
    res = search_network_code(net, config_from(args))
    out = res.to_json(deterministic=args.deterministic)
    if res.code is not None:
        out["code"] = netcode_json(res.code)
    emit(out)
    say(f"network code search: {res.outcome} after {res.nodes} nodes")
    return search_exit(res.outcome)


def cmd_search_indexcode(args) -> int:
    if args.l is None:
        raise UsageError("search-indexcode needs --l")
    inst = load_index(args.instance)
    res = search_linear_index_code(inst, config_from(args))
    emit(res.to_json(deterministic=args.deterministic))
    say(f"index code search with l={args.l}: {res.outcome} after {res.nodes} nodes")
    return search_exit(res.outcome)


def cmd_min_length(args) -> int:
    inst = load_index(args.instance)
    try:
        report, code, runs = min_linear_index_length(inst, config_from(args))
    except BudgetExhausted as exc:
        emit({"outcome": BUDGET, "detail": str(exc)})
        say(f"min-length inconclusive: {exc}")
        return EXIT_BUDGET
    except NoCodeUpToMax as exc:
        emit({"outcome": "exhausted", "detail": str(exc)})
        say(str(exc))
        return EXIT_FAIL
    emit(
        {
            "report": report.to_json(),
            "code": code.to_json(),
            "runs": [r.to_json(deterministic=args.deterministic) for r in runs],
        }
    )
    say(f"shortest linear code: l={report.l} (lambda* = {report.rate}, mu = {report.mu})")
    return EXIT_OK


def cmd_matroid_rep(args) -> int:
    if args.spec:
        spec = MatroidSpec.from_json(read_json(args.spec))
    else:
        spec = instances.named_matroid(args.matroid)
    res = search_matroid_representation(spec, config_from(args))
    emit(res.to_json(deterministic=args.deterministic))
    verdict = {"found": "representation found", "exhausted": "exhausted, none", "budget": "budget ran out"}[res.outcome]
    say(f"{spec.name or 'matroid'} over {res.detail['field']}: {verdict} ({res.nodes} nodes)")
    return search_exit(res.outcome)


def cmd_instance(args) -> int:
    inst = instances.builtin_instance(args.name)
    if args.code:
        if args.name == "m-network":
            code = instances.m_network_routing_code(inst)
        elif args.name == "non-pappus":
            code = instances.non_pappus_vector_code(inst)
        elif args.name == "dfz-n3":
            code = instances.dfz_table_code(inst)
            if code is None:
                say("the (2,4) table code for dfz-n3 is not shipped")
                return EXIT_FAIL
        else:
            raise UsageError(f"no packaged code for {args.name}")
        # the instance is printed with its canonical ids, so the code is too
        emit(code.to_json())
        return EXIT_OK
    emit(inst.to_json())
    return EXIT_OK


def roundtrip(seed: int, F: FieldSpec, n: int) -> dict:
    """Random solvable network -> lift -> validate -> lower -> validate -> compare."""
    net, code = generate_random_solvable_network(seed, F, n)
    inst, rmap = reduce_instance(net)
    icode, certs = lift_linear_code(code, rmap, inst)
    report = rate_report(icode, inst, certificates=certs)
    lowered = lower_index_code(icode, rmap)
    validate_network_code(lowered)
    same = all(lowered.coeffs[e] == code.coeffs[e] for e in net.interior())
    ok = report.achieves_bound and report.mu == net.m and same
    return {"seed": seed, "q": F.q, "n": n, "edges": net.m, "mu": report.mu, "interior_equal": same, "ok": ok}


def cmd_roundtrip_test(args) -> int:
    fields = [parse_field(f) for f in args.fields.split(";")]
    rows = []
    for seed in parse_seeds(args.seeds):
        for F in fields:
            for n in (1, 2):
                try:
                    rows.append(roundtrip(seed, F, n))
                except ValidationError as exc:
                    rows.append({"seed": seed, "q": F.q, "n": n, "ok": False, "error": str(exc)})
    bad = [r for r in rows if not r["ok"]]
    emit({"cases": len(rows), "failures": bad})
    say(f"round trip: {len(rows) - len(bad)}/{len(rows)} cases pass")
    return EXIT_FAIL if bad else EXIT_OK


def cmd_multilinear_check(args) -> int:
    if args.random:
        if args.seed is None:
            raise UsageError("--random needs an explicit --seed")
        rng = random.Random(args.seed)
        F = make_field(3)
        funcs = {i: Matrix(F, 6, 2, tuple(rng.randrange(3) for _ in range(12))) for i in range(1, 10)}
    elif args.functions:
        obj = read_json(args.functions)
        F = make_field(3) if "field" not in obj else make_field(**obj["field"])
        funcs = {int(i): Matrix.from_rows(F, rows) for i, rows in obj["functions"].items()}
    else:
        funcs = instances.non_pappus_functions()
    report = instances.check_multilinear_representation(funcs)
    emit(report)
    say(f"multilinear check: {report['checked']} sets, {len(report['violations'])} violations")
    return EXIT_OK if report["ok"] else EXIT_FAIL


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="2", help="p[,degree[,poly]], poly as c0:c1:... low to high")
    common.add_argument("--n", type=int, default=1, help="block length")
    common.add_argument("--l", type=int, default=None, help="index code length in symbols")
    common.add_argument("--l-max", type=int, default=None)
    common.add_argument("--budget-nodes", type=int, default=10**9)
    common.add_argument("--budget-secs", type=float, default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--strict-indexing", action="store_true", help="reject non-canonical edge ids instead of re-indexing")
    common.add_argument("--deterministic", action="store_true", help="zero out timing fields")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="netindex", description="Network coding / index coding reduction toolkit.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, *positional):
        p = sub.add_parser(name, parents=[common], help=help_)
        for arg in positional:
            p.add_argument(arg)
        p.set_defaults(func=func)
        return p

    add("validate-network", cmd_validate_network, "check a network file", "network")
    add("validate-netcode", cmd_validate_netcode, "check N1-N3 for a network code", "network", "code")
    add("validate-index", cmd_validate_index, "check an index instance", "instance")
    add("validate-indexcode", cmd_validate_indexcode, "check I1 and report the rate", "instance", "code")
    add("mu", cmd_mu, "mu of an index instance (or of the reduced instance of a network)", "instance")
    p = add("reduce", cmd_reduce, "network -> index instance", "network")
    p.add_argument("--map-out", default=None, help="also write the client family map here")
    add("lift", cmd_lift, "network code -> index code on the reduced instance", "network", "code")
    add("lower", cmd_lower, "index code on the reduced instance -> network code", "network", "code")
    add("search-netcode", cmd_search_netcode, "exhaustive linear network code search", "network")
    add("search-indexcode", cmd_search_indexcode, "exhaustive linear index code search at fixed --l", "instance")
    add("min-length", cmd_min_length, "shortest linear index code", "instance")
    p = add("matroid-rep", cmd_matroid_rep, "search for a linear representation of a matroid")
    p.add_argument("--matroid", default="non-pappus", choices=sorted(instances.MATROIDS))
    p.add_argument("--spec", default=None, help="matroid spec JSON file instead of --matroid")
    p = add("instance", cmd_instance, "print a packaged instance", "name")
    p.add_argument("--code", action="store_true", help="print the packaged code for the instance instead")
    p = add("roundtrip-test", cmd_roundtrip_test, "lift/lower round trip on random solvable networks")
    p.add_argument("--seeds", required=True, help="A..B inclusive")
    p.add_argument("--fields", default="2;3", help="fields separated by ';'")
    p = add("multilinear-check", cmd_multilinear_check, "rank checks for a multilinear representation")
    p.add_argument("--functions", default=None, help="JSON {field?, functions: {i: 6x2 rows}}; default is the packaged f1..f9")
    p.add_argument("--random", action="store_true", help="check seeded random functions instead (needs --seed)")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        say(f"usage error: {exc}")
        return EXIT_USAGE
    except BudgetExhausted as exc:
        say(f"inconclusive: {exc}")
        return EXIT_BUDGET
    except ValidationError as exc:
        emit({"valid": False, "error": type(exc).__name__, "detail": str(exc)})
        say(f"{type(exc).__name__}: {exc}")
        return EXIT_FAIL
    except NetIndexError as exc:
        say(f"{type(exc).__name__}: {exc}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
