"""Command-line front end.

Exit codes: 0 success / property holds, 1 property fails or search found
nothing, 2 usage or schema error, 3 budget exceeded.  Object-producing
commands print the object document; the others print a ``report``
document.  Rationals are written as "p/q" strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import analysis, constructions, ordering, verify
from .algebra import AbelianGroup, GroupError
from .designs import (
    AmdCode,
    BaseBlocks,
    DesignError,
    Gdd,
    OrderedGdd,
    SchemaError,
    SourceDistribution,
    SplittingGdd,
    SplittingSystem,
    from_document,
    loads,
    to_document,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, frozenset | set):
        return sorted(_jsonable(y) for y in x)
    if isinstance(x, tuple | list):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if is_dataclass(x) and not isinstance(x, type):
        return _jsonable(asdict(x))
    return x


def report(command: str, **fields: Any) -> dict:
    return {"kind": "report", "command": command, **_jsonable(fields)}


def _read(path: str) -> Any:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return loads(text)


def _expect(obj: Any, *types: type, what: str) -> Any:
    if not isinstance(obj, types):
        raise UsageError(f"expected {what}, got {type(obj).__name__}")
    return obj


def _group(spec: str) -> AbelianGroup:
    spec = spec.strip()
    orders = json.loads(spec) if spec.startswith("[") else [int(x) for x in spec.split(",")]
    return AbelianGroup(tuple(orders))


def _dist(spec: str | None, m: int) -> SourceDistribution:
    if spec in (None, "uniform"):
        return SourceDistribution.uniform(m)
    return _expect(_read(spec), SourceDistribution, what="a source_distribution document")


def _seed(text: str) -> int:
    return int(text, 0)


def _bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes"):
        return True
    if text.lower() in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


# -- commands -----------------------------------------------------------------

def cmd_catalog(args) -> tuple[int, dict]:
    try:
        obj = constructions.catalog(args.name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    return EXIT_OK, to_document(obj)


def cmd_develop(args) -> tuple[int, dict]:
    obj = _read(args.file)
    if isinstance(obj, AmdCode):
        sys_ = constructions.develop_amd(obj)
        repeated = sys_.repeated_blocks()
        if repeated:
            print(f"warning: repeated blocks {repeated}", file=sys.stderr)
        return EXIT_OK, to_document(sys_)
    base = _expect(obj, BaseBlocks, what="an amd_code or base_blocks document")
    blocks = ordering.develop_base_blocks(base.blocks, base.group)
    return EXIT_OK, to_document(SplittingSystem(base.group.order, tuple(blocks)))


def cmd_verify(args) -> tuple[int, dict]:
    if args.necessary:
        v, m, c = args.necessary
        ok = verify.equitable_necessary_condition(v, m, c)
        return (EXIT_OK if ok else EXIT_FAIL), report("verify", check="necessary", v=v, m=m, c=c, holds=ok)
    if args.file is None:
        raise UsageError("verify needs a document")
    obj = _read(args.file)
    if args.gdd:
        if isinstance(obj, SplittingGdd):
            rep = verify.check_splitting_gdd(obj)
        else:
            rep = verify.check_gdd(_expect(obj, Gdd, what="a gdd document"))
        return (EXIT_OK if rep.is_gdd else EXIT_FAIL), report("verify", check="gdd", **asdict(rep))
    sys_ = _expect(obj, SplittingSystem, what="a splitting_system document")
    if args.equitable:
        rep = verify.check_equitably_ordered(sys_)
        return (EXIT_OK if rep.ok else EXIT_FAIL), report("verify", check="equitable", ok=rep.ok,
                                                          witness=rep.witness, table=rep.table)
    if args.automorphism is not None:
        perm = json.loads(Path(args.automorphism).read_text()) if Path(args.automorphism).exists() \
            else json.loads(args.automorphism)
        try:
            ok = verify.is_automorphism(sys_, perm)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return (EXIT_OK if ok else EXIT_FAIL), report("verify", check="automorphism", is_automorphism=ok)
    if args.group_generated:
        G = _group(args.group) if args.group else AbelianGroup.cyclic(sys_.v)
        action: Any = "translation"
        if args.action:
            table = json.loads(Path(args.action).read_text())
            action = {i: p for i, p in enumerate(table)} if isinstance(table, list) else \
                {int(k): p for k, p in table.items()}
        try:
            rep = verify.check_group_generated(sys_, G, action, seed=args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return (EXIT_OK if rep.ok else EXIT_FAIL), report("verify", check="group_generated", **asdict(rep))
    rep = verify.check_splitting_bibd(sys_)
    return (EXIT_OK if rep.is_bibd else EXIT_FAIL), report(
        "verify", check="bibd", is_bibd=rep.is_bibd, **{"lambda": rep.lam}, c=rep.c,
        repeated_blocks=rep.repeated_blocks, witness=rep.witness, witness_count=rep.witness_count,
        reason=rep.reason)


def cmd_analyze(args) -> tuple[int, dict]:
    sys_ = _expect(_read(args.file), SplittingSystem, what="a splitting_system document")
    dist = _dist(args.dist, sys_.m)
    if args.impersonation:
        rep = analysis.impersonation_probability(sys_)
        return EXIT_OK, report("analyze", quantity="impersonation", value=rep.value, witness=rep.witness)
    if args.any_distribution:
        rep = analysis.substitution_probability_any_distribution(sys_)
        return EXIT_OK, report("analyze", quantity="substitution_any_distribution", value=rep.value,
                               witness=rep.witness, per_source=rep.per_source)
    if args.messages:
        md = analysis.message_distribution(sys_, dist)
        return EXIT_OK, report("analyze", quantity="messages", overall=md.overall, per_source=md.per_source)
    if args.secrecy:
        rep = analysis.perfect_secrecy(sys_, dist if args.with_dist else None)
        return (EXIT_OK if rep.holds else EXIT_FAIL), report("analyze", quantity="secrecy", **asdict(rep))
    if args.tightness:
        rep = analysis.bound_tightness_check(sys_, dist, seed=args.seed)
        return (EXIT_OK if rep.tight else EXIT_FAIL), report("analyze", quantity="tightness", **asdict(rep))
    if args.brute_force:
        try:
            rep = analysis.brute_force_substitution(sys_, dist)
        except ValueError as exc:
            return EXIT_BUDGET, report("analyze", error="budget_exceeded", message=str(exc))
        return EXIT_OK, report("analyze", quantity="substitution_brute_force", value=rep.value,
                               witness=rep.witness)
    rep = analysis.substitution_probability(sys_, dist)
    return EXIT_OK, report("analyze", quantity="substitution", value=rep.value, witness=rep.witness)


def cmd_bounds(args) -> tuple[int, dict]:
    sys_ = _expect(_read(args.file), SplittingSystem, what="a splitting_system document")
    dist = _dist(args.dist, sys_.m)
    s = analysis.summarize(sys_, dist)
    return EXIT_OK, report("bounds", **asdict(s))


def cmd_amd(args) -> tuple[int, dict]:
    code = _expect(_read(args.file), AmdCode, what="an amd_code document")
    try:
        if args.r_optimal:
            rep = analysis.amd_r_optimality(code, args.strength)
            code_ = EXIT_OK if rep.r_optimal else EXIT_FAIL
            return code_, report("amd", quantity="r_optimality", strength=args.strength, **asdict(rep))
        fn = analysis.amd_strong_epsilon if args.strong else analysis.amd_weak_epsilon
        rep = fn(code)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return EXIT_OK, report("amd", quantity="strong" if args.strong else "weak", value=rep.value,
                           witness=rep.witness, per_source=rep.per_source)


def cmd_order(args) -> tuple[int, dict]:
    obj = _read(args.file)
    method = args.method
    if method == "development":
        if isinstance(obj, BaseBlocks):
            G, blocks = obj.group, obj.blocks
        else:
            sys_ = _expect(obj, SplittingSystem, what="base_blocks or splitting_system")
            G = _group(args.group) if args.group else AbelianGroup.cyclic(sys_.v)
            blocks = sys_.blocks
        return EXIT_OK, to_document(ordering.order_development(blocks, G))
    if method == "gdd-coloring":
        return EXIT_OK, to_document(ordering.order_gdd(_expect(obj, Gdd, what="a gdd document")))
    sys_ = _expect(obj, SplittingSystem, what="a splitting_system document")
    out = ordering.reorder_exact(sys_, node_budget=args.budget or ordering.DEFAULT_NODE_BUDGET)
    if out is None:
        return EXIT_FAIL, report("order", found=False)
    return EXIT_OK, to_document(out)


def cmd_search(args) -> tuple[int, dict]:
    G = _group(args.group) if args.group else AbelianGroup.cyclic(args.v)
    try:
        blocks = constructions.search_base_blocks(args.v, args.m, args.c, G,
                                                  budget=args.budget or constructions.DEFAULT_SEARCH_BUDGET)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if blocks is None:
        return EXIT_FAIL, report("search", found=False)
    return EXIT_OK, to_document(BaseBlocks(G, blocks))


def _resolve(spec: Any, base: Path) -> Any:
    if isinstance(spec, str):
        return constructions.catalog(spec)
    if isinstance(spec, dict) and "catalog" in spec:
        return constructions.catalog(spec["catalog"])
    if isinstance(spec, dict) and "path" in spec:
        return loads((base / spec["path"]).read_text())
    return from_document(spec)


def run_plan(plan: dict, base: Path = Path(".")) -> Any:
    """Execute a construction plan: a list of steps applied to one current object."""
    steps = plan.get("steps")
    if not isinstance(steps, list):
        raise SchemaError("$.steps", "expected a list of steps")
    cur: Any = None
    for i, step in enumerate(steps):
        op = step.get("op") if isinstance(step, dict) else None
        where = f"$.steps[{i}]"
        if op in ("catalog", "load"):
            cur = _resolve(step.get("name") if op == "catalog" else {"path": step["path"]}, base)
        elif op == "develop":
            if "base_blocks" in step:
                cur = _resolve(step["base_blocks"], base)
            if isinstance(cur, AmdCode):
                cur = constructions.develop_amd(cur)
            elif isinstance(cur, BaseBlocks):
                cur = ordering.order_development(cur.blocks, cur.group)
            else:
                raise SchemaError(where, "develop needs an AMD code or base blocks")
        elif op == "td":
            cur = constructions.latin_square_td(step["n"]) if "n" in step else \
                constructions.prime_power_td(step["k"], step["q"])
        elif op == "sts":
            cur = constructions.sts(step["u"])
        elif op == "inflate":
            cur = constructions.inflate_gdd(_expect(cur, Gdd, what="a GDD"), step["w"])
        elif op == "order":
            if isinstance(cur, Gdd):
                cur = ordering.order_gdd(cur)
            elif isinstance(cur, BaseBlocks):
                cur = ordering.order_development(cur.blocks, cur.group)
            elif isinstance(cur, SplittingSystem):
                cur = ordering.reorder_exact(cur)
                if cur is None:
                    raise SchemaError(where, "no equitable ordering exists")
            else:
                raise SchemaError(where, "nothing to order")
        elif op == "splitting-inflate":
            cur = constructions.splitting_inflate(_expect(cur, OrderedGdd, what="an ordered GDD"), step["c"])
        elif op == "fill":
            filler = _resolve(step["filler"], base)
            if isinstance(filler, BaseBlocks):
                filler = ordering.order_development(filler.blocks, filler.group)
            cur = constructions.fill_groups(_expect(cur, SplittingGdd, what="a splitting GDD"), filler)
        elif op == "search":
            G = AbelianGroup(tuple(step.get("group", [step["v"]])))
            blocks = constructions.search_base_blocks(step["v"], step["m"], step["c"], G)
            if blocks is None:
                raise SchemaError(where, "search found no base blocks")
            cur = BaseBlocks(G, blocks)
        else:
            raise SchemaError(f"{where}.op", f"unknown op {op!r}")
    return cur


def cmd_construct(args) -> tuple[int, dict]:
    text = sys.stdin.read() if args.plan == "-" else Path(args.plan).read_text()
    try:
        plan = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from exc
    base = Path(args.plan).parent if args.plan != "-" else Path(".")
    try:
        result = run_plan(plan, base)
    except KeyError as exc:
        raise UsageError(f"missing step field {exc}") from exc
    return EXIT_OK, to_document(result)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=analysis.DEFAULT_SEED,
                        help="seed for sampled oracles, hex accepted (default 0x5EED)")
    common.add_argument("--deterministic", type=_bool, default=True,
                        help="searches run single-threaded, so results are deterministic either way")
    p = argparse.ArgumentParser(prog="splitauth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("catalog", parents=[common], help="print a named fixture")
    s.add_argument("name")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("develop", parents=[common], help="develop an AMD code or base blocks")
    s.add_argument("file")
    s.set_defaults(func=cmd_develop)

    s = sub.add_parser("verify", parents=[common], help="check design properties")
    s.add_argument("file", nargs="?")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--bibd", action="store_true", help="splitting BIBD property (default)")
    g.add_argument("--gdd", action="store_true")
    g.add_argument("--equitable", action="store_true")
    g.add_argument("--automorphism", metavar="PERM", help="JSON list or path to one")
    g.add_argument("--group-generated", action="store_true")
    g.add_argument("--necessary", nargs=3, type=int, metavar=("V", "M", "C"))
    s.add_argument("--group", help="cyclic orders, e.g. 9 or 2,4")
    s.add_argument("--action", help="JSON action table path (default: translation)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("analyze", parents=[common], help="attack probabilities and secrecy")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--substitution", action="store_true", help="(default)")
    g.add_argument("--impersonation", action="store_true")
    g.add_argument("--any-distribution", action="store_true")
    g.add_argument("--messages", action="store_true")
    g.add_argument("--secrecy", action="store_true")
    g.add_argument("--tightness", action="store_true")
    g.add_argument("--brute-force", action="store_true")
    s.add_argument("--dist", default=None, help="uniform or a distribution document path")
    s.add_argument("--with-dist", action="store_true", help="test secrecy for --dist rather than universally")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("bounds", parents=[common], help="substitution/impersonation values and lower bounds")
    s.add_argument("file")
    s.add_argument("--dist", default=None)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("amd", parents=[common], help="AMD code security")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--weak", action="store_true", help="(default)")
    g.add_argument("--strong", action="store_true")
    g.add_argument("--r-optimal", action="store_true")
    s.add_argument("--strength", choices=("weak", "strong"), default="weak")
    s.set_defaults(func=cmd_amd)

    s = sub.add_parser("order", parents=[common], help="equitable ordering")
    s.add_argument("file")
    s.add_argument("--method", choices=("development", "gdd-coloring", "exact"), default="exact")
    s.add_argument("--group")
    s.add_argument("--budget", type=int)
    s.set_defaults(func=cmd_order)

    s = sub.add_parser("search", parents=[common], help="search base blocks")
    s.add_argument("--v", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--group")
    s.add_argument("--budget", type=int)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("construct", parents=[common], help="run a construction plan")
    s.add_argument("plan")
    s.set_defaults(func=cmd_construct)
    return p


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:  # --help
            raise
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code, report("usage", error="usage", message="invalid arguments")
    try:
        return args.func(args)
    except (ordering.BudgetExceeded,) as exc:
        return EXIT_BUDGET, report(args.command, error="budget_exceeded", message=str(exc))
    except SchemaError as exc:
        return EXIT_USAGE, report(args.command, error="schema_error", path=exc.path, message=str(exc))
    except (UsageError, DesignError, GroupError, ordering.OrderingError,
            constructions.ConstructionError, OSError, json.JSONDecodeError) as exc:
        return EXIT_USAGE, report(args.command, error="usage_error", message=str(exc))


def main(argv: list[str] | None = None) -> int:
    code, doc = run(argv)
    print(json.dumps(doc))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
