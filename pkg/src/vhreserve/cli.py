"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 axiom or oracle failure, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from .axioms import ALL_SUBSETS_BOUND, MAX_REPORTED, full_audit
from .checks import CHECKS, run_check
from .core import (
    OPEN,
    ContractError,
    Instance,
    InvariantError,
    ParseError,
    ReservationError,
    ValidationError,
    load_instance,
)
from .fixtures import FIXTURES, fixture_texts
from .rules import RULE_TOKENS, apply_rule

EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("vhreserve")


class InputError(Exception):
    pass


def parse_trait_orders(tokens: list[str] | None) -> dict[str, list[str]] | None:
    """``open:t1,t2 SC:t2,t1`` per category; a bare ``t1,t2`` applies everywhere."""
    if not tokens:
        return None
    orders: dict[str, list[str]] = {}
    for tok in tokens:
        cat, sep, seq = tok.rpartition(":")
        key = cat if sep else "*"
        if key in orders:
            raise InputError(f"trait order given twice for {key!r}")
        orders[key] = [t for t in seq.split(",") if t]
    return orders


def _read_instance(args) -> Instance:
    if args.fixture:
        if args.applicants or args.quotas:
            raise InputError("--fixture cannot be combined with --applicants/--quotas")
        applicants, quotas = fixture_texts(args.fixture)
    else:
        if not (args.applicants and args.quotas):
            raise InputError("need --applicants and --quotas (or --fixture)")
        try:
            applicants = Path(args.applicants).read_text(encoding="utf-8")
            quotas = Path(args.quotas).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(str(exc)) from None
    return load_instance(applicants, quotas, args.tie_break)


def _write(text: str, out: str) -> None:
    """Write once; files are replaced atomically."""
    if out == "-":
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, target)


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def allocation_table(alloc, instance: Instance) -> str:
    lines = [f"rule: {alloc.rule}"]
    for v, sel in alloc.selections.items():
        lines.append(f"[{v}] {len(sel.chosen)}/{instance.quotas.capacity(v)} filled")
        slots = sel.witness.traits()
        for i in sel.chosen:
            tag = f"  HR:{slots[i.id]}" if i.id in slots else ""
            lines.append(f"  {i.id:<12} {i.merit:>10g}  {i.category or 'general':<8}{tag}")
    chosen = alloc.aggregate()
    idle = [i.id for i in instance.pool if i.id not in chosen]
    lines.append("unassigned: " + (", ".join(idle) if idle else "-"))
    return "\n".join(lines) + "\n"


def audit_table(report) -> str:
    lines = [f"rule: {report.rule}  scope: {report.scope}"]
    for name, st in report.axioms.items():
        lines.append(f"{name:<4} {st.status:<5} violations={st.count} checked={st.checked}")
        for v in st.violations[:5]:
            detail = ", ".join(f"{k}={val}" for k, val in v.to_dict().items() if k not in ("axiom", "subset"))
            lines.append(f"       {detail}")
    return "\n".join(lines) + "\n"


def compare_rules(instance: Instance, rule_a: str, rule_b: str, orders=None) -> dict:
    """Side-by-side outcome of two rules on the same pool.

    The count comparison asks whether ``rule_b`` awards reserve-category members
    at least as many positions as ``rule_a``; it is guaranteed for
    sci-akg -> 2smg only when each reserve category has at least
    ``q^o + q^c`` applicants.
    """
    a = apply_rule(rule_a, instance, orders)
    b = apply_rule(rule_b, instance, orders)
    quotas = instance.quotas
    general = {i.id for i in instance.general()}

    def gen(alloc):
        return [i.id for i in instance.pool if i.id in alloc.aggregate() and i.id in general]

    def reserved(alloc):
        chosen = alloc.aggregate()
        return {c: sum(i.id in chosen for i in instance.members(c)) for c in quotas.reserve_categories}

    gen_a, gen_b = gen(a), gen(b)
    res_a, res_b = reserved(a), reserved(b)
    demand = {
        c: len(instance.members(c)) >= quotas.open_capacity + quotas.capacity(c)
        for c in quotas.reserve_categories
    }
    holds = sum(res_b.values()) >= sum(res_a.values())
    demand_met = all(demand.values())
    return {
        "rules": [rule_a, rule_b],
        "general": {rule_a: gen_a, rule_b: gen_b},
        "general_containment": {
            f"{rule_b} within {rule_a}": set(gen_b) <= set(gen_a),
            f"{rule_a} within {rule_b}": set(gen_a) <= set(gen_b),
        },
        "reserved_counts": {rule_a: res_a, rule_b: res_b},
        "reserved_totals": {rule_a: sum(res_a.values()), rule_b: sum(res_b.values())},
        "demand_condition": demand,
        "count_inequality": {
            "holds": holds,
            "status": "guaranteed" if demand_met else "not guaranteed (sufficient-demand hypothesis fails)",
        },
        "allocations": {rule_a: a.to_dict(instance.pool), rule_b: b.to_dict(instance.pool)},
    }


def compare_table(doc: dict) -> str:
    a, b = doc["rules"]
    lines = [f"{a} vs {b}"]
    for r in (a, b):
        lines.append(f"  general selected under {r}: {', '.join(doc['general'][r]) or '-'}")
    for k, val in doc["general_containment"].items():
        lines.append(f"  general {k}: {val}")
    for r in (a, b):
        counts = ", ".join(f"{c}={n}" for c, n in doc["reserved_counts"][r].items()) or "-"
        lines.append(f"  reserve members selected under {r}: {counts} (total {doc['reserved_totals'][r]})")
    ci = doc["count_inequality"]
    lines.append(f"  {b} total >= {a} total: {ci['holds']} [{ci['status']}]")
    return "\n".join(lines) + "\n"


def cmd_allocate(args) -> int:
    instance = _read_instance(args)
    alloc = apply_rule(args.rule, instance, parse_trait_orders(args.trait_order), args.category)
    if args.format == "table":
        _write(allocation_table(alloc, instance), args.out)
    else:
        _write(_dump(alloc.to_dict(instance.pool)), args.out)
    return EXIT_OK


def cmd_audit(args) -> int:
    instance = _read_instance(args)
    report = full_audit(
        args.rule,
        instance,
        scope=args.scope,
        orders=parse_trait_orders(args.trait_order),
        category=args.category,
        bound=args.max_individuals,
        max_reported=args.max_violations,
    )
    _write(audit_table(report) if args.format == "table" else _dump(report.to_dict()), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_compare(args) -> int:
    instance = _read_instance(args)
    rule_a, rule_b = args.rules
    doc = compare_rules(instance, rule_a, rule_b, parse_trait_orders(args.trait_order))
    _write(compare_table(doc) if args.format == "table" else _dump(doc), args.out)
    if args.figure:
        from .plotting import compare_figure

        compare_figure(doc, args.figure)
    return EXIT_OK


def cmd_oracle(args) -> int:
    instance = _read_instance(args) if (args.fixture or args.applicants) else None
    if args.check == "uniqueness" and instance is not None and len(instance.pool) > 10:
        raise InputError("uniqueness enumeration is limited to 10 individuals")
    report = run_check(args.check, args.trials, args.seed, args.max_individuals, instance)
    if args.format == "table":
        text = f"{report['check']}: {report['status']} ({report['failure_count']}/{report['trials']} failing)\n"
    else:
        text = _dump(report)
    _write(text, args.out)
    return EXIT_OK if report["status"] == "pass" else EXIT_FAIL


def _common(p: argparse.ArgumentParser, rule: bool = True) -> None:
    src = p.add_argument_group("input")
    src.add_argument("--applicants", help="applicant CSV (id,merit,category,traits)")
    src.add_argument("--quotas", help="quota JSON")
    src.add_argument("--fixture", choices=sorted(FIXTURES), help="use a bundled instance instead of files")
    src.add_argument("--tie-break", choices=["id-lex"], default=None,
                     help="break duplicate merits by id instead of rejecting them")
    if rule:
        p.add_argument("--trait-order", nargs="+", metavar="ORDER",
                       help="trait processing order, e.g. 'open:t1,t2 SC:t2,t1' or 't1,t2'")
        p.add_argument("--category", default=OPEN, help="category for single-category rules (default: open)")
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vhreserve", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="run a choice rule")
    p.add_argument("--rule", required=True, choices=RULE_TOKENS)
    _common(p)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("audit", help="audit a rule against the axioms")
    p.add_argument("--rule", required=True, choices=RULE_TOKENS)
    p.add_argument("--scope", choices=["single", "all-subsets"], default="single")
    p.add_argument("--max-individuals", type=int, default=ALL_SUBSETS_BOUND)
    p.add_argument("--max-violations", type=int, default=MAX_REPORTED)
    _common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("compare", help="compare two rules on the same pool")
    p.add_argument("--rules", nargs=2, default=["sci-akg", "2smg"], choices=RULE_TOKENS, metavar="RULE")
    p.add_argument("--figure", help="also render a bar chart (.png, .svg, .pdf)")
    _common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="run brute-force consistency checks")
    p.add_argument("--check", required=True, choices=CHECKS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-individuals", type=int, default=7)
    _common(p, rule=False)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, ParseError, ValidationError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ReservationError as exc:
        # rule preconditions such as 2smg on overlapping traits
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        log.debug("unhandled", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
