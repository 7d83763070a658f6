"""Command-line front end.

Exit codes: 0 success (for audits: verdicts match the published table),
1 verdict mismatch, 2 inconclusive, 64 usage error, 65 bad input data.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
from pathlib import Path
from typing import List, Optional

from .errors import AuctionError, InstanceFormatError
from .io import dumps, instance_document, parse_instance
from .mechanisms import MechanismId, run
from .money import as_money, format_money
from .rewards import reward_table

EX_USAGE = 64
EX_DATAERR = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _mechanism(args) -> MechanismId:
    try:
        mech = MechanismId.parse(args.mechanism, args.delta)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    if args.delta is not None and mech.delta is None:
        raise _Usage(f"--delta only applies to delta-ivcg, not {mech}")
    return mech


class _Usage(Exception):
    pass


def _table(rows: List[List[str]]) -> List[str]:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]


def cmd_run(args) -> int:
    mech = _mechanism(args)
    instance, profile = parse_instance(args.instance)
    outcome = run(mech, profile)
    if args.json:
        doc = {
            "mechanism": str(mech),
            "winner": outcome.winner,
            "payments": {a: format_money(outcome.payment(a)) for a in instance.declared},
            "utilities": {a: format_money(outcome.utility(a, instance.valuations[a]))
                          for a in instance.declared},
            "revenue": format_money(outcome.revenue),
        }
        print(json.dumps(doc, indent=2))
        return 0
    rows = []
    for a in instance.declared:
        rep = profile.report(a)
        rows.append([
            a,
            "-" if rep is None else format_money(rep.bid),
            format_money(outcome.payment(a)),
            format_money(outcome.utility(a, instance.valuations[a])),
        ])
    for a, line in zip(instance.declared, _table(rows)):
        print(line + (" *" if a == outcome.winner else ""))
    print(f"revenue = {format_money(outcome.revenue)}")
    return 0


def cmd_explain(args) -> int:
    _, profile = parse_instance(args.instance)
    table = reward_table(profile)
    rows = [["id", "bid", "distance", "rwd", "prwd", "critical", "interruption", ""]]
    for r in table.rows:
        rows.append([
            r.agent, format_money(r.bid), str(r.distance), format_money(r.rwd),
            format_money(r.prwd), "yes" if r.is_critical else "no",
            "yes" if r.is_interruption else "no",
            "LEADING" if r.agent == table.leading else "",
        ])
    for line in _table(rows):
        print(line)
    return 0


def _family(args, prefix=""):
    from .audit.family import InstanceFamily

    k = getattr(args, prefix + "max_agents")
    b = getattr(args, prefix + "bid_max")
    if k < 1 or b < 0:
        raise _Usage("need --max-agents >= 1 and --bid-max >= 0")
    return InstanceFamily(k, b, shapes=args.shapes)


def _write_witness(witness, directory: Optional[str], name: str):
    from .audit.engine import witness_document

    text = dumps(witness_document(witness))
    if directory:
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{name}.json").write_text(text)
    return text


def cmd_audit(args) -> int:
    from .audit.engine import INCONCLUSIVE, Property, audit, audit_all_opponents
    from .audit.matrix import expected_symbol

    mech = _mechanism(args)
    try:
        prop = Property.parse(args.property)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    family = _family(args)
    if args.opponents == "all":
        if prop.name not in ("IR", "IC", "WIC"):
            raise _Usage("--opponents all covers IR, IC and WIC only")
        verdict = audit_all_opponents([(mech, prop)], family, args.budget)[(mech, prop)]
    else:
        verdict = audit([(mech, prop)], family, args.budget, args.workers)[(mech, prop)]
    print(f"{mech} {prop}: {verdict.status} over {family.describe()} "
          f"({verdict.evaluations} profiles)")
    if verdict.witness is not None:
        print(f"witness: {verdict.witness.describe()}")
        print(_write_witness(verdict.witness, args.witness_dir,
                             f"{mech}-{prop}".replace(":", "_")), end="")
    if verdict.status == INCONCLUSIVE:
        return 2
    want = expected_symbol(mech, "FNP" if prop.name == "FNP" else prop.name)
    return 0 if want is None or want == verdict.symbol else 1


def cmd_matrix(args) -> int:
    from .audit.family import InstanceFamily
    from .audit.matrix import COLUMNS, default_mechanisms, property_matrix

    family = _family(args)
    fnp_family = InstanceFamily(args.fnp_max_agents, args.fnp_bid_max, shapes=args.shapes)
    try:
        delta = as_money(args.delta)
        mechs = default_mechanisms(delta)
    except (TypeError, ValueError) as exc:
        raise _Usage(str(exc)) from None
    matrix = property_matrix(mechs, family, fnp_family, args.attacks, args.budget, args.workers)
    print(f"properties: {family.describe()}")
    print(f"false names: {fnp_family.describe()}, attacks {', '.join(args.attacks)}")
    print(matrix.render())
    for m in mechs:
        for c in COLUMNS:
            w = matrix.verdict(m, c).witness
            if w is not None:
                print(f"{m} {c}: {w.describe()}")
                if args.witness_dir:
                    _write_witness(w, args.witness_dir, f"{m}-{c}".replace(":", "_"))
    return matrix.exit_code()


def cmd_gen(args) -> int:
    from .audit.family import InstanceFamily, shape_instance, shapes

    if not args.exhaustive and args.count is None:
        raise _Usage("gen needs --count or --exhaustive")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.exhaustive:
        instances = iter(_family(args))
    else:
        rng = random.Random(args.seed)
        directed = args.shapes == "directed"

        def sample():
            for _ in range(args.count):
                n = rng.randint(1, args.max_agents)
                shape = rng.choice(shapes(n, directed))
                yield shape_instance(shape, [rng.randint(0, args.bid_max) for _ in range(shape.n)])

        instances = sample()
    written = 0
    for inst in instances:
        text = dumps(instance_document(inst))
        name = hashlib.sha256(text.encode()).hexdigest()[:16]
        (out / f"{name}.json").write_text(text)
        written += 1
    print(f"wrote {written} instances to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="netauction", description="Diffusion auctions on social networks.")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings about dropped input")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a mechanism on an instance file")
    r.add_argument("--mechanism", "-m", required=True)
    r.add_argument("--instance", "-i", required=True)
    r.add_argument("--delta")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("explain", help="print rewards and the critical structure")
    e.add_argument("--instance", "-i", required=True)
    e.set_defaults(func=cmd_explain)

    def bounds(q, k, b):
        q.add_argument("--max-agents", type=int, default=k)
        q.add_argument("--bid-max", type=int, default=b)
        q.add_argument("--shapes", choices=("undirected", "directed"), default="undirected")
        q.add_argument("--budget", type=int, help="stop after this many profiles (Inconclusive)")
        q.add_argument("--workers", type=int, default=1)
        q.add_argument("--witness-dir", help="write witness documents here")

    a = sub.add_parser("audit", help="check one property of one mechanism")
    a.add_argument("--mechanism", "-m", required=True)
    a.add_argument("--property", "-p", required=True,
                   help="ir, ic, wic, wbb, efficiency or fnp:<type1|type2|general>:<k>")
    a.add_argument("--delta")
    a.add_argument("--opponents", choices=("truthful", "all"), default="truthful")
    bounds(a, 3, 3)
    a.set_defaults(func=cmd_audit)

    m = sub.add_parser("matrix", help="audit the full mechanism-by-property table")
    m.add_argument("--delta", default="1")
    m.add_argument("--fnp-max-agents", type=int, default=3)
    m.add_argument("--fnp-bid-max", type=int, default=3)
    m.add_argument("--attacks", nargs="+", default=["type2:1", "type1:1"])
    bounds(m, 4, 4)
    m.set_defaults(func=cmd_matrix)

    g = sub.add_parser("gen", help="write instance files")
    g.add_argument("--count", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-agents", type=int, default=4)
    g.add_argument("--bid-max", type=int, default=4)
    g.add_argument("--shapes", choices=("undirected", "directed"), default="undirected")
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"netauction: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except InstanceFormatError as exc:
        print(f"netauction: {args.__dict__.get('instance', '')}: {exc}", file=sys.stderr)
        return EX_DATAERR
    except OSError as exc:
        print(f"netauction: {exc}", file=sys.stderr)
        return EX_DATAERR
    except AuctionError as exc:
        print(f"netauction: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
