"""Command line entry point: ``choosability <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import generators as gen
from . import harness
from .instance import InvalidSpecification, dumps, loads, main_bound, to_json_obj
from .oracle import Inconclusive, choice_certificate, find_coloring, is_k_choosable
from .pipeline import PreconditionError, color, validate_coloring


def _read(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return loads(text)


def _emit(obj, out: str | None = None):
    text = json.dumps(obj)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_gen(args) -> int:
    fam = args.family
    if fam == "small-m":
        inst, lists = gen.gen_small_m(args.m, args.k)
    elif fam == "large-m":
        inst, lists = gen.gen_large_m(args.k, args.j, cap=args.cap)
    elif fam == "sharpness":
        inst, lists = gen.gen_sharpness(args.k, args.i)
    else:
        text = "\n".join(dumps(inst) for inst in gen.gen_eoos(args.k))
        if args.out:
            Path(args.out).write_text(text + "\n")
        else:
            print(text)
        return 0
    _emit(to_json_obj(inst, lists), args.out)
    return 0


def cmd_solve(args) -> int:
    inst, lists = _read(args.file)
    if lists is None:
        raise InvalidSpecification('solve needs an instance with "lists"')
    dense, labels = lists.densified()
    if args.exact:
        col = find_coloring(inst, dense)
        trace = None
        if col is None:
            _emit({"parts": list(inst.part_sizes), "coloring": None})
            return 1
    else:
        col, trace = color(inst, dense)
    decoded = [labels[c] for c in col]
    out = {
        "parts": list(inst.part_sizes),
        "coloring": decoded,
        "valid": validate_coloring(inst, lists, decoded),
    }
    if trace is not None:
        out["stage"] = trace.stage
        out["fallback"] = trace.fallback
        if args.trace:
            Path(args.trace).write_text(json.dumps(trace.to_dict() | {"labels": list(labels)}, indent=1) + "\n")
    _emit(out)
    return 0


def cmd_choice_number(args) -> int:
    inst, _ = _read(args.file)
    ch, below = choice_certificate(inst, max_k=args.max_k, node_limit=args.node_limit)
    out = {"parts": list(inst.part_sizes), "n": inst.n, "k": inst.k,
           "choice_number": ch, "bound": main_bound(inst.n, inst.k)}
    if below is not None:
        out["witness"] = to_json_obj(inst, below.witness)
    _emit(out)
    return 0


def cmd_choosable(args) -> int:
    inst, _ = _read(args.file)
    verdict = is_k_choosable(inst, args.k, node_limit=args.node_limit)
    out = {"parts": list(inst.part_sizes), "k": args.k, "choosable": verdict.choosable, "nodes": verdict.nodes}
    if verdict.witness is not None:
        out["witness"] = to_json_obj(inst, verdict.witness)
    _emit(out)
    return 0


def cmd_verify(args) -> int:
    c = args.campaign
    kw = {"node_limit": args.node_limit}
    if c == "main-bound":
        rep = harness.verify_main_bound(args.n_max or 7, extra=[[4, 4]] if args.with_k44 else [],
                                        jobs=args.jobs, **kw)
    elif c == "nrw":
        rep = harness.verify_nrw(args.n_max or 7, jobs=args.jobs, **kw)
    elif c == "ohba":
        rep = harness.verify_ohba_formula(args.n_max or 7, jobs=args.jobs, **kw)
    elif c == "constructions":
        rep = harness.verify_constructions()
    elif c == "k4k":
        rep = harness.verify_k4k(include_k444=args.with_k444, **kw)
    elif c == "identities":
        rep = harness.verify_identities(args.n_max or 20)
    else:
        rep = harness.run_pipeline_corpus(args.count, args.seed, args.n_max or 12,
                                          mode=args.mode, jobs=args.jobs)
    if args.report:
        Path(args.report).write_text(rep.to_json(indent=1) + "\n")
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    print(json.dumps({"campaign": rep.campaign, **rep.summary()}))
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="choosability", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a construction in the JSON instance format")
    g.add_argument("--family", required=True, choices=["small-m", "large-m", "sharpness", "eoos"])
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--j", type=int, default=1)
    g.add_argument("--i", type=int, default=0)
    g.add_argument("--cap", type=int, default=gen.DEFAULT_LARGE_M_CAP)
    g.add_argument("-o", "--out")
    g.set_defaults(fn=cmd_gen)

    s = sub.add_parser("solve", help="L-color an instance file")
    s.add_argument("file")
    s.add_argument("--trace", help="write the proof trace JSON here")
    s.add_argument("--exact", action="store_true", help="use the exact search for any list sizes")
    s.set_defaults(fn=cmd_solve)

    c = sub.add_parser("choice-number", help="exact choice number of an instance")
    c.add_argument("file")
    c.add_argument("--max-k", type=int)
    c.add_argument("--node-limit", type=int)
    c.set_defaults(fn=cmd_choice_number)

    k = sub.add_parser("choosable", help="decide k-choosability")
    k.add_argument("file")
    k.add_argument("--k", type=int, required=True)
    k.add_argument("--node-limit", type=int)
    k.set_defaults(fn=cmd_choosable)

    v = sub.add_parser("verify", help="run a verification campaign")
    v.add_argument("campaign", choices=harness.CAMPAIGNS)
    v.add_argument("--n-max", type=int)
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--count", type=int, default=1000)
    v.add_argument("--mode", choices=["uniform", "reduced"], default="uniform")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--node-limit", type=int)
    v.add_argument("--with-k44", action="store_true", help="add K_{4,4} to the main-bound sweep")
    v.add_argument("--with-k444", action="store_true", help="also attempt K_{4,4,4}")
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--csv", help="write the CSV table here")
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InvalidSpecification, PreconditionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Inconclusive as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
