"""``synchrolab`` command line.

Exit codes: 0 success (analyze: synchronizing), 1 failed verification or
generator mismatch, 2 invalid input, 3 not synchronizing, 4 budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from . import __version__, constructions as K
from .automaton import ParseError, is_basic, is_complete, is_transitive, load_automaton, serialize_automaton, undefined_count
from .bounds import bound_report
from .rewrite import derivation, format_rstring, min_steps_to_B, parse_rstring, system_cyclic, system_hm, weight
from .search import (
    BudgetExhausted,
    SearchTask,
    enumerate_lengths,
    length_ranges,
    postprocess_minimize_alphabet,
    search_critical_dfa,
    search_extremal_pfa,
)
from .sync import count_shortest, shortest_sync

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NOSYNC, EXIT_BUDGET = 0, 1, 2, 3, 4


def _emit(report, args, text_lines):
    if getattr(args, "json", False):
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _report(command, args, outputs, t0):
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "json", "csv") and v is not None}
    return {
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "elapsed_s": round(time.perf_counter() - t0, 6),
        "version": __version__,
    }


# ---------------------------------------------------------------------------


def cmd_analyze(args):
    t0 = time.perf_counter()
    try:
        aut = load_automaton(args.file)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rep = count_shortest(aut) if args.count else shortest_sync(aut)
    out = {
        "states": aut.n,
        "symbols": aut.k,
        "complete": is_complete(aut),
        "basic": is_basic(aut),
        "transitive": is_transitive(aut),
        "undefined": undefined_count(aut),
        **rep.to_dict(),
    }
    if not args.witness:
        out.pop("witness")
    if not args.count:
        out.pop("shortest_count")
    lines = []
    if rep.synchronizing:
        lines.append(f"synchronizing, length {rep.length}")
    else:
        lines.append("not synchronizing")
    if args.witness and rep.synchronizing:
        lines.append(f"witness: {rep.witness_text(' ')}")
    if args.count and rep.synchronizing:
        lines.append(f"shortest words: {rep.shortest_count}")
    lines.append(
        f"states {aut.n}, symbols {aut.k}, complete {out['complete']}, basic {out['basic']}, transitive {out['transitive']}"
    )
    _emit(_report("analyze", args, out, t0), args, lines)
    return EXIT_OK if rep.synchronizing else EXIT_NOSYNC


# name -> (builder, needed params, predicted length or None)
GEN_FAMILIES = {
    "cerny": (lambda a: K.cerny(a.n), ("n",), lambda a: (a.n - 1) ** 2),
    "tn": (lambda a: K.t_n(a.n), ("n",), lambda a: K.t_n_length(a.n)),
    "pn": (lambda a: K.p_n(a.n), ("n",), lambda a: K.pn_length_formula(a.n)),
    "pfa-hm": (lambda a: K.pfa_hm(a.h, a.m, a.k, a.variant), ("h", "m", "k"), None),
    "pfa-hm-tilde": (lambda a: K.pfa_hm_tilde(a.h, a.m, a.k), ("h", "m", "k"), None),
    "pfa-hm-n": (lambda a: K.pfa_hm_n(a.h, a.m, a.n), ("h", "m", "n"), None),
    "single-undef": (lambda a: K.single_undef(a.m, a.k), ("m", "k"), None),
    "single-undef-three": (lambda a: K.single_undef_three(a.m, a.k), ("m", "k"), None),
    "single-undef-binary": (lambda a: K.single_undef_binary(a.m, a.k).automaton, ("m", "k"), None),
}


def cmd_gen(args):
    t0 = time.perf_counter()
    build, need, predict = GEN_FAMILIES[args.family]
    missing = [p for p in need if getattr(args, p) is None]
    if missing:
        print(f"error: {args.family} needs --{' --'.join(missing)}", file=sys.stderr)
        return EXIT_INPUT
    try:
        aut = build(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = serialize_automaton(aut)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    out = {"states": aut.n, "symbols": aut.k, "undefined": undefined_count(aut)}
    lines = [f"{args.family}: states {aut.n}, symbols {aut.k}, undefined {out['undefined']}"]
    status = EXIT_OK
    if predict is not None:
        want = predict(args)
        got = shortest_sync(aut).length
        out.update(predicted=want, measured=got)
        lines.append(f"predicted {want}, measured {got}")
        if got != want:
            lines.append("error: predicted and measured lengths differ")
            status = EXIT_FAIL
    if args.out:
        lines.append(f"wrote {args.out}")
    elif not args.json:
        lines.append(text)
    _emit(_report("gen", args, out, t0), args, lines)
    return status


def cmd_verify(args):
    from .verify import SUITES, run_suite, suite_extended

    t0 = time.perf_counter()
    names = list(SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        rows += run_suite(name, max_n=args.max_n, extended=args.extended)
    if args.extended:
        rows += suite_extended()
    ok = all(r["ok"] for r in rows)
    lines = [f"{'PASS' if r['ok'] else 'FAIL'}  {r['suite']}: {r['row']}  {r['detail']}" for r in rows]
    lines.append(f"{sum(r['ok'] for r in rows)}/{len(rows)} rows passed")
    _emit(_report("verify", args, {"rows": rows, "ok": ok}, t0), args, lines)
    return EXIT_OK if ok else EXIT_FAIL


def _task(args):
    return SearchTask(
        n=args.n,
        kind=args.kind,
        target=args.target,
        max_symbols=args.symbols,
        budget=args.budget,
        checkpoint=args.checkpoint,
        resume=args.resume,
        threads=args.threads,
    )


def cmd_search(args):
    t0 = time.perf_counter()
    if args.target is None:
        args.target = (args.n - 1) ** 2 if args.kind == "dfa" else 0
    try:
        task = _task(args)
        res = search_critical_dfa(task) if args.kind == "dfa" else search_extremal_pfa(task)
    except BudgetExhausted as exc:
        where = exc.checkpoint or "(no checkpoint file)"
        print(f"budget exhausted; checkpoint: {where}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = res.to_dict()
    lines = [f"found {len(res.found)} automata with length >= {args.target}"]
    for f in res.found:
        lines.append(f"length {f.length}, symbols {f.automaton.k}")
    if args.postprocess and args.kind != "dfa":
        variants = []
        for f in res.found:
            variants += postprocess_minimize_alphabet(f.automaton, args.target)
        if variants:
            best = min(v.k for v in variants)
            keep = [v for v in variants if v.k == best]
            out["postprocessed"] = [serialize_automaton(v) for v in keep]
            lines.append(f"fewest symbols after postprocessing: {best} ({len(keep)} variants)")
    lines.append(" ".join(f"{k}={v}" for k, v in sorted(res.stats.items())))
    _emit(_report("search", args, out, t0), args, lines)
    return EXIT_OK


def cmd_enumerate(args):
    t0 = time.perf_counter()
    kinds = ["dfa", "proper-pfa"] if args.kind == "all" else [args.kind]
    ns = range(args.min_n or args.n, args.n + 1)
    table = []
    try:
        for n in ns:
            row = {"n": n, "k": args.symbols}
            for kind in kinds:
                row[kind] = sorted(enumerate_lengths(n, args.symbols, kind, budget=args.budget))
            table.append(row)
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "k"] + kinds)
        for row in table:
            w.writerow([row["n"], row["k"]] + [length_ranges(row[kd]) for kd in kinds])
        sys.stdout.write(buf.getvalue())
        return EXIT_OK
    lines = []
    for row in table:
        parts = [f"{kd}: {length_ranges(row[kd])}" for kd in kinds]
        lines.append(f"n={row['n']} k={row['k']}  " + "  ".join(parts) if len(kinds) > 1 else length_ranges(row[kinds[0]]))
    _emit(_report("enumerate", args, {"table": table}, t0), args, lines)
    return EXIT_OK


def cmd_bounds(args):
    t0 = time.perf_counter()
    try:
        aut = load_automaton(args.file)
        rep = bound_report(aut, legacy_lpp=args.legacy_lpp)
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(json.dumps(_report("bounds", args, rep.to_dict(), t0), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_rewrite(args):
    t0 = time.perf_counter()
    try:
        sys_ = system_cyclic(args.m) if args.family == "cyclic" else system_hm(args.h, args.m)
        start = parse_rstring(args.start, sys_.m) if args.start else None
        if args.action == "weight":
            if start is None:
                raise ValueError("weight needs --start")
            val = weight(sys_, start)
            out, lines = {"weight": val}, [str(val)]
        elif args.action == "min-steps":
            val = min_steps_to_B(sys_, args.k, start)
            out, lines = {"min_steps": val}, ["unreachable" if val is None else str(val)]
        else:
            path = derivation(sys_, args.k, start)
            out = {"derivation": [format_rstring(u, sys_.m) for u in path]}
            lines = out["derivation"] or ["unreachable"]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(_report("rewrite", args, out, t0), args, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="synchrolab", description="Synchronizing automata toolkit.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="shortest (careful) synchronizing word of an automaton file")
    a.add_argument("file")
    a.add_argument("--witness", action="store_true")
    a.add_argument("--count", action="store_true")
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("gen", help="generate a construction")
    g.add_argument("family", choices=sorted(GEN_FAMILIES))
    for name in ("n", "h", "m", "k"):
        g.add_argument(f"--{name}", type=int)
    g.add_argument("--variant", default="src", choices=["src", "s,c,rc"])
    g.add_argument("--out")
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run a verification suite")
    from .verify import SUITES

    v.add_argument("suite", choices=list(SUITES) + ["all"])
    v.add_argument("--max-n", type=int)
    v.add_argument("--extended", action="store_true")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    def common(sp):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--symbols", type=int)
        sp.add_argument("--kind", default="dfa")
        sp.add_argument("--budget", type=int)
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--csv", action="store_true")

    s = sub.add_parser("search", help="exhaustive extremal search")
    common(s)
    s.add_argument("--target", type=int)
    s.add_argument("--checkpoint")
    s.add_argument("--resume", action="store_true")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--postprocess", action="store_true")
    s.set_defaults(func=cmd_search)

    e = sub.add_parser("enumerate", help="all achievable shortest lengths")
    common(e)
    e.add_argument("--min-n", type=int)
    e.set_defaults(func=cmd_enumerate, symbols=2)

    b = sub.add_parser("bounds", help="L, L', L'' of an automaton as JSON")
    b.add_argument("file")
    b.add_argument("--legacy-lpp", action="store_true")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bounds)

    r = sub.add_parser("rewrite", help="rewrite-system step counts")
    r.add_argument("action", choices=["min-steps", "derive", "weight"])
    r.add_argument("--family", default="hm", choices=["hm", "cyclic"])
    r.add_argument("--h", type=int, default=1)
    r.add_argument("--m", type=int, default=2)
    r.add_argument("--k", type=int)
    r.add_argument("--start")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_rewrite)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "kind", None) not in (None, "dfa", "pfa", "proper-pfa", "all"):
        parser.error(f"unknown kind {args.kind!r}")
    if args.command == "enumerate" and args.symbols is None:
        args.symbols = 2
    if args.command == "rewrite" and args.action != "weight" and args.k is None:
        if args.start is None:
            parser.error("--k or --start is required")
        args.k = len(parse_rstring(args.start, args.m))
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
