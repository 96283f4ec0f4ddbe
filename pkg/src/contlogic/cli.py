"""Command-line front end: ``contlogic <command> [options]``.

Exit status is 0 on success, 1 when a violation (or counterexample) is
found and 2 on a usage error: bad arguments, unreadable files, parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classes import ClassError, classify_cont, classify_horn, fo_to_cont
from .downup import DownUpError, Grid, structure_down, structure_up
from .fileio import FormatError, dumps, load
from .filters import FilterError, parse_filter
from .fo import FOStructure, holds
from .grammar import (
    parse_cont_formula, parse_fo_formula, parse_with_vocabulary, render_fo, render_formula,
    strip_comments,
)
from .harness.generators import InstanceSpec, SpecError
from .harness.preservation import VIOLATED, check_all_epsilons, check_preservation, search_counterexample
from .harness.suites import EXIT_PASS, EXIT_USAGE, EXIT_VIOLATION, SUITES, dumps_report, run_suite
from .products import DEFAULT_MAX_PRODUCT_SIZE, fo_reduced_product, pre_reduced_product, reduced_product
from .structures import EvaluationError, GeneralStructure, StructureError, eval_formula
from .syntax import SyntaxError_, is_sentence, parse_vocabulary
from .values import fmt, parse_value


class UsageError(Exception):
    pass


# ------------------------------------------------------------------- helpers


def _read_formula(arg: str) -> str:
    p = Path(arg)
    try:
        if len(arg) < 4096 and p.is_file():
            return strip_comments(p.read_text(encoding="utf-8"))
    except OSError:
        pass
    return arg


def _parse(text: str, logic: str, vocab=None):
    if vocab is None:
        return parse_with_vocabulary(text, logic)
    f = parse_cont_formula(text, vocab) if logic == "cont" else parse_fo_formula(text, vocab)
    return f, vocab


def _render(f, logic: str) -> str:
    return render_formula(f) if logic == "cont" else render_fo(f)


def _load_all(paths):
    ms = [load(p) for p in paths]
    if not ms:
        raise UsageError("at least one --in structure is required")
    kinds = {type(m) for m in ms}
    if len(kinds) > 1:
        raise UsageError("cannot mix .gst and .fst structures")
    return ms


def _pair(text: str) -> tuple[int, int]:
    parts = [int(x) for x in text.split(",")]
    if len(parts) == 1:
        return parts[0], parts[0]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected N or LO,HI")
    return parts[0], parts[1]


def _emit(args, text: str, data: dict):
    fmt_ = args.format or args.default_format
    sys.stdout.write((json.dumps(data, indent=2, sort_keys=True, default=str) + "\n") if fmt_ == "json" else text)


def _write_report(args, data: dict):
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")


def _opt(args, name, default):
    v = getattr(args, name, None)
    return default if v is None else v


# ------------------------------------------------------------------ commands


def cmd_parse(args) -> int:
    vocab = parse_vocabulary(args.vocab) if args.vocab else None
    f, v = _parse(_read_formula(args.formula), args.logic, vocab)
    shown = _render(f, args.logic)
    _emit(args, shown + "\n", {"formula": shown, "vocabulary": str(v), "sentence": is_sentence(f)})
    return EXIT_PASS


def _assignment(text: str | None) -> dict:
    env = {}
    for item in (text or "").split(","):
        if item.strip():
            var, sep, val = item.partition("=")
            if not sep:
                raise UsageError(f"bad assignment item {item!r}; expected x=0")
            env[var.strip()] = int(val)
    return env


def cmd_eval(args) -> int:
    m = load(args.structure)
    env = _assignment(args.assign)
    if isinstance(m, FOStructure):
        f = parse_fo_formula(_read_formula(args.formula), m.vocab)
        result = holds(m, f, env)
        _emit(args, ("true" if result else "false") + "\n", {"holds": result})
    else:
        f = parse_cont_formula(_read_formula(args.formula), m.vocab)
        val = eval_formula(m, f, env)
        _emit(args, fmt(val) + "\n", {"value": fmt(val)})
    return EXIT_PASS


def cmd_classify(args) -> int:
    f, _ = _parse(_read_formula(args.formula), args.logic)
    report = (classify_cont(f) if args.logic == "cont" else classify_horn(f)).to_dict()
    report["formula"] = _render(f, args.logic)
    lines = [f"{k}: {str(v).lower()}" for k, v in report["flags"].items()]
    lines += [f"  {k} fails at {p}" for k, p in report["violations"].items()]
    _emit(args, "\n".join(lines) + "\n", report)
    return EXIT_PASS


def cmd_translate(args) -> int:
    f, _ = _parse(_read_formula(args.formula), "fo")
    out = render_formula(fo_to_cont(f))
    _emit(args, out + "\n", {"fo": render_fo(f), "cont": out})
    return EXIT_PASS


def _write_structure(args, m):
    text = dumps(m)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_down(args) -> int:
    m = load(args.input)
    if not isinstance(m, GeneralStructure):
        raise UsageError("down expects a general structure (.gst)")
    _write_structure(args, structure_down(m, Grid(_opt(args, "grid", 3))))
    return EXIT_PASS


def cmd_up(args) -> int:
    k = load(args.input)
    if not isinstance(k, FOStructure):
        raise UsageError("up expects a first-order structure (.fst)")
    _write_structure(args, structure_up(k, Grid(_opt(args, "grid", 3))))
    return EXIT_PASS


def cmd_product(args) -> int:
    ms = _load_all(args.inputs)
    f = parse_filter(args.filter, range(1, len(ms) + 1))
    cap = _opt(args, "max_product_size", DEFAULT_MAX_PRODUCT_SIZE)
    fo = isinstance(ms[0], FOStructure)
    if args.kind == "fo":
        if not fo:
            raise UsageError("--kind fo needs .fst inputs")
        out = fo_reduced_product(ms, f, cap)
    else:
        if fo:
            raise UsageError(f"--kind {args.kind} needs .gst inputs")
        out = pre_reduced_product(ms, f, cap) if args.kind == "pre" else reduced_product(ms, f, cap)[0]
    _write_structure(args, out)
    return EXIT_PASS


def _family_and_formula(args):
    ms = _load_all(args.inputs)
    if isinstance(ms[0], FOStructure):
        raise UsageError("check works on general structures (.gst)")
    phi = parse_cont_formula(_read_formula(args.formula), ms[0].vocab)
    f = parse_filter(args.filter, range(1, len(ms) + 1))
    return ms, f, phi


def cmd_check(args) -> int:
    ms, f, phi = _family_and_formula(args)
    cap = _opt(args, "max_product_size", DEFAULT_MAX_PRODUCT_SIZE)
    if args.eps is not None:
        rec = check_preservation(ms, f, phi, parse_value(args.eps), max_size=cap)
    else:
        rec = check_all_epsilons(ms, f, phi, Grid(_opt(args, "grid", 3)), max_size=cap)
    data = {"formula": render_formula(phi), "filter": str(f), **rec.to_dict()}
    text = (f"factor values: {', '.join(data['factor_values'])}\n"
            f"product value: {data['product_value']}\n"
            f"epsilon: {data['epsilon']}\nverdict: {rec.verdict}\n")
    _emit(args, text, data)
    _write_report(args, data)
    return EXIT_VIOLATION if rec.verdict == VIOLATED else EXIT_PASS


def cmd_search(args) -> int:
    phi, vocab = _parse(_read_formula(args.formula), "cont")
    budget = InstanceSpec(
        n_preds=len(vocab.predicates), n_funcs=len(vocab.functions), n_consts=len(vocab.constants),
        universe=args.universe, index_size=args.index_size, filter=args.filter,
        grid_k=_opt(args, "grid", 3), seed=_opt(args, "seed", 0), trials=_opt(args, "trials", 1000),
        max_product_size=_opt(args, "max_product_size", DEFAULT_MAX_PRODUCT_SIZE),
    )
    w = search_counterexample(phi, budget)
    data = {"formula": render_formula(phi), "trials": budget.trials, "seed": budget.seed,
            "witness": w.to_dict() if w else None}
    if w:
        text = (f"violation at trial {w.trial} (seed {w.seed}): filter {w.filter} over {list(w.filter.index)}, "
                f"factor values {', '.join(data['witness']['factor_values'])}, "
                f"product value {data['witness']['product_value']}, epsilon {data['witness']['epsilon']}\n")
    else:
        text = f"no violation in {budget.trials} trials\n"
    _emit(args, text, data)
    _write_report(args, data)
    return EXIT_VIOLATION if w else EXIT_PASS


def cmd_suite(args) -> int:
    overrides = {"seed": getattr(args, "seed", None), "trials": getattr(args, "trials", None),
                 "grid_k": getattr(args, "grid", None),
                 "max_product_size": getattr(args, "max_product_size", None)}
    status, report = run_suite(args.name, overrides, timestamp=args.timestamp)
    c = report["counts"]
    text = f"{args.name}: {report['status']} ({c['passed']}/{c['trials']} trials passed)\n"
    if report["first_violation"]:
        text += f"first violation: seed {report['first_violation'].get('seed')}\n"
    _emit(args, text, report)
    if args.out:
        Path(args.out).write_text(dumps_report(report), encoding="utf-8")
    if args.figure:
        from .harness.plotting import write_suite_figure

        write_suite_figure(report, args.figure)
    return status


# -------------------------------------------------------------------- parser


def _global_flags(p: argparse.ArgumentParser):
    s = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=s, help="master seed (unsigned 64-bit)")
    p.add_argument("--trials", type=int, default=s, help="trial count")
    p.add_argument("--grid", type=int, default=s, help="grid resolution k (points j/2^k)")
    p.add_argument("--max-product-size", type=int, default=s, help="cap on product universes")
    p.add_argument("--format", choices=("text", "json"), default=s)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="contlogic", description=__doc__.splitlines()[0])
    _global_flags(top)
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, default_format="text", out_help="write a JSON report here"):
        p = sub.add_parser(name, help=help_)
        _global_flags(p)
        p.add_argument("--out", help=out_help)
        p.set_defaults(fn=fn, default_format=default_format)
        return p

    p = add("parse", cmd_parse, "parse and pretty-print a formula")
    p.add_argument("--logic", choices=("cont", "fo"), default="cont")
    p.add_argument("--formula", required=True, help="formula text or a file holding it")
    p.add_argument("--vocab", help="vocabulary such as P/2,func:F/1,const:c (inferred when omitted)")

    p = add("eval", cmd_eval, "evaluate a formula in a structure file")
    p.add_argument("--structure", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--assign", help="values of free variables, e.g. x=0,y=2")

    p = add("classify", cmd_classify, "syntactic class membership", default_format="json")
    p.add_argument("--logic", choices=("cont", "fo"), default="cont")
    p.add_argument("--formula", required=True)

    p = add("translate", cmd_translate, "translate a first-order formula to a continuous one")
    p.add_argument("--formula", required=True)

    for name, fn, what in (("down", cmd_down, "threshold structure of a reduced .gst"),
                           ("up", cmd_up, "decode an increasing .fst and reduce")):
        p = add(name, fn, what, out_help="output structure file (stdout when omitted)")
        p.add_argument("--in", dest="input", required=True)

    p = add("product", cmd_product, "product of structure files modulo a filter",
            out_help="output structure file (stdout when omitted)")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, help="factors, indexed 1..n")
    p.add_argument("--filter", default="full", help="full | kernel=1,3 | subbasis={1,2};{2,3}")
    p.add_argument("--kind", choices=("pre", "reduced", "fo"), default="reduced")

    p = add("check", cmd_check, "preservation check for one family and sentence")
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--filter", default="full")
    p.add_argument("--eps", help="a single epsilon; default: every grid point and factor value")

    p = add("search", cmd_search, "seeded search for a preservation counterexample")
    p.add_argument("--formula", required=True)
    p.add_argument("--universe", type=_pair, default=(1, 3), help="universe sizes N or LO,HI")
    p.add_argument("--index-size", type=_pair, default=(1, 3), help="index set sizes N or LO,HI")
    p.add_argument("--filter", default="random", help="random | full | ultra | kernel=...")

    p = add("suite", cmd_suite, "run a named invariant suite")
    p.add_argument("name", choices=SUITES)
    p.add_argument("--figure", help="also write a PNG figure here")
    p.add_argument("--timestamp", help="fixed timestamp for the report (for byte-identical output)")
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "format"):
        args.format = None
    try:
        return args.fn(args)
    except (UsageError, SyntaxError_, FormatError, FilterError, StructureError, EvaluationError,
            DownUpError, ClassError, SpecError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
