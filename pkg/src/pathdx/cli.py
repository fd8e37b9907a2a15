"""Command-line interface.

Subcommands: validate, coherency, infer, simulate, calibrate, serve.
Exit codes: 0 success, 1 domain error (bad KB, unresolved ids, inconsistent
evidence), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .api import handle_infer
from .errors import DiagnosisError, SchemaError
from .evaluation import run_benchmark
from .inference import coherency_report
from .kb_format import parse_kb
from .kb_model import KnowledgeBase, validate_kb
from .simulate import DatasetConfig, generate_dataset, load_cases, save_cases


def _load_kb(path: str, err=sys.stderr) -> KnowledgeBase | None:
    try:
        with open(path, "rb") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=err)
        return None
    result = parse_kb(text)
    for diag in result.diagnostics:
        print(f"{path}:{diag}", file=err)
    return result.kb


def _cmd_validate(args, out, err) -> int:
    kb = _load_kb(args.kb, err)
    if kb is None:
        return 1
    report = validate_kb(kb)
    for issue in report.errors:
        print(f"error: {issue.where()}: {issue.message}", file=err)
    for issue in report.warnings:
        print(f"warning: {issue.where()}: {issue.message}", file=err)
    c = report.counts
    print(
        f"{c['diseases']} diseases, {c['pathstates']} pathstates, {c['symptoms']} symptoms",
        file=out,
    )
    return 0 if report.ok else 1


def _cmd_coherency(args, out, err) -> int:
    kb = _load_kb(args.kb, err)
    if kb is None:
        return 1
    grid = [float(t) for t in args.grid.split(",") if t.strip() != ""]
    rows = coherency_report(kb, args.disease, grid=grid, tol=args.tol)
    if not rows:
        print(f"no discrepancies above tol={args.tol}", file=out)
        return 0
    print(f"{'symptom':<28}{'t':>8}{'model':>10}{'direct':>10}{'delta':>10}", file=out)
    for r in rows:
        print(f"{r.symptom_id:<28}{r.t:>8.1f}{r.model_p:>10.4f}{r.direct_p:>10.4f}{r.delta:>+10.4f}", file=out)
    return 0


def _cmd_infer(args, out, err) -> int:
    kb = _load_kb(args.kb, err)
    if kb is None:
        return 1
    try:
        with open(args.case, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read {args.case}: {exc}", file=err)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: {args.case}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}", file=err)
        return 1
    response = handle_infer(kb, payload)
    print(json.dumps(response, indent=2), file=out)
    return 0


def _cmd_simulate(args, out, err) -> int:
    kb = _load_kb(args.kb, err)
    if kb is None:
        return 1
    classes = tuple(c for c in args.classes.split(",") if c) if args.classes else tuple(
        d.id for d in kb.diseases
    )
    config = DatasetConfig(
        n_per_class=args.n,
        classes=classes,
        seed=args.seed,
        time_range=(args.t_min, args.t_max),
    )
    cases = generate_dataset(kb, config)
    save_cases(args.out, cases)
    print(f"wrote {len(cases)} cases to {args.out}", file=out)
    return 0


def _cmd_calibrate(args, out, err) -> int:
    kb = _load_kb(args.kb, err)
    if kb is None:
        return 1
    cases = load_cases(args.cases)
    priors = None
    if args.priors:
        values = [float(v) for v in args.priors.split(",")]
        labels = sorted({c.true_disease_id for c in cases if c.true_disease_id})
        ordered = [args.target] + [d for d in labels if d != args.target]
        if len(values) != len(ordered):
            print(
                f"error: --priors needs {len(ordered)} values for classes {ordered}",
                file=err,
            )
            return 2
        priors = dict(zip(ordered, values))
    report = run_benchmark(kb, cases, args.target, priors_override=priors, bins=args.bins)
    print(report.to_text(), file=out)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    return 0


def _cmd_serve(args, out, err) -> int:
    kb = _load_kb(args.kb, err)
    if kb is None:
        return 1
    from .service import serve_forever

    print(f"serving {args.kb} on http://{args.host}:{args.port}", file=out)
    serve_forever(kb, args.host, args.port, static_dir=args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathdx",
        description="Causal Bayesian diagnosis over pathstate trees",
    )
    parser.add_argument("--version", action="version", version=f"pathdx {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a knowledge base and print its scale")
    p.add_argument("kb")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("coherency", help="compare path products with direct curves")
    p.add_argument("kb")
    p.add_argument("--disease", required=True)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--grid", default="0,24,72,132")
    p.set_defaults(func=_cmd_coherency)

    p = sub.add_parser("infer", help="posterior + treatment for one case file")
    p.add_argument("--kb", required=True)
    p.add_argument("--case", required=True)
    p.set_defaults(func=_cmd_infer)

    p = sub.add_parser("simulate", help="generate a synthetic case set (JSON lines)")
    p.add_argument("--kb", required=True)
    p.add_argument("--n", type=int, required=True, help="cases per class")
    p.add_argument("--classes", default="", help="comma-separated disease ids (default: all)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=132.0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("calibrate", help="benchmark causal vs independence calibration")
    p.add_argument("--kb", required=True)
    p.add_argument("--cases", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--priors", default="", help="override, e.g. 0.5,0.5 (target first)")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--json", default="", help="also write the report as JSON here")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("serve", help="run the HTTP JSON service")
    p.add_argument("--kb", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None, help="directory of UI assets to serve at /")
    p.set_defaults(func=_cmd_serve)
    return parser


def run_cli(argv, out=sys.stdout, err=sys.stderr) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out, err)
    except (DiagnosisError, SchemaError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
