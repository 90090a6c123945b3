"""Command-line front end.

Exit status: 0 when every requested check is YES, 1 when one is NO (or a
certificate fails to verify), 2 when one is UNKNOWN, 3 on bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import kirby
from .grouppres import (DEFAULT_BUDGET, PresentationError, parse_presentation, trivialize_search)
from .intmat import NonUnimodular
from .middle import DeltaViolation
from .pipeline import (DEFAULT_BUDGETS, ScenarioError, dumps_certificate, extract, load_scenario)
from .verify import EvidenceMismatch, verify_certificate

FIXTURES = Path(__file__).resolve().parent / "fixtures"

OK, NO, UNKNOWN, BAD_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def status_of(values) -> int:
    values = list(values)
    if "no" in values:
        return NO
    if "unknown" in values:
        return UNKNOWN
    return OK


def resolve(path: str) -> Path:
    """A path, or the name of a shipped fixture."""
    p = Path(path)
    if p.exists():
        return p
    for cand in (FIXTURES / p.name, FIXTURES / f"{p.name}.json"):
        if cand.exists():
            return cand
    raise InputError(f"no such file: {path}")


def write_atomic(path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_json(path):
    try:
        with open(resolve(path)) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: {e}") from e


def _report(args, code, summary: str, data: dict):
    if args.json:
        print(json.dumps({"status": code, "summary": summary, **data}, sort_keys=True, indent=1))
    else:
        print(summary)
    return code


# -- commands ------------------------------------------------------------------

def cmd_extract(args):
    sc = load_scenario(resolve(args.scenario))
    if args.budget is not None:
        sc = sc.with_budgets(**{k: args.budget for k in DEFAULT_BUDGETS})
    cert = extract(sc)
    text = dumps_certificate(cert)
    if args.output:
        write_atomic(args.output, text)
    elif not args.json:
        sys.stdout.write(text)
    verdicts = {k: v["status"] for k, v in cert["verdicts"].items()}
    lines = [f"{k}: {v}" for k, v in verdicts.items()]
    if args.output:
        lines.append(f"certificate written to {args.output}")
    return _report(args, status_of(verdicts.values()), "\n".join(lines), {"verdicts": verdicts})


def cmd_verify(args):
    cert = _read_json(args.certificate)
    sc = load_scenario(resolve(args.scenario))
    try:
        statuses = verify_certificate(cert, sc)
    except EvidenceMismatch as e:
        return _report(args, NO, f"evidence mismatch at {e.step}: {e}", {"failed_step": e.step})
    except (KeyError, TypeError, IndexError) as e:
        raise InputError(f"malformed certificate: {e!r}") from e
    lines = [f"{k}: {v} (evidence checked)" if v == "yes" else f"{k}: {v}"
             for k, v in statuses.items()]
    return _report(args, OK, "\n".join(lines), {"verdicts": statuses})


def cmd_trivialize(args):
    try:
        p = parse_presentation(resolve(args.presentation).read_text())
    except PresentationError as e:
        raise InputError(str(e)) from e
    res = trivialize_search(p, args.budget)
    data = {"verdict": res.verdict.value, "reason": res.reason}
    if res.is_yes:
        moves = [m.to_json() for m in res.certificate["moves"]]
        data["moves"] = moves
        summary = f"yes: trivialized in {len(moves)} moves"
        if not args.json:
            summary += "".join(f"\n  {json.dumps(m, sort_keys=True)}" for m in moves)
    elif res.is_no:
        data["witness"] = res.certificate
        summary = f"no: abelianization {res.certificate['abelianization']} " \
                  f"(H_1 free rank {res.certificate['h1_free_rank']}, torsion {res.certificate['h1_torsion']})"
    else:
        summary = f"unknown: {res.reason}"
    return _report(args, {"yes": OK, "no": NO}.get(res.verdict.value, UNKNOWN), summary, data)


def _load_diagram(path):
    try:
        return kirby.KirbyDiagram.from_json(_read_json(path))
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed diagram: {e!r}") from e


def cmd_diagram(args):
    d = _load_diagram(args.diagram)
    if args.sub == "homology":
        h = kirby.four_manifold_homology(d)
        return _report(args, OK, f"H_1 = {h.describe(1)}, H_2 = {h.describe(2)}",
                       {"homology": h.to_json()})
    if args.sub == "boundary":
        h = kirby.boundary_homology(d)
        return _report(args, OK, f"H_1 = {h.describe(1)}", {"homology": h.to_json()})
    if args.sub == "trade":
        out = kirby.trade_handle(d, args.component)
        text = json.dumps(out.to_json(), sort_keys=True, indent=1) + "\n"
        if args.output:
            write_atomic(args.output, text)
        summary = text if not args.output else f"traded component {args.component} -> {args.output}"
        return _report(args, OK, summary.rstrip("\n"), {"diagram": out.to_json()})
    perm = [int(a) for a in args.perm.split(",")]
    _, sym = kirby.apply_involution(d, perm)
    return _report(args, OK if sym else NO, f"is_symmetry = {str(sym).lower()}",
                   {"is_symmetry": sym})


def _parse_rows(text):
    try:
        return [[int(a) for a in row.split()] for row in text.split(";")]
    except ValueError as e:
        raise InputError(f"bad matrix {text!r}") from e


def cmd_cork(args):
    if args.kind == "akbulut":
        d = kirby.akbulut_cork()
        text = json.dumps(d.to_json(), sort_keys=True, indent=1) + "\n"
        if args.output:
            write_atomic(args.output, text)
            return _report(args, OK, f"Akbulut cork diagram -> {args.output}", {})
        return _report(args, OK, text.rstrip("\n"), {"diagram": d.to_json()})
    rows = _parse_rows(args.matrix)
    spec = kirby.GeneralizedCorkSpec(len(rows), rows, not args.family0_meets,
                                     not args.family1_meets)
    d, validity = kirby.build_generalized_cork(spec)
    if args.output:
        write_atomic(args.output, json.dumps(d.to_json(), sort_keys=True, indent=1) + "\n")
    summary = f"validity: {validity.verdict.value}"
    if validity.is_no:
        summary += " (" + "; ".join(validity.certificate["problems"]) + ")"
    return _report(args, {"yes": OK, "no": NO}[validity.verdict.value], summary,
                   {"validity": validity.verdict.value, "diagram": d.to_json()})


def cmd_fixtures(args):
    names = sorted(p.name for p in FIXTURES.iterdir() if p.suffix in (".json", ".txt"))
    if args.name:
        print(resolve(args.name))
    else:
        print("\n".join(names))
    return OK


# -- parser --------------------------------------------------------------------

def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("budget must be positive")
    return v


def build_parser():
    ap = argparse.ArgumentParser(prog="hcork", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="machine-readable summary")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run the pipeline on a scenario and write a certificate")
    p.add_argument("scenario")
    p.add_argument("-o", "--output")
    p.add_argument("--budget", type=_positive, help="override every per-stage search budget")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify", help="replay a certificate against its scenario (no search)")
    p.add_argument("certificate")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trivialize", help="bounded trivialization search on a presentation file")
    p.add_argument("presentation")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_trivialize)

    p = sub.add_parser("diagram", help="Kirby diagram operations")
    p.add_argument("sub", choices=["homology", "boundary", "trade", "involution"])
    p.add_argument("diagram")
    p.add_argument("--component", type=int, default=0, help="0-based component to trade")
    p.add_argument("--perm", default="1,0", help="involution as comma-separated images")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("cork", help="build cork diagrams")
    p.add_argument("kind", choices=["akbulut", "generalized"])
    p.add_argument("--matrix", default="1", help="D_0 . D_1 rows separated by ';'")
    p.add_argument("--family0-meets", action="store_true", help="the D_0 disks intersect")
    p.add_argument("--family1-meets", action="store_true", help="the D_1 disks intersect")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_cork)

    p = sub.add_parser("fixtures", help="list shipped fixtures or print one's path")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    # accept --json after the subcommand as well
    argv = list(sys.argv[1:] if argv is None else argv)
    json_flag = "--json" in argv
    argv = [a for a in argv if a != "--json"]
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return BAD_INPUT if e.code else OK
    args.json = json_flag
    try:
        return args.func(args)
    except (InputError, ScenarioError, NonUnimodular, DeltaViolation, kirby.DiagramError,
            OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
