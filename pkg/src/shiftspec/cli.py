"""Command-line front end.

Subcommands:

  analyze   print the spectral profile and picture of an instance as JSON
  decide    run a J-class decision and emit the verdict JSON
  simulate  build a mixing witness toward a target, emit JSON and a CSV
  plot      render the decision geometry as a static SVG

Instance files are JSON: {"weights": ..., "map": ..., "budgets": ...} with
budgets optional (defaults: gridMax 2^18, windingMax 2^20, truncationN 256,
tol 1e-9).  Exit codes: 0 JCLASS, 1 NOT_JCLASS, 2 UNDECIDED for decide;
64 parse error, 65 unsupported or refused input, 70 simulation failure.

The SHIFTSPEC_THREADS environment variable caps internal parallelism; the
current implementation evaluates grids as vectorized batches in a single
process, so any cap >= 1 is honored as-is.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .budget import Budget
from .dynamics import TruncatedVector, jset_experiment, mixing_witness, orbit_envelope
from .jclass import JCLASS, NOT_JCLASS, VERDICT_UNDECIDED, decide
from .spectra import OperatorSpec, UnsupportedMapError, spectral_picture
from .svgplot import contour_csv_rows, render_svg
from .weights import spectral_profile

__all__ = ["main", "load_instance"]

EXIT_JCLASS = 0
EXIT_NOT_JCLASS = 1
EXIT_UNDECIDED = 2
EXIT_PARSE = 64
EXIT_UNSUPPORTED = 65
EXIT_SIM_FAILED = 70

_DECISION_EXIT = {
    JCLASS: EXIT_JCLASS,
    NOT_JCLASS: EXIT_NOT_JCLASS,
    VERDICT_UNDECIDED: EXIT_UNDECIDED,
}


class ParseFailure(Exception):
    pass


def thread_cap() -> int:
    """Parallelism cap from SHIFTSPEC_THREADS (>= 1); informational for the
    current single-process vectorized implementation."""
    raw = os.environ.get("SHIFTSPEC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def load_instance(path: str) -> tuple[OperatorSpec, Budget]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseFailure(
            f"{path}: JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        op = OperatorSpec.from_dict(data)
        budget = Budget.from_dict(data.get("budgets"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseFailure(f"{path}: invalid instance: {exc}") from exc
    return op, budget


def _load_vector(path: str, n: int) -> TruncatedVector:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseFailure(
            f"{path}: JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        if isinstance(data, list):
            coords = np.array([complex(re, im) for re, im in data])
            return TruncatedVector(coords, len(coords))
        return TruncatedVector.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseFailure(f"{path}: invalid vector: {exc}") from exc


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _override_budget(budget: Budget, args) -> Budget:
    return Budget(
        grid_max=args.budget_grid or budget.grid_max,
        winding_max=args.budget_winding or budget.winding_max,
        truncation_n=args.trunc_n or budget.truncation_n,
        tol=args.tol or budget.tol,
    )


def cmd_analyze(args) -> int:
    op, _ = load_instance(args.path)
    prof = spectral_profile(op.weights)
    picture = spectral_picture(op)
    _emit({"profile": prof.to_dict(), "picture": picture.to_dict()})
    return 0


def cmd_decide(args) -> int:
    op, budget = load_instance(args.path)
    budget = _override_budget(budget, args)
    verdict, report = decide(op, route=args.route, budget=budget)
    out = verdict.to_dict()
    if report is not None:
        out["consistency"] = report.to_dict()
    _emit(out)
    return _DECISION_EXIT[verdict.decision]


def cmd_simulate(args) -> int:
    op, budget = load_instance(args.path)
    budget = _override_budget(budget, args)
    n = budget.truncation_n
    if args.target:
        target = _load_vector(args.target, n)
    else:
        target = TruncatedVector.ones(n)

    verdict, _ = decide(op, route="geometric", budget=budget)
    if verdict.decision != JCLASS:
        print(
            f"refusing to simulate: instance decided {verdict.decision}",
            file=sys.stderr,
        )
        return EXIT_UNSUPPORTED

    if args.jset_start:
        start = _load_vector(args.jset_start, n)
        rep = jset_experiment(op, start, [target], budget=budget, seed=args.seed)
        _emit(rep.to_dict())
        return 0 if rep.status != "INCONCLUSIVE" else EXIT_SIM_FAILED

    wit = mixing_witness(op, target, args.stages, tol=budget.tol, budget=budget, verdict=verdict)
    _emit(wit.to_dict())
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "norm", "norm_bound", "round_trip_residual"])
            for s in wit.stages:
                writer.writerow([s.index, repr(s.norm), repr(s.norm_bound), repr(s.round_trip_residual)])
    if args.orbit_csv:
        with open(args.orbit_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "prefix_sup", "tail_sup"])
            for row in orbit_envelope(op, target, args.stages):
                writer.writerow([row[0], repr(row[1]), repr(row[2])])
    if not wit.ok:
        print(f"simulation failure: {wit.failure}", file=sys.stderr)
        return EXIT_SIM_FAILED
    return 0


def cmd_plot(args) -> int:
    op, budget = load_instance(args.path)
    budget = _override_budget(budget, args)
    verdict, _ = decide(op, route="geometric", budget=budget)
    svg = render_svg(op, verdict)
    out = args.out or "instance.svg"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    if args.contour_csv:
        prof = op.profile()
        with open(args.contour_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["theta", "re", "im"])
            for row in contour_csv_rows(op.map, prof.r2):
                writer.writerow([repr(v) for v in row])
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftspec",
        description="certified J-class decisions for holomorphic images of weighted backward shifts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("path", help="instance JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget-grid", type=int, default=None, help="max grid samples")
        p.add_argument("--budget-winding", type=int, default=None, help="max contour samples")
        p.add_argument("--trunc-n", type=int, default=None, help="truncation length")
        p.add_argument("--tol", type=float, default=None, help="residual tolerance")

    p = sub.add_parser("analyze", help="spectral profile and picture")
    common(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("decide", help="J-class decision with certificates")
    common(p)
    p.add_argument("--route", choices=["geometric", "moduli", "both"], default="geometric")
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("simulate", help="mixing-witness stages toward a target")
    common(p)
    p.add_argument("--target", default=None, help="target vector JSON file (default: all ones)")
    p.add_argument("--stages", type=int, default=5)
    p.add_argument("--out", default=None, help="stage CSV output path")
    p.add_argument("--orbit-csv", default=None, help="also write the target's orbit envelope")
    p.add_argument("--jset-start", default=None,
                   help="start vector JSON: run a limit-set membership experiment instead")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("plot", help="SVG of the decision geometry")
    common(p)
    p.add_argument("--out", default=None, help="SVG output path")
    p.add_argument("--contour-csv", default=None, help="also write contour samples as CSV")
    p.set_defaults(fn=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedMapError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    raise SystemExit(main())
