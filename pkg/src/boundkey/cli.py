"""Command-line interface: ``boundkey <command> ...`` or ``python -m boundkey``.

Exit codes: 0 success, 1 validation failure (or nothing found), 2 usage or
input-format error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from boundkey import io as bio
from boundkey.diagrams import enumerate_diagrams, infer_diagram
from boundkey.dist import FIXTURE_TOL, Diagram, validate_unambiguous
from boundkey.errors import BoundKeyError, LoadError, NoFeasiblePoint, NoneFound
from boundkey.fixtures import FIXTURE_NAMES, load_fixture
from boundkey.keyrate import CSV_HEADER
from boundkey.optimize import OptConfig, maximize_keyrate
from boundkey.protocol import run_pipeline, steps_from_json
from boundkey.quantum import lift_state, pt_report, reduce_to_AB
from boundkey.render import render_diagram
from boundkey.report import PT_TOL, reproduce

log = logging.getLogger("boundkey")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _diagram_arg(value: str) -> Diagram:
    """A diagram file, or the name of a bundled fixture."""
    if value in FIXTURE_NAMES and not Path(value).exists():
        return load_fixture(value).diagram
    return bio.load_diagram(value)


def _schedule(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(w) for w in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad penalty schedule {text!r}") from None


def cmd_validate(args) -> int:
    P = bio.load_distribution(args.file)
    unamb = validate_unambiguous(P)
    rep = pt_report(reduce_to_AB(lift_state(P)), args.tol)
    _emit(bio.dumps({"unambiguity": unamb.to_json(), "pt": rep.to_json(), "tol": args.tol}), None)
    return 0 if unamb.ok and rep.is_pt_invariant and rep.is_ppt else 1


def cmd_lift(args) -> int:
    rho = reduce_to_AB(lift_state(bio.load_distribution(args.file)))
    _emit(bio.dumps(rho.to_json()), args.out)
    return 0


def cmd_keyrate(args) -> int:
    P = bio.load_distribution(args.file)
    channel = bio.load_channel(args.channel) if args.channel else None
    steps = []
    direction = args.direction
    if args.protocol:
        steps, proto_channel, proto_dir = steps_from_json(bio.read_json(args.protocol))
        channel = channel or proto_channel
        direction = args.direction if args.direction_given else proto_dir
    rep = run_pipeline(P, steps, channel, direction)
    if args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerow(rep.csv_row(Path(args.file).stem))
    else:
        _emit(bio.dumps(rep.to_json()), None)
    return 0


def cmd_optimize(args) -> int:
    diagram = _diagram_arg(args.diagram)
    cfg = OptConfig(
        starts=args.starts,
        seed=args.seed,
        penalty_schedule=args.penalty_schedule or OptConfig.penalty_schedule,
        d_X=args.dx,
        workers=args.workers,
        method=args.method,
    )
    res = maximize_keyrate(diagram, cfg)
    _emit(bio.dumps(res.to_json()), args.out)
    return 0 if res.feasible else 1


def cmd_enumerate(args) -> int:
    found = enumerate_diagrams(args.da, args.db, args.max_cliques)
    _emit(bio.dumps([d.to_json() for d in found]), args.out)
    log.info("%d diagram classes", len(found))
    return 0


def cmd_infer(args) -> int:
    found = infer_diagram(bio.load_pab(args.pab), args.de, args.tol)
    _emit(bio.dumps([d.to_json() for d in found]), args.out)
    return 0


def cmd_reproduce(args) -> int:
    cfg = OptConfig(starts=args.starts, seed=args.seed) if args.optimize else None
    report = reproduce(args.reinfer, cfg)
    table = report.table()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(bio.dumps(report.to_json()), encoding="utf-8")
        (out / "table.txt").write_text(table, encoding="utf-8")
        (out / "report.csv").write_text(report.csv(), encoding="utf-8")
    sys.stdout.write(table)
    return 0 if report.ok else 1


def cmd_render(args) -> int:
    _emit(render_diagram(_diagram_arg(args.diagram), args.format), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="boundkey", description="Unambiguous distributions and private bound entanglement.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("validate", help="unambiguity and PT reports for a distribution")
    s.add_argument("file")
    s.add_argument("--tol", type=float, default=PT_TOL, help="PT-invariance and PPT tolerance")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("lift", help="density matrix of the lifted AB state")
    s.add_argument("file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("keyrate", help="advantage and noisy-processing bound")
    s.add_argument("file")
    s.add_argument("--channel")
    s.add_argument("--protocol", help="public-discussion steps to run first")
    s.add_argument("--direction", default=None, choices=["A->B", "B->A"])
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_keyrate)

    s = sub.add_parser("optimize", help="maximize the key rate over a diagram")
    s.add_argument("--diagram", required=True, help="diagram file or fixture name")
    s.add_argument("--starts", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dx", type=int, default=2)
    s.add_argument("--penalty-schedule", type=_schedule)
    s.add_argument("--method", choices=["nullspace", "penalty"], default="nullspace")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("enumerate", help="diagram classes on a grid")
    s.add_argument("--da", type=int, required=True)
    s.add_argument("--db", type=int, required=True)
    s.add_argument("--max-cliques", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("infer", help="diagrams consistent with a P_AB")
    s.add_argument("--pab", required=True)
    s.add_argument("--de", type=int, required=True)
    s.add_argument("--tol", type=float, default=FIXTURE_TOL)
    s.add_argument("--out")
    s.set_defaults(func=cmd_infer)

    s = sub.add_parser("reproduce", help="report over the five bundled examples")
    s.add_argument("--out", help="directory for report.json, table.txt, report.csv")
    s.add_argument("--reinfer", action="store_true", help="re-infer diagrams instead of using the cache")
    s.add_argument("--optimize", action="store_true", help="also rerun the optimizer on each diagram")
    s.add_argument("--starts", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("render", help="draw a diagram")
    s.add_argument("--diagram", required=True, help="diagram file or fixture name")
    s.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    s.add_argument("--out")
    s.set_defaults(func=cmd_render)
    return p


def _usage(parser, message: str) -> int:
    sys.stderr.write(message.rstrip() + "\n\n")
    parser.print_usage(sys.stderr)
    sys.stderr.write("\nFile formats:\n" + bio.SCHEMA_HELP)
    return 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _usage(parser, str(exc))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "keyrate":
        args.direction_given = args.direction is not None
        args.direction = args.direction or "A->B"
    try:
        return args.func(args)
    except (LoadError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
        return _usage(parser, f"error: {exc}")
    except (NoneFound, NoFeasiblePoint) as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except BoundKeyError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
