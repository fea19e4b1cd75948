"""Command-line front end.

Exit codes: 0 the property holds (or the suite passed), 1 refuted,
2 usage error, 3 invalid input.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import sys
from pathlib import Path

from .equivalences import (
    is_prob_bisimulation,
    is_simulation,
    largest_simulation,
    prob_bisimilarity,
)
from .model import CarrierError, KindMismatch, System
from .orders import (
    Equality,
    KernelOf,
    MultisetInclusion,
    OrderError,
    OrderSpec,
    PowersetInclusion,
)
from .textfmt import (
    InvalidSystem,
    ParseError,
    parse_order,
    parse_partition,
    parse_relation,
    parse_system,
    render_partition,
    render_relation,
    render_system,
)
from .transforms import (
    ALPHA_KINDS,
    EnumerationCapExceeded,
    alpha_image,
    canonical_representation,
    enumerate_representations,
)

EXIT_HOLDS, EXIT_REFUTED, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3

ORDER_CHOICES = "eq | kernel-support | kernel-dm | kernel-dma | incl | file:PATH"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read(path: str) -> str:
    return Path(path).read_text()


def _system(path: str) -> System:
    return parse_system(_read(path))


def _order(text: str, kind: str) -> OrderSpec:
    if text == "eq":
        return Equality()
    if text.startswith("kernel-"):
        alpha = text.removeprefix("kernel-")
        if alpha not in ALPHA_KINDS:
            raise UsageError(f"unknown order {text!r}; choose {ORDER_CHOICES}")
        return KernelOf(alpha)
    if text == "incl":
        if kind in ("lts", "alt-gts"):
            return PowersetInclusion()
        if kind in ("mts", "alt-mts"):
            return MultisetInclusion()
        raise UsageError(f"no inclusion order on {kind}")
    if text.startswith("file:"):
        order = parse_order(_read(text.removeprefix("file:")))
        if order.kind != kind:
            raise KindMismatch(f"order file is for {order.kind}, systems are {kind}")
        return order
    raise UsageError(f"unknown order {text!r}; choose {ORDER_CHOICES}")


def _pair_systems(args) -> tuple[System, System]:
    c = _system(args.sys1)
    d = _system(args.sys2) if getattr(args, "sys2", None) else c
    if c.kind != d.kind:
        raise KindMismatch(f"{c.kind} system against {d.kind} system")
    return c, d


def _verdict_text(verdict, what: str) -> str:
    if verdict.holds:
        return f"{what}: holds\n"
    x, y = verdict.counterexample
    return f"{what}: refuted\ncounterexample: ({x}, {y})\n{verdict.detail}\n"


def cmd_check(args) -> tuple[int, str]:
    if args.what == "prob-bisim":
        if not args.partition:
            raise UsageError("check prob-bisim needs --partition")
        s = _system(args.sys1)
        P = parse_partition(_read(args.partition), frozenset(s.states))
        v = is_prob_bisimulation(s, P)
        return (EXIT_HOLDS if v else EXIT_REFUTED), _verdict_text(v, "probabilistic bisimulation")
    if not args.sys2 or not args.rel:
        raise UsageError(f"check {args.what} needs --sys1, --sys2 and --rel")
    c, d = _pair_systems(args)
    R = parse_relation(_read(args.rel), c.states, d.states)
    if args.what == "bisim":
        order, what = Equality(), "bisimulation"
    else:
        order, what = _order(args.order, c.kind), f"simulation ({args.order})"
    v = is_simulation(c, d, R, order)
    return (EXIT_HOLDS if v else EXIT_REFUTED), _verdict_text(v, what)


def cmd_compute(args) -> tuple[int, str]:
    if args.what == "prob-partition":
        return EXIT_HOLDS, render_partition(prob_bisimilarity(_system(args.sys1)))
    c, d = _pair_systems(args)
    order = Equality() if args.what == "bisimilarity" else _order(args.order, c.kind)
    return EXIT_HOLDS, render_relation(largest_simulation(c, d, order))


def cmd_image(args) -> tuple[int, str]:
    return EXIT_HOLDS, render_system(alpha_image(args.alpha, _system(args.sys1)))


def cmd_represent(args) -> tuple[int, str]:
    s = _system(args.sys1)
    if args.canonical:
        return EXIT_HOLDS, render_system(canonical_representation(s))
    reps = enumerate_representations(s, args.bound)
    return EXIT_HOLDS, f"# {len(reps)} representations\n" + "".join(render_system(r) for r in reps)


def cmd_verify(args) -> tuple[int, str]:
    from .verify.checks import PROPERTIES, run_check
    from .verify.fixtures import run_fixture_suite
    from .verify.generate import GenParams

    if args.suite == "all":
        ids = ["fixtures", *PROPERTIES]
    elif args.suite == "fixtures" or args.suite in PROPERTIES:
        ids = [args.suite]
    else:
        raise UsageError(f"unknown suite {args.suite!r}")
    params = GenParams(seed=args.seed)
    lines, failed = [], 0
    for pid in ids:
        report = run_fixture_suite() if pid == "fixtures" else run_check(pid, params, args.seeds, args.jobs)
        lines.append(report.summary())
        if report.failures:
            failed += 1
            first = report.failures[0]
            lines.extend("    " + ln for k, v in first.items() for ln in f"{k}: {v}".splitlines())
    lines.append(f"{len(ids) - failed}/{len(ids)} suites passed")
    return (EXIT_REFUTED if failed else EXIT_HOLDS), "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="multibisim", description="Bisimulation and simulation checks for transition systems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    chk = sub.add_parser("check", help="check a relation or partition")
    chk.add_argument("what", choices=["bisim", "sim", "prob-bisim"])
    chk.add_argument("--sys1", "--sys", dest="sys1", required=True)
    chk.add_argument("--sys2")
    chk.add_argument("--rel")
    chk.add_argument("--order", default="eq", help=ORDER_CHOICES)
    chk.add_argument("--partition")
    chk.set_defaults(func=cmd_check)

    comp = sub.add_parser("compute", help="compute a largest relation or partition")
    comp.add_argument("what", choices=["bisimilarity", "similarity", "prob-partition"])
    comp.add_argument("--sys1", "--sys", dest="sys1", required=True)
    comp.add_argument("--sys2")
    comp.add_argument("--order", default="eq", help=ORDER_CHOICES)
    comp.set_defaults(func=cmd_compute)

    img = sub.add_parser("image", help="apply a natural transformation")
    img.add_argument("--alpha", choices=["support", "dm", "dma"], required=True)
    img.add_argument("--sys1", "--sys", dest="sys1", required=True)
    img.set_defaults(func=cmd_image)

    rep = sub.add_parser("represent", help="F-representations of a system")
    rep.add_argument("--sys1", "--sys", dest="sys1", required=True)
    mode = rep.add_mutually_exclusive_group(required=True)
    mode.add_argument("--canonical", action="store_true")
    mode.add_argument("--bound", type=int)
    rep.set_defaults(func=cmd_represent)

    ver = sub.add_parser("verify", help="run property checks")
    ver.add_argument("--suite", default="all", help="all | P1..P10 | S-... | fixtures")
    ver.add_argument("--seeds", type=int, default=100, help="instances per property")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--jobs", type=int, default=1)
    ver.set_defaults(func=cmd_verify)
    return p


def run_command(argv: list[str]) -> tuple[int, str]:
    """Run one subcommand; returns the exit code and the rendered report."""
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "bound", None) is not None and args.bound < 1:
            raise UsageError("--bound must be >= 1")
        return args.func(args)
    except UsageError as exc:
        return EXIT_USAGE, f"usage error: {exc}\n"
    except SystemExit as exc:  # --help
        return (EXIT_HOLDS if not exc.code else EXIT_USAGE), ""
    except (ParseError, InvalidSystem, CarrierError, KindMismatch, OrderError,
            EnumerationCapExceeded, OSError, ValueError) as exc:
        return EXIT_INVALID, f"invalid input: {exc}\n"


def main(argv: list[str] | None = None) -> int:
    with contextlib.redirect_stdout(io.StringIO()) as help_text:
        code, text = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(help_text.getvalue() + text)
    return code


if __name__ == "__main__":
    sys.exit(main())
