"""Command-line interface: ``crown solve|gen|eval|render|bench``.

Exit codes: 0 success, 1 usage or input error, 2 layout validation failure,
3 search budget exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import gen
from .exact import SizeExceeded as ExactSizeExceeded, solve_exact
from .gap import BudgetExceeded, SizeExceeded as GapSizeExceeded
from .model import (
    MODELS, CrownError, ValidationError, evaluate, format_fraction, make_report, read_instance, read_layout,
    write_instance, write_layout,
)
from .solvers import ALGORITHMS, SolverConfig, choose_algorithm, solve
from .svg import render_svg

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3
BENCH_EXACT_MAX_N = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_instance(path: str, model: Optional[str] = None):
    inst = read_instance(_read_text(path))
    return inst.with_model(model) if model else inst


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError(f"need 1 <= LO <= HI, got {text!r}")
    return lo, hi


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _config(args) -> SolverConfig:
    try:
        return SolverConfig(epsilon=args.eps, seed=args.seed, trials=args.trials, exact_budget=args.exact_budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=MODELS, help="override the instance's contact model")
    p.add_argument("--eps", type=_rational, default=Fraction(1, 2), help="planar scheme parameter (rational)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=8, help="random bipartitions tried by general-rand")
    p.add_argument("--exact-budget", type=int, default=SolverConfig.exact_budget, help="node limit of the exact search")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crown", description="Contact representations of word networks with rectangles.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve an instance and write a layout report")
    p.add_argument("instance")
    p.add_argument("--algo", choices=ALGORITHMS, default="auto")
    _add_solver_flags(p)
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--svg", help="also render the layout to this path")

    p = sub.add_parser(
        "gen", help="generate an instance",
        description="KIND is a graph class, 'gadget' (size -n, planted matching, --extra hyperedges) or "
                    "'text' (--freq file: one 'word count' per line; --cooc file: 'word word count' per line).",
    )
    p.add_argument("kind", choices=(*gen.GEN_CLASSES, "gadget", "text"))
    p.add_argument("-n", type=int, default=8, help="vertex count, or k for gadgets")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", choices=MODELS, default="proper")
    p.add_argument("--dims", type=_range, default=(1, 20), metavar="LO:HI")
    p.add_argument("--profits", type=_range, default=(1, 9), metavar="LO:HI")
    p.add_argument("--unweighted", action="store_true")
    p.add_argument("--extra", type=int, default=0, help="gadget hyperedges beyond the planted matching")
    p.add_argument("--layout-out", help="gadget only: write the planted well-formed layout here")
    p.add_argument("--freq")
    p.add_argument("--cooc")
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--out")

    p = sub.add_parser("eval", help="validate a layout and recompute its profit")
    p.add_argument("instance")
    p.add_argument("layout")
    p.add_argument("--model", choices=MODELS)

    p = sub.add_parser("render", help="render a layout as SVG")
    p.add_argument("instance")
    p.add_argument("layout")
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--out")

    p = sub.add_parser("bench", help="run solvers over a directory of instances")
    p.add_argument("directory")
    p.add_argument("--algos", default="auto,general-det,general-rand,exact",
                   help="comma-separated algorithm list")
    _add_solver_flags(p)
    p.add_argument("--out", help="table path (default stdout)")
    p.add_argument("--reports", help="directory for one report and SVG per instance and algorithm")
    return parser


# --- commands ---------------------------------------------------------------------

def cmd_solve(args) -> int:
    inst = _load_instance(args.instance, args.model)
    report = solve(inst, args.algo, _config(args))
    _emit(write_layout(report), args.out)
    if args.svg:
        write_atomic(args.svg, render_svg(inst, report))
    if report.certified_ratio == "incumbent":
        print("search budget exceeded; reporting best layout found", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "gadget":
        spec, matching = gen.planted_gadget(args.n, args.extra, args.seed)
        inst = gen.gen_gadget(spec, args.model)
        if args.layout_out:
            report = make_report(inst, gen.gadget_layout(spec, matching), "unbounded", "gadget-planted")
            write_atomic(args.layout_out, write_layout(report))
    elif args.kind == "text":
        if not (args.freq and args.cooc):
            raise UsageError("gen text needs --freq and --cooc")
        inst = gen.gen_from_text(gen.read_frequencies(_read_text(args.freq)),
                                 gen.read_cooccurrences(_read_text(args.cooc)), args.scale, args.model)
    else:
        inst = gen.gen_random(args.kind, args.n, args.dims, args.profits, args.seed,
                              unweighted=args.unweighted, model=args.model)
    _emit(write_instance(inst), args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    inst = _load_instance(args.instance, args.model)
    report = read_layout(_read_text(args.layout))
    realized, profit = evaluate(inst, report.layout)
    print(f"valid: {len(realized)} of {len(inst.edges)} contacts realized, profit {format_fraction(profit)}")
    if report.profit != profit:
        print(f"note: report claims profit {format_fraction(report.profit)}", file=sys.stderr)
    return EXIT_OK


def cmd_render(args) -> int:
    inst = _load_instance(args.instance, args.model)
    report = read_layout(_read_text(args.layout))
    evaluate(inst, report.layout)
    _emit(render_svg(inst, report), args.out)
    return EXIT_OK


def _bench_one(path: Path, algos: Sequence[str], config: SolverConfig, model, reports_dir):
    try:
        inst = _load_instance(str(path), model)
    except CrownError as exc:
        return path.name, None, None, [(a, None, f"not an instance: {exc}") for a in algos]
    opt = solve_exact(inst, config.exact_budget) if len(inst.ids) <= BENCH_EXACT_MAX_N else None
    rows = []
    for algo in algos:
        name = choose_algorithm(inst) if algo == "auto" else algo
        try:
            rep = solve(inst, name, config)
        except CrownError as exc:
            rows.append((algo, None, str(exc).split("\n")[0]))
            continue
        rows.append((algo, rep, None))
        if reports_dir:
            stem = f"{path.stem}.{algo}"
            write_atomic(str(Path(reports_dir) / f"{stem}.json"), write_layout(rep))
            write_atomic(str(Path(reports_dir) / f"{stem}.svg"), render_svg(inst, rep))
    return path.name, inst, opt, rows


def _fmt_ratio(r) -> str:
    return r if isinstance(r, str) else format_fraction(r)


def cmd_bench(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        raise UsageError(f"not a directory: {directory}")
    algos = [a for a in args.algos.split(",") if a]
    for a in algos:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}")
    if "general-rand" in algos and args.seed == 0:
        print("warning: general-rand runs with the default seed 0", file=sys.stderr)
    if args.reports:
        Path(args.reports).mkdir(parents=True, exist_ok=True)
    config = _config(args)
    files = sorted(directory.glob("*.json"))
    threads = max(1, int(os.environ.get("CROWN_THREADS", "1") or 1))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda f: _bench_one(f, algos, config, args.model, args.reports), files))

    lines = ["instance\tn\tm\topt\talgo\tprofit\tcertificate\tprofit/opt\tbound_ok"]
    exit_code = EXIT_OK
    for name, inst, opt, rows in results:
        if inst is None:
            lines.append(f"{name}\t-\t-\t-\t-\t-\t-\t-\tskip ({rows[0][2]})")
            continue
        opt_s = format_fraction(opt.profit) if opt is not None else "-"
        for algo, rep, err in rows:
            if rep is None:
                lines.append(f"{name}\t{len(inst.ids)}\t{len(inst.edges)}\t{opt_s}\t{algo}\t-\t-\t-\tskip ({err})")
                continue
            frac, ok = "-", "-"
            if opt is not None:
                frac = format_fraction(rep.profit / opt.profit) if opt.profit else "1"
                bound = rep.ratio_value()
                if bound is not None:
                    ok = "yes" if opt.profit <= bound * rep.profit else "NO"
                    if ok == "NO":
                        exit_code = EXIT_INVALID
            lines.append(f"{name}\t{len(inst.ids)}\t{len(inst.edges)}\t{opt_s}\t{algo}\t"
                         f"{format_fraction(rep.profit)}\t{_fmt_ratio(rep.certified_ratio)}\t{frac}\t{ok}")
    _emit("\n".join(lines) + "\n", args.out)
    return exit_code


COMMANDS = {"solve": cmd_solve, "gen": cmd_gen, "eval": cmd_eval, "render": cmd_render, "bench": cmd_bench}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"crown: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        for v in exc.violations:
            print(f"invalid layout: {v}", file=sys.stderr)
        return EXIT_INVALID
    except (ExactSizeExceeded, GapSizeExceeded, BudgetExceeded) as exc:
        print(f"crown: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CrownError as exc:
        print(f"crown: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
