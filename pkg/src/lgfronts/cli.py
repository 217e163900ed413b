"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 model or solver error,
3 a verdict was required but came back undecided.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import __version__
from .analysis import (
    UNDECIDED,
    ClassifyCriteria,
    bound_sequences,
    classify,
    make_stop_rule,
)
from .errors import LGFrontsError
from .io import (
    RunConfig,
    load_config,
    read_series,
    write_series,
    write_snapshot,
)
from .model import DerivedConstants, ValidatedModel
from .solver import SERIES_COLUMNS, simulate
from .sweep import BRACKET_UNDECIDED, bisect_beta, run_grid


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this tool reserves 2 for
    # solver errors, so remap
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _axis_spec(text: str):
    name, sep, rest = text.partition("=")
    name = name.strip()
    if not sep or not rest or not name:
        raise argparse.ArgumentTypeError(
            f"expected NAME=V1,V2,... got {text!r}")
    try:
        values = [float(tok) for tok in rest.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric value in {text!r}")
    if not values:
        raise argparse.ArgumentTypeError(f"axis {name!r} has no values")
    return name, values


def _column_list(text: str):
    names = tuple(tok.strip() for tok in text.split(",") if tok.strip())
    for name in names:
        if name not in SERIES_COLUMNS:
            raise argparse.ArgumentTypeError(
                f"unknown column {name!r}; choose from {', '.join(SERIES_COLUMNS)}")
    if not names:
        raise argparse.ArgumentTypeError("no columns given")
    return names


def _add_run_options(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", required=True, help="YAML run configuration")
    sp.add_argument("--t-end", type=float, default=None,
                    help="override the simulated horizon")
    sp.add_argument("--dt", type=float, default=None,
                    help="override the time step")
    sp.add_argument("--nx", type=int, default=None,
                    help="override the number of outer grid cells")
    sp.add_argument("--ny", type=int, default=None,
                    help="override the number of inner grid cells")
    sp.add_argument("--domain-half-width", type=float, default=None,
                    help="override the truncation half-width")
    sp.add_argument("--record-every", type=float, default=None,
                    help="override the recording cadence")
    sp.add_argument("--seed", type=int, default=None,
                    help="accepted for interface stability; runs are "
                         "deterministic and the value is ignored")


def _load(args) -> RunConfig:
    cfg = load_config(args.config)
    repl = {}
    if args.t_end is not None:
        repl["t_end"] = args.t_end
    if args.dt is not None:
        repl["dt"] = args.dt
    if args.nx is not None:
        repl["Nx"] = args.nx
    if args.ny is not None:
        repl["Ny"] = args.ny
    if args.domain_half_width is not None:
        repl["L"] = args.domain_half_width
    disc = dataclasses.replace(cfg.disc, **repl) if repl else cfg.disc
    record = args.record_every if args.record_every is not None else cfg.record_every
    return dataclasses.replace(cfg, disc=disc, record_every=record)


def _validated(cfg: RunConfig) -> ValidatedModel:
    vm = cfg.validated()
    for w in vm.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return vm


def _criteria(cfg: RunConfig, vm: ValidatedModel) -> ClassifyCriteria:
    return ClassifyCriteria.for_model(vm, tol_span=cfg.tol_span,
                                      eps_v=cfg.eps_v, eps_speed=cfg.eps_speed)


def cmd_simulate(args) -> int:
    cfg = _load(args)
    vm = _validated(cfg)
    stop = make_stop_rule(vm.constants, _criteria(cfg, vm)) if args.early_stop else None
    res = simulate(vm, cfg.disc, record_every=cfg.record_every, stop_rule=stop)
    series_out = args.out if args.out else cfg.series_out
    snap_out = args.snapshot_out if args.snapshot_out else cfg.snapshot_out
    if series_out:
        write_series(series_out, res, vm, cfg.disc, cfg.record_every)
    if snap_out:
        write_snapshot(snap_out, res.final, vm, cfg.disc)
    h = res.health
    last = res.series[-1]
    print(f"backend={h.backend} steps={h.steps} stop={h.stop_reason} "
          f"t={last.t:.6g} span={last.span:.6g} max_v={last.max_v:.6g}")
    return 0


def cmd_classify(args) -> int:
    meta, records = read_series(args.series)
    needed = ("span_crit", "h0_crit", "lambda1", "A", "B", "ustar", "vstar",
              "b", "beta", "h0")
    missing = [k for k in needed if k not in meta]
    if missing:
        raise ValueError(
            f"series metadata is missing {', '.join(missing)}; "
            "was the file written by this tool?")
    constants = DerivedConstants(
        span_crit=float(meta["span_crit"]), h0_crit=float(meta["h0_crit"]),
        lambda1=float(meta["lambda1"]), A=float(meta["A"]), B=float(meta["B"]),
        coexistence=(float(meta["ustar"]), float(meta["vstar"])))
    B = constants.B
    crit = ClassifyCriteria(
        eps_v=1e-6 * B,
        eps_speed=1e-6 * float(meta["beta"]) * B / float(meta["h0"]),
        tol_span=args.tol_span,
        theory_valid=float(meta["b"]) < 1.0)
    cls = classify(records, constants, crit)
    decided = "-" if cls.decided_at is None else f"{cls.decided_at:.6g}"
    print(f"verdict={cls.verdict} rule={cls.rule or '-'} decided_at={decided} "
          f"span={cls.span:.6g} span_crit={cls.span_crit:.6g} "
          f"max_v={cls.max_v:.6g} theory_valid={str(cls.theory_valid).lower()}")
    return 3 if cls.verdict == UNDECIDED else 0


def cmd_bisect_beta(args) -> int:
    cfg = _load(args)
    vm = _validated(cfg)
    crit = _criteria(cfg, vm)
    br = bisect_beta(vm, cfg.disc, args.beta_lo, args.beta_hi,
                     width_tol=args.width_tol, crit=crit,
                     record_every=cfg.record_every, run_cap=args.run_cap)
    for beta, verdict in br.history:
        print(f"probe beta={beta:.10g} verdict={verdict}")
    print(f"bracket=[{br.lo:.10g}, {br.hi:.10g}] width={br.width:.6g} "
          f"runs={br.runs} status={br.status}")
    if br.status == BRACKET_UNDECIDED:
        print(f"undecided at beta={br.undecided_beta:.10g}; raise t_end "
              "or loosen the thresholds", file=sys.stderr)
        return 3
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    vm = _validated(cfg)
    axes: dict[str, list[float]] = {}
    for name, values in args.axis:
        if name in axes:
            raise ValueError(f"axis {name!r} given twice")
        axes[name] = values
    grid = run_grid(vm, cfg.disc, axes, crit=_criteria(cfg, vm),
                    record_every=cfg.record_every,
                    run_cap=args.run_cap, workers=args.workers)
    lines = []
    for row in grid.rows:
        kv = " ".join(f"{n}={v:.10g}" for n, v in zip(grid.axis_names, row.values))
        decided = "-" if row.decided_at is None else f"{row.decided_at:.6g}"
        line = (f"{kv} verdict={row.verdict} decided_at={decided} "
                f"span={row.span:.6g} max_v={row.max_v:.6g}")
        if row.error:
            line += f" error={row.error}"
        lines.append(line)
        print(line)
    for note in grid.anomalies:
        print(f"anomaly: {note}", file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("# columns: " + " ".join(grid.axis_names)
                     + " verdict decided_at span max_v\n")
            for row in grid.rows:
                vals = " ".join("%.17g" % v for v in row.values)
                decided = "nan" if row.decided_at is None else "%.17g" % row.decided_at
                fh.write(f"{vals} {row.verdict} {decided} "
                         f"{row.span:.17g} {row.max_v:.17g}\n")
    return 0


def cmd_thresholds(args) -> int:
    cfg = _load(args)
    vm = _validated(cfg)
    c = vm.constants
    print(f"span_crit = {c.span_crit!r}")
    print(f"h0_crit = {c.h0_crit!r}")
    print(f"lambda1 = {c.lambda1!r}")
    print(f"A = {c.A!r}")
    print(f"B = {c.B!r}")
    print(f"ustar = {c.coexistence[0]!r}")
    print(f"vstar = {c.coexistence[1]!r}")
    print(f"gstar = {vm.init.gstar!r}")
    print(f"hstar = {vm.init.hstar!r}")
    print(f"theory_valid = {str(vm.params.b < 1.0).lower()}")
    return 0


def cmd_bounds(args) -> int:
    bs = bound_sequences(args.a, args.b, args.imax)
    print("# i lower upper")
    for i, (lo, up) in enumerate(zip(bs.lower, bs.upper), start=1):
        print("%4d %.17g %.17g" % (i, lo, up))
    print(f"# limit = {bs.limit!r}")
    return 0


def cmd_plot_data(args) -> int:
    _, records = read_series(args.series)
    lines = []
    for rec in records:
        vals = []
        for name in args.columns:
            v = getattr(rec, name)
            vals.append("%d" % v if name == "floor_hits" else "%.17g" % v)
        lines.append(" ".join(vals))
    text = "# " + " ".join(args.columns) + "\n" + "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lgfronts",
        description="Prey-predator dynamics with a moving predator range: "
                    "runs, verdicts, thresholds and parameter sweeps.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True, metavar="COMMAND")

    sp = sub.add_parser("simulate", help="run the solver and write result files")
    _add_run_options(sp)
    sp.add_argument("--out", default=None, help="series output path")
    sp.add_argument("--snapshot-out", default=None, help="final-profile output path")
    sp.add_argument("--early-stop", action="store_true",
                    help="stop as soon as a verdict fires")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("classify", help="classify a recorded series file")
    sp.add_argument("series", help="series file written by simulate")
    sp.add_argument("--tol-span", type=float, default=0.02,
                    help="relative slack on the critical span (default 0.02)")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("bisect-beta",
                        help="bracket the expansion-rate threshold")
    _add_run_options(sp)
    sp.add_argument("--beta-lo", type=float, required=True)
    sp.add_argument("--beta-hi", type=float, required=True)
    sp.add_argument("--width-tol", type=float, default=0.05)
    sp.add_argument("--run-cap", type=int, default=64)
    sp.set_defaults(func=cmd_bisect_beta)

    sp = sub.add_parser("sweep", help="classify a cartesian parameter grid")
    _add_run_options(sp)
    sp.add_argument("--axis", type=_axis_spec, action="append", required=True,
                    metavar="NAME=V1,V2,...",
                    help="sweep axis; repeat for more axes")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--run-cap", type=int, default=256)
    sp.add_argument("--out", default=None, help="write the table here too")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("thresholds",
                        help="print the derived constants for a config")
    _add_run_options(sp)
    sp.set_defaults(func=cmd_thresholds)

    sp = sub.add_parser("bounds",
                        help="print the iterative prey bounds and their limit")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--imax", type=int, default=20)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("plot-data",
                        help="extract plain columns from a series file")
    sp.add_argument("series", help="series file written by simulate")
    sp.add_argument("--columns", type=_column_list,
                    default=("t", "g", "h", "span", "max_v"),
                    help="comma-separated column names (default t,g,h,span,max_v)")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.set_defaults(func=cmd_plot_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LGFrontsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
