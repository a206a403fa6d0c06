"""Command line entry point: ``daopf <command> [--config FILE] [--key value ...]``.

Any option not listed for a command is taken as a configuration override,
e.g. ``--pv_capacity 50`` or ``--uncertainty.k1 2.5``.
Exit codes: 0 success, 2 infeasible, 3 bad input, 4 numerical trouble.
"""
import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import kernels
from .case_io import write_json
from .dcopf import extract_dispatch
from .errors import DaopfError, ValidationError
from .lp_core import dump_lp
from .scheduler import (
    analyse_hour, bench, default_config_path, hour_instance, load_config, load_events, load_inputs,
    run_events, run_schedule, solve_hour,
)

log = logging.getLogger("daopf")


def _overrides(extra):
    out = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or len(tok) == 2:
            raise SystemExit(f"daopf: unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        elif i + 1 < len(extra):
            value = extra[i + 1]
            i += 2
        else:
            raise SystemExit(f"daopf: option {tok} needs a value")
        out[key] = value
    return out


def _parser():
    p = argparse.ArgumentParser(prog="daopf", description="Day-ahead DC-OPF with post-optimal uncertainty handling")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, help_, hour=False):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", type=Path, default=None, help="run config (TOML); defaults to the 30-bus fixture")
        sp.add_argument("--out", type=Path, default=None, help="output directory (overrides output_dir)")
        if hour:
            sp.add_argument("--hour", type=int, required=True)
        return sp

    sp = command("solve", "solve one hour and print the dispatch", hour=True)
    sp.add_argument("--dump-lp", type=Path, default=None, help="write A, b, c and the optimal basis as text")
    command("schedule", "solve the full horizon and write report tables")
    sp = command("events", "apply an event script on the retained bases")
    sp.add_argument("--events", type=Path, default=None, help="event CSV (overrides the config)")
    sp = command("sa", "sensitivity ranges for PV injection at buses", hour=True)
    sp.add_argument("--bus", type=int, action="append", default=None)
    command("itr", "individual tolerance ranges for bus loads", hour=True)
    command("confidence", "confidence levels of the ranges", hour=True)
    sp = command("bench", "time the post-optimal operations against a cold solve")
    sp.add_argument("--repeat", type=int, default=100)
    sp.add_argument("--bench-hour", type=int, default=None)
    sp.add_argument("--kernels", choices=("compiled", "python"), default=None)
    return p


def _schedule_until(cfg, hour):
    case, profile = load_inputs(cfg)
    if not 1 <= hour <= profile.H:
        raise ValidationError(f"hour {hour} outside 1..{profile.H}", "hour")
    prev = None
    for h in range(1, hour + 1):
        inst = hour_instance(case, profile, h, prev)
        sol, rowmap = solve_hour(case, inst, cfg.reference_bus, cfg.simplex_options())
        prev = sol.x[:rowmap.ng]
    return case, inst, sol, rowmap


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _print_rows(header, rows, out):
    out.write(",".join(header) + "\n")
    for r in rows:
        out.write(",".join(_fmt(v) for v in r) + "\n")


def run(args, extra, out=None):
    out = out or sys.stdout
    overrides = _overrides(extra)
    if args.out is not None:
        overrides["output_dir"] = str(args.out)
    if getattr(args, "events", None) is not None:
        overrides["events"] = str(args.events)
    cfg = load_config(args.config or default_config_path(), overrides)

    if args.command == "solve":
        case, inst, sol, rowmap = _schedule_until(cfg, args.hour)
        if args.dump_lp:
            dump_lp(sol.lp, args.dump_lp, basis=sol.basis)
        d = extract_dispatch(sol, rowmap)
        out.write(f"hour {args.hour}: objective {sol.objective:.10g}, {sol.iterations} pivots\n")
        _print_rows(("generator", "bus", "p_mw"),
                    [(g.id, g.bus, float(d.gen_mw[k])) for k, g in enumerate(case.generators)], out)
        return 0

    if args.command == "schedule":
        rep = run_schedule(cfg)
        paths = rep.write()
        out.write(f"{len(rep.hours)} hours, total cost {rep.total_cost:.10g}\n")
        for p in paths:
            out.write(f"wrote {p}\n")
        return 0

    if args.command == "events":
        if cfg.events_path is None:
            raise ValidationError("no event script: set 'events' in the config or pass --events", "events")
        rep = run_schedule(cfg, analyse=False)
        events = load_events(cfg.events_path, rep.case, len(rep.hours))
        er = run_events(cfg, events, rep)
        paths = er.write(cfg.output_dir)
        out.write(f"{len(er.outcomes)} events, {er.fallbacks} re-optimized\n")
        for p in paths:
            out.write(f"wrote {p}\n")
        return 0

    if args.command in ("sa", "itr", "confidence"):
        case, inst, sol, rowmap = _schedule_until(cfg, args.hour)
        if args.command == "sa" and args.bus:
            cfg = replace(cfg, analysis_buses=tuple(args.bus))
        res = analyse_hour(cfg, case, inst, sol, rowmap)
        if args.command == "sa":
            rows = [(b, r.pv_mw, r.pv_delta_min, r.pv_delta_max, r.pv_min, r.pv_max)
                    for b, r in res["sa"].items() if not args.bus or b in args.bus]
            _print_rows(("bus", "pv_mw", "pv_delta_min", "pv_delta_max", "pv_min", "pv_max"), rows, out)
        elif args.command == "itr":
            t = res["itr"]
            rows = [(bus.id, float(t.loads[j]), float(t.dec[j]), float(t.inc[j]))
                    for j, bus in enumerate(case.buses)]
            _print_rows(("bus", "load_mw", "dec_mw", "inc_mw"), rows, out)
            out.write(f"total,{t.loads.sum():.6g},{t.total_dec:.6g},{t.total_inc:.6g}\n")
        else:
            rows = [(c.entity, c.model, c.lower, c.upper, "n/a" if c.confidence is None else c.confidence)
                    for c in res["confidence"]]
            _print_rows(("entity", "model", "lower_mw", "upper_mw", "confidence"), rows, out)
        return 0

    if args.command == "bench":
        previous = kernels.use_backend(args.kernels) if args.kernels else None
        try:
            rep = bench(cfg, repeat=args.repeat, hour=args.bench_hour)
        finally:
            if previous is not None:
                kernels.use_backend(previous)
        out.write(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n")
        if args.out is not None:
            write_json(Path(cfg.output_dir) / "bench.json", rep.to_dict())
        return 0
    raise AssertionError(args.command)


def main(argv=None):
    args, extra = _parser().parse_known_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args, extra)
    except DaopfError as exc:
        print(f"daopf: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"daopf: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
