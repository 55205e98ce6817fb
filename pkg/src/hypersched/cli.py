"""Command-line entry point (``hypersched``)."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, harness
from .exact import build_fcs_model, build_hfs_model, export_lp, solve
from .llf import admit_sequence, schedule_flow_llf, trace_to_jsonl
from .model import ModelError, Schedule, flows_to_csv, hypercycle_of, load_flows
from .tecg import build_tecg
from .verify import verify_schedule


def _topology(text: str, seed: int = 0):
    """``afdx``, ``erdos_renyi:n=50,p=0.2`` or a topology JSON file."""
    if ":" in text:
        name, _, params = text.partition(":")
        kw = dict(item.split("=", 1) for item in params.split(",") if item)
        return harness.gen_topology(name, kw.get("n"), kw.get("p"), int(kw.get("seed", seed)))
    return harness.gen_topology(text, seed=seed)


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _base(args):
    topo = _topology(args.topology, args.seed)
    flows = load_flows(args.flows)
    hc = hypercycle_of(flows)
    if getattr(args, "gamma", None):
        hc = type(hc)(args.gamma, hc.slot_duration_us)
    tecg = build_tecg(topo, hc)
    if getattr(args, "occupied", None):
        tecg.restore(json.loads(Path(args.occupied).read_text()))
    return topo, flows, tecg


def cmd_topo(args) -> int:
    topo = _topology(args.name, args.seed)
    _emit(topo.to_json() + "\n", args.output)
    return 0


def cmd_flows(args) -> int:
    topo = _topology(args.topology, args.seed)
    delay = args.delay if args.delay == "equal_cycle" else int(args.delay)
    cfg = harness.FlowGenConfig(
        count=args.count,
        cycles=[int(c) for c in args.cycles.split(",")],
        delay=delay,
        balanced=not args.unbalanced,
        arrival_max=args.arrival_max,
        seed=args.seed,
    )
    _emit(flows_to_csv(harness.gen_flows(cfg, topo)), args.output)
    return 0


def cmd_schedule(args) -> int:
    _, flows, tecg = _base(args)
    if args.scheme in ("hfs_exact", "fcs_exact"):
        build = build_hfs_model if args.scheme == "hfs_exact" else build_fcs_model
        res = solve(build(tecg, flows), time_limit=args.time_limit, method=args.method)
        payload = res.to_dict()
        payload["rejected"] = sorted(k for k, ok in res.schedule.admitted.items() if not ok)
    else:
        trace: list = []
        if args.scheme == "hfs_llf":
            sched = admit_sequence(tecg, flows, schedule_flow_llf, trace=trace)
        else:
            from . import baselines
            sched = admit_sequence(tecg, flows, baselines.SCHEMES[args.scheme], trace=trace,
                                   scheme=args.scheme)
        payload = sched.to_dict()
        if args.trace:
            Path(args.trace).write_text(trace_to_jsonl(trace))
    payload["scheme"] = args.scheme
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    return 0


def cmd_verify(args) -> int:
    _, flows, tecg = _base(args)
    schedule = Schedule.from_dict(json.loads(Path(args.schedule).read_text()))
    report = verify_schedule(tecg, flows, schedule, args.mode)
    _emit(report.to_json() + "\n", args.output)
    return 0 if report.ok else 1


def cmd_count(args) -> int:
    _, flows, tecg = _base(args)
    _emit(analysis.count_report(tecg, flows), args.output)
    return 0


def _index_set(text: str) -> analysis.IndexSet:
    o, lam = (int(x) for x in text.split(","))
    return analysis.IndexSet(o, lam)


def cmd_analyze(args) -> int:
    if args.collides:
        a, b = (_index_set(t) for t in args.collides)
        print(json.dumps({"collides": analysis.collides(a, b)}))
        return 0
    a = _index_set(args.blocked)
    slots = sorted(analysis.blocked_slots(a, args.other_cycle, args.horizon))
    print(json.dumps({"blocked": slots}))
    return 0


def cmd_export_lp(args) -> int:
    _, flows, tecg = _base(args)
    build = build_hfs_model if args.mode == "hfs" else build_fcs_model
    model = build(tecg, flows)
    export_lp(model, args.output)
    counts = model.row_counts()
    print(json.dumps({"variables": len(model.variables), "rows": dict(sorted(counts.items()))}))
    return 0


def cmd_experiment(args) -> int:
    if args.preset:
        cfg = harness.preset(args.preset)
    else:
        cfg = harness.ExperimentConfig.from_dict(json.loads(Path(args.config).read_text()))
    if args.output:
        cfg.output = args.output
    if args.no_timing:
        cfg.timing = False
    if args.time_limit:
        cfg.time_limit = args.time_limit
    result = harness.run_experiment(cfg)
    sys.stdout.write(harness.results_csv(result))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypersched", description="TTEthernet flow scheduling toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, flows=True):
        sp.add_argument("--topology", required=True, help="builtin name, name:k=v,... or JSON file")
        if flows:
            sp.add_argument("--flows", required=True, help="flow CSV")
            sp.add_argument("--occupied", help="JSON list of pre-occupied edges")
            sp.add_argument("--gamma", type=int, help="hypercycle override (default: lcm of cycles)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("-o", "--output")

    sp = sub.add_parser("topo", help="emit a builtin topology as JSON")
    sp.add_argument("name")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_topo)

    sp = sub.add_parser("flows", help="generate a flow CSV")
    common(sp, flows=False)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--cycles", required=True, help="comma-separated cycle set")
    sp.add_argument("--delay", default="equal_cycle")
    sp.add_argument("--arrival-max", type=int)
    sp.add_argument("--unbalanced", action="store_true", help="draw cycles at random")
    sp.set_defaults(func=cmd_flows)

    sp = sub.add_parser("schedule", help="admit flows with one scheme")
    common(sp)
    sp.add_argument("--scheme", required=True, choices=harness.SCHEMES)
    sp.add_argument("--time-limit", type=float, default=60.0)
    sp.add_argument("--method", default="auto", choices=("auto", "bnb", "milp"))
    sp.add_argument("--trace", help="write the admission trace as JSON lines")
    sp.set_defaults(func=cmd_schedule)

    sp = sub.add_parser("verify", help="check a schedule; exit 1 on violations")
    common(sp)
    sp.add_argument("--schedule", required=True)
    sp.add_argument("--mode", choices=("hfs", "fcs"), default="hfs")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("count-solutions", help="per-flow feasible path counts (FCS and HFS)")
    common(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("analyze", help="gcd collision and blocking predicates")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--collides", nargs=2, metavar="O,CYCLE")
    g.add_argument("--blocked", metavar="O,CYCLE")
    sp.add_argument("--other-cycle", type=int, default=1)
    sp.add_argument("--horizon", type=int, default=60)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("export-lp", help="write the exact model in CPLEX LP format")
    common(sp)
    sp.add_argument("--mode", choices=("hfs", "fcs"), default="hfs")
    sp.set_defaults(func=cmd_export_lp)

    sp = sub.add_parser("experiment", help="run an experiment config or preset")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--config")
    g.add_argument("--preset", choices=harness.PRESETS)
    sp.add_argument("--output", help="directory for results.csv/json and plot.csv")
    sp.add_argument("--time-limit", type=float)
    sp.add_argument("--no-timing", action="store_true", help="blank wall_ms for byte-stable output")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "export-lp" and not args.output:
        print("export-lp needs -o/--output", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ModelError, OverflowError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
