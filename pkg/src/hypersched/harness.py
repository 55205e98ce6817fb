"""Topologies, flow generation and experiment scenarios.

Builtin topologies (node ids are strings; every cable is full duplex):

* ``afdx``    two switches ``sw1``-``sw2``; end systems ``es1..es5`` dual-homed
              to both switches, ``es6`` on ``sw1`` and ``es7`` on ``sw2``
              (9 nodes, 13 cables, 26 directed links)
* ``ladder``  rails ``a1-a2-a3-a4`` and ``b1-b2-b3-b4`` with rungs at
              positions 1, 2 and 4 (8 nodes, 9 cables, 18 directed links)
* ``erdos_renyi``  G(n, p) from networkx, both directions per edge
* ``fig1``    line ``s-a-d``; ``fig1b`` diamond ``s-{a,b}-d``;
  ``single_link`` one directed link ``s->d``

The AFDX and LADDER adjacencies are reconstructions that only match the
published node and link counts.
"""
from __future__ import annotations

import csv
import io
import json
import random
import time
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Optional, Union

import networkx as nx

from . import baselines
from .exact import build_fcs_model, build_hfs_model, solve
from .llf import admit_sequence, schedule_flow_llf
from .model import (
    FlowSpec,
    Hypercycle,
    ModelError,
    Schedule,
    Topology,
    hypercycle_of,
    lcm,
    load_topology,
)
from .tecg import Tecg, build_tecg
from .verify import verify_schedule

SCHEMES = ("hfs_exact", "fcs_exact", "hfs_llf", "bfs_s", "iras", "jras_tseg")
RESULT_FIELDS = ("scheme", "flows_given", "flows_admitted", "packets_admitted", "wall_ms", "verified")
SLOT_US = 15.0
LINK_GBPS = 1.0


# -- topologies ---------------------------------------------------------------

def afdx() -> Topology:
    cables = [("sw1", "sw2")]
    for i in range(1, 6):
        cables += [(f"es{i}", "sw1"), (f"es{i}", "sw2")]
    cables += [("es6", "sw1"), ("es7", "sw2")]
    nodes = ["sw1", "sw2"] + [f"es{i}" for i in range(1, 8)]
    return Topology.duplex(nodes, cables)


def ladder() -> Topology:
    cables = [(f"a{i}", f"a{i + 1}") for i in range(1, 4)]
    cables += [(f"b{i}", f"b{i + 1}") for i in range(1, 4)]
    cables += [("a1", "b1"), ("a2", "b2"), ("a4", "b4")]
    nodes = [f"a{i}" for i in range(1, 5)] + [f"b{i}" for i in range(1, 5)]
    return Topology.duplex(nodes, cables)


def erdos_renyi(n: int, p: float, seed: int = 0) -> Topology:
    if n < 2:
        raise ModelError("erdos_renyi needs n >= 2")
    if not 0 < p <= 1:
        raise ModelError("erdos_renyi needs p in (0, 1]")
    g = nx.erdos_renyi_graph(n, p, seed=seed)
    return Topology.duplex([f"n{i}" for i in range(n)], [(f"n{u}", f"n{v}") for u, v in g.edges()])


def fig1_line() -> Topology:
    return Topology.duplex(["s", "a", "d"], [("s", "a"), ("a", "d")])


def fig1b_diamond() -> Topology:
    return Topology.duplex(["s", "a", "b", "d"], [("s", "a"), ("s", "b"), ("a", "d"), ("b", "d")])


def single_link() -> Topology:
    return Topology(["s", "d"], [("s", "d")])


_BUILTIN = {
    "afdx": afdx,
    "ladder": ladder,
    "fig1": fig1_line,
    "fig1b": fig1b_diamond,
    "single_link": single_link,
}


def gen_topology(name: Union[str, dict], n: Optional[int] = None, p: Optional[float] = None,
                 seed: int = 0) -> Topology:
    """Builtin topology by name, ``{"name": "erdos_renyi", "n":.., "p":..}``, or a JSON file."""
    if isinstance(name, dict):
        spec = dict(name)
        return gen_topology(spec.pop("name"), spec.get("n"), spec.get("p"), spec.get("seed", seed))
    if name in ("erdos_renyi", "er"):
        if n is None or p is None:
            raise ModelError("erdos_renyi needs n and p")
        return erdos_renyi(int(n), float(p), seed)
    if name in _BUILTIN:
        return _BUILTIN[name]()
    if Path(name).suffix == ".json" and Path(name).exists():
        return load_topology(name)
    raise ModelError(f"unknown topology {name!r}")


# -- flows --------------------------------------------------------------------

@dataclass
class FlowGenConfig:
    count: int
    cycles: list
    delay: Union[str, int] = "equal_cycle"  # or a fixed slot count
    balanced: bool = True  # cycles assigned round-robin (equal shares)
    arrival_max: Optional[int] = None  # default: the hypercycle
    seed: int = 0

    @property
    def gamma(self) -> int:
        return lcm(self.cycles)

    @classmethod
    def from_dict(cls, d: dict) -> "FlowGenConfig":
        return cls(**d)


def gen_flows(config: FlowGenConfig, topology: Topology) -> list:
    """Random flows with distinct (source, destination) pairs.

    The pair order depends only on the seed and the topology, so a smaller
    ``count`` yields a prefix of a larger one.
    """
    if config.count < 0:
        raise ModelError("flow count must be >= 0")
    if not config.cycles:
        raise ModelError("empty cycle set")
    pairs = list(permutations(topology.nodes, 2))
    if config.count > len(pairs):
        raise ModelError(
            f"pair exhaustion: {config.count} flows requested but only {len(pairs)} distinct "
            f"(source, destination) pairs exist; short by {config.count - len(pairs)}")
    random.Random(f"{config.seed}-pairs").shuffle(pairs)
    cyc_rng = random.Random(f"{config.seed}-cycles")
    arr_rng = random.Random(f"{config.seed}-arrivals")
    top = config.arrival_max or config.gamma
    flows = []
    for i in range(config.count):
        if config.balanced:
            cycle = config.cycles[i % len(config.cycles)]
        else:
            cycle = cyc_rng.choice(config.cycles)
        arrival = arr_rng.randint(1, top)
        delay = cycle if config.delay == "equal_cycle" else int(config.delay)
        s, d = pairs[i]
        flows.append(FlowSpec(i + 1, s, d, arrival, cycle, delay))
    return flows


# -- running schemes ----------------------------------------------------------

@dataclass
class RunResult:
    scheme: str
    schedule: Schedule
    wall_s: float
    status: str = "done"
    verified: bool = False
    violations: int = 0


VERIFY_MODE = {
    "hfs_exact": "hfs",
    "hfs_llf": "hfs",
    "bfs_s": "fcs",
    "fcs_exact": "fcs",
    "iras": "fcs",
    "jras_tseg": "fcs",
}


def run_scheme(scheme: str, tecg: Tecg, flows: list, time_limit: float = 60.0) -> RunResult:
    """Run one scheme on a private copy of ``tecg`` and verify its output."""
    if scheme not in VERIFY_MODE:
        raise ModelError(f"unknown scheme {scheme!r}")
    work = tecg.copy()
    t0 = time.perf_counter()
    status = "done"
    if scheme in ("hfs_exact", "fcs_exact"):
        build = build_hfs_model if scheme == "hfs_exact" else build_fcs_model
        res = solve(build(work, flows), time_limit=time_limit)
        schedule, status = res.schedule, res.status
    elif scheme == "hfs_llf":
        schedule = admit_sequence(work, flows, schedule_flow_llf)
    else:
        schedule = admit_sequence(work, flows, baselines.SCHEMES[scheme], scheme=scheme)
    wall = time.perf_counter() - t0
    report = verify_schedule(tecg, flows, schedule, VERIFY_MODE[scheme])
    return RunResult(scheme, schedule, wall, status, report.ok, len(report.violations))


# -- experiments --------------------------------------------------------------

@dataclass
class ExperimentConfig:
    topology: Union[str, dict]
    schedulers: list
    flow_gen: Optional[FlowGenConfig] = None
    flows: Optional[list] = None  # explicit flows instead of flow_gen
    sizes: Optional[list] = None  # flow-count prefixes; default: all flows
    time_limit: float = 60.0
    output: Optional[str] = None
    timing: bool = True
    gamma: Optional[int] = None
    notes: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if d.get("flow_gen") is not None:
            d["flow_gen"] = FlowGenConfig.from_dict(d["flow_gen"])
        if d.get("flows") is not None:
            d["flows"] = [f if isinstance(f, FlowSpec) else FlowSpec(**f) for f in d["flows"]]
        return cls(**d)


def preset(name: str) -> ExperimentConfig:
    if name == "fig1":
        return ExperimentConfig(
            topology="fig1",
            schedulers=["hfs_exact", "fcs_exact", "hfs_llf"],
            flows=[FlowSpec(1, "s", "d", 1, 2, 2), FlowSpec(2, "s", "d", 2, 3, 3)],
        )
    if name == "gain":
        return ExperimentConfig(
            topology="single_link",
            schedulers=["hfs_exact", "fcs_exact", "hfs_llf"],
            flows=[FlowSpec(i + 1, "s", "d", 1, c, c) for i, c in enumerate((3, 5, 7))],
            notes=["cycle set {3,5,7} (hypercycle 105) stands in for {3,5,7,11,13,17}"],
        )
    if name == "table1":
        return ExperimentConfig(
            topology="afdx",
            schedulers=["hfs_llf", "hfs_exact"],
            flow_gen=FlowGenConfig(count=54, cycles=[2, 3, 5], balanced=False, seed=1),
            sizes=list(range(18, 55, 6)),
        )
    if name == "random":
        return ExperimentConfig(
            topology={"name": "erdos_renyi", "n": 50, "p": 0.2, "seed": 1},
            schedulers=["hfs_llf", "bfs_s", "iras", "jras_tseg"],
            flow_gen=FlowGenConfig(count=480, cycles=[3, 4, 5], arrival_max=60, seed=1),
        )
    raise ModelError(f"unknown preset {name!r}")


PRESETS = ("fig1", "gain", "table1", "random")


def experiment_flows(config: ExperimentConfig, topology: Topology) -> list:
    if config.flows is not None:
        return list(config.flows)
    if config.flow_gen is None:
        raise ModelError("experiment needs flows or flow_gen")
    return gen_flows(config.flow_gen, topology)


def experiment_hypercycle(config: ExperimentConfig, flows: list) -> Hypercycle:
    if config.gamma:
        return Hypercycle(config.gamma, SLOT_US)
    if config.flow_gen is not None:
        return Hypercycle(config.flow_gen.gamma, SLOT_US)
    return hypercycle_of(flows, SLOT_US)


def run_experiment(config: Union[ExperimentConfig, dict]) -> dict:
    """Run every scheduler on every flow-count prefix; returns rows plus metadata."""
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    for s in config.schedulers:
        if s not in SCHEMES:
            raise ModelError(f"unknown scheduler {s!r}")
    topo = gen_topology(config.topology)
    flows = experiment_flows(config, topo)
    hc = experiment_hypercycle(config, flows)
    base = build_tecg(topo, hc)
    sizes = config.sizes or [len(flows)]
    rows = []
    for n in sizes:
        subset = flows[:n]
        for scheme in config.schedulers:
            row = {"scheme": scheme, "flows_given": n}
            try:
                r = run_scheme(scheme, base, subset, config.time_limit)
            except Exception as exc:  # a failing scheme only loses its own row
                row.update(flows_admitted="", packets_admitted="", wall_ms="",
                           verified=False, status=f"error: {exc}")
            else:
                row.update(
                    flows_admitted=len(r.schedule.admitted_ids),
                    packets_admitted=r.schedule.packets_admitted(),
                    wall_ms=round(r.wall_s * 1000, 3) if config.timing else "",
                    verified=r.verified,
                    status=r.status,
                )
            if scheme in baselines.SCHEMES:
                row["fidelity"] = baselines.FIDELITY
            rows.append(row)
    result = {
        "topology": config.topology,
        "nodes": len(topo.nodes),
        "links": len(topo.links),
        "gamma": hc.gamma,
        "slot_us": hc.slot_duration_us,
        "link_gbps": LINK_GBPS,
        "notes": list(config.notes),
        "rows": rows,
    }
    if config.output:
        write_results(result, config.output)
    return result


def results_csv(result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_FIELDS)
    for row in result["rows"]:
        w.writerow([row[k] for k in RESULT_FIELDS])
    return buf.getvalue()


def plot_csv(result: dict) -> str:
    """Long format: one ``scheme,flows_given,metric,value`` line per number."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "flows_given", "metric", "value"])
    for row in result["rows"]:
        for metric in ("flows_admitted", "packets_admitted", "wall_ms"):
            w.writerow([row["scheme"], row["flows_given"], metric, row[metric]])
    return buf.getvalue()


def write_results(result: dict, outdir) -> Path:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(results_csv(result))
    (out / "results.json").write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    (out / "plot.csv").write_text(plot_csv(result))
    return out
