"""Exact solution of an :class:`IlpModel`.

Two backends share one result type:

* ``bnb``   depth-first branch and bound over flows (include first), with
            joint feasibility decided by a constraint search over packets
            (HFS) or over whole periodic flows (FCS); the bound is
            ``admitted + flows still undecided``.
* ``milp``  the model's rows handed to HiGHS through ``scipy.optimize.milp``.

``auto`` picks ``bnb`` for small flow sets and ``milp`` otherwise.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..model import PacketId, Schedule, SchedulePath
from ..tecg import PeriodicView
from .model import IlpModel

BNB_MAX_FLOWS = 6
UNIT_PATH_LIMIT = 200_000


@dataclass
class ExactResult:
    schedule: Schedule
    objective: int
    status: str  # "optimal" | "time_limit"
    method: str
    wall_s: float
    nodes: int = 0

    def to_dict(self) -> dict:
        d = self.schedule.to_dict()
        return {
            "objective": self.objective,
            "status": self.status,
            "method": self.method,
            "admitted": d["admitted"],
            "paths": d["paths"],
        }


class _Timeout(Exception):
    pass


def solve(model: IlpModel, time_limit: float = 60.0, method: str = "auto") -> ExactResult:
    if time_limit is None or time_limit <= 0:
        raise ValueError("time_limit must be positive")
    if method == "auto":
        method = "bnb" if len(model.flows) <= BNB_MAX_FLOWS else "milp"
    if method == "bnb":
        return _solve_bnb(model, time_limit)
    if method == "milp":
        return _solve_milp(model, time_limit)
    raise ValueError(f"unknown method {method!r}")


# -- branch and bound ---------------------------------------------------------

def _flow_units(model: IlpModel, flow) -> list:
    """Units of one flow; each unit is a list of ``(edge set, paths)`` choices."""
    if model.mode == "fcs":
        view = PeriodicView(model.tecg, flow)
        alts = []
        for p in view.paths(UNIT_PATH_LIMIT):
            copies = view.expand(p)
            edges = frozenset(h for c in copies for h in c.comm_hops)
            alts.append((edges, tuple(copies)))
        return [alts]
    units = []
    for seq in range(1, model.tecg.gamma // flow.cycle + 1):
        view = model.views[PacketId(flow.id, seq)]
        units.append([(frozenset(p.comm_hops), (p,)) for p in view.paths(UNIT_PATH_LIMIT)])
    return units


class _Csp:
    def __init__(self, deadline: float):
        self.deadline = deadline
        self.calls = 0

    def tick(self):
        self.calls += 1
        if self.calls % 256 == 0 and time.monotonic() > self.deadline:
            raise _Timeout

    def solve(self, units: list) -> Optional[list]:
        """Pick one choice per unit with pairwise-disjoint edge sets."""
        chosen = [None] * len(units)
        used: set = set()
        remaining = set(range(len(units)))

        def rec() -> bool:
            self.tick()
            if not remaining:
                return True
            best_u, best_opts = None, None
            for u in sorted(remaining):
                opts = [a for a in units[u] if used.isdisjoint(a[0])]
                if not opts:
                    return False
                if best_opts is None or len(opts) < len(best_opts):
                    best_u, best_opts = u, opts
            remaining.discard(best_u)
            for alt in best_opts:
                used.update(alt[0])
                chosen[best_u] = alt
                if rec():
                    return True
                used.difference_update(alt[0])
            remaining.add(best_u)
            chosen[best_u] = None
            return False

        return list(chosen) if rec() else None


def _solve_bnb(model: IlpModel, time_limit: float) -> ExactResult:
    t0 = time.monotonic()
    deadline = t0 + time_limit
    csp = _Csp(deadline)
    units = {f.id: _flow_units(model, f) for f in model.flows}
    # flows with an empty unit can never be admitted
    candidates = [f for f in model.flows if all(u for u in units[f.id])]
    candidates.sort(key=lambda f: (min(len(u) for u in units[f.id]), f.id))
    best = {"n": 0, "flows": [], "choice": []}
    infeasible: list = []
    nodes = 0
    status = "optimal"

    def rec(idx: int, included: list, choice: list):
        nonlocal nodes
        nodes += 1
        if len(included) > best["n"]:
            best.update(n=len(included), flows=list(included), choice=list(choice))
        if idx == len(candidates) or len(included) + len(candidates) - idx <= best["n"]:
            return
        f = candidates[idx]
        trial = included + [f.id]
        key = frozenset(trial)
        if not any(bad <= key for bad in infeasible):
            sol = csp.solve([u for k in trial for u in units[k]])
            if sol is None:
                infeasible.append(key)
            else:
                rec(idx + 1, trial, sol)
        rec(idx + 1, included, choice)

    try:
        rec(0, [], [])
    except _Timeout:
        status = "time_limit"
    paths = {}
    for alt in best["choice"]:
        for p in alt[1]:
            paths[p.packet] = p
    admitted = {f.id: f.id in best["flows"] for f in model.flows}
    return ExactResult(Schedule(admitted, paths), best["n"], status, "bnb",
                       time.monotonic() - t0, nodes)


# -- HiGHS --------------------------------------------------------------------

def _matrix(model: IlpModel):
    from scipy.sparse import coo_matrix

    rows, cols, vals, lb, ub = [], [], [], [], []
    for r, row in enumerate(model.rows):
        for j, c in row.coeffs:
            rows.append(r)
            cols.append(j)
            vals.append(c)
        lb.append(row.rhs if row.sense == "=" else -np.inf)
        ub.append(row.rhs)
    shape = (len(model.rows), len(model.variables))
    return coo_matrix((vals, (rows, cols)), shape=shape).tocsr(), np.array(lb), np.array(ub)


def _decode(model: IlpModel, x) -> Schedule:
    admitted = {}
    paths = {}
    for f in model.flows:
        ok = x[model.chi[f.id]] > 0.5
        admitted[f.id] = bool(ok)
        if not ok:
            continue
        for seq in range(1, model.tecg.gamma // f.cycle + 1):
            pid = PacketId(f.id, seq)
            view = model.views[pid]
            out: dict = {}
            for (pos, hop), j in model.x[pid].items():
                if x[j] > 0.5:
                    out[(hop.tail, pos)] = hop
            hops = []
            node = f.source
            for pos in range(view.length):
                hop = out[(node, pos)]
                hops.append(hop)
                node = hop.head
            paths[pid] = SchedulePath(pid, tuple(hops))
    return Schedule(admitted, paths)


def _solve_milp(model: IlpModel, time_limit: float) -> ExactResult:
    from scipy.optimize import Bounds, LinearConstraint, milp

    t0 = time.monotonic()
    n = len(model.variables)
    c = np.zeros(n)
    for j in model.objective:
        c[j] = -1.0
    constraints = []
    if model.rows:
        A, lb, ub = _matrix(model)
        constraints.append(LinearConstraint(A, lb, ub))
    res = milp(c, constraints=constraints, integrality=np.ones(n), bounds=Bounds(0, 1),
               options={"time_limit": float(time_limit), "disp": False})
    status = "optimal" if res.status == 0 else "time_limit"
    if res.status not in (0, 1) and res.x is None:
        raise RuntimeError(f"MILP solver failed: {res.message}")
    if res.x is None:
        x = np.zeros(n)
    else:
        x = np.round(res.x)
    schedule = _decode(model, x)
    return ExactResult(schedule, len(schedule.admitted_ids), status, "milp",
                       time.monotonic() - t0)
