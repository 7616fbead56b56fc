"""Joint weight-search / flow-placement heuristic and its two ablation
baselines, all sharing one link-pruning loop.

Each round re-optimizes the levers the variant owns (link weights, switch
placements, or both), then tentatively removes the least-utilized physical
link and keeps the removal only if every demand still routes, every captured
volume finds room, and no active link exceeds the utilization threshold. The
loop ends at the first removal that fails.

Flows travel by ordinary ECMP forwarding until they meet an SDN switch,
which places everything it captures over explicit paths. The weight search
runs on the plain ECMP picture before any of that placement happens.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import (InitialInfeasible, InsufficientCapacity, NoPath,
                     UnroutableDemand)
from .routing import RoutingState, load_flows_ecmp
from .sdn_alloc import SdnAllocation, _candidate_paths, flow_allocation
from .topology import Topology
from .traffic import TrafficMatrix
from .weight_search import SearchConfig, neighboring_region_search

FLOW_EPS = 1e-9


@dataclass
class CommittedRound:
    """Snapshot of one committed network state, enough to re-validate it."""

    active: np.ndarray
    weights: np.ndarray
    x_lt: np.ndarray
    allocations: tuple[SdnAllocation, ...]


@dataclass
class HeateResult:
    topology: Topology               # final weights, kinds and active flags
    state: RoutingState
    allocations: tuple[SdnAllocation, ...]
    energy_saving_ratio: float
    rounds: int                      # committed physical-link removals
    trace: list[CommittedRound] = field(default_factory=list)

    @property
    def active_links(self) -> frozenset[int]:
        """Directed link ids still on."""
        return frozenset(int(l) for l in np.flatnonzero(self.topology.active))

    @property
    def active_physical(self) -> frozenset[int]:
        """Physical link indices (directed id // 2) still on."""
        return frozenset(int(p) for p in np.flatnonzero(self.topology.active[::2]))

    @property
    def max_utilization(self) -> float:
        act = self.topology.active.astype(bool)
        if not act.any():
            return 0.0
        return float(self.state.utilization[act].max())


@dataclass
class _Evaluation:
    weights: np.ndarray
    x_lt: np.ndarray
    x_l: np.ndarray
    allocations: tuple[SdnAllocation, ...]
    feasible: bool
    reason: str = ""
    mu_max: float = 0.0


def _assemble_flows(topo, weights, dem_by_dest, dest_ids, beta, allocate):
    """Route all demands at the given weights: ordinary ECMP forwarding up to
    the first switch each flow enters, then controlled placement of the
    captured volume over candidate paths. With allocate=False the switches
    forward like plain routers and no volume is captured."""
    n, m = topo.n_nodes, topo.n_links
    x_lt = np.zeros((m, n), dtype=np.float64)
    inj: list[tuple[int, int, float]] = []
    dist = np.empty(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    inj_col = np.zeros(n, dtype=np.float64)
    x_col = np.empty(m, dtype=np.float64)
    mask = topo.kinds if allocate else np.zeros(n, dtype=np.uint8)
    for t in dest_ids:
        t = int(t)
        cnt = K.dijkstra_to(t, -1, n, topo.in_ptr, topo.in_lnk, topo.link_src,
                            weights, topo.active, dist, order)
        x_col[:] = 0.0
        inj_col[:] = 0.0
        bad = K.first_sdn_capture(t, n, topo.out_ptr, topo.out_lnk,
                                  topo.link_dst, weights, topo.active,
                                  dist, order, cnt, mask,
                                  dem_by_dest[t], inj_col, x_col)
        if bad >= 0:
            raise UnroutableDemand(int(bad), t)
        for u in np.flatnonzero(inj_col > 0):
            inj.append((t, int(u), float(inj_col[u])))
        x_lt[:, t] = x_col
    allocations = []
    x_l = x_lt.sum(axis=1)
    # ascending (destination, switch); every placement sees the loads left by
    # the previous ones
    for t, u, volume in sorted(inj):
        cands = _candidate_paths(topo, weights, topo.active, x_l, u, t, beta)
        if not cands:
            raise NoPath(f"switch {u} has no candidate path to {t}")
        alloc = flow_allocation(cands, volume)
        allocations.append(alloc)
        for path, vol in alloc.assignments:
            if vol > 0.0:
                for l in path.links:
                    x_lt[l, t] += vol
                    x_l[l] += vol
    return x_lt, x_l, tuple(allocations)


def _evaluate(topo, weights, tm, dem_by_dest, dest_ids, cfg, use_weights, use_alloc):
    """One optimization pass: weight search continuing from the given weights
    when the variant owns it, then flow assembly and the feasibility verdict
    (every demand routable, every captured volume placeable, max util <= beta)."""
    w = weights.copy()
    try:
        if use_weights:
            w = neighboring_region_search(topo.with_weights(w), tm, cfg)
        x_lt, x_l, allocations = _assemble_flows(
            topo, w, dem_by_dest, dest_ids, cfg.beta, use_alloc)
    except UnroutableDemand:
        return _Evaluation(w, None, None, (), False, "unroutable")
    except (NoPath, InsufficientCapacity):
        return _Evaluation(w, None, None, (), False, "allocation")
    act = topo.active.astype(bool)
    cap = topo.capacity[act]
    mu_max = float((x_l[act] / cap).max()) if act.any() else 0.0
    feasible = mu_max <= cfg.beta + FLOW_EPS
    return _Evaluation(w, x_lt, x_l, allocations, feasible,
                       "" if feasible else "overload", mu_max)


def _prune_order(topo, x_l):
    """Physical candidates for removal, least-utilized first on the committed
    flows. A physical link's utilization is that of its busier direction:
    switching one off removes both, so the busy direction is what the removal
    must reroute. Ties fall to the lowest physical id."""
    mu = x_l / topo.capacity
    load = np.maximum(mu[::2], mu[1::2])
    phys = np.flatnonzero(topo.active[::2])
    return [int(p) for p in phys[np.lexsort((phys, load[phys]))]]


def _run(topo: Topology, tm: TrafficMatrix, cfg: SearchConfig,
         use_weights: bool, use_alloc: bool, collect_trace: bool) -> HeateResult:
    if tm.n_nodes != topo.n_nodes:
        raise ValueError("traffic matrix size does not match topology")
    dem_by_dest = np.ascontiguousarray(tm.matrix.T)
    dest_ids = tm.destinations()
    total_physical = topo.n_physical

    weights0 = np.full(topo.n_links, cfg.initial_weight, dtype=np.float64)
    cur_topo = topo.with_weights(weights0)

    # the full topology must carry the matrix under plain initial routing
    try:
        initial = load_flows_ecmp(cur_topo, tm)
    except UnroutableDemand as e:
        raise InitialInfeasible(f"initial routing: {e}") from e
    act = cur_topo.active.astype(bool)
    if act.any() and float(initial.utilization[act].max()) > cfg.beta + FLOW_EPS:
        raise InitialInfeasible("initial routing exceeds beta on the full topology")
    cur = _evaluate(cur_topo, weights0, tm, dem_by_dest, dest_ids,
                    cfg, use_weights, use_alloc)
    if not cur.feasible:
        # the search or the allocator wedged the full topology, so nothing
        # can be switched off; fall back to the plain state checked above
        return HeateResult(cur_topo, RoutingState(cur_topo, initial.x_lt),
                           (), 0.0, 0, [])

    trace: list[CommittedRound] = []

    def snapshot(t, ev):
        if collect_trace:
            trace.append(CommittedRound(t.active.copy(), ev.weights.copy(),
                                        ev.x_lt.copy(), ev.allocations))

    snapshot(cur_topo, cur)
    rounds = 0
    while cur_topo.active.any():
        candidates = _prune_order(cur_topo, cur.x_l)
        if not cfg.try_next_on_failure:
            candidates = candidates[:1]
        committed = False
        for p in candidates:
            trial_active = cur_topo.active.copy()
            trial_active[2 * p] = 0
            trial_active[2 * p + 1] = 0
            trial_topo = cur_topo.with_active(trial_active).with_weights(cur.weights)
            trial = _evaluate(trial_topo, cur.weights, tm, dem_by_dest,
                              dest_ids, cfg, use_weights, use_alloc)
            if not trial.feasible:
                continue
            rounds += 1
            cur_topo, cur = trial_topo.with_weights(trial.weights), trial
            snapshot(cur_topo, cur)
            committed = True
            break
        if not committed:
            break

    state = RoutingState(cur_topo, cur.x_lt)
    ratio = (total_physical - cur_topo.n_active_physical) / total_physical
    return HeateResult(cur_topo, state, cur.allocations, float(ratio), rounds, trace)


def run_heate(topo: Topology, tm: TrafficMatrix, cfg: SearchConfig | None = None,
              collect_trace: bool = False) -> HeateResult:
    """Joint optimization: weight search plus switch flow placement."""
    return _run(topo, tm, cfg or SearchConfig(), True, True, collect_trace)


def run_ea_ospf(topo: Topology, tm: TrafficMatrix, cfg: SearchConfig | None = None,
                collect_trace: bool = False) -> HeateResult:
    """Weight search only; switches behave as plain ECMP routers."""
    return _run(topo, tm, cfg or SearchConfig(), True, False, collect_trace)


def run_ea_fa(topo: Topology, tm: TrafficMatrix, cfg: SearchConfig | None = None,
              collect_trace: bool = False) -> HeateResult:
    """Switch flow placement only; weights stay at their initial value."""
    return _run(topo, tm, cfg or SearchConfig(), False, True, collect_trace)


def energy_saving_ratio(before: Topology, after: HeateResult) -> float:
    """Share of physical links turned off relative to the starting topology."""
    total = before.n_physical
    if total == 0:
        raise ValueError("topology has no links")
    return (total - after.topology.n_active_physical) / total
