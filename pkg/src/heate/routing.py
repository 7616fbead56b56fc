"""Destination-rooted shortest paths, ECMP flow loading, and utilization
bookkeeping on the active subgraph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import _kernels as K
from .errors import UnroutableDemand
from .topology import Topology
from .traffic import TrafficMatrix

FLOW_EPS = 1e-9


@dataclass(frozen=True)
class SptResult:
    """Shortest-path tree toward one destination: weighted distances and all
    equal-cost next-hop links per node."""

    destination: int
    dist: np.ndarray
    next_hops: tuple[tuple[int, ...], ...]
    reachable: np.ndarray


@dataclass
class RoutingState:
    """Per-destination and aggregate link flows with utilizations, frozen
    against the topology snapshot it was computed on."""

    topology: Topology
    x_lt: np.ndarray          # links x nodes, flow toward each destination
    x_l: np.ndarray = field(default=None)
    utilization: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.x_l is None:
            self.x_l = self.x_lt.sum(axis=1)
        if self.utilization is None:
            self.utilization = self.x_l / self.topology.capacity


def _dijkstra(topo: Topology, t: int, weights=None, active=None, banned: int = -1):
    w = topo.weight if weights is None else weights
    a = topo.active if active is None else active
    n = topo.n_nodes
    dist = np.empty(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    cnt = K.dijkstra_to(t, banned, n, topo.in_ptr, topo.in_lnk, topo.link_src,
                        w, a, dist, order)
    return dist, order, cnt


def _tied_out_links(topo, v, dist, weights=None, active=None):
    w = topo.weight if weights is None else weights
    a = topo.active if active is None else active
    dv = dist[v]
    if not np.isfinite(dv):
        return ()
    hops = []
    for k in range(topo.out_ptr[v], topo.out_ptr[v + 1]):
        l = int(topo.out_lnk[k])
        if not a[l]:
            continue
        dd = dist[topo.link_dst[l]]
        if np.isfinite(dd) and w[l] + dd - dv <= K.TIE_EPS:
            hops.append(l)
    return tuple(hops)


def shortest_path_tree(topo: Topology, t: int) -> SptResult:
    """All-sources shortest paths toward t over active links, with every
    equal-cost next hop retained (link-id order)."""
    if not 0 <= t < topo.n_nodes:
        raise ValueError(f"destination {t} out of range")
    dist, _, _ = _dijkstra(topo, t)
    reachable = np.isfinite(dist)
    hops = tuple(_tied_out_links(topo, v, dist) if (reachable[v] and v != t) else ()
                 for v in range(topo.n_nodes))
    return SptResult(t, dist, hops, reachable)


def load_flows_ecmp(topo: Topology, tm: TrafficMatrix) -> RoutingState:
    """Route every demand hop by hop with even splits across equal-cost next
    hops. SDN switches forward like plain routers here; their controlled
    allocations are overlaid later by the allocation stage."""
    n, m = topo.n_nodes, topo.n_links
    x_lt = np.zeros((m, n), dtype=np.float64)
    dem_by_dest = np.ascontiguousarray(tm.matrix.T)
    x_col = np.empty(m, dtype=np.float64)
    for t in tm.destinations():
        t = int(t)
        dist, order, cnt = _dijkstra(topo, t)
        x_col[:] = 0.0
        bad = K.ecmp_spread(t, n, topo.out_ptr, topo.out_lnk, topo.link_dst,
                            topo.weight, topo.active, dist, order, cnt,
                            dem_by_dest[t], x_col)
        if bad >= 0:
            raise UnroutableDemand(int(bad), t)
        x_lt[:, t] = x_col
    return RoutingState(topo, x_lt)


def load_flows_forwarded(topo: Topology, tm: TrafficMatrix) -> RoutingState:
    """Like load_flows_ecmp, but flows stop at the first SDN switch they
    meet (source included): the loads are the plain-forwarded share only.
    Captured volumes (see injected_sdn_flows) are placed separately by the
    allocator."""
    n, m = topo.n_nodes, topo.n_links
    x_lt = np.zeros((m, n), dtype=np.float64)
    dem_by_dest = np.ascontiguousarray(tm.matrix.T)
    x_col = np.empty(m, dtype=np.float64)
    inj = np.zeros(n, dtype=np.float64)
    for t in tm.destinations():
        t = int(t)
        dist, order, cnt = _dijkstra(topo, t)
        x_col[:] = 0.0
        bad = K.first_sdn_capture(t, n, topo.out_ptr, topo.out_lnk,
                                  topo.link_dst, topo.weight, topo.active,
                                  dist, order, cnt, topo.kinds,
                                  dem_by_dest[t], inj, x_col)
        if bad >= 0:
            raise UnroutableDemand(int(bad), t)
        x_lt[:, t] = x_col
    return RoutingState(topo, x_lt)


def injected_sdn_flows(topo: Topology, tm: TrafficMatrix,
                       spts: Mapping[int, SptResult]) -> dict[tuple[int, int], float]:
    """Volume each SDN switch must place per destination: demands spread along
    equal-cost shortest paths and every share is claimed by the first switch
    it meets, which for a demand sourced at a switch is the source itself."""
    n, m = topo.n_nodes, topo.n_links
    dem_by_dest = np.ascontiguousarray(tm.matrix.T)
    inj = np.zeros(n, dtype=np.float64)
    scratch = np.zeros(m, dtype=np.float64)
    out: dict[tuple[int, int], float] = {}
    for t in tm.destinations():
        t = int(t)
        spt = spts[t]
        order = np.argsort(spt.dist, kind="stable").astype(np.int64)
        cnt = int(np.isfinite(spt.dist).sum())
        inj[:] = 0.0
        bad = K.first_sdn_capture(t, n, topo.out_ptr, topo.out_lnk, topo.link_dst,
                                  topo.weight, topo.active, spt.dist, order, cnt,
                                  topo.kinds, dem_by_dest[t], inj, scratch)
        if bad >= 0:
            raise UnroutableDemand(int(bad), t)
        for u in np.flatnonzero(inj > 0):
            out[(int(u), t)] = float(inj[u])
    return out


def max_utilization(state: RoutingState) -> float:
    """Highest utilization over active links."""
    act = state.topology.active.astype(bool)
    if not act.any():
        raise ValueError("no active links")
    return float(state.utilization[act].max())


def min_utilization_active_link(state: RoutingState) -> int:
    """Active directed link with the lowest utilization; lowest id on ties."""
    act = state.topology.active.astype(bool)
    if not act.any():
        raise ValueError("no active links")
    ids = np.flatnonzero(act)
    return int(ids[np.argmin(state.utilization[ids])])
