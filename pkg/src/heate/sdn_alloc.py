"""Switch-controlled flow placement.

A switch holding injected volume toward a destination gets one candidate per
active outgoing link: the minimum-weight simple path starting with that link
(computed with the switch itself removed so the path cannot loop back). The
allocator fills candidates in ascending order of available headroom, shrinking
the headroom of later paths that share links by the volume actually placed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import InsufficientCapacity, NoPath
from .routing import RoutingState
from .topology import Topology

FLOW_EPS = 1e-9


@dataclass(frozen=True)
class CandidatePath:
    links: tuple[int, ...]
    nodes: tuple[int, ...]
    available_capacity: float


@dataclass(frozen=True)
class SdnAllocation:
    switch: int
    destination: int
    assignments: tuple[tuple[CandidatePath, float], ...]

    @property
    def total(self) -> float:
        return sum(v for _, v in self.assignments)


def _extract_path(topo, weights, active, dist, banned, start, dest):
    """Greedy walk down the distance field, lowest link id on ties."""
    links = []
    nodes = [start]
    cur = start
    while cur != dest:
        dv = dist[cur]
        nxt = -1
        for k in range(topo.out_ptr[cur], topo.out_ptr[cur + 1]):
            l = int(topo.out_lnk[k])
            if not active[l]:
                continue
            d = int(topo.link_dst[l])
            if d == banned:
                continue
            dd = dist[d]
            if np.isfinite(dd) and weights[l] + dd - dv <= K.TIE_EPS:
                nxt = l
                break
        links.append(nxt)
        cur = int(topo.link_dst[nxt])
        nodes.append(cur)
    return links, nodes


def _candidate_paths(topo: Topology, weights, active, x_l, u: int, t: int,
                     beta: float) -> list[CandidatePath]:
    n = topo.n_nodes
    dist = np.empty(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    K.dijkstra_to(t, u, n, topo.in_ptr, topo.in_lnk, topo.link_src,
                  weights, active, dist, order)
    cands = []
    for k in range(topo.out_ptr[u], topo.out_ptr[u + 1]):
        l = int(topo.out_lnk[k])
        if not active[l]:
            continue
        a = int(topo.link_dst[l])
        if a == t:
            links, nodes = [l], [u, t]
        elif np.isfinite(dist[a]):
            suffix, snodes = _extract_path(topo, weights, active, dist, u, a, t)
            links, nodes = [l] + suffix, [u] + snodes
        else:
            continue
        cap = min(topo.capacity[p] * beta - x_l[p] for p in links)
        cands.append(CandidatePath(tuple(links), tuple(nodes), float(cap)))
    return cands


def candidate_paths(topo: Topology, state: RoutingState, u: int, t: int,
                    beta: float) -> list[CandidatePath]:
    """One candidate per active outgoing link of u, or NoPath if none exist."""
    if not topo.kinds[u]:
        raise ValueError(f"node {u} is not an SDN switch")
    cands = _candidate_paths(topo, topo.weight, topo.active, state.x_l, u, t, beta)
    if not cands:
        raise NoPath(f"switch {u} has no candidate path to {t}")
    return cands


def flow_allocation(candidates: list[CandidatePath], volume: float,
                    partial: bool = False) -> SdnAllocation:
    """Fill candidates in ascending (headroom, link-id sequence) order.

    Later paths sharing a link with a filled path lose headroom equal to the
    volume actually placed. Raises InsufficientCapacity if the volume cannot
    be absorbed; with partial=True it returns the absorbed portion instead
    (total may fall short of volume). Pure: caller applies the returned
    volumes to its flows.
    """
    if not candidates:
        raise NoPath("no candidate paths")
    ordered = sorted(candidates, key=lambda p: (p.available_capacity, p.links))
    caps = [p.available_capacity for p in ordered]
    placed = [0.0] * len(ordered)
    remaining = volume
    for i, path in enumerate(ordered):
        if remaining <= 0.0:
            break
        take = min(remaining, max(caps[i], 0.0))
        if take > 0.0:
            placed[i] = take
            remaining -= take
            shared = set(path.links)
            for j in range(i + 1, len(ordered)):
                if shared.intersection(ordered[j].links):
                    caps[j] -= take
    if remaining > FLOW_EPS and not partial:
        raise InsufficientCapacity(
            f"candidates absorb {volume - remaining:g} of {volume:g}")
    u = ordered[0].nodes[0]
    t = ordered[0].nodes[-1]
    return SdnAllocation(u, t, tuple(zip(ordered, placed)))
