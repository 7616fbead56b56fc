"""Hybrid network model: IP routers and SDN switches joined by bidirectional
physical links, each stored as two directed links that switch on and off
together."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import TopologyError

POP1_CAPACITY = 2.5
POP2_CAPACITY = 10.0
POP_DEGREE_THRESHOLD = 3


class NodeKind(enum.Enum):
    IP_ROUTER = "ip"
    SDN_SWITCH = "sdn"


@dataclass(frozen=True)
class Node:
    id: int
    kind: NodeKind


@dataclass(frozen=True)
class Link:
    id: int
    src: int
    dst: int
    capacity: float
    weight: float
    active: bool


class Topology:
    """Immutable directed-link view of a physical network.

    Directed link 2k and 2k+1 are the two directions of physical link k.
    Mutating operations return new Topology instances; the CSR adjacency is
    shared because the link structure never changes, only flags and weights.
    """

    __slots__ = ("kinds", "link_src", "link_dst", "capacity", "weight", "active",
                 "pair", "out_ptr", "out_lnk", "in_ptr", "in_lnk")

    def __init__(self, kinds, link_src, link_dst, capacity, weight, active, adjacency=None):
        self.kinds = kinds
        self.link_src = link_src
        self.link_dst = link_dst
        self.capacity = capacity
        self.weight = weight
        self.active = active
        m = len(link_src)
        self.pair = np.arange(m, dtype=np.int64) ^ 1
        if adjacency is None:
            adjacency = _build_adjacency(len(kinds), link_src, link_dst)
        self.out_ptr, self.out_lnk, self.in_ptr, self.in_lnk = adjacency

    # -- basic accessors -------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.kinds)

    @property
    def n_links(self) -> int:
        """Directed link count."""
        return len(self.link_src)

    @property
    def n_physical(self) -> int:
        return len(self.link_src) // 2

    @property
    def n_active_links(self) -> int:
        return int(self.active.sum())

    @property
    def n_active_physical(self) -> int:
        return int(self.active[::2].sum())

    @property
    def sdn_mask(self) -> np.ndarray:
        return self.kinds

    def node(self, v: int) -> Node:
        kind = NodeKind.SDN_SWITCH if self.kinds[v] else NodeKind.IP_ROUTER
        return Node(v, kind)

    @property
    def nodes(self) -> list[Node]:
        return [self.node(v) for v in range(self.n_nodes)]

    def link(self, l: int) -> Link:
        return Link(l, int(self.link_src[l]), int(self.link_dst[l]),
                    float(self.capacity[l]), float(self.weight[l]), bool(self.active[l]))

    @property
    def links(self) -> list[Link]:
        return [self.link(l) for l in range(self.n_links)]

    def sdn_switches(self) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.kinds)]

    def undirected_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        for k in range(0, self.n_links, 2):
            deg[self.link_src[k]] += 1
            deg[self.link_dst[k]] += 1
        return deg

    # -- derived copies --------------------------------------------------

    def _adjacency(self):
        return self.out_ptr, self.out_lnk, self.in_ptr, self.in_lnk

    def with_weights(self, weights) -> "Topology":
        w = np.asarray(weights, dtype=np.float64).copy()
        if w.shape != self.weight.shape:
            raise TopologyError("weight vector length does not match link count")
        return Topology(self.kinds, self.link_src, self.link_dst, self.capacity,
                        w, self.active, self._adjacency())

    def with_active(self, active) -> "Topology":
        a = np.asarray(active, dtype=np.uint8).copy()
        if a.shape != self.active.shape:
            raise TopologyError("active mask length does not match link count")
        return Topology(self.kinds, self.link_src, self.link_dst, self.capacity,
                        self.weight, a, self._adjacency())

    def with_kinds(self, kinds) -> "Topology":
        k = np.asarray(kinds, dtype=np.uint8).copy()
        if k.shape != self.kinds.shape:
            raise TopologyError("kind vector length does not match node count")
        return Topology(k, self.link_src, self.link_dst, self.capacity,
                        self.weight, self.active, self._adjacency())

    def with_capacities(self, capacity) -> "Topology":
        c = np.asarray(capacity, dtype=np.float64).copy()
        if c.shape != self.capacity.shape:
            raise TopologyError("capacity vector length does not match link count")
        if np.any(c <= 0):
            raise TopologyError("capacities must be positive")
        return Topology(self.kinds, self.link_src, self.link_dst, c,
                        self.weight, self.active, self._adjacency())

    def __repr__(self):
        return (f"Topology(nodes={self.n_nodes}, links={self.n_links} directed / "
                f"{self.n_physical} physical, active={self.n_active_physical} physical, "
                f"sdn={int(self.kinds.sum())})")


def _build_adjacency(n, link_src, link_dst):
    m = len(link_src)
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    in_ptr = np.zeros(n + 1, dtype=np.int64)
    for l in range(m):
        out_ptr[link_src[l] + 1] += 1
        in_ptr[link_dst[l] + 1] += 1
    out_ptr = np.cumsum(out_ptr).astype(np.int64)
    in_ptr = np.cumsum(in_ptr).astype(np.int64)
    out_lnk = np.empty(m, dtype=np.int64)
    in_lnk = np.empty(m, dtype=np.int64)
    opos = out_ptr[:-1].copy()
    ipos = in_ptr[:-1].copy()
    # iterate in link-id order so per-node lists are id-sorted (tie-break order)
    for l in range(m):
        s = link_src[l]
        d = link_dst[l]
        out_lnk[opos[s]] = l
        opos[s] += 1
        in_lnk[ipos[d]] = l
        ipos[d] += 1
    return out_ptr, out_lnk, in_ptr, in_lnk


def load_topology(text: str) -> Topology:
    """Parse topology-file content.

    Format: `node <id> <ip|sdn>` and `link <src> <dst> <capacity>` lines,
    `#` comments. Each link line declares one bidirectional physical link;
    both directions are materialized with weight 1 and active flags set.
    """
    node_kinds: dict[int, int] = {}
    phys: list[tuple[int, int, float]] = []
    seen_pairs: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) != 3:
                raise TopologyError(f"line {lineno}: expected 'node <id> <ip|sdn>'")
            try:
                nid = int(parts[1])
            except ValueError:
                raise TopologyError(f"line {lineno}: node id must be an integer") from None
            if parts[2] not in ("ip", "sdn"):
                raise TopologyError(f"line {lineno}: node kind must be 'ip' or 'sdn'")
            if nid in node_kinds:
                raise TopologyError(f"line {lineno}: duplicate node id {nid}")
            node_kinds[nid] = 1 if parts[2] == "sdn" else 0
        elif parts[0] == "link":
            if len(parts) != 4:
                raise TopologyError(f"line {lineno}: expected 'link <src> <dst> <capacity>'")
            try:
                s, d = int(parts[1]), int(parts[2])
                cap = float(parts[3])
            except ValueError:
                raise TopologyError(f"line {lineno}: malformed link line") from None
            if s == d:
                raise TopologyError(f"line {lineno}: self-loop link {s}-{d}")
            if cap <= 0:
                raise TopologyError(f"line {lineno}: capacity must be positive")
            key = (min(s, d), max(s, d))
            if key in seen_pairs:
                raise TopologyError(f"line {lineno}: duplicate link {s}-{d}")
            seen_pairs.add(key)
            phys.append((s, d, cap))
        else:
            raise TopologyError(f"line {lineno}: unknown directive {parts[0]!r}")
    if not node_kinds or not phys:
        raise TopologyError("empty topology")
    n = len(node_kinds)
    if sorted(node_kinds) != list(range(n)):
        raise TopologyError("node ids must be contiguous from 0")
    kinds = np.zeros(n, dtype=np.uint8)
    for nid, k in node_kinds.items():
        kinds[nid] = k
    for s, d, _ in phys:
        if s not in node_kinds or d not in node_kinds:
            raise TopologyError(f"link references undeclared node {s if s not in node_kinds else d}")
    m = 2 * len(phys)
    link_src = np.empty(m, dtype=np.int64)
    link_dst = np.empty(m, dtype=np.int64)
    capacity = np.empty(m, dtype=np.float64)
    for k, (s, d, cap) in enumerate(phys):
        link_src[2 * k], link_dst[2 * k] = s, d
        link_src[2 * k + 1], link_dst[2 * k + 1] = d, s
        capacity[2 * k] = capacity[2 * k + 1] = cap
    weight = np.ones(m, dtype=np.float64)
    active = np.ones(m, dtype=np.uint8)
    return Topology(kinds, link_src, link_dst, capacity, weight, active)


def load_topology_file(path) -> Topology:
    with open(path, "r", encoding="utf-8") as fh:
        return load_topology(fh.read())


def save_topology(topo: Topology) -> str:
    """Render a topology back to file format (one line per physical link)."""
    lines = []
    for v in range(topo.n_nodes):
        lines.append(f"node {v} {'sdn' if topo.kinds[v] else 'ip'}")
    for k in range(0, topo.n_links, 2):
        lines.append(f"link {topo.link_src[k]} {topo.link_dst[k]} {topo.capacity[k]:g}")
    return "\n".join(lines) + "\n"


def assign_capacities(topo: Topology, pop1_capacity: float = POP1_CAPACITY,
                      pop2_capacity: float = POP2_CAPACITY) -> Topology:
    """Degree-based capacity rule: a link touching any node of undirected
    degree < 3 gets the small capacity, links between two well-connected
    nodes get the large one. Idempotent."""
    deg = topo.undirected_degrees()
    cap = np.empty(topo.n_links, dtype=np.float64)
    for l in range(topo.n_links):
        s, d = topo.link_src[l], topo.link_dst[l]
        if deg[s] < POP_DEGREE_THRESHOLD or deg[d] < POP_DEGREE_THRESHOLD:
            cap[l] = pop1_capacity
        else:
            cap[l] = pop2_capacity
    return topo.with_capacities(cap)


def place_sdn(topo: Topology, count: int, seed: int) -> Topology:
    """Mark exactly `count` nodes as SDN switches, chosen uniformly without
    replacement from a seeded generator. Replaces any existing placement."""
    if count < 0:
        raise TopologyError("SDN count must be non-negative")
    if count > topo.n_nodes:
        raise TopologyError(f"SDN count {count} exceeds node count {topo.n_nodes}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(topo.n_nodes, size=count, replace=False)
    kinds = np.zeros(topo.n_nodes, dtype=np.uint8)
    kinds[chosen] = 1
    return topo.with_kinds(kinds)


class ToggleResult(NamedTuple):
    topology: Topology
    changed: bool


def deactivate_link(topo: Topology, link_id: int) -> ToggleResult:
    """Turn off both directions of the physical link containing link_id.
    No-op (changed=False) if already inactive."""
    if not 0 <= link_id < topo.n_links:
        raise TopologyError(f"link id {link_id} out of range")
    other = int(topo.pair[link_id])
    if not topo.active[link_id] and not topo.active[other]:
        return ToggleResult(topo, False)
    a = topo.active.copy()
    a[link_id] = 0
    a[other] = 0
    return ToggleResult(topo.with_active(a), True)


def reactivate_link(topo: Topology, link_id: int) -> ToggleResult:
    """Turn both directions of the physical link back on."""
    if not 0 <= link_id < topo.n_links:
        raise TopologyError(f"link id {link_id} out of range")
    other = int(topo.pair[link_id])
    if topo.active[link_id] and topo.active[other]:
        return ToggleResult(topo, False)
    a = topo.active.copy()
    a[link_id] = 1
    a[other] = 1
    return ToggleResult(topo.with_active(a), True)
