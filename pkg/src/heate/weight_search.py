"""Harmonic link-weight search.

Each iteration reroutes all demands by ECMP, splits active links into
sleeping (utilization <= sleep_fraction * beta), congested (>= beta) and
middle bands, and bumps sleeping and congested links by 1/i. Weights only
grow, so shortest paths drift away from lightly used and overloaded links
while the middle band keeps its routes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import UnroutableDemand
from .topology import Topology
from .traffic import TrafficMatrix


@dataclass(frozen=True)
class SearchConfig:
    beta: float = 0.8
    sleep_fraction: float = 0.3
    iterations: int = 10000
    initial_weight: float = 1.0
    try_next_on_failure: bool = False

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise ValueError("beta must be in (0, 1]")
        if not 0 < self.sleep_fraction < 1:
            raise ValueError("sleep_fraction must be in (0, 1)")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.initial_weight < 1:
            raise ValueError("initial weight must be >= 1")


def neighboring_region_search(topo: Topology, tm: TrafficMatrix,
                              cfg: SearchConfig) -> np.ndarray:
    """Run the harmonic search from the topology's current weights and return
    the new weight vector. The topology is not modified.

    Utilizations are computed on plain ECMP flows with SDN switches
    forwarding like any router: the search runs before allocation, so the
    volumes the switches will re-place are still on their default paths."""
    weights = topo.weight.astype(np.float64).copy()
    dem_by_dest = np.ascontiguousarray(tm.matrix.T)
    dest_ids = tm.destinations()
    bad_v, bad_t = K.nrs_loop(topo.n_nodes, topo.n_links,
                              topo.in_ptr, topo.in_lnk, topo.link_src,
                              topo.out_ptr, topo.out_lnk, topo.link_dst,
                              topo.capacity, topo.active, weights,
                              dem_by_dest, dest_ids,
                              cfg.beta, cfg.sleep_fraction, cfg.iterations)
    if bad_v >= 0:
        raise UnroutableDemand(int(bad_v), int(bad_t))
    return weights
