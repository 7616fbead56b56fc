"""Hot numeric kernels: destination-rooted shortest paths, ECMP spreading,
first-switch capture, and the weight-search inner loop.

All kernels operate on flat CSR-style arrays so they can be compiled with
numba. Set HEATE_BACKEND=numpy to run the identical functions uncompiled
(slow, dependency-free reference path); the default is numba when available.
Both paths execute the same statements in the same order, so results are
bit-identical.
"""

import os

import numpy as np

BACKEND = os.environ.get("HEATE_BACKEND", "").strip().lower() or "numba"
if BACKEND not in ("numba", "numpy"):
    raise ValueError(f"HEATE_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

if BACKEND == "numba":
    try:
        from numba import njit
    except ImportError:
        BACKEND = "numpy"

if BACKEND == "numpy":

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco


# Equal-cost detection and flow comparisons share one epsilon; harmonic weight
# bumps make exact float ties rare but 1-ulp near-ties common.
TIE_EPS = 1e-9
INF = np.inf


@njit(cache=True)
def dijkstra_to(dest, banned, n, in_ptr, in_lnk, link_src, weights, active, dist, order):
    """Distances from every node TO dest over active links (reverse relax).

    banned < 0 disables node masking; otherwise that node is treated as
    removed. dist is filled in place (inf = unreachable), order receives the
    settle sequence (ascending distance, lowest node id on ties). Returns the
    number of settled nodes.
    """
    for v in range(n):
        dist[v] = INF
    if dest == banned:
        return 0
    dist[dest] = 0.0
    settled = np.zeros(n, dtype=np.uint8)
    count = 0
    while True:
        best = -1
        best_d = INF
        for v in range(n):
            if settled[v] == 0 and v != banned and dist[v] < best_d:
                best = v
                best_d = dist[v]
        if best < 0:
            break
        settled[best] = 1
        order[count] = best
        count += 1
        for k in range(in_ptr[best], in_ptr[best + 1]):
            l = in_lnk[k]
            if active[l] == 0:
                continue
            s = link_src[l]
            if s == banned or settled[s] == 1:
                continue
            nd = best_d + weights[l]
            if nd < dist[s]:
                dist[s] = nd
    return count


@njit(cache=True)
def ecmp_spread(dest, n, out_ptr, out_lnk, link_dst, weights, active, dist, order, settled_count, demand_col, x_out):
    """Load demand_col toward dest hop by hop with even splits over ties.

    Adds per-link flow into x_out. Returns the lowest source id whose demand
    cannot reach dest, or -1 when every demand routes.
    """
    for v in range(n):
        if demand_col[v] > 0.0 and dist[v] == INF:
            return v
    node_flow = np.zeros(n, dtype=np.float64)
    for idx in range(settled_count - 1, -1, -1):
        v = order[idx]
        if v == dest:
            continue
        f = node_flow[v] + demand_col[v]
        if f <= 0.0:
            continue
        dv = dist[v]
        ties = 0
        for k in range(out_ptr[v], out_ptr[v + 1]):
            l = out_lnk[k]
            if active[l] == 0:
                continue
            dd = dist[link_dst[l]]
            if dd == INF:
                continue
            if weights[l] + dd - dv <= TIE_EPS:
                ties += 1
        share = f / ties
        for k in range(out_ptr[v], out_ptr[v + 1]):
            l = out_lnk[k]
            if active[l] == 0:
                continue
            d = link_dst[l]
            dd = dist[d]
            if dd == INF:
                continue
            if weights[l] + dd - dv <= TIE_EPS:
                x_out[l] += share
                node_flow[d] += share
    return -1


@njit(cache=True)
def first_sdn_capture(dest, n, out_ptr, out_lnk, link_dst, weights, active, dist, order, settled_count, sdn_mask, demand_col, inj_out, x_out):
    """Propagate demand toward dest with even ECMP splits, capturing every
    share at the first SDN switch it meets.

    Flow arriving at a switch stops there and accumulates into inj_out, and
    so does demand originating on the switch: the switch places everything
    it emits itself. The rest loads links into x_out exactly as ecmp_spread
    would, so link loads equal the plain ECMP loads truncated at switches.
    Returns the lowest source id whose demand cannot reach dest, or -1.
    """
    for v in range(n):
        if demand_col[v] > 0.0 and dist[v] == INF:
            return v
    node_flow = np.zeros(n, dtype=np.float64)
    for idx in range(settled_count - 1, -1, -1):
        v = order[idx]
        if v == dest:
            continue
        f = node_flow[v] + demand_col[v]
        if sdn_mask[v] == 1:
            inj_out[v] += f
            continue
        if f <= 0.0:
            continue
        dv = dist[v]
        ties = 0
        for k in range(out_ptr[v], out_ptr[v + 1]):
            l = out_lnk[k]
            if active[l] == 0:
                continue
            dd = dist[link_dst[l]]
            if dd == INF:
                continue
            if weights[l] + dd - dv <= TIE_EPS:
                ties += 1
        share = f / ties
        for k in range(out_ptr[v], out_ptr[v + 1]):
            l = out_lnk[k]
            if active[l] == 0:
                continue
            d = link_dst[l]
            dd = dist[d]
            if dd == INF:
                continue
            if weights[l] + dd - dv <= TIE_EPS:
                x_out[l] += share
                node_flow[d] += share
    return -1


@njit(cache=True)
def nrs_loop(n, m, in_ptr, in_lnk, link_src, out_ptr, out_lnk, link_dst, caps, active, weights, dem_by_dest, dest_ids, beta, sleep_fraction, iterations):
    """Harmonic weight search: reroute, categorize by utilization, bump.

    Loads are plain ECMP flows with every node forwarding; the weight system
    runs before allocation and never sees what the switches do. weights is
    updated in place and the final vector is kept as is, bumps have no
    rollback. Returns (bad_source, bad_dest) for the first unroutable
    demand, or (-1, -1) on completion.
    """
    sleep_thr = sleep_fraction * beta + TIE_EPS
    cong_thr = beta - TIE_EPS
    x = np.zeros(m, dtype=np.float64)
    dist = np.empty(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    for i in range(1, iterations + 1):
        for l in range(m):
            x[l] = 0.0
        for di in range(dest_ids.shape[0]):
            t = dest_ids[di]
            cnt = dijkstra_to(t, -1, n, in_ptr, in_lnk, link_src, weights, active, dist, order)
            bad = ecmp_spread(t, n, out_ptr, out_lnk, link_dst, weights, active, dist, order, cnt, dem_by_dest[t], x)
            if bad >= 0:
                return bad, t
        step = 1.0 / i
        for l in range(m):
            if active[l] == 1:
                mu = x[l] / caps[l]
                if mu <= sleep_thr or mu >= cong_thr:
                    weights[l] += step
    return -1, -1
