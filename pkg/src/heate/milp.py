"""Exact-model tooling for the link-activation problem: routing-state
certificates, a constraint validator, an LP-file exporter, and an exhaustive
optimizer for tiny instances.

The model minimizes the number of powered directed links subject to flow
conservation, a utilization cap, and shortest-path coupling at plain IP
routers (switches may forward anywhere). The validator checks a certificate
against each constraint family by name; the exhaustive solver enumerates
physical link subsets and integer weight assignments and certifies the first
feasible one, which by the search order is an optimum.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import InitialInfeasible, InstanceTooLarge
from .topology import Topology
from .traffic import TrafficMatrix

TOL = 1e-6

# constraint families, in validation order
CONSTRAINTS = (
    "sink_absorption",      # all demand toward t arrives at t
    "flow_conservation",    # per node and destination, out - in = local demand
    "load_definition",      # aggregate link load matches per-destination flows
    "capacity_threshold",   # utilization at most beta, zero on unpowered links
    "tie_flow_equal",       # IP tie links toward t carry one common volume
    "tie_flow_only",        # IP links off the shortest paths carry nothing
    "tie_metric_upper",     # marked links close the distance gap exactly
    "tie_metric_lower",     # unmarked links keep a gap of at least one
    "unique_next_hop",      # each IP router has a marked link per destination
    "weight_floor",         # weights at least one
)


@dataclass
class SolutionCertificate:
    """Complete variable assignment for one network state."""

    weights: np.ndarray      # (m,) per directed link
    x_lt: np.ndarray         # (m, n) flow toward each destination
    r_vt: np.ndarray         # (n, n) shortest-path metric from v toward t
    y_vt: np.ndarray         # (n, n) common tie-link volume at v toward t
    u_lt: np.ndarray         # (m, n) 1 if link is on a shortest path toward t
    p: np.ndarray            # (m,) 1 if the directed link is powered
    m_big: float             # gap-deactivation constant for the metric rows
    beta: float
    x_l: np.ndarray | None = None   # (m,) aggregate loads, optional

    def to_json(self) -> str:
        payload = {
            "weights": self.weights.tolist(),
            "x_lt": self.x_lt.tolist(),
            "r_vt": self.r_vt.tolist(),
            "y_vt": self.y_vt.tolist(),
            "u_lt": self.u_lt.tolist(),
            "p": self.p.tolist(),
            "m_big": self.m_big,
            "beta": self.beta,
            "x_l": None if self.x_l is None else self.x_l.tolist(),
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SolutionCertificate":
        d = json.loads(text)
        arr = lambda k: np.asarray(d[k], dtype=np.float64)
        x_l = None if d.get("x_l") is None else np.asarray(d["x_l"], dtype=np.float64)
        return cls(arr("weights"), arr("x_lt"), arr("r_vt"), arr("y_vt"),
                   arr("u_lt"), arr("p"), float(d["m_big"]), float(d["beta"]), x_l)


@dataclass(frozen=True)
class Violation:
    constraint: str
    subject: str
    amount: float

    def __str__(self):
        return f"{self.constraint}[{self.subject}] off by {self.amount:.3g}"


@dataclass(frozen=True)
class ViolationReport:
    violations: tuple[Violation, ...]
    checked: tuple[str, ...]
    regime: str
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_constraint(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for v in self.violations:
            counts[v.constraint] = counts.get(v.constraint, 0) + 1
        return counts

    def summary(self) -> str:
        if self.ok:
            return f"ok ({len(self.checked)} constraint families, tol {self.tol:g})"
        worst = max(self.violations, key=lambda v: v.amount)
        return f"{len(self.violations)} violations, worst {worst}"


def validate_certificate(topo: Topology, tm: TrafficMatrix, cert: SolutionCertificate,
                         regime: str = "strict", constraints=None,
                         tol: float = TOL) -> ViolationReport:
    """Check a certificate against the model constraints.

    regime picks the next-hop rule: "strict" demands exactly one marked
    outgoing link per IP router and destination, "ecmp" accepts one or more.
    constraints selects a subset of CONSTRAINTS by name (default: all).
    """
    if regime not in ("strict", "ecmp"):
        raise ValueError(f"unknown regime {regime!r}")
    names = CONSTRAINTS if constraints is None else tuple(constraints)
    unknown = set(names) - set(CONSTRAINTS)
    if unknown:
        raise ValueError(f"unknown constraint names: {sorted(unknown)}")
    n, m = topo.n_nodes, topo.n_links
    if cert.x_lt.shape != (m, n):
        raise ValueError("certificate shape does not match the topology")
    h = tm.matrix
    big_h = h.sum(axis=0)
    src = topo.link_src
    dst = topo.link_dst
    ip_links = np.flatnonzero(topo.kinds[src] == 0)
    viols: list[Violation] = []

    def add(name, subject, amount):
        viols.append(Violation(name, subject, float(amount)))

    outflow = np.zeros((n, n))
    inflow = np.zeros((n, n))
    np.add.at(outflow, src, cert.x_lt)
    np.add.at(inflow, dst, cert.x_lt)

    if "sink_absorption" in names:
        for t in range(n):
            gap = abs(inflow[t, t] - big_h[t])
            if gap > tol:
                add("sink_absorption", f"t={t}", gap)

    if "flow_conservation" in names:
        net = outflow - inflow - h
        for v in range(n):
            for t in range(n):
                if v != t and abs(net[v, t]) > tol:
                    add("flow_conservation", f"v={v} t={t}", abs(net[v, t]))

    loads = cert.x_lt.sum(axis=1)
    if "load_definition" in names and cert.x_l is not None:
        for l in np.flatnonzero(np.abs(cert.x_l - loads) > tol):
            add("load_definition", f"l={l}", abs(cert.x_l[l] - loads[l]))

    if "capacity_threshold" in names:
        x = loads if cert.x_l is None else cert.x_l
        excess = x / topo.capacity - cert.beta * cert.p
        for l in np.flatnonzero(excess > tol):
            add("capacity_threshold", f"l={l}", excess[l])

    if "tie_flow_equal" in names:
        for l in ip_links:
            for t in range(n):
                d = cert.y_vt[src[l], t] - cert.x_lt[l, t]
                if d < -tol:
                    add("tie_flow_equal", f"l={l} t={t}", -d)
                elif d > (1.0 - cert.u_lt[l, t]) * big_h[t] + tol:
                    add("tie_flow_equal", f"l={l} t={t}",
                        d - (1.0 - cert.u_lt[l, t]) * big_h[t])

    if "tie_flow_only" in names:
        for l in ip_links:
            for t in range(n):
                over = cert.x_lt[l, t] - cert.u_lt[l, t] * big_h[t]
                if over > tol:
                    add("tie_flow_only", f"l={l} t={t}", over)

    if "tie_metric_upper" in names or "tie_metric_lower" in names:
        for l in ip_links:
            gaps = cert.r_vt[dst[l]] + cert.weights[l] - cert.r_vt[src[l]]
            slack = (1.0 - cert.u_lt[l]) * cert.m_big
            if "tie_metric_upper" in names:
                for t in np.flatnonzero(gaps > slack + tol):
                    add("tie_metric_upper", f"l={l} t={t}", gaps[t] - slack[t])
            if "tie_metric_lower" in names:
                floor = 1.0 - cert.u_lt[l]
                for t in np.flatnonzero(gaps < floor - tol):
                    add("tie_metric_lower", f"l={l} t={t}", floor[t] - gaps[t])

    if "unique_next_hop" in names:
        marked = np.zeros((n, n))
        np.add.at(marked, src, cert.u_lt)
        for v in np.flatnonzero(topo.kinds == 0):
            for t in range(n):
                if v == t:
                    continue
                s = marked[v, t]
                if regime == "strict" and abs(s - 1.0) > tol:
                    add("unique_next_hop", f"v={v} t={t}", abs(s - 1.0))
                elif regime == "ecmp" and s < 1.0 - tol:
                    add("unique_next_hop", f"v={v} t={t}", 1.0 - s)

    if "weight_floor" in names:
        for l in np.flatnonzero(cert.weights < 1.0 - tol):
            add("weight_floor", f"l={l}", 1.0 - cert.weights[l])

    return ViolationReport(tuple(viols), names, regime, tol)


def evaluate_objective(cert: SolutionCertificate) -> float:
    """Powered directed link count, the quantity the model minimizes."""
    return float(cert.p.sum())


def _metric_labels(topo, weights, active, m_big):
    """Per-destination shortest-path metrics and tie indicators under the
    given weights and link mask. Unreachable metrics are clipped to m_big."""
    n, m = topo.n_nodes, topo.n_links
    r = np.empty((n, n))
    dist = np.empty(n)
    order = np.empty(n, dtype=np.int64)
    act = np.ascontiguousarray(active, dtype=np.uint8)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    for t in range(n):
        K.dijkstra_to(t, -1, n, topo.in_ptr, topo.in_lnk, topo.link_src,
                      w, act, dist, order)
        r[:, t] = np.where(np.isfinite(dist), dist, m_big)
    gaps = r[topo.link_dst] + w[:, None] - r[topo.link_src]
    u = ((np.abs(gaps) <= K.TIE_EPS) & (act[:, None] == 1)).astype(np.float64)
    return r, u


def _common_values(topo, x_lt, u):
    """Largest flow on any marked outgoing link, per node and destination."""
    n = topo.n_nodes
    y = np.zeros((n, n))
    for l in range(topo.n_links):
        s = topo.link_src[l]
        np.maximum(y[s], np.where(u[l] > 0.0, x_lt[l], 0.0), out=y[s])
    return y


def certificate_from_state(state, beta: float) -> SolutionCertificate:
    """Certificate describing a concrete routing state on its (possibly
    pruned) topology. Metrics are the operating distances over active links;
    marks are the equal-cost ties among them."""
    topo = state.topology
    n = topo.n_nodes
    w = topo.weight.copy()
    m_big = n * max(float(w.max()), 1.0) + 1.0
    r, u = _metric_labels(topo, w, topo.active, m_big)
    y = _common_values(topo, state.x_lt, u)
    return SolutionCertificate(w, state.x_lt.copy(), r, y, u,
                               topo.active.astype(np.float64), m_big, beta,
                               state.x_l.copy())


# -- LP-file export ---------------------------------------------------------

def _num(x: float) -> str:
    if x == int(x):
        return str(int(x))
    return repr(float(x))


def export_lp(topo: Topology, tm: TrafficMatrix, beta: float,
              w_max: float = 20.0) -> str:
    """Render the full model as an LP-format text for an external solver.

    Weights range over [1, w_max]; the metric rows use the smallest constant
    that dominates any gap, n * w_max + 1. Mark and power variables are
    binary; everything else is continuous.
    """
    if w_max < 1.0:
        raise ValueError("w_max must be at least 1")
    n, m = topo.n_nodes, topo.n_links
    src, dst = topo.link_src, topo.link_dst
    big_h = tm.matrix.sum(axis=0)
    m_big = n * w_max + 1.0
    r_max = (n - 1) * w_max
    ip_links = [l for l in range(m) if topo.kinds[src[l]] == 0]
    ip_nodes = [v for v in range(n) if topo.kinds[v] == 0]

    out: list[str] = []
    put = out.append
    put("\\ energy-aware link activation model")
    put("Minimize")
    put(" obj: " + " + ".join(f"p_l{l}" for l in range(m)))
    put("Subject To")

    for t in range(n):
        inc = [f"x_l{l}_t{t}" for l in range(m) if dst[l] == t]
        put(f" absorb_t{t}: " + " + ".join(inc) + f" = {_num(big_h[t])}")

    for t in range(n):
        for v in range(n):
            if v == t:
                continue
            terms = [f"+ x_l{l}_t{t}" for l in range(m) if src[l] == v]
            terms += [f"- x_l{l}_t{t}" for l in range(m) if dst[l] == v]
            row = " ".join(terms).lstrip("+ ")
            put(f" conserve_v{v}_t{t}: {row} = {_num(tm.matrix[v, t])}")

    for l in range(m):
        terms = " + ".join(f"x_l{l}_t{t}" for t in range(n))
        put(f" load_l{l}: {terms} - xtot_l{l} = 0")

    for l in range(m):
        put(f" cap_l{l}: xtot_l{l} - {_num(beta * topo.capacity[l])} p_l{l} <= 0")

    for l in ip_links:
        v = src[l]
        for t in range(n):
            ht = big_h[t]
            put(f" flow_eq_lo_l{l}_t{t}: y_v{v}_t{t} - x_l{l}_t{t} >= 0")
            if ht > 0.0:
                put(f" flow_eq_hi_l{l}_t{t}: y_v{v}_t{t} - x_l{l}_t{t}"
                    f" + {_num(ht)} u_l{l}_t{t} <= {_num(ht)}")
                put(f" flow_tie_l{l}_t{t}: x_l{l}_t{t} - {_num(ht)} u_l{l}_t{t} <= 0")
            else:
                put(f" flow_eq_hi_l{l}_t{t}: y_v{v}_t{t} - x_l{l}_t{t} <= 0")
                put(f" flow_tie_l{l}_t{t}: x_l{l}_t{t} <= 0")

    for l in ip_links:
        a, b = src[l], dst[l]
        for t in range(n):
            put(f" metric_hi_l{l}_t{t}: r_v{b}_t{t} + w_l{l} - r_v{a}_t{t}"
                f" + {_num(m_big)} u_l{l}_t{t} <= {_num(m_big)}")
            put(f" metric_lo_l{l}_t{t}: r_v{b}_t{t} + w_l{l} - r_v{a}_t{t}"
                f" + u_l{l}_t{t} >= 1")

    for v in ip_nodes:
        mine = [l for l in range(m) if src[l] == v]
        for t in range(n):
            if v == t or not mine:
                continue
            put(f" next_hop_v{v}_t{t}: " + " + ".join(f"u_l{l}_t{t}" for l in mine)
                + " = 1")

    put("Bounds")
    for l in range(m):
        put(f" 1 <= w_l{l} <= {_num(w_max)}")
    for t in range(n):
        for v in range(n):
            if v == t:
                put(f" r_v{v}_t{t} = 0")
            else:
                put(f" 0 <= r_v{v}_t{t} <= {_num(r_max)}")
    for t in range(n):
        for v in range(n):
            put(f" 0 <= y_v{v}_t{t} <= {_num(big_h[t])}")

    put("Binary")
    for l in ip_links:
        for t in range(n):
            put(f" u_l{l}_t{t}")
    for l in range(m):
        put(f" p_l{l}")
    put("End")
    return "\n".join(out) + "\n"


# -- exhaustive optimizer for tiny instances --------------------------------

@dataclass(frozen=True)
class OracleResult:
    objective: float                 # powered directed links at the optimum
    certificate: SolutionCertificate
    active: np.ndarray               # uint8 mask over directed links


def _demands_connected(topo, active, demands):
    """Every demand source must reach its destination over active links."""
    n = topo.n_nodes
    reach_cache: dict[int, np.ndarray] = {}
    for s, t, _ in demands:
        if t not in reach_cache:
            seen = np.zeros(n, dtype=bool)
            seen[t] = True
            stack = [t]
            while stack:
                v = stack.pop()
                for i in range(topo.in_ptr[v], topo.in_ptr[v + 1]):
                    l = topo.in_lnk[i]
                    if active[l]:
                        w = topo.link_src[l]
                        if not seen[w]:
                            seen[w] = True
                            stack.append(int(w))
            reach_cache[t] = seen
        if not reach_cache[t][s]:
            return False
    return True


def _tie_links(topo, v, t, dist, weights, active):
    out = []
    dv = dist[v]
    if not np.isfinite(dv):
        return out
    for i in range(topo.out_ptr[v], topo.out_ptr[v + 1]):
        l = topo.out_lnk[i]
        if active[l] and abs(weights[l] + dist[topo.link_dst[l]] - dv) <= K.TIE_EPS:
            out.append(int(l))
    return out


def _forced_flows(topo, active, weights, tm, dests, beta):
    """Feasibility of one (active set, weight assignment) pair.

    IP routers forward on their single equal-cost link; an IP router that
    would carry flow while holding several ties disqualifies the assignment.
    Switch placements are left to a joint minimum-total-flow LP. Returns the
    per-destination flows, or None when infeasible.
    """
    n, m = topo.n_nodes, topo.n_links
    h = tm.matrix
    dist_t = {}
    ties = {}
    order = np.empty(n, dtype=np.int64)
    for t in dests:
        dist = np.empty(n)
        K.dijkstra_to(t, -1, n, topo.in_ptr, topo.in_lnk, topo.link_src,
                      weights, active, dist, order)
        dist_t[t] = dist.copy()
        for v in range(n):
            if v == t:
                continue
            tl = _tie_links(topo, v, t, dist, weights, active)
            ties[(v, t)] = tl
            if topo.kinds[v] == 0 and h[v, t] > 0.0 and len(tl) != 1:
                return None

    if not topo.kinds.any():
        # no switches: forwarding is fully determined, just push the volumes
        x_lt = np.zeros((m, n))
        for t in dests:
            dist = dist_t[t]
            acc = h[:, t].copy()
            for v in sorted(range(n), key=lambda v: -dist[v] if np.isfinite(dist[v]) else -np.inf):
                if v == t or acc[v] <= 0.0:
                    continue
                tl = ties[(v, t)]
                if len(tl) != 1:
                    return None
                l = tl[0]
                x_lt[l, t] += acc[v]
                acc[topo.link_dst[l]] += acc[v]
        x = x_lt.sum(axis=1)
        if np.any(x > beta * topo.capacity + K.TIE_EPS):
            return None
        return x_lt

    from scipy.optimize import linprog

    cols: list[tuple[int, int]] = []   # (t, l)
    for t in dests:
        for l in range(m):
            if not active[l]:
                continue
            v = int(topo.link_src[l])
            if v == t:
                continue
            if topo.kinds[v] == 0 and ties[(v, t)] != [l]:
                continue
            cols.append((t, l))
    if not cols:
        return None if any(h[:, t].sum() > 0 for t in dests) else np.zeros((m, n))
    index = {tl: j for j, tl in enumerate(cols)}

    rows_eq = []
    rhs_eq = []
    for t in dests:
        for v in range(n):
            if v == t:
                continue
            row = np.zeros(len(cols))
            touched = False
            for i in range(topo.out_ptr[v], topo.out_ptr[v + 1]):
                j = index.get((t, int(topo.out_lnk[i])))
                if j is not None:
                    row[j] = 1.0
                    touched = True
            for i in range(topo.in_ptr[v], topo.in_ptr[v + 1]):
                j = index.get((t, int(topo.in_lnk[i])))
                if j is not None:
                    row[j] = -1.0
                    touched = True
            if touched or h[v, t] > 0.0:
                rows_eq.append(row)
                rhs_eq.append(h[v, t])

    rows_ub = []
    rhs_ub = []
    for l in np.flatnonzero(active):
        row = np.zeros(len(cols))
        touched = False
        for t in dests:
            j = index.get((t, int(l)))
            if j is not None:
                row[j] = 1.0
                touched = True
        if touched:
            rows_ub.append(row)
            rhs_ub.append(beta * topo.capacity[l])

    res = linprog(np.ones(len(cols)),
                  A_ub=np.array(rows_ub) if rows_ub else None,
                  b_ub=np.array(rhs_ub) if rhs_ub else None,
                  A_eq=np.array(rows_eq) if rows_eq else None,
                  b_eq=np.array(rhs_eq) if rhs_eq else None,
                  method="highs")
    if res.status != 0:
        return None
    x_lt = np.zeros((m, n))
    for (t, l), j in index.items():
        x_lt[l, t] = max(float(res.x[j]), 0.0)
    return x_lt


def brute_force_optimal(topo: Topology, tm: TrafficMatrix, beta: float,
                        weight_set=(1, 2, 3), max_links: int = 8) -> OracleResult:
    """Exhaustively find a minimum-power feasible configuration.

    Enumerates physical link subsets by ascending size, and per subset every
    integer weight assignment from weight_set on the active directed links.
    The first feasible hit is optimal. Integer weight sets keep the metric
    indicator rows of the certificate exact.
    """
    if topo.n_links > max_links:
        raise InstanceTooLarge(
            f"{topo.n_links} directed links exceeds the {max_links}-link bound")
    if tm.n_nodes != topo.n_nodes:
        raise ValueError("traffic matrix size does not match topology")
    ws = tuple(sorted({float(w) for w in weight_set}))
    if not ws or ws[0] < 1.0:
        raise ValueError("weights must be at least 1")
    n, m = topo.n_nodes, topo.n_links
    n_phys = topo.n_physical
    demands = [(s, t, v) for s, t, v in tm.demands()]
    dests = sorted({t for _, t, _ in demands})
    big = n * ws[-1] + 1.0

    for k in range(n_phys + 1):
        for subset in itertools.combinations(range(n_phys), k):
            active = np.zeros(m, dtype=np.uint8)
            for ph in subset:
                active[2 * ph] = 1
                active[2 * ph + 1] = 1
            if not _demands_connected(topo, active, demands):
                continue
            act_ids = np.flatnonzero(active)
            for assign in itertools.product(ws, repeat=len(act_ids)):
                weights = np.full(m, big)
                weights[act_ids] = assign
                x_lt = _forced_flows(topo, active, weights, tm, dests, beta)
                if x_lt is None:
                    continue
                m_big = n * big + 1.0
                r, u = _metric_labels(topo, weights, np.ones(m, dtype=np.uint8), m_big)
                y = _common_values(topo, x_lt, u)
                cert = SolutionCertificate(weights, x_lt, r, y, u,
                                           active.astype(np.float64), m_big,
                                           float(beta), x_lt.sum(axis=1))
                return OracleResult(float(2 * k), cert, active)
    raise InitialInfeasible("no subset of links carries the demand matrix")
