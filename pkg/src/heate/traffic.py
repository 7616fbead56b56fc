"""Capacity-weighted gravity traffic generation and matrix file I/O.

Each source i draws one scale factor sigma_i; the demand to j is proportional
to i's egress capacity and to j's share of the remaining network ingress:

    d_ij = sigma_i * out_cap(i) * in_cap(j) / (total_cap - out_cap(i))

with all capacity sums taken over directed links.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, TrafficError
from .topology import Topology


class TrafficMatrix:
    """Dense non-negative demand matrix; entry [v, t] is the volume v -> t."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise TrafficError("traffic matrix must be square")
        if not np.all(np.isfinite(m)):
            raise TrafficError("traffic matrix entries must be finite")
        if np.any(m < 0):
            raise TrafficError("traffic matrix entries must be non-negative")
        if np.any(np.diagonal(m) != 0):
            raise TrafficError("self-demands must be zero")
        self.matrix = m

    @property
    def n_nodes(self) -> int:
        return self.matrix.shape[0]

    @property
    def total(self) -> float:
        return float(self.matrix.sum())

    def demands(self):
        """Yield (src, dst, volume) for non-zero entries in (src, dst) order."""
        for v, t in zip(*np.nonzero(self.matrix)):
            yield int(v), int(t), float(self.matrix[v, t])

    def destinations(self) -> np.ndarray:
        """Node ids that receive any demand, ascending."""
        return np.flatnonzero(self.matrix.sum(axis=0) > 0).astype(np.int64)

    def __eq__(self, other):
        return isinstance(other, TrafficMatrix) and np.array_equal(self.matrix, other.matrix)

    def __repr__(self):
        nz = int(np.count_nonzero(self.matrix))
        return f"TrafficMatrix(nodes={self.n_nodes}, demands={nz}, total={self.total:g})"


@dataclass(frozen=True)
class GeneratorParams:
    seed: int
    sigma_max: float = 0.1

    def __post_init__(self):
        if self.sigma_max <= 0:
            raise TrafficError("sigma_max must be positive")


def matrix_from_sigmas(topo: Topology, sigmas) -> TrafficMatrix:
    """Gravity matrix for explicit per-source scale factors."""
    sig = np.asarray(sigmas, dtype=np.float64)
    if sig.shape != (topo.n_nodes,):
        raise TrafficError("sigma vector length does not match node count")
    n = topo.n_nodes
    out_cap = np.zeros(n, dtype=np.float64)
    in_cap = np.zeros(n, dtype=np.float64)
    for l in range(topo.n_links):
        out_cap[topo.link_src[l]] += topo.capacity[l]
        in_cap[topo.link_dst[l]] += topo.capacity[l]
    total = out_cap.sum()
    denom = total - out_cap
    if np.any(denom <= 0):
        bad = int(np.flatnonzero(denom <= 0)[0])
        raise DegenerateDenominator(
            f"node {bad}: total capacity minus egress is {denom[bad]:g}")
    d = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        d[i, :] = sig[i] * out_cap[i] * (in_cap / denom[i])
    np.fill_diagonal(d, 0.0)
    return TrafficMatrix(d)


def generate_matrix(topo: Topology, params: GeneratorParams) -> TrafficMatrix:
    """Seeded gravity matrix; one sigma draw per source node."""
    rng = np.random.default_rng(params.seed)
    sigmas = rng.uniform(0.0, params.sigma_max, size=topo.n_nodes)
    return matrix_from_sigmas(topo, sigmas)


def save_matrix(tm: TrafficMatrix) -> str:
    """Render to file format: a `nodes <n>` header then one `demand` line per
    non-zero entry, full float precision."""
    lines = [f"nodes {tm.n_nodes}"]
    for v, t, h in tm.demands():
        lines.append(f"demand {v} {t} {h!r}")
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> TrafficMatrix:
    """Parse matrix-file content (`nodes` header, `demand` lines, # comments)."""
    n = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "nodes":
            if len(parts) != 2:
                raise TrafficError(f"line {lineno}: expected 'nodes <count>'")
            if n is not None:
                raise TrafficError(f"line {lineno}: duplicate nodes header")
            try:
                n = int(parts[1])
            except ValueError:
                raise TrafficError(f"line {lineno}: node count must be an integer") from None
            if n <= 0:
                raise TrafficError(f"line {lineno}: node count must be positive")
        elif parts[0] == "demand":
            if len(parts) != 4:
                raise TrafficError(f"line {lineno}: expected 'demand <src> <dst> <volume>'")
            if n is None:
                raise TrafficError(f"line {lineno}: demand line before nodes header")
            try:
                v, t = int(parts[1]), int(parts[2])
                h = float(parts[3])
            except ValueError:
                raise TrafficError(f"line {lineno}: malformed demand line") from None
            if not (0 <= v < n and 0 <= t < n):
                raise TrafficError(f"line {lineno}: node id out of range")
            if v == t:
                raise TrafficError(f"line {lineno}: self-demand {v}->{t}")
            if h < 0:
                raise TrafficError(f"line {lineno}: negative volume")
            entries.append((v, t, h))
        else:
            raise TrafficError(f"line {lineno}: unknown directive {parts[0]!r}")
    if n is None:
        raise TrafficError("missing nodes header")
    m = np.zeros((n, n), dtype=np.float64)
    for v, t, h in entries:
        m[v, t] = h
    return TrafficMatrix(m)


def load_matrix_file(path) -> TrafficMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return load_matrix(fh.read())
