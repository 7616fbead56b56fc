"""Seeded sweep harness: run the optimizers over switch-count and traffic
draws, collect per-run rows, and render a deterministic CSV with a trailing
summary block."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .algorithms import run_ea_fa, run_ea_ospf, run_heate
from .errors import InitialInfeasible
from .topology import Topology, place_sdn
from .traffic import GeneratorParams, generate_matrix
from .weight_search import SearchConfig

log = logging.getLogger(__name__)

ALGORITHMS = {
    "heate": run_heate,
    "ea-ospf": run_ea_ospf,
    "ea-fa": run_ea_fa,
}

CSV_HEADER = ("algorithm,sdn_count,matrix_seed,energy_saving_ratio,"
              "max_utilization,active_links,rounds,wall_time_ms,status")

PLACEMENT_SEED_OFFSET = 10 ** 6


@dataclass(frozen=True)
class ExperimentSpec:
    sdn_counts: tuple[int, ...]
    n_matrices: int = 50
    base_seed: int = 0
    beta: float = 0.8
    iterations: int = 10000
    algorithms: tuple[str, ...] = ("heate", "ea-ospf", "ea-fa")
    sigma_max: float = 0.1
    timing: bool = False     # off by default so output is reproducible

    def __post_init__(self):
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if self.n_matrices < 1:
            raise ValueError("need at least one traffic matrix")

    def matrix_seed(self, index: int) -> int:
        return self.base_seed + index

    def placement_seed(self, sdn_count: int) -> int:
        # one placement per switch count, shared by every matrix, so the
        # count axis is not confounded by placement luck
        return self.base_seed + PLACEMENT_SEED_OFFSET + sdn_count


@dataclass
class ExperimentRow:
    algorithm: str
    sdn_count: int
    matrix_seed: int
    energy_saving_ratio: float | None
    max_utilization: float | None
    active_links: int | None
    rounds: int | None
    wall_time_ms: float
    status: str

    def to_csv(self) -> str:
        def num(x):
            return "" if x is None else (repr(x) if isinstance(x, float) else str(x))
        return ",".join([
            self.algorithm, str(self.sdn_count), str(self.matrix_seed),
            num(self.energy_saving_ratio), num(self.max_utilization),
            num(self.active_links), num(self.rounds),
            repr(self.wall_time_ms) if self.wall_time_ms else "0",
            self.status,
        ])


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list[ExperimentRow] = field(default_factory=list)

    def mean_ratio(self, algorithm: str, sdn_count: int) -> float | None:
        vals = [r.energy_saving_ratio for r in self.rows
                if r.algorithm == algorithm and r.sdn_count == sdn_count
                and r.status == "ok"]
        if not vals:
            return None
        return sum(vals) / len(vals)

    def to_csv(self, include_summary: bool = True) -> str:
        lines = [CSV_HEADER]
        lines += [r.to_csv() for r in self.rows]
        if include_summary:
            lines += self._summary_lines()
        return "\n".join(lines) + "\n"

    def _summary_lines(self) -> list[str]:
        lines = ["# summary"]
        for algo in self.spec.algorithms:
            for count in self.spec.sdn_counts:
                ok = [r for r in self.rows
                      if r.algorithm == algo and r.sdn_count == count
                      and r.status == "ok"]
                if not ok:
                    lines.append(f"# algorithm={algo} sdn_count={count} n=0")
                    continue
                mean = sum(r.energy_saving_ratio for r in ok) / len(ok)
                lines.append(f"# algorithm={algo} sdn_count={count}"
                             f" mean_ratio={mean!r} n={len(ok)}")
        if "heate" in self.spec.algorithms:
            for other in self.spec.algorithms:
                if other == "heate":
                    continue
                for count in self.spec.sdn_counts:
                    a = self.mean_ratio("heate", count)
                    b = self.mean_ratio(other, count)
                    if a is None or b is None:
                        continue
                    lines.append(f"# gap heate-vs-{other} sdn_count={count}"
                                 f" mean_ratio_delta={a - b!r}")
        return lines


def run_experiment(topo: Topology, spec: ExperimentSpec) -> ExperimentResult:
    """Run every (sdn_count, matrix, algorithm) cell of the sweep.

    Matrices are drawn once per index and shared by all switch counts and
    algorithms, so comparisons see identical demand. Each switch count draws
    one placement shared by every matrix."""
    result = ExperimentResult(spec)
    matrices = [generate_matrix(topo, GeneratorParams(spec.matrix_seed(i), spec.sigma_max))
                for i in range(spec.n_matrices)]
    for count in spec.sdn_counts:
        placed = place_sdn(topo, count, spec.placement_seed(count))
        for i, tm in enumerate(matrices):
            for algo in spec.algorithms:
                cfg = SearchConfig(beta=spec.beta, iterations=spec.iterations)
                started = time.perf_counter()
                try:
                    run = ALGORITHMS[algo](placed, tm, cfg)
                    elapsed = (time.perf_counter() - started) * 1000.0
                    row = ExperimentRow(
                        algo, count, spec.matrix_seed(i),
                        run.energy_saving_ratio, run.max_utilization,
                        int(run.topology.n_active_links), run.rounds,
                        elapsed if spec.timing else 0.0, "ok")
                except InitialInfeasible as e:
                    elapsed = (time.perf_counter() - started) * 1000.0
                    log.info("infeasible: algo=%s sdn=%d seed=%d (%s)",
                             algo, count, spec.matrix_seed(i), e)
                    row = ExperimentRow(algo, count, spec.matrix_seed(i),
                                        None, None, None, None,
                                        elapsed if spec.timing else 0.0,
                                        "infeasible")
                result.rows.append(row)
            log.debug("matrix %d/%d done (sdn=%d)", i + 1, spec.n_matrices, count)
    return result
