"""Command-line entry point.

Subcommands: gen-tm (draw a traffic matrix), run (one optimizer on one
matrix), sweep (seeded CSV experiment), validate (check a certificate),
export-lp (write the exact model), oracle (exhaustive tiny-instance optimum).

Exit codes: 0 success, 1 infeasible instance or failed validation, 2 bad
usage or malformed input. Set HEATE_LOG=debug|info|... for progress logs.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .algorithms import run_ea_fa, run_ea_ospf, run_heate
from .errors import HeateError, InitialInfeasible, InstanceTooLarge
from .experiment import ALGORITHMS, ExperimentSpec, run_experiment
from .milp import (CONSTRAINTS, SolutionCertificate, brute_force_optimal,
                   certificate_from_state, export_lp, validate_certificate)
from .topology import load_topology_file, place_sdn
from .traffic import GeneratorParams, generate_matrix, load_matrix_file, save_matrix
from .weight_search import SearchConfig


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heate",
                                 description="Energy-aware traffic engineering "
                                             "for hybrid SDN/IP networks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-tm", help="generate a seeded traffic matrix")
    p.add_argument("--topology", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--sigma-max", type=float, default=0.1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run one optimizer on one matrix")
    p.add_argument("--topology", required=True)
    p.add_argument("--tm", required=True)
    p.add_argument("--algorithm", choices=sorted(ALGORITHMS), default="heate")
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--iterations", type=int, default=10000)
    p.add_argument("--sdn-count", type=int, default=None,
                   help="re-place this many switches before running")
    p.add_argument("--seed", type=int, default=0,
                   help="base seed for --sdn-count placement")
    p.add_argument("--dump-cert", default=None,
                   help="write the final-state certificate as JSON")

    p = sub.add_parser("sweep", help="run a seeded sweep and write CSV")
    p.add_argument("--topology", required=True)
    p.add_argument("--sdn-counts", type=_int_list, required=True,
                   help="comma-separated, e.g. 0,6,12")
    p.add_argument("--matrices", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--iterations", type=int, default=10000)
    p.add_argument("--algorithms", type=lambda s: s.split(","),
                   default=["heate", "ea-ospf", "ea-fa"])
    p.add_argument("--timing", action="store_true",
                   help="record wall time per run (makes output non-reproducible)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="check a certificate against the model")
    p.add_argument("--topology", required=True)
    p.add_argument("--tm", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--regime", choices=("strict", "ecmp"), default="strict")
    p.add_argument("--constraints", type=lambda s: s.split(","), default=None,
                   help=f"subset of: {','.join(CONSTRAINTS)}")

    p = sub.add_parser("export-lp", help="write the exact model as an LP file")
    p.add_argument("--topology", required=True)
    p.add_argument("--tm", required=True)
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--w-max", type=float, default=20.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle", help="exhaustive optimum for a tiny instance")
    p.add_argument("--topology", required=True)
    p.add_argument("--tm", required=True)
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--weight-set", type=_float_list, default=[1.0, 2.0, 3.0])
    p.add_argument("--max-links", type=int, default=8)
    p.add_argument("--dump-cert", default=None)
    return ap


def _cmd_gen_tm(args) -> int:
    topo = load_topology_file(args.topology)
    tm = generate_matrix(topo, GeneratorParams(args.seed, args.sigma_max))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(save_matrix(tm))
    print(f"wrote {args.out}: {tm.n_nodes} nodes, total demand {tm.total!r}")
    return 0


def _cmd_run(args) -> int:
    topo = load_topology_file(args.topology)
    if args.sdn_count is not None:
        topo = place_sdn(topo, args.sdn_count,
                         args.seed + 10 ** 6 + args.sdn_count)
    tm = load_matrix_file(args.tm)
    cfg = SearchConfig(beta=args.beta, iterations=args.iterations)
    result = {"heate": run_heate, "ea-ospf": run_ea_ospf,
              "ea-fa": run_ea_fa}[args.algorithm](topo, tm, cfg)
    print(f"algorithm: {args.algorithm}")
    print(f"energy_saving_ratio: {result.energy_saving_ratio!r}")
    print(f"active_links: {result.topology.n_active_links}"
          f" ({result.topology.n_active_physical} physical)")
    print(f"rounds: {result.rounds}")
    print(f"max_utilization: {result.max_utilization!r}")
    if args.dump_cert:
        cert = certificate_from_state(result.state, args.beta)
        with open(args.dump_cert, "w", encoding="utf-8") as fh:
            fh.write(cert.to_json())
        print(f"certificate: {args.dump_cert}")
    return 0


def _cmd_sweep(args) -> int:
    topo = load_topology_file(args.topology)
    spec = ExperimentSpec(sdn_counts=tuple(args.sdn_counts),
                          n_matrices=args.matrices, base_seed=args.seed,
                          beta=args.beta, iterations=args.iterations,
                          algorithms=tuple(args.algorithms),
                          timing=args.timing)
    result = run_experiment(topo, spec)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(result.to_csv())
    ok = sum(1 for r in result.rows if r.status == "ok")
    print(f"wrote {args.out}: {len(result.rows)} rows ({ok} ok)")
    return 0


def _cmd_validate(args) -> int:
    topo = load_topology_file(args.topology)
    tm = load_matrix_file(args.tm)
    with open(args.cert, "r", encoding="utf-8") as fh:
        cert = SolutionCertificate.from_json(fh.read())
    report = validate_certificate(topo, tm, cert, regime=args.regime,
                                  constraints=args.constraints)
    print(report.summary())
    for v in report.violations[:20]:
        print(f"  {v}")
    if len(report.violations) > 20:
        print(f"  ... and {len(report.violations) - 20} more")
    return 0 if report.ok else 1


def _cmd_export_lp(args) -> int:
    topo = load_topology_file(args.topology)
    tm = load_matrix_file(args.tm)
    text = export_lp(topo, tm, args.beta, args.w_max)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {args.out}: {len(text.splitlines())} lines")
    return 0


def _cmd_oracle(args) -> int:
    topo = load_topology_file(args.topology)
    tm = load_matrix_file(args.tm)
    res = brute_force_optimal(topo, tm, args.beta,
                              weight_set=tuple(args.weight_set),
                              max_links=args.max_links)
    print(f"optimal_active_links: {int(res.objective)}"
          f" ({int(res.objective) // 2} physical)")
    if args.dump_cert:
        with open(args.dump_cert, "w", encoding="utf-8") as fh:
            fh.write(res.certificate.to_json())
        print(f"certificate: {args.dump_cert}")
    return 0


def main(argv=None) -> int:
    level = os.environ.get("HEATE_LOG", "").strip().upper()
    if level:
        logging.basicConfig(level=getattr(logging, level, logging.INFO),
                            format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    handler = {
        "gen-tm": _cmd_gen_tm,
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
        "export-lp": _cmd_export_lp,
        "oracle": _cmd_oracle,
    }[args.command]
    try:
        return handler(args)
    except InitialInfeasible as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return 1
    except (InstanceTooLarge, HeateError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
