"""Energy-aware traffic engineering for hybrid SDN/IP backbones: joint link
weight search and switch flow placement that powers down spare links."""

from .algorithms import (HeateResult, energy_saving_ratio, run_ea_fa,
                         run_ea_ospf, run_heate)
from .errors import (HeateError, InitialInfeasible, InstanceTooLarge,
                     InsufficientCapacity, NoPath, TopologyError, TrafficError,
                     UnroutableDemand)
from .experiment import ExperimentResult, ExperimentSpec, run_experiment
from .milp import (OracleResult, SolutionCertificate, ViolationReport,
                   brute_force_optimal, certificate_from_state, export_lp,
                   validate_certificate)
from .routing import (RoutingState, SptResult, injected_sdn_flows,
                      load_flows_ecmp, load_flows_forwarded, max_utilization,
                      min_utilization_active_link, shortest_path_tree)
from .sdn_alloc import CandidatePath, SdnAllocation, candidate_paths, flow_allocation
from .topology import (Link, Node, NodeKind, Topology, assign_capacities,
                       deactivate_link, load_topology, load_topology_file,
                       place_sdn, reactivate_link, save_topology)
from .traffic import (GeneratorParams, TrafficMatrix, generate_matrix,
                      load_matrix, load_matrix_file, matrix_from_sigmas,
                      save_matrix)
from .weight_search import SearchConfig, neighboring_region_search

__version__ = "0.1.0"

__all__ = [
    "CandidatePath", "ExperimentResult", "ExperimentSpec", "GeneratorParams",
    "HeateError", "HeateResult", "InitialInfeasible", "InstanceTooLarge",
    "InsufficientCapacity", "Link", "NoPath", "Node", "NodeKind",
    "OracleResult", "RoutingState", "SdnAllocation", "SearchConfig",
    "SolutionCertificate", "SptResult", "Topology", "TopologyError",
    "TrafficError", "TrafficMatrix", "UnroutableDemand", "ViolationReport",
    "assign_capacities", "brute_force_optimal", "candidate_paths",
    "certificate_from_state", "deactivate_link", "energy_saving_ratio",
    "export_lp", "flow_allocation", "generate_matrix", "injected_sdn_flows",
    "load_flows_ecmp", "load_flows_forwarded", "load_matrix", "load_matrix_file", "load_topology",
    "load_topology_file", "matrix_from_sigmas", "max_utilization",
    "min_utilization_active_link", "neighboring_region_search", "place_sdn",
    "reactivate_link", "run_ea_fa", "run_ea_ospf", "run_experiment",
    "run_heate", "save_matrix", "save_topology", "shortest_path_tree",
    "validate_certificate",
]
