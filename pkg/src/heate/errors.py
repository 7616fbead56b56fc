"""Exception types shared across the package."""


class HeateError(Exception):
    """Base class for all package errors."""


class TopologyError(HeateError):
    """Malformed topology file or inconsistent topology operation."""


class TrafficError(HeateError):
    """Malformed traffic-matrix file or invalid demand data."""


class DegenerateDenominator(TrafficError):
    """Gravity denominator (total capacity minus node egress) is not positive."""


class UnroutableDemand(HeateError):
    """A demand has no path to its destination on the active subgraph."""

    def __init__(self, source, destination):
        self.source = source
        self.destination = destination
        super().__init__(f"no active path from node {source} to node {destination}")


class NoPath(HeateError):
    """A switch has no candidate path toward the requested destination."""


class InsufficientCapacity(HeateError):
    """Candidate paths cannot absorb the injected volume within beta headroom."""


class InitialInfeasible(HeateError):
    """The full topology cannot carry the traffic matrix within beta."""


class InstanceTooLarge(HeateError):
    """Instance exceeds the exhaustive-search size guard."""
