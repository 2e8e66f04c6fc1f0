"""Program benchmarks for small superconducting quantum computers.

Builds benchmark circuits, simulates them ideally and under an
architecture-aware noise model, and scores device output with
Hellinger-distance benchmarks (alpha, beta, gamma).
"""

from progbench.errors import SimulationCapError, ValidationError
from progbench.circuit import Circuit, CircuitStats, Gate, GateKind, circuit_stats
from progbench.architecture import ArchitectureSpec, NoiseParameters, load_architecture
from progbench.routing import route
from progbench.statevector import (
    Counts,
    OutcomeDistribution,
    StateVector,
    measure_distribution,
    run_ideal,
    sample,
)
from progbench.noisy import (
    DensityMatrix,
    KrausChannel,
    depolarizing,
    run_noisy,
    thermal_relaxation,
)
from progbench.metrics import (
    BenchmarkReport,
    compute_benchmarks,
    counts_to_distribution,
    hellinger,
)

__all__ = [
    "ArchitectureSpec",
    "BenchmarkReport",
    "Circuit",
    "CircuitStats",
    "Counts",
    "DensityMatrix",
    "Gate",
    "GateKind",
    "KrausChannel",
    "NoiseParameters",
    "OutcomeDistribution",
    "SimulationCapError",
    "StateVector",
    "ValidationError",
    "circuit_stats",
    "compute_benchmarks",
    "counts_to_distribution",
    "depolarizing",
    "hellinger",
    "load_architecture",
    "measure_distribution",
    "route",
    "run_ideal",
    "run_noisy",
    "sample",
    "thermal_relaxation",
]

__version__ = "0.1.0"
