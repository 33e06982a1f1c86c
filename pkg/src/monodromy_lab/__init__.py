"""Numerical Hamiltonian monodromy for two-degree-of-freedom integrable systems."""

from .bifurcation import BifurcationDiagram, CriticalValue, count_pinch_points, scan_bifurcation
from .catalog import builtin, parse_system, resolve
from .geometry import SystemDescriptor, flow_joint, ham_vector_field, moment_map
from .lattice import LatticeConfig, LoopPath, PeriodLattice, find_fiber_point, lattice_at_value, period_lattice
from .model import crossing_matrix, model_affine_holonomy, model_monodromy
from .monodromy import MonodromyMatrix, monodromy_around, unipotent_normal_form, vanishing_cycle
from .williamson import WilliamsonType, classify_equilibrium, find_equilibria

__all__ = [
    "BifurcationDiagram",
    "CriticalValue",
    "LatticeConfig",
    "LoopPath",
    "MonodromyMatrix",
    "PeriodLattice",
    "SystemDescriptor",
    "WilliamsonType",
    "builtin",
    "classify_equilibrium",
    "count_pinch_points",
    "crossing_matrix",
    "find_equilibria",
    "find_fiber_point",
    "flow_joint",
    "ham_vector_field",
    "lattice_at_value",
    "model_affine_holonomy",
    "model_monodromy",
    "moment_map",
    "monodromy_around",
    "parse_system",
    "period_lattice",
    "resolve",
    "scan_bifurcation",
    "unipotent_normal_form",
    "vanishing_cycle",
]
