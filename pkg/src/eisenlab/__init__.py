"""Verification toolkit for Eisenhart-lifted superintegrable Hamiltonians."""

from .catalog import SystemSpec, ZProfile, build_system, evaluate
from .charts import from_cartesian, get_chart, symplectomorphism_check, to_cartesian
from .core import (Observable, PhasePoint, grad_phase, hamiltonian_vector_field,
                   poisson_bracket)
from .errors import (ArgumentError, ConvergenceError, DegreeError, DimensionMismatch,
                     DomainError, EisenlabError, NonFiniteError, SamplerExhausted, SingularMetric,
                     SpecError, UnknownObservable)

__version__ = "0.1.0"

__all__ = [
    "SystemSpec", "ZProfile", "build_system", "evaluate", "from_cartesian", "get_chart",
    "symplectomorphism_check", "to_cartesian", "Observable", "PhasePoint", "grad_phase",
    "hamiltonian_vector_field", "poisson_bracket", "ArgumentError", "ConvergenceError",
    "DegreeError", "DimensionMismatch", "DomainError", "EisenlabError", "NonFiniteError",
    "SamplerExhausted", "SingularMetric", "SpecError", "UnknownObservable",
]
