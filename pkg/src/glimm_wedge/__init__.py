"""Glimm random-choice scheme for supersonic flow past a slender wedge.

The package solves the scaled two-by-two system for density and transverse
velocity, its exact Riemann problems (interior and at the wedge surface), the
random-choice marching scheme in the streamwise direction, and diagnostics
that monitor wave interactions, the interaction functional, the entropy
inequality and convergence as the slenderness goes to zero.
"""

from .diagnostics import FunctionalWeights, entropy_residual, functional_report
from .errors import GlimmWedgeError, NumericalError, UsageError
from .glimm import ApproxSolution, BumpProfile, ConstantProfile, Mesh, StepProfile, ThetaSequence, evaluate, run
from .interactions import CASES, ProbeSampler, interaction_probe
from .params import GasParams, PhysicalSetup, scaled_from_physical, tau_family
from .riemann import solve_boundary, solve_interior
from .similarity import StudyConfig, l1_distance, similarity_study
from .state import FlowState, invariants_of, state_of_invariants

__version__ = "0.1.0"

__all__ = [
    "ApproxSolution",
    "BumpProfile",
    "CASES",
    "ConstantProfile",
    "FlowState",
    "FunctionalWeights",
    "GasParams",
    "GlimmWedgeError",
    "Mesh",
    "NumericalError",
    "PhysicalSetup",
    "ProbeSampler",
    "StepProfile",
    "StudyConfig",
    "ThetaSequence",
    "UsageError",
    "entropy_residual",
    "evaluate",
    "functional_report",
    "interaction_probe",
    "invariants_of",
    "l1_distance",
    "run",
    "scaled_from_physical",
    "similarity_study",
    "solve_boundary",
    "solve_interior",
    "state_of_invariants",
    "tau_family",
]
