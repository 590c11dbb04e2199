"""Leslie-Gower Holling type III predator-prey model with infected predators."""

from .dynamics import IntegratorOptions, Trajectory, check_boundedness, convergence_check, integrate
from .equilibria import Equilibrium, Family, enumerate_equilibria, real_roots
from .model import ModelParams, PopulationState, jacobian, rhs
from .presets import PRESET_PARAMS
from .stability import Verdict, classify, persistence_conditions, routh_hurwitz

__all__ = [
    "IntegratorOptions", "Trajectory", "check_boundedness", "convergence_check", "integrate",
    "Equilibrium", "Family", "enumerate_equilibria", "real_roots",
    "ModelParams", "PopulationState", "jacobian", "rhs",
    "PRESET_PARAMS",
    "Verdict", "classify", "persistence_conditions", "routh_hurwitz",
]
