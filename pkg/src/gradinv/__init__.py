"""Gradual semantics over weighted argumentation frameworks and their inverse problem."""

from .core import (
    AttackGraph,
    DegreeAssignment,
    Ranking,
    Semantics,
    WeightedFramework,
    attackers,
    induced_ranking,
    ranking_matches,
)
from .inverse import SolveReport, SolverConfig, Strategy, Termination, compute_bounds, solve
from .semantics import EvaluationResult, IterationConfig, evaluate, step

__version__ = "0.1.0"

__all__ = [
    "AttackGraph",
    "DegreeAssignment",
    "EvaluationResult",
    "IterationConfig",
    "Ranking",
    "Semantics",
    "SolveReport",
    "SolverConfig",
    "Strategy",
    "Termination",
    "WeightedFramework",
    "attackers",
    "compute_bounds",
    "evaluate",
    "induced_ranking",
    "ranking_matches",
    "solve",
    "step",
]
