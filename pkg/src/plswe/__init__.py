"""Recover the rational solution of a polynomial linear system from evaluations, some of them wrong."""

from .algebra import Poly, PrimeField
from .bounds import DegreeContext, FixedBudget, LinearBudget, eval_count_base, l_glz, l_kpsw
from .earlyterm import Mode, Strategy, TerminationConfig, TerminationReport, run_early_termination
from .exceptions import PLSError
from .harness import ExperimentReport, ExperimentSpec, run_structure_experiment, run_termination_experiment
from .instance import PLSInstance, generate_instance, reference_solve
from .keyeq import EvaluationTable, KeyEqParams, RationalSolution, find_solution, solve_key_equations

__version__ = "0.1.0"

__all__ = [
    "DegreeContext", "EvaluationTable", "ExperimentReport", "ExperimentSpec", "FixedBudget", "KeyEqParams",
    "LinearBudget", "Mode", "PLSError", "PLSInstance", "Poly", "PrimeField", "RationalSolution", "Strategy",
    "TerminationConfig", "TerminationReport", "eval_count_base", "find_solution", "generate_instance", "l_glz",
    "l_kpsw", "reference_solve", "run_early_termination", "run_structure_experiment",
    "run_termination_experiment", "solve_key_equations",
]
