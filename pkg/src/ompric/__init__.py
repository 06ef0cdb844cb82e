"""Orthogonal Matching Pursuit and exact restricted isometry constants for small matrices."""

from ._accel import BACKEND
from .counterexample import build_matrix, build_signal, verify
from .model import SparseSignal, apply, correlations, load_matrix, save_matrix
from .numerics import gram, least_squares, sym_eigenvalues
from .omp import TieBreakPolicy, omp_run, recovers, select_index
from .rip import check_lemma1, ric_exact, theorem1_condition

__all__ = [
    "BACKEND",
    "SparseSignal",
    "TieBreakPolicy",
    "apply",
    "build_matrix",
    "build_signal",
    "check_lemma1",
    "correlations",
    "gram",
    "least_squares",
    "load_matrix",
    "omp_run",
    "recovers",
    "ric_exact",
    "save_matrix",
    "select_index",
    "sym_eigenvalues",
    "theorem1_condition",
    "verify",
]
