"""Numerical verification of Heinz/Heron-type mean inequalities for positive definite matrices."""
from .errors import DomainError, HeinzLabError, HypothesisViolation, NumericalError, ValidationError
from .linalg import HermitianPD, hermitian_eig, random_pd, singular_values
from .means import MeanPair, MeanParams
from .norms import KyFan, Schatten, norm, parse_norm
from .policy import Tolerances, get_policy, set_policy
from .suite import REGISTRY, InstanceSpec, run_check, run_suite, scan_drissi

__version__ = "0.1.0"

__all__ = [
    "DomainError", "HeinzLabError", "HermitianPD", "HypothesisViolation", "InstanceSpec", "KyFan", "MeanPair",
    "MeanParams", "NumericalError", "REGISTRY", "Schatten", "Tolerances", "ValidationError", "get_policy",
    "hermitian_eig", "norm", "parse_norm", "random_pd", "run_check", "run_suite", "scan_drissi", "set_policy",
    "singular_values",
]
