"""Sparse regression with the nonconvex l_alpha penalty (0 < alpha <= 1)."""

__version__ = "0.1.0"

from .prox import PenaltySpec, ThresholdPair, lambda_max, prox, prox_map_T, scalar_objective, thresholds
from .solver import FitResult, SolverConfig, StandardizedDesign, adjusted_gradient, destandardize, fit, objective, standardize
from .selection import CvResult, LambdaGrid, PathResult, cross_validate, fit_path, kfold_split, make_lambda_grid, r2_oos, rmse

__all__ = [
    "PenaltySpec",
    "ThresholdPair",
    "thresholds",
    "scalar_objective",
    "prox",
    "prox_map_T",
    "lambda_max",
    "StandardizedDesign",
    "SolverConfig",
    "FitResult",
    "standardize",
    "objective",
    "adjusted_gradient",
    "fit",
    "destandardize",
    "LambdaGrid",
    "PathResult",
    "CvResult",
    "make_lambda_grid",
    "fit_path",
    "kfold_split",
    "cross_validate",
    "rmse",
    "r2_oos",
]
