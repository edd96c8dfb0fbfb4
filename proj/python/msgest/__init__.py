"""Median selection subset aggregation estimator and its comparators."""

from ._core import (
    ConfigError,
    DataError,
    NumericalError,
    check_a1,
    check_a3,
    check_a4,
    generate_synthetic,
    geometric_median,
    lasso_cd,
    lasso_lambda_max,
    lasso_path,
    logistic_irls,
    median_model,
    ols_fit,
    precondition_elliptical,
    random_partition,
    run_method,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "check_a1",
    "check_a3",
    "check_a4",
    "generate_synthetic",
    "geometric_median",
    "lasso_cd",
    "lasso_lambda_max",
    "lasso_path",
    "logistic_irls",
    "median_model",
    "ols_fit",
    "precondition_elliptical",
    "random_partition",
    "run_method",
]
