"""Interpretable kernel dimension reduction for compositional data.

Learns a column-stochastic matrix that maps high-dimensional compositions
onto a low-dimensional simplex while preserving all information the
composition carries about a response, by minimizing a kernel
conditional-covariance trace under projected gradient descent.
"""

from .errors import CkdrError
from .kernels import GramMatrix, KernelSpec, center_gram, gram, median_heuristic
from .metrics import (
    Subspace,
    adjusted_rand_index,
    chordal_distance,
    cluster_columns,
    numerical_rank,
)
from .model_selection import CVReport, Grid, cross_validate, kfold_split
from .objective import (
    ObjectiveContext,
    conditional_trace,
    krr_equivalent_loss,
    trace_gradient,
    trace_objective,
)
from .optimizer import FitConfig, FitResult, fit_ckdr, fitted_kernel, random_init
from .predictor import (
    FittedModel,
    fit_dual,
    load_model,
    out_of_sample_error,
    predict_class,
    predict_real,
    prediction_weights,
    save_model,
    squared_prediction_error,
)
from .simdata import (
    SimSpec,
    block_labels,
    generate_responses,
    relative_shift_cdr,
    relative_shift_readout,
    sample_compositions,
    true_subspace,
)
from .simplex import (
    amalgamation_matrix,
    apply_cdr,
    cdr_from_subspace,
    detect_amalgamation,
    project_columns_to_simplex,
    project_vector_to_simplex,
    validate_cdr_matrix,
    validate_composition,
)
from .ternary import (
    PlotSpec,
    TernaryPoint,
    render_allocation_plot,
    render_decision_boundary,
    render_projection_plot,
    ternary_coords,
)

__version__ = "0.1.0"

__all__ = [
    "CkdrError",
    "CVReport",
    "FitConfig",
    "FitResult",
    "FittedModel",
    "GramMatrix",
    "Grid",
    "KernelSpec",
    "ObjectiveContext",
    "PlotSpec",
    "SimSpec",
    "Subspace",
    "TernaryPoint",
    "adjusted_rand_index",
    "amalgamation_matrix",
    "apply_cdr",
    "block_labels",
    "cdr_from_subspace",
    "center_gram",
    "chordal_distance",
    "cluster_columns",
    "conditional_trace",
    "cross_validate",
    "detect_amalgamation",
    "fit_ckdr",
    "fit_dual",
    "fitted_kernel",
    "generate_responses",
    "gram",
    "kfold_split",
    "krr_equivalent_loss",
    "load_model",
    "median_heuristic",
    "numerical_rank",
    "out_of_sample_error",
    "predict_class",
    "predict_real",
    "prediction_weights",
    "project_columns_to_simplex",
    "project_vector_to_simplex",
    "random_init",
    "relative_shift_cdr",
    "relative_shift_readout",
    "render_allocation_plot",
    "render_decision_boundary",
    "render_projection_plot",
    "sample_compositions",
    "save_model",
    "squared_prediction_error",
    "ternary_coords",
    "trace_gradient",
    "trace_objective",
    "true_subspace",
    "validate_cdr_matrix",
    "validate_composition",
]
