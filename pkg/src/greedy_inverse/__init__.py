"""Greedy subsampling of indirect measurements with kernel interpolation and Landweber inversion."""

from .errors import (
    DivergenceDetected,
    DivisionByZero,
    DuplicateNodes,
    GreedyInverseError,
    IoError,
    NoConvergence,
    NumericalBreakdown,
    NumericalError,
    ReconstructorFailure,
    SingularMatrix,
    SourceOutOfField,
    ValidationError,
)
from .fourier import FrequencyGrid, ImageGrid, grid_adjoint, grid_forward, ndft_forward, operator_norm_sq
from .greedy import GreedyConfig, PowerState, SelectionResult, select_error_based, select_residual, update_power_cheap
from .kernels import (
    InterpolationModel,
    KernelConfig,
    KernelSystem,
    LebesgueEstimate,
    NodeSet,
    assemble_kernel_matrix,
    cardinal_values,
    default_shape,
    eval_interpolant,
    fill_distance,
    fit_interpolant,
    kernel_eval,
    lebesgue_constant,
    lebesgue_function,
    lebesgue_upper_bound,
    native_norm,
    power_function,
)
from .landweber import LandweberConfig, LandweberResult, landweber, landweber_solve, regularizer_norm
from .pipeline import (
    Experiment,
    ExperimentConfig,
    ExperimentResult,
    ReconstructionReport,
    chi2,
    chi2_sq,
    mre,
    reconstruct,
    rmse,
    run_experiment,
)
from .simulation import (
    FIXTURES,
    FrequencySample,
    GaussianComponent,
    SourceConfig,
    Visibilities,
    fibonacci_nodes,
    fixture,
    render_source,
    simulate_visibilities,
)

__version__ = "0.1.0"

__all__ = [
    "DivergenceDetected",
    "DivisionByZero",
    "DuplicateNodes",
    "Experiment",
    "ExperimentConfig",
    "ExperimentResult",
    "FIXTURES",
    "FrequencyGrid",
    "FrequencySample",
    "GaussianComponent",
    "GreedyConfig",
    "GreedyInverseError",
    "ImageGrid",
    "InterpolationModel",
    "IoError",
    "KernelConfig",
    "KernelSystem",
    "LandweberConfig",
    "LandweberResult",
    "LebesgueEstimate",
    "NoConvergence",
    "NodeSet",
    "NumericalBreakdown",
    "NumericalError",
    "PowerState",
    "ReconstructionReport",
    "ReconstructorFailure",
    "SelectionResult",
    "SingularMatrix",
    "SourceConfig",
    "SourceOutOfField",
    "ValidationError",
    "Visibilities",
    "assemble_kernel_matrix",
    "cardinal_values",
    "chi2",
    "chi2_sq",
    "default_shape",
    "eval_interpolant",
    "fibonacci_nodes",
    "fill_distance",
    "fit_interpolant",
    "fixture",
    "grid_adjoint",
    "grid_forward",
    "kernel_eval",
    "landweber",
    "landweber_solve",
    "lebesgue_constant",
    "lebesgue_function",
    "lebesgue_upper_bound",
    "mre",
    "native_norm",
    "ndft_forward",
    "operator_norm_sq",
    "power_function",
    "reconstruct",
    "regularizer_norm",
    "render_source",
    "rmse",
    "run_experiment",
    "select_error_based",
    "select_residual",
    "simulate_visibilities",
    "update_power_cheap",
]
