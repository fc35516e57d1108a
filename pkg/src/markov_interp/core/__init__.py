from .errors import (
    DimensionMismatchError,
    FormatError,
    InvalidParameterError,
    IsolatedNodeError,
    MarkovInterpError,
    NodeIndexError,
    NumericalError,
    SingularEigenvalueError,
    SolverInfeasibleError,
    SpectralSizeError,
    UndefinedMetricError,
)
from .graph import Graph, PointCloud, RowStochasticMatrix, SensorTable
from .interpolation import InterpolationResult, IterationRecord, SampleSet
from .l1 import L1Problem, L1Solution, SolverStatus, solve_bp_box
from .nystrom import ApproxBasis, KernelBlocks
from .spectral import DiffusionEmbedding, SpectralBasis
from .workbench import Workbench

__all__ = [
    "Workbench",
    "Graph",
    "PointCloud",
    "SensorTable",
    "RowStochasticMatrix",
    "SpectralBasis",
    "DiffusionEmbedding",
    "ApproxBasis",
    "KernelBlocks",
    "SampleSet",
    "IterationRecord",
    "InterpolationResult",
    "L1Problem",
    "L1Solution",
    "SolverStatus",
    "solve_bp_box",
    "MarkovInterpError",
    "InvalidParameterError",
    "NodeIndexError",
    "DimensionMismatchError",
    "IsolatedNodeError",
    "SpectralSizeError",
    "UndefinedMetricError",
    "FormatError",
    "NumericalError",
    "SingularEigenvalueError",
    "SolverInfeasibleError",
]
