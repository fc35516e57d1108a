"""Markov-variation interpolation of partially sampled graph signals.

The signal is modelled as ``s = V Lambda s_hat`` (``s = P V s_hat``), and the
spectrum is the minimum-ℓ1 vector reproducing the samples within ``eta``.
Baselines: least squares over the same constraint matrix and ℓ1 spectral
regression over unscaled eigenvectors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NodeIndexError,
    SolverInfeasibleError,
)
from .graph import Graph, as_node_array, one_hop_closure
from .l1 import (
    DEFAULT_MAX_ITER,
    FEASIBILITY_RTOL,
    L1Problem,
    L1Solution,
    SolverStatus,
    solve_bp_box,
)
from .smoothness import markov_variation
from .spectral import SpectralBasis, spectral_markov_variation

logger = logging.getLogger(__name__)

#: Relative default for the residual tolerance: ``eta = scale * ||s_M||_inf``.
DEFAULT_ETA_SCALE = 1e-8


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Observed values ``values[k]`` at node ``indices[k]``."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices)
        if idx.size and not np.issubdtype(idx.dtype, np.integer):
            if not np.all(np.equal(np.mod(idx, 1), 0)):
                raise NodeIndexError("Sample indices must be integers")
        idx = idx.astype(np.int64).ravel()
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        if idx.size == 0:
            raise InvalidParameterError("Sample set must contain at least one node")
        if idx.shape != vals.shape:
            raise DimensionMismatchError(
                f"{idx.size} sample indices but {vals.size} sample values"
            )
        if idx.min() < 0:
            raise NodeIndexError(f"Negative sample index {int(idx.min())}")
        if np.unique(idx).size != idx.size:
            raise InvalidParameterError("Sample indices must be distinct")
        if not np.all(np.isfinite(vals)):
            raise InvalidParameterError("Sample values must be finite")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    @property
    def r(self) -> int:
        return int(self.indices.size)

    def validate_for(self, n: int) -> "SampleSet":
        as_node_array(self.indices, n)
        return self

    @classmethod
    def from_signal(cls, signal, indices) -> "SampleSet":
        signal = np.asarray(signal, dtype=np.float64)
        idx = as_node_array(indices, signal.shape[0])
        return cls(idx, signal[idx])


@dataclass(frozen=True)
class IterationRecord:
    active_size: int
    spectrum_l1: float
    residual_inf: float
    markov_variation: float

    def to_dict(self) -> dict:
        return {
            "active_size": self.active_size,
            "spectrum_l1": self.spectrum_l1,
            "residual_inf": self.residual_inf,
            "markov_variation": self.markov_variation,
        }


@dataclass(frozen=True, eq=False)
class InterpolationResult:
    """Interpolated signal plus the spectrum and per-iteration diagnostics.

    ``status`` is ``optimal``, ``iteration_limit``, ``converged``, ``stalled``
    or ``fallback``; ``fallback`` is set when a least-squares solve replaced
    an infeasible ℓ1 problem.
    """

    signal: np.ndarray
    spectrum: np.ndarray
    method: str
    status: str
    iterations: Tuple[IterationRecord, ...] = ()
    eta: float = 0.0
    bandwidth: int = 0
    fallback: bool = False
    unreached: Tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "status": self.status,
            "eta": self.eta,
            "bandwidth": self.bandwidth,
            "fallback": self.fallback,
            "unreached": list(self.unreached),
            "iterations": [rec.to_dict() for rec in self.iterations],
        }


def _bandwidth(basis, m: Optional[int]) -> int:
    width = int(basis.eigenvectors.shape[1])
    if m is None:
        return width
    m = int(m)
    if m < 1 or m > width:
        raise InvalidParameterError(f"Spectrum width must be in 1..{width}, got {m}")
    return m


def constraint_matrix(basis, M: Sequence[int], m: Optional[int] = None) -> np.ndarray:
    """Return ``[lambda_1 psi_1(M) ... lambda_m psi_m(M)]`` (rows in ``M`` order)."""
    rows = as_node_array(M, basis.eigenvectors.shape[0])
    m = _bandwidth(basis, m)
    return basis.eigenvectors[rows, :m] * basis.eigenvalues[:m]


def reconstruct(basis, spectrum: np.ndarray, scaled: bool = True) -> np.ndarray:
    """``V Lambda spectrum`` (or ``V spectrum`` when ``scaled`` is false)."""
    m = spectrum.shape[0]
    coeffs = basis.eigenvalues[:m] * spectrum if scaled else spectrum
    return basis.eigenvectors[:, :m] @ coeffs


def default_eta(samples: SampleSet, scale: float = DEFAULT_ETA_SCALE) -> float:
    return float(scale * np.max(np.abs(samples.values)))


def _signal_variation(basis, signal: np.ndarray, graph: Optional[Graph]) -> float:
    if graph is not None:
        return markov_variation(graph, signal, 2)
    if isinstance(basis, SpectralBasis):
        return spectral_markov_variation(basis, signal, 2)
    return float("nan")


def _solve(
    A: np.ndarray, b: np.ndarray, eta: float, max_iter: int
) -> L1Solution:
    return solve_bp_box(L1Problem(A, b, eta), max_iter=max_iter)


def _raise_infeasible(solution: L1Solution, what: str) -> None:
    raise SolverInfeasibleError(
        f"{what}: no spectrum reproduces the samples within eta "
        f"({solution.message})",
        solution=solution,
    )


def interpolate_one_shot(
    basis,
    samples: SampleSet,
    eta: Optional[float] = None,
    m: Optional[int] = None,
    graph: Optional[Graph] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    eta_scale: float = DEFAULT_ETA_SCALE,
    method: str = "oneshot",
) -> InterpolationResult:
    """Minimum-ℓ1 spectrum fit to the samples, reconstructed on all nodes.

    ``basis`` is an exact :class:`SpectralBasis` or a Nyström approximation;
    ``m`` defaults to every available eigenpair.
    """
    samples.validate_for(basis.eigenvectors.shape[0])
    m = _bandwidth(basis, m)
    eta = default_eta(samples, eta_scale) if eta is None else float(eta)
    if m < samples.r:
        logger.warning(
            f"Spectrum width m={m} is smaller than the sample count r={samples.r}"
        )

    A = constraint_matrix(basis, samples.indices, m)
    solution = _solve(A, samples.values, eta, max_iter)
    if solution.status is SolverStatus.INFEASIBLE:
        _raise_infeasible(solution, "One-shot interpolation")

    signal = reconstruct(basis, solution.y)
    record = IterationRecord(
        active_size=samples.r,
        spectrum_l1=solution.objective,
        residual_inf=solution.residual_inf,
        markov_variation=_signal_variation(basis, signal, graph),
    )
    return InterpolationResult(
        signal=signal,
        spectrum=solution.y,
        method=method,
        status=solution.status.value,
        iterations=(record,),
        eta=eta,
        bandwidth=m,
    )


def _keep_if_feasible(
    basis,
    previous: L1Solution,
    current: L1Solution,
    active: np.ndarray,
    assigned: np.ndarray,
    eta: float,
) -> L1Solution:
    """Return ``previous`` when it satisfies the grown constraint set.

    The grown feasible set lies inside the previous one, so a previous
    optimum that stays feasible is still optimal.
    """
    if current.status is not SolverStatus.OPTIMAL:
        return current
    values = assigned[active]
    fitted = reconstruct(basis, previous.y)[active]
    residual = float(np.max(np.abs(fitted - values)))
    feastol = FEASIBILITY_RTOL * (1.0 + float(np.max(np.abs(values))))
    if residual > eta + feastol:
        return current
    return L1Solution(
        y=previous.y,
        objective=previous.objective,
        residual_inf=residual,
        status=previous.status,
        message=current.message,
    )


#: One solve of the iterative loop: ``(active nodes, values) -> (basis, solution)``.
StepSolver = Callable[[np.ndarray, np.ndarray], Tuple[object, L1Solution]]


def run_iterative(
    g: Graph,
    samples: SampleSet,
    step: StepSolver,
    eta: float,
    method: str,
    bandwidth: Callable[[object], int],
) -> InterpolationResult:
    """Grow the active set by one-hop closure until it stops changing.

    Each pass solves for the active set, then assigns the newly added nodes
    the current graph signal ``V Lambda s_hat``. Original samples and values
    assigned in earlier passes are never overwritten. When the basis is
    unchanged and the previous spectrum still fits every active node within
    ``eta``, it stays the solution, so the signal only changes when the new
    constraints require it.
    """
    n = g.n
    samples.validate_for(n)
    assigned = np.full(n, np.nan)
    assigned[samples.indices] = samples.values
    active = np.sort(samples.indices)

    records: List[IterationRecord] = []
    basis, solution, status = None, None, "converged"
    while True:
        cur_basis, cur = step(active, assigned[active])
        if cur.status is SolverStatus.INFEASIBLE:
            if solution is None:
                _raise_infeasible(cur, "Iterative interpolation")
            logger.warning(
                f"Iteration {len(records) + 1} is infeasible with "
                f"{active.size} active nodes; keeping the previous iterate"
            )
            status = "stalled"
            break
        if solution is not None and cur_basis is basis:
            cur = _keep_if_feasible(basis, solution, cur, active, assigned, eta)
        basis, solution = cur_basis, cur
        if cur.status is SolverStatus.ITERATION_LIMIT:
            status = SolverStatus.ITERATION_LIMIT.value

        signal = reconstruct(basis, solution.y)
        records.append(
            IterationRecord(
                active_size=int(active.size),
                spectrum_l1=solution.objective,
                residual_inf=solution.residual_inf,
                markov_variation=markov_variation(g, signal, 2),
            )
        )
        logger.debug(
            f"{method} iteration {len(records)}: |M|={active.size}, "
            f"l1={solution.objective:.6g}"
        )

        grown = one_hop_closure(g, active)
        if grown.size == active.size:
            break
        new = np.setdiff1d(grown, active, assume_unique=True)
        assigned[new] = signal[new]
        active = grown

    unreached = np.setdiff1d(np.arange(n), active, assume_unique=True)
    if unreached.size:
        shown = ", ".join(str(v) for v in unreached[:20])
        more = "" if unreached.size <= 20 else f" (+{unreached.size - 20} more)"
        logger.warning(
            f"{unreached.size} nodes are not connected to any sample: {shown}{more}"
        )

    return InterpolationResult(
        signal=reconstruct(basis, solution.y),
        spectrum=solution.y,
        method=method,
        status=status,
        iterations=tuple(records),
        eta=eta,
        bandwidth=bandwidth(basis),
        unreached=tuple(int(v) for v in unreached),
    )


def interpolate_iterative(
    g: Graph,
    basis: SpectralBasis,
    samples: SampleSet,
    eta: Optional[float] = None,
    m: Optional[int] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    eta_scale: float = DEFAULT_ETA_SCALE,
) -> InterpolationResult:
    """Iterative interpolation over a fixed exact basis."""
    if basis.n != g.n:
        raise DimensionMismatchError(
            f"Basis over {basis.n} nodes does not match graph with {g.n} nodes"
        )
    m = _bandwidth(basis, m)
    eta = default_eta(samples, eta_scale) if eta is None else float(eta)
    if m < samples.r:
        logger.warning(
            f"Spectrum width m={m} is smaller than the sample count r={samples.r}"
        )

    def step(active: np.ndarray, values: np.ndarray):
        A = constraint_matrix(basis, active, m)
        return basis, _solve(A, values, eta, max_iter)

    return run_iterative(g, samples, step, eta, "iterative", lambda _: m)


def least_squares_baseline(
    basis, samples: SampleSet, m: Optional[int] = None
) -> InterpolationResult:
    """Minimum-norm least-squares spectrum over the constraint matrix."""
    samples.validate_for(basis.eigenvectors.shape[0])
    m = _bandwidth(basis, m)
    A = constraint_matrix(basis, samples.indices, m)
    spectrum, _, _, _ = linalg.lstsq(A, samples.values)
    residual = float(np.max(np.abs(A @ spectrum - samples.values)))
    signal = reconstruct(basis, spectrum)
    record = IterationRecord(
        active_size=samples.r,
        spectrum_l1=float(np.sum(np.abs(spectrum))),
        residual_inf=residual,
        markov_variation=_signal_variation(basis, signal, None),
    )
    return InterpolationResult(
        signal=signal,
        spectrum=spectrum,
        method="lsq",
        status="optimal",
        iterations=(record,),
        bandwidth=m,
    )


def spectral_regression_baseline(
    basis,
    samples: SampleSet,
    K: int,
    max_iter: int = DEFAULT_MAX_ITER,
) -> InterpolationResult:
    """ℓ1 fit over the ``K`` leading unscaled eigenvectors (exact constraints).

    An infeasible system falls back to least squares on the same columns and
    sets ``fallback``.
    """
    samples.validate_for(basis.eigenvectors.shape[0])
    K = _bandwidth(basis, K)
    A = basis.eigenvectors[samples.indices, :K]
    solution = _solve(A, samples.values, 0.0, max_iter)
    fallback = solution.status is SolverStatus.INFEASIBLE
    if fallback:
        logger.warning(
            f"Spectral regression with K={K} is infeasible; "
            "falling back to least squares"
        )
        spectrum, _, _, _ = linalg.lstsq(A, samples.values)
        status = "fallback"
    else:
        spectrum = solution.y
        status = solution.status.value

    signal = reconstruct(basis, spectrum, scaled=False)
    record = IterationRecord(
        active_size=samples.r,
        spectrum_l1=float(np.sum(np.abs(spectrum))),
        residual_inf=float(np.max(np.abs(A @ spectrum - samples.values))),
        markov_variation=_signal_variation(basis, signal, None),
    )
    return InterpolationResult(
        signal=signal,
        spectrum=spectrum,
        method="specreg",
        status=status,
        iterations=(record,),
        bandwidth=K,
        fallback=fallback,
    )


__all__ = [
    "DEFAULT_ETA_SCALE",
    "SampleSet",
    "IterationRecord",
    "InterpolationResult",
    "constraint_matrix",
    "reconstruct",
    "default_eta",
    "interpolate_one_shot",
    "run_iterative",
    "interpolate_iterative",
    "least_squares_baseline",
    "spectral_regression_baseline",
]
