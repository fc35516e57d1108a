"""Smoothness measures for graph signals.

Three measures are provided: the graph total variation ``||s - A~ s||_p`` with
``A~ = W / |lambda_max(W)|``, the Laplacian quadratic form ``s^T (D - W) s`` and
the Markov variation ``||s - P s||_p``. Only the Markov variation vanishes on
every constant signal of every graph.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import sparse

from .errors import DimensionMismatchError, InvalidParameterError
from .graph import Graph, graph_shift, markov_matrix

logger = logging.getLogger(__name__)

NormOrder = Union[int, float, str]

MEASURES = ("total_variation", "laplacian_quadratic", "markov_variation")

POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_MAX_ITER = 10_000


@dataclass(frozen=True)
class SmoothnessReport:
    measure: str
    p: Optional[float]
    value: float


def parse_norm_order(p: NormOrder) -> float:
    """Normalize a norm order to ``1.0``, ``2.0`` or ``inf``."""
    if isinstance(p, str):
        key = p.strip().lower()
        if key in ("inf", "infinity", "max"):
            return float("inf")
        try:
            p = float(key)
        except ValueError as exc:
            raise InvalidParameterError(f"Unsupported norm order '{p}'") from exc
    value = float(p)
    if value not in (1.0, 2.0, float("inf")):
        raise InvalidParameterError(f"Norm order must be 1, 2 or inf, got {p}")
    return value


def vector_norm(x: np.ndarray, p: NormOrder = 2) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.linalg.norm(x, ord=parse_norm_order(p)))


def _signal(g: Graph, s) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 1 or s.shape[0] != g.n:
        raise DimensionMismatchError(
            f"Signal of shape {s.shape} does not match N={g.n}"
        )
    return s


def markov_variation(g: Graph, s, p: NormOrder = 2) -> float:
    """Return ``||s - P s||_p``."""
    s = _signal(g, s)
    return vector_norm(s - graph_shift(markov_matrix(g), s), p)


def spectral_radius(
    W,
    tol: float = POWER_ITERATION_TOL,
    max_iter: int = POWER_ITERATION_MAX_ITER,
) -> float:
    """Largest eigenvalue magnitude of a symmetric nonnegative matrix.

    Power iteration from the all-ones vector; the estimate is ``||W x_k||`` for
    unit ``x_k``, which also converges on bipartite graphs where the iterate
    itself oscillates.
    """
    W = sparse.csr_matrix(W)
    if W.nnz == 0 or not np.any(W.data):
        raise InvalidParameterError("Spectral radius of an all-zero affinity is zero")
    x = np.ones(W.shape[0]) / np.sqrt(W.shape[0])
    estimate = 0.0
    for _ in range(max_iter):
        y = W @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return 0.0
        if abs(norm - estimate) <= tol * norm:
            return norm
        estimate = norm
        x = y / norm
    logger.warning(
        f"Power iteration did not converge in {max_iter} iterations "
        f"(estimate {estimate:.12g})"
    )
    return estimate


def total_variation(
    g: Graph,
    s,
    p: NormOrder = 2,
    shift=None,
    tol: float = POWER_ITERATION_TOL,
    max_iter: int = POWER_ITERATION_MAX_ITER,
) -> float:
    """Return ``||s - A~ s||_p``.

    By default ``A~ = W / |lambda_max(W)|``; pass ``shift`` to use an already
    normalized operator instead (for ``shift = P`` this equals the Markov
    variation).
    """
    s = _signal(g, s)
    if shift is None:
        rho = spectral_radius(g.affinity, tol=tol, max_iter=max_iter)
        if rho == 0.0:
            raise InvalidParameterError("Affinity has zero spectral radius")
        shift = g.affinity / rho
    return vector_norm(s - graph_shift(shift, s), p)


def laplacian_quadratic(g: Graph, s) -> float:
    """Return ``1/2 * sum_ij W_ij (s_i - s_j)^2``."""
    s = _signal(g, s)
    coo = g.affinity.tocoo()
    diff = s[coo.row] - s[coo.col]
    return float(0.5 * np.sum(coo.data * diff * diff))


def is_smooth(g: Graph, s, eta: float, p: NormOrder = 2) -> bool:
    if eta <= 0:
        raise InvalidParameterError(f"Smoothness threshold must be positive, got {eta}")
    return markov_variation(g, s, p) < eta


def smoothness_report(
    g: Graph,
    s,
    measure: str,
    p: NormOrder = 2,
    tol: float = POWER_ITERATION_TOL,
    max_iter: int = POWER_ITERATION_MAX_ITER,
) -> SmoothnessReport:
    """Evaluate one of :data:`MEASURES` and wrap the value."""
    if measure == "markov_variation":
        value = markov_variation(g, s, p)
        return SmoothnessReport(measure, parse_norm_order(p), value)
    if measure == "total_variation":
        value = total_variation(g, s, p, tol=tol, max_iter=max_iter)
        return SmoothnessReport(measure, parse_norm_order(p), value)
    if measure == "laplacian_quadratic":
        return SmoothnessReport(measure, None, laplacian_quadratic(g, s))
    raise InvalidParameterError(
        f"Unknown measure '{measure}', expected one of {', '.join(MEASURES)}"
    )


__all__ = [
    "MEASURES",
    "SmoothnessReport",
    "parse_norm_order",
    "vector_norm",
    "markov_variation",
    "spectral_radius",
    "total_variation",
    "laplacian_quadratic",
    "is_smooth",
    "smoothness_report",
]
