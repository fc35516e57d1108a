"""Interpolation methods by name, plus class-indicator interpolation."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import InvalidParameterError
from .experiments import cluster_indicator_signals, decode_classes
from .graph import Graph, as_node_array
from .interpolation import (
    DEFAULT_ETA_SCALE,
    InterpolationResult,
    SampleSet,
    interpolate_iterative,
    interpolate_one_shot,
    least_squares_baseline,
    spectral_regression_baseline,
)
from .l1 import DEFAULT_MAX_ITER
from .nystrom import DEFAULT_MODE, interpolate_nystrom
from .spectral import DEFAULT_SOFT_LIMIT, markov_eigs

logger = logging.getLogger(__name__)

METHODS = ("oneshot", "iterative", "lsq", "specreg", "nystrom")

#: Methods that work on the exact Markov eigendecomposition.
EXACT_METHODS = ("oneshot", "iterative", "lsq", "specreg")


@dataclass(frozen=True)
class MethodOptions:
    """Per-call parameters; ``bandwidth`` is ``m`` (or ``K`` for specreg)."""

    eta: Optional[float] = None
    bandwidth: Optional[int] = None
    mode: str = DEFAULT_MODE
    iterative: bool = False
    max_iter: int = DEFAULT_MAX_ITER
    eta_scale: float = DEFAULT_ETA_SCALE


def check_method(method: str) -> str:
    if method not in METHODS:
        raise InvalidParameterError(
            f"Unknown method '{method}', expected one of {', '.join(METHODS)}"
        )
    return method


def interpolate(
    method: str,
    graph: Graph,
    samples: SampleSet,
    options: Optional[MethodOptions] = None,
    basis=None,
    soft_limit: int = DEFAULT_SOFT_LIMIT,
) -> InterpolationResult:
    """Run one interpolation method.

    Exact methods compute ``markov_eigs(graph)`` unless ``basis`` is given.
    ``specreg`` defaults its bandwidth to the sample count.
    """
    check_method(method)
    opts = options or MethodOptions()
    if method == "nystrom":
        return interpolate_nystrom(
            graph,
            samples,
            eta=opts.eta,
            mode=opts.mode,
            iterative=opts.iterative,
            max_iter=opts.max_iter,
            eta_scale=opts.eta_scale,
        )

    if basis is None:
        basis = markov_eigs(graph, soft_limit=soft_limit)
    if method == "oneshot":
        return interpolate_one_shot(
            basis,
            samples,
            eta=opts.eta,
            m=opts.bandwidth,
            graph=graph,
            max_iter=opts.max_iter,
            eta_scale=opts.eta_scale,
        )
    if method == "iterative":
        return interpolate_iterative(
            graph,
            basis,
            samples,
            eta=opts.eta,
            m=opts.bandwidth,
            max_iter=opts.max_iter,
            eta_scale=opts.eta_scale,
        )
    if method == "lsq":
        return least_squares_baseline(basis, samples, m=opts.bandwidth)
    K = samples.r if opts.bandwidth is None else opts.bandwidth
    return spectral_regression_baseline(
        basis, samples, min(K, basis.width), max_iter=opts.max_iter
    )


@dataclass(frozen=True, eq=False)
class IndicatorResult:
    """Interpolated class indicators, shape ``(C, N)``, and decoded labels."""

    signals: np.ndarray
    labels: np.ndarray
    results: List[InterpolationResult]


def interpolate_indicators(
    method: str,
    graph: Graph,
    labels,
    sample_indices,
    options: Optional[MethodOptions] = None,
    basis=None,
    C: Optional[int] = None,
    workers: int = 1,
) -> IndicatorResult:
    """Interpolate every one-hot class indicator from the sampled nodes.

    Only ``labels[sample_indices]`` is read; one interpolation runs per class,
    on ``workers`` threads when greater than one.
    """
    check_method(method)
    indicators = cluster_indicator_signals(labels, C)
    nodes = as_node_array(sample_indices, graph.n)
    if method in EXACT_METHODS and basis is None:
        basis = markov_eigs(graph)

    def run(row: np.ndarray) -> InterpolationResult:
        return interpolate(
            method, graph, SampleSet(nodes, row[nodes]), options, basis=basis
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, indicators))
    else:
        results = [run(row) for row in indicators]

    signals = np.vstack([res.signal for res in results])
    logger.debug(f"interpolate_indicators: {indicators.shape[0]} classes via {method}")
    return IndicatorResult(
        signals=signals, labels=decode_classes(signals), results=results
    )


__all__ = [
    "METHODS",
    "EXACT_METHODS",
    "MethodOptions",
    "check_method",
    "interpolate",
    "IndicatorResult",
    "interpolate_indicators",
]
