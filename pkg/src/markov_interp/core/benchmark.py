"""Scenario-driven benchmark sweeps over methods, sample sizes and trials.

Every random draw derives from ``SeedSequence([seed, trial])`` (signal) or
``SeedSequence([seed, trial, r])`` (sample set), so tables do not depend on
thread scheduling. The graph is built once from its own seed.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import InvalidParameterError, MarkovInterpError
from .experiments import (
    ERROR_MODES,
    approx_bandlimited_signal,
    bandlimited_signal,
    classification_accuracy,
    cluster_indicator_signals,
    gaussian_blobs,
    random_geometric_graph,
    relative_error,
    synthetic_sensor_table,
)
from .graph import (
    DEFAULT_GEODESIC_SCALE,
    KNN_KERNELS,
    Graph,
    geodesic_affinity,
    knn_affinity,
)
from .interpolation import SampleSet
from .l1 import DEFAULT_MAX_ITER
from .methods import (
    EXACT_METHODS,
    MethodOptions,
    check_method,
    interpolate,
    interpolate_indicators,
)
from .nystrom import DEFAULT_MODE
from .progress import ProgressSink, emit_progress
from .sampling import SamplingConfig, select_samples
from .spectral import DEFAULT_SOFT_LIMIT, markov_eigs

logger = logging.getLogger(__name__)

GRAPH_GENERATORS = ("rgg", "blobs", "sensors")
SIGNAL_KINDS = (
    "bandlimited",
    "approx_bandlimited",
    "cluster_indicators",
    "sensor_field",
)
DEFAULT_R_VALUES = (20, 40, 60, 80, 100)

BENCHMARK_COLUMNS = ("method", "r", "trial", "error", "accuracy", "wall_ms", "status")


def _get(data: Dict[str, Any], key: str, default: Any, kind: type) -> Any:
    value = data.get(key, default)
    if value is None:
        return None
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(
            f"Scenario key '{key}' must be {kind.__name__}"
        ) from exc


@dataclass(frozen=True)
class GraphSpec:
    generator: str = "rgg"
    n: int = 200
    neighbors: int = 12
    kernel: str = "exp_negdist"
    seed: Optional[int] = None
    centers: int = 10
    dim: int = 16
    spread: float = 1.0
    separation: float = 10.0
    scale: float = DEFAULT_GEODESIC_SCALE

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GraphSpec":
        spec = cls(
            generator=str(data.get("generator", "rgg")),
            n=_get(data, "n", 200, int),
            neighbors=_get(data, "neighbors", 12, int),
            kernel=str(data.get("kernel", "exp_negdist")),
            seed=_get(data, "seed", None, int),
            centers=_get(data, "centers", 10, int),
            dim=_get(data, "dim", 16, int),
            spread=_get(data, "spread", 1.0, float),
            separation=_get(data, "separation", 10.0, float),
            scale=_get(data, "scale", DEFAULT_GEODESIC_SCALE, float),
        )
        if spec.generator not in GRAPH_GENERATORS:
            raise InvalidParameterError(
                f"Unknown graph generator '{spec.generator}', expected one of "
                f"{', '.join(GRAPH_GENERATORS)}"
            )
        if spec.kernel not in KNN_KERNELS:
            raise InvalidParameterError(f"Unknown kernel '{spec.kernel}'")
        return spec


@dataclass(frozen=True)
class SignalSpec:
    kind: str = "bandlimited"
    K: int = 20
    amp: Optional[float] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SignalSpec":
        spec = cls(
            kind=str(data.get("kind", "bandlimited")),
            K=_get(data, "K", 20, int),
            amp=_get(data, "amp", None, float),
        )
        if spec.kind not in SIGNAL_KINDS:
            raise InvalidParameterError(
                f"Unknown signal kind '{spec.kind}', expected one of "
                f"{', '.join(SIGNAL_KINDS)}"
            )
        return spec


@dataclass(frozen=True)
class MethodSpec:
    """One method column; ``label`` tells apart repeated methods."""

    name: str
    label: str
    options: MethodOptions = field(default_factory=MethodOptions)

    @classmethod
    def from_dict(cls, data: Any) -> "MethodSpec":
        if isinstance(data, str):
            data = {"name": data}
        name = check_method(str(data.get("name", "")))
        bandwidth = data.get("bandwidth", data.get("m", data.get("K")))
        options = MethodOptions(
            eta=_get(data, "eta", None, float),
            bandwidth=None if bandwidth is None else int(bandwidth),
            mode=str(data.get("mode", DEFAULT_MODE)),
            iterative=bool(data.get("iterative", False)),
            max_iter=_get(data, "max_iter", DEFAULT_MAX_ITER, int),
        )
        return cls(name=name, label=str(data.get("label", name)), options=options)


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    trials: int
    graph: GraphSpec
    signal: SignalSpec
    sampling: SamplingConfig
    r_values: Tuple[int, ...]
    methods: Tuple[MethodSpec, ...]
    error_metric: str = "normalized_diff"
    timing: bool = False

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Scenario":
        if not isinstance(data, dict):
            raise InvalidParameterError("Scenario must be a JSON object")
        trials = _get(data, "trials", 1, int)
        if trials < 1:
            raise InvalidParameterError(f"Trial count must be >= 1, got {trials}")
        r_values = tuple(int(r) for r in data.get("r_values", DEFAULT_R_VALUES))
        if not r_values:
            raise InvalidParameterError("Scenario needs at least one r value")
        methods = tuple(MethodSpec.from_dict(m) for m in data.get("methods", []))
        if not methods:
            raise InvalidParameterError("Scenario needs at least one method")
        labels = [m.label for m in methods]
        if len(set(labels)) != len(labels):
            raise InvalidParameterError("Method labels must be unique")
        sampling = data.get("sampling", {})
        strategy = str(sampling.get("strategy", "uniform"))
        sample_k = _get(sampling, "K", None, int)
        # greedy needs K <= r for every r
        for r in r_values:
            SamplingConfig(strategy, r, sample_k)
        metric = str(data.get("error_metric", "normalized_diff"))
        if metric not in ERROR_MODES:
            raise InvalidParameterError(
                f"Unknown error metric '{metric}', expected one of "
                f"{', '.join(ERROR_MODES)}"
            )
        return cls(
            name=str(data.get("name", "scenario")),
            seed=_get(data, "seed", 0, int),
            trials=trials,
            graph=GraphSpec.from_dict(data.get("graph", {})),
            signal=SignalSpec.from_dict(data.get("signal", {})),
            sampling=SamplingConfig(strategy, min(r_values), sample_k),
            r_values=r_values,
            methods=methods,
            error_metric=metric,
            timing=bool(data.get("timing", False)),
        )


@dataclass(frozen=True)
class BenchmarkRow:
    method: str
    r: int
    trial: int
    error: float
    accuracy: float
    wall_ms: float
    status: str

    def as_tuple(self) -> tuple:
        return (
            self.method,
            self.r,
            self.trial,
            self.error,
            self.accuracy,
            self.wall_ms,
            self.status,
        )


@dataclass(frozen=True, eq=False)
class _Instance:
    graph: Graph
    labels: Optional[np.ndarray]
    sensor_field: Optional[np.ndarray]


def build_instance(spec: GraphSpec, seed: int) -> _Instance:
    """Generate the scenario graph with its labels or sensor field."""
    graph_seed = seed if spec.seed is None else spec.seed
    if spec.generator == "rgg":
        graph, _ = random_geometric_graph(
            spec.n, spec.neighbors, seed=graph_seed, kernel=spec.kernel
        )
        return _Instance(graph, None, None)
    if spec.generator == "blobs":
        cloud, labels = gaussian_blobs(
            spec.n,
            centers=spec.centers,
            dim=spec.dim,
            spread=spec.spread,
            seed=graph_seed,
            separation=spec.separation,
        )
        return _Instance(knn_affinity(cloud, spec.neighbors, spec.kernel), labels, None)
    table = synthetic_sensor_table(spec.n, seed=graph_seed)
    graph = geodesic_affinity(table, spec.neighbors, scale=spec.scale)
    return _Instance(graph, None, np.asarray(table.value))


def _needs_basis(scenario: Scenario) -> bool:
    return (
        any(m.name in EXACT_METHODS for m in scenario.methods)
        or scenario.sampling.strategy == "greedy"
        or scenario.signal.kind in ("bandlimited", "approx_bandlimited")
    )


class BenchmarkRunner:
    """Runs a :class:`Scenario` and collects one row per method, r and trial."""

    def __init__(
        self,
        scenario: Scenario,
        workers: int = 1,
        sink: Optional[ProgressSink] = None,
        soft_limit: int = DEFAULT_SOFT_LIMIT,
    ) -> None:
        if workers < 1:
            raise InvalidParameterError(f"Worker count must be >= 1, got {workers}")
        self.scenario = scenario
        self.workers = workers
        self.sink = sink
        self.instance = build_instance(scenario.graph, scenario.seed)
        n = self.instance.graph.n
        for r in scenario.r_values:
            if r < 1 or r > n:
                raise InvalidParameterError(f"r={r} outside 1..{n}")
        self._check_signal_source()
        self.basis = None
        if _needs_basis(scenario):
            self.basis = markov_eigs(self.instance.graph, soft_limit=soft_limit)
        self._lock = threading.Lock()
        self._done = 0
        self._total = len(scenario.methods) * len(scenario.r_values) * scenario.trials

    def _check_signal_source(self) -> None:
        kind = self.scenario.signal.kind
        if kind == "cluster_indicators" and self.instance.labels is None:
            raise InvalidParameterError("Cluster indicators need the 'blobs' generator")
        if kind == "sensor_field" and self.instance.sensor_field is None:
            raise InvalidParameterError(
                "Sensor field signals need the 'sensors' generator"
            )

    def truth(self, trial: int) -> np.ndarray:
        """Ground-truth signal (or ``(C, N)`` indicators) for ``trial``."""
        spec = self.scenario.signal
        seed = np.random.SeedSequence([self.scenario.seed, trial])
        if spec.kind == "bandlimited":
            return bandlimited_signal(self.basis, spec.K, seed=seed)
        if spec.kind == "approx_bandlimited":
            return approx_bandlimited_signal(
                self.basis, spec.K, amp=spec.amp, seed=seed
            )
        if spec.kind == "cluster_indicators":
            return cluster_indicator_signals(self.instance.labels)
        return self.instance.sensor_field.copy()

    def sample_set(self, r: int, trial: int) -> np.ndarray:
        sampling = self.scenario.sampling
        config = SamplingConfig(sampling.strategy, r, sampling.K)
        seed = np.random.SeedSequence([self.scenario.seed, trial, r])
        n = self.instance.graph.n
        return select_samples(config, n, basis=self.basis, seed=seed)

    def _score(
        self, method: MethodSpec, truth: np.ndarray, nodes: np.ndarray
    ) -> Tuple[float, float, str]:
        graph = self.instance.graph
        if truth.ndim == 2:
            out = interpolate_indicators(
                method.name,
                graph,
                self.instance.labels,
                nodes,
                options=method.options,
                basis=self.basis,
            )
            unsampled = np.setdiff1d(np.arange(graph.n), nodes)
            eval_set = unsampled if unsampled.size else None
            accuracy = classification_accuracy(
                self.instance.labels, out.signals, eval_set
            )
            error = relative_error(truth, out.signals, self.scenario.error_metric)
            statuses = {res.status for res in out.results}
            status = statuses.pop() if len(statuses) == 1 else "mixed"
            return error, accuracy, status

        samples = SampleSet(nodes, truth[nodes])
        result = interpolate(
            method.name, graph, samples, method.options, basis=self.basis
        )
        error = relative_error(truth, result.signal, self.scenario.error_metric)
        return error, float("nan"), result.status

    def _run_method(
        self, method: MethodSpec, r: int, trial: int, truth: np.ndarray, nodes
    ) -> BenchmarkRow:
        start = time.perf_counter()
        try:
            error, accuracy, status = self._score(method, truth, nodes)
        except (MarkovInterpError, np.linalg.LinAlgError) as exc:
            logger.warning(f"{method.label} r={r} trial={trial} failed: {exc}")
            error, accuracy, status = float("nan"), float("nan"), type(exc).__name__
        elapsed = (time.perf_counter() - start) * 1000.0
        wall_ms = elapsed if self.scenario.timing else float("nan")
        return BenchmarkRow(method.label, r, trial, error, accuracy, wall_ms, status)

    def _run_task(self, task: Tuple[int, int]) -> List[BenchmarkRow]:
        r, trial = task
        truth = self.truth(trial)
        nodes = self.sample_set(r, trial)
        rows = []
        for method in self.scenario.methods:
            row = self._run_method(method, r, trial, truth, nodes)
            rows.append(row)
            with self._lock:
                self._done += 1
                done = self._done
            emit_progress(
                {
                    "type": "trial",
                    "method": row.method,
                    "r": r,
                    "trial": trial,
                    "status": row.status,
                    "done": done,
                    "total": self._total,
                },
                sink=self.sink,
            )
        return rows

    def run(self) -> List[BenchmarkRow]:
        scenario = self.scenario
        tasks = [(r, t) for r in scenario.r_values for t in range(scenario.trials)]
        logger.info(
            f"Benchmark '{scenario.name}': {len(scenario.methods)} methods, "
            f"{len(scenario.r_values)} r values, {scenario.trials} trials"
        )
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                chunks = list(pool.map(self._run_task, tasks))
        else:
            chunks = [self._run_task(task) for task in tasks]

        order = {m.label: i for i, m in enumerate(scenario.methods)}
        rows = [row for chunk in chunks for row in chunk]
        rows.sort(key=lambda row: (order[row.method], row.r, row.trial))
        return rows


def run_benchmark(
    scenario: Scenario,
    workers: int = 1,
    sink: Optional[ProgressSink] = None,
    soft_limit: int = DEFAULT_SOFT_LIMIT,
) -> List[BenchmarkRow]:
    return BenchmarkRunner(scenario, workers, sink, soft_limit).run()


__all__ = [
    "GRAPH_GENERATORS",
    "SIGNAL_KINDS",
    "DEFAULT_R_VALUES",
    "BENCHMARK_COLUMNS",
    "GraphSpec",
    "SignalSpec",
    "MethodSpec",
    "Scenario",
    "BenchmarkRow",
    "BenchmarkRunner",
    "build_instance",
    "run_benchmark",
]
