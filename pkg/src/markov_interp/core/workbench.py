"""Configured entry point tying the numerical modules to user settings."""

from __future__ import annotations

from typing import List, Optional

import numpy as np

from .benchmark import BenchmarkRow, Scenario, run_benchmark
from .config import ConfigMixin
from .graph import (
    Graph,
    PointCloud,
    SensorTable,
    geodesic_affinity,
    knn_affinity,
)
from .interpolation import InterpolationResult, SampleSet
from .methods import MethodOptions, interpolate
from .nystrom import ApproxBasis, nystrom_markov_eigs
from .progress import ProgressSink
from .sampling import SamplingConfig, select_samples
from .smoothness import SmoothnessReport, smoothness_report
from .spectral import SpectralBasis, markov_eigs


class Workbench(ConfigMixin):
    """Runs library operations with defaults taken from the YAML config."""

    def __init__(self, config_path: Optional[str] = None, debug: bool = False) -> None:
        self.config_path = config_path
        self.config = self._load_config()
        self._setup_logging(debug)

    @property
    def soft_limit(self) -> int:
        return int(self.setting("spectral_soft_limit", 4096))

    def build_point_graph(
        self,
        cloud: PointCloud,
        neighbors: int,
        kernel: str = "exp_negdist",
        decreasing: bool = False,
    ) -> Graph:
        g = knn_affinity(cloud, neighbors, kernel=kernel, decreasing=decreasing)
        self.logger.info(f"Built {kernel} graph: N={g.n}, edges={g.edge_count}")
        return g

    def build_sensor_graph(
        self, table: SensorTable, neighbors: int, scale: Optional[float] = None
    ) -> Graph:
        if scale is None:
            scale = float(self.setting("geodesic_scale", 0.01))
        g = geodesic_affinity(table, neighbors, scale=scale)
        self.logger.info(f"Built sensor graph: N={g.n}, edges={g.edge_count}")
        return g

    def eigs(self, g: Graph) -> SpectralBasis:
        return markov_eigs(g, soft_limit=self.soft_limit)

    def nystrom_eigs(
        self, g: Graph, landmarks, mode: Optional[str] = None
    ) -> ApproxBasis:
        mode = mode or str(self.setting("nystrom_mode", "revised"))
        return nystrom_markov_eigs(g, landmarks, mode)

    def smoothness(self, g: Graph, signal, measure: str, p="2") -> SmoothnessReport:
        return smoothness_report(
            g,
            signal,
            measure,
            p,
            tol=float(self.setting("power_iteration_tol", 1e-10)),
            max_iter=int(self.setting("power_iteration_max_iter", 10000)),
        )

    def sample(
        self,
        g: Graph,
        strategy: str,
        r: int,
        K: Optional[int] = None,
        seed: int = 0,
    ) -> np.ndarray:
        config = SamplingConfig(strategy, r, K, seed)
        basis = self.eigs(g) if config.strategy == "greedy" else None
        return select_samples(config, g.n, basis=basis)

    def method_options(
        self,
        eta: Optional[float] = None,
        bandwidth: Optional[int] = None,
        mode: Optional[str] = None,
        iterative: bool = False,
    ) -> MethodOptions:
        return MethodOptions(
            eta=eta,
            bandwidth=bandwidth,
            mode=mode or str(self.setting("nystrom_mode", "revised")),
            iterative=iterative,
            max_iter=int(self.setting("solver_max_iter", 50000)),
            eta_scale=float(self.setting("eta_scale", 1e-8)),
        )

    def interpolate(
        self,
        method: str,
        g: Graph,
        samples: SampleSet,
        options: Optional[MethodOptions] = None,
    ) -> InterpolationResult:
        options = options or self.method_options()
        result = interpolate(method, g, samples, options, soft_limit=self.soft_limit)
        self.logger.info(
            f"{method}: status={result.status}, "
            f"iterations={len(result.iterations)}"
        )
        return result

    def benchmark(
        self,
        scenario: Scenario,
        workers: Optional[int] = None,
        sink: Optional[ProgressSink] = None,
    ) -> List[BenchmarkRow]:
        if workers is None:
            workers = int(self.setting("workers", 1))
        return run_benchmark(scenario, workers, sink=sink, soft_limit=self.soft_limit)
