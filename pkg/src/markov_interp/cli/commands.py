"""Implementation of CLI commands."""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from markov_interp.core import Workbench
from markov_interp.core import io as gio
from markov_interp.core.errors import InvalidParameterError
from markov_interp.core.experiments import (
    approx_bandlimited_signal,
    bandlimited_signal,
    cluster_indicator_signals,
    gaussian_blobs,
    random_geometric_graph,
    synthetic_sensor_table,
)
from markov_interp.core.progress import emit_progress

from .arguments import CLIOptions

#: Default synthetic signal per graph kind.
DEFAULT_SIGNALS = {
    "rgg": "bandlimited",
    "blobs": "cluster_indicator",
    "sensors": "sensor_field",
}


def sidecar_path(out: str) -> Path:
    return Path(f"{out}.json")


def build_graph(bench: Workbench, args: CLIOptions) -> int:
    if args.points:
        cloud = gio.read_points(args.points)
        g = bench.build_point_graph(
            cloud, args.neighbors, kernel=args.kernel, decreasing=args.decreasing
        )
    else:
        table = gio.read_sensors(args.sensors)
        g = bench.build_sensor_graph(table, args.neighbors, scale=args.scale)
    gio.write_graph(args.out, g)
    bench.logger.info(f"Graph written to {args.out}")
    return 0


def eigs(bench: Workbench, args: CLIOptions) -> int:
    g = gio.read_graph(args.graph)
    if args.nystrom:
        if not args.landmarks:
            raise InvalidParameterError("--nystrom requires --landmarks")
        landmarks = gio.read_indices(args.landmarks)
        basis = bench.nystrom_eigs(g, landmarks, args.mode)
    else:
        if args.landmarks or args.mode:
            bench.logger.warning("--landmarks/--mode are ignored without --nystrom")
        basis = bench.eigs(g)
    gio.write_eigs(args.out, basis.eigenvalues)
    if args.vectors:
        gio.write_vectors(args.vectors, basis.eigenvectors)
    bench.logger.info(f"{basis.eigenvalues.size} eigenvalues written to {args.out}")
    return 0


def smoothness(bench: Workbench, args: CLIOptions) -> int:
    g = gio.read_graph(args.graph)
    signal = gio.read_signal(args.signal)
    report = bench.smoothness(g, signal, args.measure, args.p)
    print(gio.format_number(report.value))
    return 0


def sample(bench: Workbench, args: CLIOptions) -> int:
    g = gio.read_graph(args.graph)
    nodes = bench.sample(g, args.strategy, args.r, K=args.K, seed=args.seed)
    gio.write_indices(args.out, nodes)
    bench.logger.info(f"{nodes.size} sample indices written to {args.out}")
    return 0


def interpolate(bench: Workbench, args: CLIOptions) -> int:
    g = gio.read_graph(args.graph)
    samples = gio.read_samples(args.samples)
    options = bench.method_options(
        eta=args.eta,
        bandwidth=args.bandwidth,
        mode=args.mode,
        iterative=args.iterative,
    )
    started = time.perf_counter()
    result = bench.interpolate(args.method, g, samples, options)
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    gio.write_signal(args.out, result.signal)
    diagnostics = result.to_dict()
    diagnostics["n"] = g.n
    diagnostics["r"] = samples.r
    diagnostics["timings"] = {"total_ms": elapsed_ms}
    gio.write_json(sidecar_path(args.out), diagnostics)
    bench.logger.info(f"Signal written to {args.out}")
    return 0


def benchmark(bench: Workbench, args: CLIOptions) -> int:
    scenario = gio.read_scenario(args.scenario)
    rows = bench.benchmark(scenario, workers=args.workers, sink=None)
    gio.write_benchmark(args.out, rows)
    emit_progress({"type": "done", "rows": len(rows)})
    bench.logger.info(f"{len(rows)} benchmark rows written to {args.out}")
    return 0


def _synthetic_signal(bench: Workbench, args: CLIOptions, g, labels, table):
    kind = args.signal_kind or DEFAULT_SIGNALS[args.kind]
    if kind == "cluster_indicator":
        if labels is None:
            raise InvalidParameterError("cluster_indicator needs --kind blobs")
        indicators = cluster_indicator_signals(labels)
        if not 0 <= args.label_class < indicators.shape[0]:
            raise InvalidParameterError(
                f"--class must be in [0, {indicators.shape[0] - 1}]"
            )
        return indicators[args.label_class]
    if kind == "sensor_field":
        if table is None:
            raise InvalidParameterError("sensor_field needs --kind sensors")
        return np.asarray(table.value, dtype=np.float64)

    basis = bench.eigs(g)
    K = min(args.K, basis.width)
    # same stream as trial 0 of a benchmark on this graph
    seed = np.random.SeedSequence([args.seed, 0])
    if kind == "approx_bandlimited":
        return approx_bandlimited_signal(basis, K, amp=args.amp, seed=seed)
    return bandlimited_signal(basis, K, seed=seed)


def gen_synthetic(bench: Workbench, args: CLIOptions) -> int:
    labels = None
    table = None
    cloud = None
    graph_seed = args.seed
    if args.kind == "rgg":
        g, cloud = random_geometric_graph(
            args.n, args.neighbors, seed=graph_seed, kernel=args.kernel
        )
    elif args.kind == "blobs":
        cloud, labels = gaussian_blobs(
            args.n,
            centers=args.centers,
            dim=args.dim,
            spread=args.spread,
            seed=graph_seed,
        )
        g = bench.build_point_graph(cloud, args.neighbors, kernel=args.kernel)
    else:
        table = synthetic_sensor_table(args.n, seed=graph_seed)
        g = bench.build_sensor_graph(table, args.neighbors)

    signal = _synthetic_signal(bench, args, g, labels, table)

    gio.write_graph(args.out_graph, g)
    gio.write_signal(args.out_signal, signal)
    if args.out_points:
        if table is not None:
            gio.write_sensors(args.out_points, table)
        else:
            gio.write_points(args.out_points, cloud)
    if args.out_labels:
        if labels is None:
            raise InvalidParameterError("--out-labels needs --kind blobs")
        gio.write_labels(args.out_labels, labels)
    bench.logger.info(
        f"Synthetic {args.kind} graph (N={g.n}) written to {args.out_graph}"
    )
    return 0


COMMANDS = {
    "build-graph": build_graph,
    "eigs": eigs,
    "smoothness": smoothness,
    "sample": sample,
    "interpolate": interpolate,
    "benchmark": benchmark,
    "gen-synthetic": gen_synthetic,
}
