"""Command line argument parsing for markov-interp."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, fields
from typing import List, Optional

from markov_interp import __version__
from markov_interp.core.benchmark import GRAPH_GENERATORS
from markov_interp.core.graph import KNN_KERNELS
from markov_interp.core.methods import METHODS
from markov_interp.core.nystrom import NYSTROM_MODES
from markov_interp.core.sampling import SAMPLING_STRATEGIES
from markov_interp.core.smoothness import MEASURES

SUBCOMMANDS = (
    "build-graph",
    "eigs",
    "smoothness",
    "sample",
    "interpolate",
    "benchmark",
    "gen-synthetic",
)

SYNTHETIC_SIGNALS = (
    "bandlimited",
    "approx_bandlimited",
    "cluster_indicator",
    "sensor_field",
)

#: Exit code for invalid command lines (argparse's own default is 2).
USAGE_EXIT_CODE = 1


@dataclass
class CLIOptions:
    """Parsed command line options."""

    command: Optional[str] = None
    config: Optional[str] = None
    debug: bool = False
    show_config: bool = False
    preset: Optional[str] = None
    seed: int = 0
    # inputs
    graph: Optional[str] = None
    points: Optional[str] = None
    sensors: Optional[str] = None
    signal: Optional[str] = None
    samples: Optional[str] = None
    landmarks: Optional[str] = None
    scenario: Optional[str] = None
    # outputs
    out: Optional[str] = None
    vectors: Optional[str] = None
    out_graph: Optional[str] = None
    out_signal: Optional[str] = None
    out_points: Optional[str] = None
    out_labels: Optional[str] = None
    # graph construction
    neighbors: Optional[int] = None
    kernel: str = "exp_negdist"
    decreasing: bool = False
    scale: Optional[float] = None
    # spectra and smoothness
    nystrom: bool = False
    mode: Optional[str] = None
    measure: str = "markov_variation"
    p: str = "2"
    # sampling and interpolation
    strategy: str = "uniform"
    r: Optional[int] = None
    K: Optional[int] = None
    method: str = "oneshot"
    eta: Optional[float] = None
    bandwidth: Optional[int] = None
    iterative: bool = False
    # benchmark
    workers: Optional[int] = None
    # synthetic data
    kind: str = "rgg"
    n: int = 200
    signal_kind: Optional[str] = None
    amp: Optional[float] = None
    centers: int = 3
    dim: int = 2
    spread: float = 0.05
    label_class: int = 0


class ArgumentParser(argparse.ArgumentParser):
    """``argparse`` parser whose usage errors exit with status 1."""

    def error(self, message: str):
        self.print_usage()
        self.exit(USAGE_EXIT_CODE, f"{self.prog}: error: {message}\n")


def _add_global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Global flags; on subcommands they default to SUPPRESS so a value given
    before the subcommand is not overwritten."""
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument(
        "-c",
        "--config",
        default=default,
        help="Path to config file (default: OS-specific location)",
    )
    parser.add_argument(
        "--debug",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="Enable debug logging",
    )
    parser.add_argument(
        "--preset",
        default=default,
        help="Apply option overrides stored under this preset name",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=argparse.SUPPRESS if suppress else 0,
        help="Seed for every random draw (default: 0)",
    )


def _build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="markov-interp",
        description="Smooth graph signal interpolation with the Markov variation",
    )
    _add_global_options(parser, suppress=False)
    parser.add_argument(
        "--show-config",
        action="store_true",
        help="Show the current configuration file location and exit",
    )
    parser.add_argument(
        "-v", "--version", action="version", version=f"%(prog)s {__version__}"
    )

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("build-graph", help="Build a graph from points or sensors")
    _add_global_options(p, suppress=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--points", help="Point CSV (one column per coordinate)")
    source.add_argument("--sensors", help="Sensor CSV (lon,lat,elev,value)")
    p.add_argument("--neighbors", type=int, required=True, help="Neighbors per node")
    p.add_argument("--kernel", choices=KNN_KERNELS, default="exp_negdist")
    p.add_argument(
        "--decreasing",
        action="store_true",
        help="Map normalized_dist weights through exp(-x)",
    )
    p.add_argument("--scale", type=float, help="Geodesic distance scale per km")
    p.add_argument("--out", required=True, help="Output edge-list CSV")

    p = sub.add_parser("eigs", help="Markov eigenvalues (exact or Nyström)")
    _add_global_options(p, suppress=True)
    p.add_argument("--graph", required=True, help="Edge-list CSV (src,dst,weight)")
    p.add_argument("--out", required=True, help="Eigenvalue CSV")
    p.add_argument("--vectors", help="Optional eigenvector CSV")
    p.add_argument("--nystrom", action="store_true", help="Use the Nyström extension")
    p.add_argument("--landmarks", help="Landmark index CSV (with --nystrom)")
    p.add_argument("--mode", choices=NYSTROM_MODES, help="Nyström extension mode")

    p = sub.add_parser("smoothness", help="Evaluate a smoothness measure")
    _add_global_options(p, suppress=True)
    p.add_argument("--graph", required=True, help="Edge-list CSV (src,dst,weight)")
    p.add_argument("--signal", required=True, help="Signal CSV (index,value)")
    p.add_argument("--measure", choices=MEASURES, default="markov_variation")
    p.add_argument("--p", choices=("1", "2", "inf"), default="2", help="Norm order")

    p = sub.add_parser("sample", help="Select a sample set")
    _add_global_options(p, suppress=True)
    p.add_argument("--graph", required=True, help="Edge-list CSV (src,dst,weight)")
    p.add_argument(
        "--strategy",
        choices=SAMPLING_STRATEGIES + ("greedy_spectral",),
        default="uniform",
    )
    p.add_argument("--r", type=int, required=True, help="Number of samples")
    p.add_argument("--K", type=int, help="Bandwidth for greedy sampling")
    p.add_argument("--out", required=True, help="Index CSV")

    p = sub.add_parser("interpolate", help="Interpolate a sampled signal")
    _add_global_options(p, suppress=True)
    p.add_argument("--graph", required=True, help="Edge-list CSV (src,dst,weight)")
    p.add_argument("--samples", required=True, help="Sample CSV (index,value)")
    p.add_argument(
        "--method",
        default="oneshot",
        help=f"Interpolation method: {', '.join(METHODS)} (default: oneshot)",
    )
    p.add_argument("--eta", type=float, help="Residual tolerance at sampled nodes")
    p.add_argument("--bandwidth", type=int, help="Spectrum width m (K for specreg)")
    p.add_argument("--mode", choices=NYSTROM_MODES, help="Nyström extension mode")
    p.add_argument(
        "--iterative", action="store_true", help="Iterative Nyström interpolation"
    )
    p.add_argument("--out", required=True, help="Signal CSV (plus <out>.json)")

    p = sub.add_parser("benchmark", help="Run a benchmark scenario")
    _add_global_options(p, suppress=True)
    p.add_argument("--scenario", required=True, help="Scenario JSON")
    p.add_argument("--out", required=True, help="Result CSV")
    p.add_argument("--workers", type=int, help="Trial threads")

    p = sub.add_parser("gen-synthetic", help="Write a seeded graph and signal")
    _add_global_options(p, suppress=True)
    p.add_argument("--kind", choices=GRAPH_GENERATORS, default="rgg")
    p.add_argument("--n", type=int, default=200, help="Number of nodes")
    p.add_argument("--neighbors", type=int, default=9, help="Neighbors per node")
    p.add_argument("--kernel", choices=KNN_KERNELS, default="exp_negdist")
    p.add_argument(
        "--signal", dest="signal_kind", choices=SYNTHETIC_SIGNALS, help="Signal kind"
    )
    p.add_argument("--K", type=int, default=20, help="Bandwidth of the signal")
    p.add_argument("--amp", type=float, help="Spectrum noise amplitude")
    p.add_argument("--centers", type=int, default=3, help="Number of blobs")
    p.add_argument("--dim", type=int, default=2, help="Blob dimension")
    p.add_argument("--spread", type=float, default=0.05, help="Blob standard deviation")
    p.add_argument(
        "--class", dest="label_class", type=int, default=0, help="Indicator class"
    )
    p.add_argument("--out-graph", required=True, help="Edge-list CSV (src,dst,weight)")
    p.add_argument("--out-signal", required=True, help="Signal CSV")
    p.add_argument("--out-points", help="Point CSV (sensor CSV for --kind sensors)")
    p.add_argument("--out-labels", help="Label CSV (blobs only)")

    return parser


def parse_args(argv: Optional[List[str]] = None) -> CLIOptions:
    """Parse command line arguments."""
    namespace = _build_parser().parse_args(argv)
    known = {f.name for f in fields(CLIOptions)}
    values = {k: v for k, v in vars(namespace).items() if k in known and v is not None}
    return CLIOptions(**values)


def print_help() -> None:
    _build_parser().print_help()
