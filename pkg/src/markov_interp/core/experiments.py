"""Seeded synthetic graphs, signals and error metrics for the experiments."""

from __future__ import annotations

import logging
from typing import Optional, Tuple, Union

import numpy as np

from .errors import InvalidParameterError, UndefinedMetricError
from .graph import Graph, PointCloud, SensorTable, knn_affinity

logger = logging.getLogger(__name__)

ERROR_MODES = ("normalized_diff", "rel_l2")

#: Default noise amplitude of approximately bandlimited spectra, relative to
#: ``||x_hat||_inf`` of the bandlimited part.
DEFAULT_AMP_RATIO = 0.05

#: Bounding box of the synthetic sensor network (contiguous US, degrees).
SENSOR_LON_RANGE = (-124.0, -67.0)
SENSOR_LAT_RANGE = (25.0, 49.0)
SENSOR_ELEV_RANGE = (0.0, 3000.0)

Seed = Union[int, np.random.SeedSequence, np.random.Generator, None]


def random_geometric_graph(
    n: int, L: int, seed: Seed = 0, kernel: str = "exp_negdist"
) -> Tuple[Graph, PointCloud]:
    """Uniform points in the unit square, each joined to its ``L`` nearest neighbors."""
    if n < L + 1:
        raise InvalidParameterError(f"Need n >= L + 1 (got n={n}, L={L})")
    rng = np.random.default_rng(seed)
    cloud = PointCloud(rng.uniform(0.0, 1.0, size=(n, 2)))
    return knn_affinity(cloud, L, kernel=kernel), cloud


def _blob_centers(count: int, dim: int, separation: float) -> np.ndarray:
    centers = np.zeros((count, dim))
    if count <= dim:
        centers[np.arange(count), np.arange(count)] = separation
    elif dim >= 2:
        angles = 2.0 * np.pi * np.arange(count) / count
        centers[:, 0] = separation * np.cos(angles)
        centers[:, 1] = separation * np.sin(angles)
    else:
        centers[:, 0] = separation * np.arange(count)
    return centers


def gaussian_blobs(
    n: int,
    centers: int = 10,
    dim: int = 16,
    spread: float = 1.0,
    seed: Seed = 0,
    separation: float = 10.0,
) -> Tuple[PointCloud, np.ndarray]:
    """Isotropic Gaussian clusters with balanced ground-truth labels.

    Cluster centers sit on the coordinate axes (``centers <= dim``) or on a
    circle in the first two coordinates, ``separation`` from the origin.
    """
    if centers < 1 or n < centers:
        raise InvalidParameterError(
            f"Need 1 <= centers <= n (got centers={centers}, n={n})"
        )
    if dim < 1 or spread < 0:
        raise InvalidParameterError("Blob dimension must be >= 1 and spread >= 0")
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % centers).astype(np.int64)
    means = _blob_centers(centers, dim, separation)
    points = means[labels] + spread * rng.standard_normal((n, dim))
    return PointCloud(points), labels


def smooth_sensor_field(lon, lat, elev=None) -> np.ndarray:
    """Temperature-like field: cooler to the north and with altitude."""
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    field = 28.0 - 0.6 * (lat - SENSOR_LAT_RANGE[0])
    field += 2.5 * np.sin(np.radians(lon) * 4.0) * np.cos(np.radians(lat) * 3.0)
    if elev is not None:
        field -= 0.0065 * np.asarray(elev, dtype=np.float64)
    return field


def synthetic_sensor_table(n: int, seed: Seed = 0) -> SensorTable:
    if n < 2:
        raise InvalidParameterError(f"Sensor table needs at least 2 sensors, got {n}")
    rng = np.random.default_rng(seed)
    lon = rng.uniform(*SENSOR_LON_RANGE, size=n)
    lat = rng.uniform(*SENSOR_LAT_RANGE, size=n)
    elev = rng.uniform(*SENSOR_ELEV_RANGE, size=n)
    return SensorTable(lon, lat, elev, smooth_sensor_field(lon, lat, elev))


def _leading_spectrum(n: int, K: int, rng: np.random.Generator) -> np.ndarray:
    if K < 1 or K > n:
        raise InvalidParameterError(f"Bandwidth must satisfy 1 <= K <= {n}, got {K}")
    spectrum = np.zeros(n)
    spectrum[:K] = rng.uniform(-1.0, 1.0, size=K)
    return spectrum


def bandlimited_signal(basis, K: int, seed: Seed = 0) -> np.ndarray:
    """``V x_hat`` with ``K`` leading entries uniform on ``[-1, 1]``."""
    vectors = basis.eigenvectors
    rng = np.random.default_rng(seed)
    return vectors @ _leading_spectrum(vectors.shape[1], K, rng)


def approx_bandlimited_signal(
    basis, K: int, amp: Optional[float] = None, seed: Seed = 0
) -> np.ndarray:
    """Bandlimited spectrum plus ``amp * uniform[-1, 1]`` noise on every entry.

    ``amp`` defaults to ``0.05 * ||x_hat||_inf``. With ``amp = 0`` the result
    equals :func:`bandlimited_signal` for the same seed.
    """
    vectors = basis.eigenvectors
    rng = np.random.default_rng(seed)
    spectrum = _leading_spectrum(vectors.shape[1], K, rng)
    if amp is None:
        amp = DEFAULT_AMP_RATIO * float(np.max(np.abs(spectrum)))
    if amp < 0:
        raise InvalidParameterError(f"Noise amplitude must be >= 0, got {amp}")
    noise = rng.uniform(-1.0, 1.0, size=spectrum.shape[0])
    return vectors @ (spectrum + amp * noise)


def _labels(labels, C: Optional[int] = None) -> Tuple[np.ndarray, int]:
    arr = np.asarray(labels)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidParameterError("Labels must be a non-empty 1-D array")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise InvalidParameterError("Labels must be integers")
    arr = arr.astype(np.int64)
    if C is None:
        C = int(arr.max()) + 1
    if arr.min() < 0 or arr.max() >= C:
        raise InvalidParameterError(f"Labels must lie in 0..{C - 1}")
    return arr, int(C)


def cluster_indicator_signals(labels, C: Optional[int] = None) -> np.ndarray:
    """One-hot indicators, shape ``(C, N)``; row ``k`` marks class ``k``."""
    arr, C = _labels(labels, C)
    indicators = np.zeros((C, arr.size))
    indicators[arr, np.arange(arr.size)] = 1.0
    return indicators


def decode_classes(signals) -> np.ndarray:
    """Class of each node: ``argmax_k |s^k_i|``, lowest ``k`` on ties."""
    stack = np.atleast_2d(np.asarray(signals, dtype=np.float64))
    return np.argmax(np.abs(stack), axis=0).astype(np.int64)


def relative_error(y, y_hat, mode: str = "normalized_diff") -> float:
    """``||y/||y|| - y_hat/||y_hat||||`` or ``||y - y_hat|| / ||y||``."""
    y = np.asarray(y, dtype=np.float64).ravel()
    y_hat = np.asarray(y_hat, dtype=np.float64).ravel()
    if y.shape != y_hat.shape:
        raise InvalidParameterError(
            f"Error operands differ in length ({y.size} vs {y_hat.size})"
        )
    norm_y = float(np.linalg.norm(y))
    if norm_y == 0.0:
        raise UndefinedMetricError("Relative error is undefined for a zero reference")
    if mode == "rel_l2":
        return float(np.linalg.norm(y - y_hat)) / norm_y
    if mode == "normalized_diff":
        norm_hat = float(np.linalg.norm(y_hat))
        if norm_hat == 0.0:
            raise UndefinedMetricError(
                "Normalized difference is undefined for a zero estimate"
            )
        return float(np.linalg.norm(y / norm_y - y_hat / norm_hat))
    raise InvalidParameterError(
        f"Unknown error mode '{mode}', expected one of {', '.join(ERROR_MODES)}"
    )


def classification_accuracy(true_labels, signals, eval_set=None) -> float:
    """Percent of ``eval_set`` nodes whose decoded class matches the truth."""
    truth = np.asarray(true_labels, dtype=np.int64).ravel()
    predicted = decode_classes(signals)
    if predicted.shape != truth.shape:
        raise InvalidParameterError(
            f"{predicted.size} decoded nodes but {truth.size} labels"
        )
    nodes = np.arange(truth.size) if eval_set is None else np.asarray(eval_set)
    nodes = nodes.astype(np.int64).ravel()
    if nodes.size == 0:
        raise InvalidParameterError("Accuracy needs a non-empty evaluation set")
    return 100.0 * float(np.mean(predicted[nodes] == truth[nodes]))


__all__ = [
    "ERROR_MODES",
    "DEFAULT_AMP_RATIO",
    "random_geometric_graph",
    "gaussian_blobs",
    "smooth_sensor_field",
    "synthetic_sensor_table",
    "bandlimited_signal",
    "approx_bandlimited_signal",
    "cluster_indicator_signals",
    "decode_classes",
    "relative_error",
    "classification_accuracy",
]
