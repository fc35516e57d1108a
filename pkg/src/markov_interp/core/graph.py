"""Graph representation, affinity construction and neighborhood queries.

All graphs are undirected: the affinity ``W`` is stored as a CSR matrix that is
exactly symmetric, nonnegative and has a zero diagonal. Node indices are
0-based everywhere in the package.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial.distance import cdist

from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    IsolatedNodeError,
    NodeIndexError,
)

logger = logging.getLogger(__name__)

#: Mean Earth radius used by the haversine distance, in kilometers.
EARTH_RADIUS_KM = 6371.0

#: Default multiplier applied to geodesic distances (per km).
DEFAULT_GEODESIC_SCALE = 0.01

KNN_KERNELS = ("exp_negdist", "normalized_dist")

ArrayLike = Union[np.ndarray, Iterable[float]]


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph with cached degrees.

    ``affinity`` is validated on construction; ``degrees[i]`` is the row sum of
    the affinity.
    """

    affinity: sparse.csr_matrix
    degrees: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        w = sparse.csr_matrix(self.affinity, dtype=np.float64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimensionMismatchError(f"Affinity must be square, got {w.shape}")
        w.eliminate_zeros()
        w.sort_indices()
        if w.nnz and not np.all(np.isfinite(w.data)):
            raise InvalidParameterError("Affinity contains non-finite weights")
        if w.nnz and w.data.min() < 0:
            raise InvalidParameterError("Affinity weights must be nonnegative")
        if np.any(w.diagonal() != 0):
            raise InvalidParameterError("Affinity diagonal must be zero")
        if (w != w.T).nnz:
            raise InvalidParameterError("Affinity must be symmetric")
        degrees = np.asarray(w.sum(axis=1)).ravel()
        object.__setattr__(self, "affinity", w)
        object.__setattr__(self, "degrees", _freeze(degrees))

    @property
    def n(self) -> int:
        return int(self.affinity.shape[0])

    @property
    def edge_count(self) -> int:
        """Number of undirected edges."""
        return int(sparse.triu(self.affinity, k=1).nnz)

    @classmethod
    def from_edges(
        cls,
        n: int,
        src: ArrayLike,
        dst: ArrayLike,
        weight: ArrayLike,
    ) -> "Graph":
        """Build a graph from an undirected edge list (each edge listed once)."""
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        weight = np.asarray(weight, dtype=np.float64)
        if not (src.shape == dst.shape == weight.shape):
            raise DimensionMismatchError("Edge arrays must have equal length")
        for arr in (src, dst):
            if arr.size and (arr.min() < 0 or arr.max() >= n):
                raise NodeIndexError(f"Edge endpoint outside 0..{n - 1}")
        rows = np.concatenate([src, dst])
        cols = np.concatenate([dst, src])
        vals = np.concatenate([weight, weight])
        w = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        return cls(w)


@dataclass(frozen=True, eq=False)
class RowStochasticMatrix:
    """Markov transition matrix ``P = D^{-1} W``."""

    entries: sparse.csr_matrix

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def __matmul__(self, other):
        return self.entries @ other


@dataclass(frozen=True, eq=False)
class PointCloud:
    """``N`` points in ``R^d`` stored row-wise."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise InvalidParameterError("Points must form an (N, d) array, d >= 1")
        if not np.all(np.isfinite(pts)):
            raise InvalidParameterError("Points must be finite")
        object.__setattr__(self, "points", _freeze(pts))

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])


@dataclass(frozen=True, eq=False)
class SensorTable:
    """Sensor positions (degrees, meters) and their measured values."""

    lon: np.ndarray
    lat: np.ndarray
    elev: np.ndarray
    value: np.ndarray

    def __post_init__(self) -> None:
        cols = {}
        for name in ("lon", "lat", "elev", "value"):
            arr = np.array(getattr(self, name), dtype=np.float64).ravel()
            if not np.all(np.isfinite(arr)):
                raise InvalidParameterError(f"Sensor column '{name}' must be finite")
            cols[name] = arr
        if len({arr.shape for arr in cols.values()}) != 1:
            raise DimensionMismatchError("Sensor columns must have equal length")
        if np.any(np.abs(cols["lon"]) > 180):
            raise InvalidParameterError("Longitude must lie in [-180, 180]")
        if np.any(np.abs(cols["lat"]) > 90):
            raise InvalidParameterError("Latitude must lie in [-90, 90]")
        for name, arr in cols.items():
            object.__setattr__(self, name, _freeze(arr))

    @property
    def n(self) -> int:
        return int(self.lon.shape[0])


def _nearest_neighbors(dist: np.ndarray, k: int) -> np.ndarray:
    """Return the ``k`` nearest neighbors per row, excluding the node itself.

    Ties at equal distance resolve to the lowest node index (stable sort).
    """
    masked = dist.copy()
    np.fill_diagonal(masked, np.inf)
    return np.argsort(masked, axis=1, kind="stable")[:, :k]


def _check_neighbor_count(k: int, n: int, name: str) -> None:
    if k < 1 or k >= n:
        raise InvalidParameterError(
            f"{name} must satisfy 1 <= {name} < N (got {name}={k}, N={n})"
        )


def _directed_affinity(
    neighbors: np.ndarray, weights: np.ndarray, n: int
) -> sparse.csr_matrix:
    rows = np.repeat(np.arange(n), neighbors.shape[1])
    w = sparse.csr_matrix(
        (weights.ravel(), (rows, neighbors.ravel())), shape=(n, n), dtype=np.float64
    )
    w.eliminate_zeros()
    return w


def knn_affinity(
    points: PointCloud,
    L: int,
    kernel: str = "exp_negdist",
    decreasing: bool = False,
) -> Graph:
    """Build a k-nearest-neighbor graph from a point cloud.

    ``exp_negdist`` keeps ``e^{-d(x_i, x_j)}`` for the ``L`` nearest neighbors
    of each node. ``normalized_dist`` keeps ``F_ij * N^2 / sum(F_kept)`` on the
    same neighbor sets, where ``F`` is the Euclidean distance matrix; this
    literal weight grows with distance, so ``decreasing=True`` maps it through
    ``e^{-x}`` instead. The directed result is symmetrized by entrywise max.
    """
    if not isinstance(points, PointCloud):
        points = PointCloud(points)
    n = points.n
    _check_neighbor_count(L, n, "L")
    if kernel not in KNN_KERNELS:
        raise InvalidParameterError(
            f"Unknown kernel '{kernel}', expected one of {', '.join(KNN_KERNELS)}"
        )

    dist = cdist(points.points, points.points)
    neighbors = _nearest_neighbors(dist, L)
    kept = np.take_along_axis(dist, neighbors, axis=1)

    if kernel == "exp_negdist":
        weights = np.exp(-kept)
    else:
        total = kept.sum()
        if total <= 0:
            raise InvalidParameterError(
                "normalized_dist kernel is undefined when all neighbor distances are 0"
            )
        weights = kept * (n**2) / total
        if decreasing:
            weights = np.exp(-weights)

    logger.debug(f"knn_affinity: N={n}, L={L}, kernel={kernel}")
    return symmetrize(_directed_affinity(neighbors, weights, n))


def haversine_distances(lon: np.ndarray, lat: np.ndarray) -> np.ndarray:
    """Pairwise great-circle distances in kilometers (inputs in degrees)."""
    lon_r = np.radians(np.asarray(lon, dtype=np.float64))
    lat_r = np.radians(np.asarray(lat, dtype=np.float64))
    dlat = lat_r[:, None] - lat_r[None, :]
    dlon = lon_r[:, None] - lon_r[None, :]
    a = (
        np.sin(dlat / 2.0) ** 2
        + np.cos(lat_r)[:, None] * np.cos(lat_r)[None, :] * np.sin(dlon / 2.0) ** 2
    )
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def geodesic_affinity(
    sensors: SensorTable, K: int, scale: float = DEFAULT_GEODESIC_SCALE
) -> Graph:
    """Build the sensor graph from scaled great-circle distances.

    ``A_nm = e^{-d_nm^2} / sqrt(S_n * S_m)`` for ``m`` among the ``K`` nearest
    neighbors of ``n``, where ``S_n`` sums ``e^{-d_nk^2}`` over the neighbors of
    ``n``. Elevation does not enter the distance. ``W = max(A, A^T)``.
    """
    n = sensors.n
    _check_neighbor_count(K, n, "K")
    if scale <= 0:
        raise InvalidParameterError("Geodesic scale must be positive")

    dist = haversine_distances(sensors.lon, sensors.lat) * scale
    neighbors = _nearest_neighbors(dist, K)
    kernel = np.exp(-np.take_along_axis(dist, neighbors, axis=1) ** 2)
    row_sums = kernel.sum(axis=1)
    denom = np.sqrt(row_sums[:, None] * row_sums[neighbors])
    with np.errstate(divide="ignore", invalid="ignore"):
        weights = np.where(denom > 0, kernel / denom, 0.0)

    logger.debug(f"geodesic_affinity: N={n}, K={K}, scale={scale}")
    return symmetrize(_directed_affinity(neighbors, weights, n))


def symmetrize(W) -> Graph:
    """Return the graph with affinity ``max(W, W^T)``.

    Self-loops are not part of the graph model and are dropped with a warning.
    """
    w = sparse.csr_matrix(W, dtype=np.float64)
    if w.shape[0] != w.shape[1]:
        raise DimensionMismatchError(f"Affinity must be square, got {w.shape}")
    if w.nnz and w.data.min() < 0:
        raise InvalidParameterError("Affinity weights must be nonnegative")
    ws = w.maximum(w.T).tocsr()
    if np.any(ws.diagonal() != 0):
        logger.warning("Dropping self-loops from affinity before symmetrization")
        ws = ws.tolil()
        ws.setdiag(0)
        ws = ws.tocsr()
    return Graph(ws)


def markov_matrix(g: Graph) -> RowStochasticMatrix:
    """Return ``P = D^{-1} W``; every node must have positive degree."""
    isolated = np.flatnonzero(g.degrees <= 0)
    if isolated.size:
        raise IsolatedNodeError(int(isolated[0]))
    p = sparse.diags(1.0 / g.degrees) @ g.affinity
    return RowStochasticMatrix(sparse.csr_matrix(p))


def graph_shift(A, s: ArrayLike) -> np.ndarray:
    """Apply a graph shift operator: ``A @ s``."""
    if isinstance(A, RowStochasticMatrix):
        A = A.entries
    s = np.asarray(s, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"Shift operator must be square, got {A.shape}")
    if s.ndim != 1 or s.shape[0] != A.shape[1]:
        raise DimensionMismatchError(
            f"Signal of length {s.shape} does not match operator {A.shape}"
        )
    return np.asarray(A @ s, dtype=np.float64).ravel()


def as_node_array(nodes: Iterable[int], n: int) -> np.ndarray:
    """Validate node indices against ``0..n-1`` and return them as int64."""
    arr = np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes)
    if arr.size == 0:
        return np.zeros(0, dtype=np.int64)
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise NodeIndexError("Node indices must be integers")
        arr = arr.astype(np.int64)
    arr = arr.astype(np.int64).ravel()
    if arr.min() < 0 or arr.max() >= n:
        bad = arr[(arr < 0) | (arr >= n)][0]
        raise NodeIndexError(f"Node index {bad} outside 0..{n - 1}")
    return arr


def one_hop_closure(g: Graph, M: Iterable[int]) -> np.ndarray:
    """Return ``M`` together with all neighbors of its members (sorted)."""
    nodes = np.unique(as_node_array(M, g.n))
    if nodes.size == 0:
        return nodes
    neighbors = g.affinity[nodes].indices
    return np.union1d(nodes, neighbors).astype(np.int64)


def connected_components(g: Graph) -> Tuple[int, np.ndarray]:
    """Return ``(count, labels)`` of the undirected connected components."""
    count, labels = csgraph.connected_components(g.affinity, directed=False)
    return int(count), labels


def hop_distances(g: Graph, M: Iterable[int]) -> np.ndarray:
    """Unweighted hop count from every node to the nearest member of ``M``.

    Unreachable nodes get ``inf``.
    """
    nodes = np.unique(as_node_array(M, g.n))
    if nodes.size == 0:
        raise InvalidParameterError("Hop distances need a non-empty node set")
    dist = csgraph.shortest_path(
        g.affinity, directed=False, unweighted=True, indices=nodes
    )
    return np.min(np.atleast_2d(dist), axis=0)


__all__ = [
    "EARTH_RADIUS_KM",
    "DEFAULT_GEODESIC_SCALE",
    "KNN_KERNELS",
    "Graph",
    "RowStochasticMatrix",
    "PointCloud",
    "SensorTable",
    "knn_affinity",
    "haversine_distances",
    "geodesic_affinity",
    "symmetrize",
    "markov_matrix",
    "graph_shift",
    "as_node_array",
    "one_hop_closure",
    "connected_components",
    "hop_distances",
]
