"""CSV and JSON readers/writers for graphs, signals, samples and results.

All files are UTF-8 with LF line endings and a header row. Floats are written
with 17 significant digits so values survive a round trip exactly. Every file
is written to a temporary sibling first and then renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from .benchmark import BENCHMARK_COLUMNS, BenchmarkRow, Scenario
from .errors import FormatError, InvalidParameterError
from .graph import Graph, PointCloud, SensorTable, symmetrize
from .interpolation import SampleSet

PathLike = Union[str, Path]

NODES_COMMENT = "# nodes:"

GRAPH_HEADER = ("src", "dst", "weight")
SIGNAL_HEADER = ("index", "value")
INDEX_HEADER = ("index",)
SENSOR_HEADER = ("lon", "lat", "elev", "value")
LABEL_HEADER = ("index", "label")
EIGS_HEADER = ("index", "lambda_markov", "lambda_laplacian")


def format_number(value: Any) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def atomic_write_text(path: PathLike, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and ``os.replace``."""
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]], preamble="") -> str:
    buffer = io.StringIO()
    buffer.write(preamble)
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [cell if isinstance(cell, str) else format_number(cell) for cell in row]
        )
    return buffer.getvalue()


def _read_lines(path: PathLike) -> List[str]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            return handle.read().splitlines()
    except UnicodeDecodeError as exc:
        raise FormatError("file is not valid UTF-8", path=str(path)) from exc


def _rows(
    path: PathLike, header: Optional[Sequence[str]]
) -> Tuple[List[str], Iterator[Tuple[int, List[str]]], List[Tuple[int, str]]]:
    """Split a CSV file into its header, data rows and ``#`` comments.

    Line numbers are 1-based and count every physical line.
    """
    lines = _read_lines(path)
    comments: List[Tuple[int, str]] = []
    found: Optional[List[str]] = None
    data: List[Tuple[int, List[str]]] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.lstrip().startswith("#"):
            comments.append((line_no, line.strip()))
            continue
        fields = [cell.strip() for cell in next(csv.reader([line]))]
        if found is None:
            found = fields
            if header is not None and tuple(found[: len(header)]) != tuple(header):
                raise FormatError(
                    f"expected header '{','.join(header)}', got '{line.strip()}'",
                    path=str(path),
                    line=line_no,
                )
            continue
        if len(fields) != len(found):
            raise FormatError(
                f"expected {len(found)} fields, got {len(fields)}",
                path=str(path),
                line=line_no,
            )
        data.append((line_no, fields))
    if found is None:
        raise FormatError("missing header row", path=str(path))
    return found, iter(data), comments


def _float(text: str, path: PathLike, line: int, finite: bool = True) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise FormatError(
            f"'{text}' is not a number", path=str(path), line=line
        ) from exc
    if finite and not math.isfinite(value):
        raise FormatError(f"non-finite value '{text}'", path=str(path), line=line)
    return value


def _int(text: str, path: PathLike, line: int) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise FormatError(
            f"'{text}' is not an integer index", path=str(path), line=line
        ) from exc


# Graph edge lists


def write_graph(path: PathLike, g: Graph) -> None:
    upper = sparse.triu(g.affinity, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    rows = zip(upper.row[order], upper.col[order], upper.data[order])
    atomic_write_text(
        path, _csv_text(GRAPH_HEADER, rows, preamble=f"{NODES_COMMENT} {g.n}\n")
    )


def read_graph(path: PathLike) -> Graph:
    """Read an undirected edge list; each edge may appear in either direction.

    The node count comes from a ``# nodes: N`` comment, or else the largest
    index plus one.
    """
    _, rows, comments = _rows(path, GRAPH_HEADER)
    src, dst, weight = [], [], []
    for line, fields in rows:
        i, j = _int(fields[0], path, line), _int(fields[1], path, line)
        w = _float(fields[2], path, line)
        if i < 0 or j < 0:
            raise FormatError("negative node index", path=str(path), line=line)
        if i == j:
            raise FormatError(f"self-loop at node {i}", path=str(path), line=line)
        if w < 0:
            raise FormatError("negative edge weight", path=str(path), line=line)
        src.append(i)
        dst.append(j)
        weight.append(w)

    n = max(max(src, default=-1), max(dst, default=-1)) + 1
    for line, comment in comments:
        if comment.startswith(NODES_COMMENT):
            declared = _int(comment[len(NODES_COMMENT) :].strip(), path, line)
            if declared < n:
                raise FormatError(
                    f"declared {declared} nodes but edges reference node {n - 1}",
                    path=str(path),
                    line=line,
                )
            n = declared
    if n == 0:
        raise FormatError("graph has no nodes", path=str(path))
    w = sparse.coo_matrix((weight, (src, dst)), shape=(n, n)).tocsr()
    return symmetrize(w)


# Signals, samples and index lists


def write_signal(path: PathLike, values) -> None:
    values = np.asarray(values, dtype=np.float64).ravel()
    atomic_write_text(path, _csv_text(SIGNAL_HEADER, zip(range(values.size), values)))


def _index_value_rows(path: PathLike) -> Tuple[np.ndarray, np.ndarray]:
    _, rows, _ = _rows(path, SIGNAL_HEADER)
    indices, values = [], []
    for line, fields in rows:
        idx = _int(fields[0], path, line)
        if idx < 0:
            raise FormatError(f"negative index {idx}", path=str(path), line=line)
        indices.append(idx)
        values.append(_float(fields[1], path, line))
    return np.asarray(indices, dtype=np.int64), np.asarray(values, dtype=np.float64)


def read_signal(path: PathLike) -> np.ndarray:
    """Read ``index,value`` rows covering every node ``0..N-1`` exactly once."""
    indices, values = _index_value_rows(path)
    if indices.size == 0:
        raise FormatError("signal is empty", path=str(path))
    if not np.array_equal(np.sort(indices), np.arange(indices.size)):
        raise FormatError(
            f"signal indices must cover 0..{indices.size - 1} exactly once",
            path=str(path),
        )
    signal = np.empty(indices.size)
    signal[indices] = values
    return signal


def write_samples(path: PathLike, samples: SampleSet) -> None:
    atomic_write_text(
        path, _csv_text(SIGNAL_HEADER, zip(samples.indices, samples.values))
    )


def read_samples(path: PathLike) -> SampleSet:
    indices, values = _index_value_rows(path)
    if indices.size == 0:
        raise FormatError("sample file has no rows", path=str(path))
    try:
        return SampleSet(indices, values)
    except InvalidParameterError as exc:
        raise FormatError(str(exc), path=str(path)) from exc


def write_indices(path: PathLike, nodes) -> None:
    nodes = np.asarray(nodes, dtype=np.int64).ravel()
    atomic_write_text(path, _csv_text(INDEX_HEADER, ((int(v),) for v in nodes)))


def read_indices(path: PathLike) -> np.ndarray:
    """Read the ``index`` column (extra columns, as in sample files, are ignored)."""
    _, rows, _ = _rows(path, INDEX_HEADER)
    nodes = [_int(fields[0], path, line) for line, fields in rows]
    if not nodes:
        raise FormatError("index file has no rows", path=str(path))
    return np.asarray(nodes, dtype=np.int64)


# Point clouds, labels and sensors


def write_points(path: PathLike, cloud: PointCloud) -> None:
    header = [f"x{k}" for k in range(cloud.dim)]
    atomic_write_text(path, _csv_text(header, cloud.points))


def read_points(path: PathLike) -> PointCloud:
    header, rows, _ = _rows(path, None)
    points = [[_float(cell, path, line) for cell in fields] for line, fields in rows]
    if not points:
        raise FormatError("point file has no rows", path=str(path))
    return PointCloud(np.asarray(points, dtype=np.float64).reshape(-1, len(header)))


def write_labels(path: PathLike, labels) -> None:
    labels = np.asarray(labels, dtype=np.int64).ravel()
    atomic_write_text(path, _csv_text(LABEL_HEADER, zip(range(labels.size), labels)))


def read_labels(path: PathLike) -> np.ndarray:
    _, rows, _ = _rows(path, LABEL_HEADER)
    pairs = [(_int(f[0], path, line), _int(f[1], path, line)) for line, f in rows]
    indices = np.asarray([p[0] for p in pairs], dtype=np.int64)
    if not np.array_equal(np.sort(indices), np.arange(indices.size)):
        raise FormatError(
            "label indices must cover 0..N-1 exactly once", path=str(path)
        )
    labels = np.empty(indices.size, dtype=np.int64)
    labels[indices] = [p[1] for p in pairs]
    return labels


def write_sensors(path: PathLike, table: SensorTable) -> None:
    rows = zip(table.lon, table.lat, table.elev, table.value)
    atomic_write_text(path, _csv_text(SENSOR_HEADER, rows))


def read_sensors(path: PathLike) -> SensorTable:
    _, rows, _ = _rows(path, SENSOR_HEADER)
    cols: List[List[float]] = [[], [], [], []]
    for line, fields in rows:
        for k in range(4):
            cols[k].append(_float(fields[k], path, line))
    if not cols[0]:
        raise FormatError("sensor file has no rows", path=str(path))
    try:
        return SensorTable(*cols)
    except InvalidParameterError as exc:
        raise FormatError(str(exc), path=str(path)) from exc


# Spectra


def write_eigs(path: PathLike, eigenvalues) -> None:
    lam = np.asarray(eigenvalues, dtype=np.float64).ravel()
    rows = zip(range(lam.size), lam, 1.0 - lam)
    atomic_write_text(path, _csv_text(EIGS_HEADER, rows))


def read_eigs(path: PathLike) -> np.ndarray:
    _, rows, _ = _rows(path, EIGS_HEADER)
    return np.asarray([_float(f[1], path, line) for line, f in rows])


def write_vectors(path: PathLike, vectors) -> None:
    """One row per node, one ``v<k>`` column per eigenvector."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    header = ["index"] + [f"v{k}" for k in range(vectors.shape[1])]
    rows = ([i] + list(row) for i, row in enumerate(vectors))
    atomic_write_text(path, _csv_text(header, rows))


def read_vectors(path: PathLike) -> np.ndarray:
    header, rows, _ = _rows(path, ("index",))
    data = [[_float(cell, path, line) for cell in fields[1:]] for line, fields in rows]
    return np.asarray(data, dtype=np.float64).reshape(-1, len(header) - 1)


# JSON documents and benchmark tables


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps_json(document: Any, indent: Optional[int] = 2) -> str:
    """Deterministic JSON (sorted keys, non-finite floats as ``null``)."""
    return json.dumps(_jsonable(document), indent=indent, sort_keys=True) + "\n"


def write_json(path: PathLike, document: Any) -> None:
    atomic_write_text(path, dumps_json(document))


def read_json(path: PathLike) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, path=str(path), line=exc.lineno) from exc


def read_scenario(path: PathLike) -> Scenario:
    document = read_json(path)
    try:
        return Scenario.from_dict(document)
    except (InvalidParameterError, AttributeError, TypeError) as exc:
        raise FormatError(f"invalid scenario: {exc}", path=str(path)) from exc


def write_benchmark(path: PathLike, rows: Iterable[BenchmarkRow]) -> None:
    atomic_write_text(path, _csv_text(BENCHMARK_COLUMNS, (r.as_tuple() for r in rows)))


def read_benchmark(path: PathLike) -> List[BenchmarkRow]:
    _, rows, _ = _rows(path, BENCHMARK_COLUMNS)
    out = []
    for line, f in rows:
        out.append(
            BenchmarkRow(
                method=f[0],
                r=_int(f[1], path, line),
                trial=_int(f[2], path, line),
                error=_float(f[3], path, line, finite=False),
                accuracy=_float(f[4], path, line, finite=False),
                wall_ms=_float(f[5], path, line, finite=False),
                status=f[6],
            )
        )
    return out


__all__ = [
    "format_number",
    "atomic_write_text",
    "write_graph",
    "read_graph",
    "write_signal",
    "read_signal",
    "write_samples",
    "read_samples",
    "write_indices",
    "read_indices",
    "write_points",
    "read_points",
    "write_labels",
    "read_labels",
    "write_sensors",
    "read_sensors",
    "write_eigs",
    "read_eigs",
    "write_vectors",
    "read_vectors",
    "dumps_json",
    "write_json",
    "read_json",
    "read_scenario",
    "write_benchmark",
    "read_benchmark",
]
