"""Nyström approximation of Markov eigenpairs from a landmark sub-block.

The kernel is the normalized Laplacian ``L``. With the landmarks ``M`` placed
first, ``L = [[E, B^T], [B, C]]``; ``E = Z Q Z^T`` is decomposed exactly and
the eigenvectors are extended to the remaining nodes by ``B Z Q^{-1}``
(``standard``) or ``B Z`` (``revised``, every eigenvalue approximated by one).
``C`` is never formed. The Markov pairs follow as ``V~ = D^{-1/2} Z~`` and
``lambda~ = 1 - q``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse

from .errors import InvalidParameterError, SingularEigenvalueError
from .graph import Graph, as_node_array
from .interpolation import (
    DEFAULT_ETA_SCALE,
    InterpolationResult,
    SampleSet,
    constraint_matrix,
    default_eta,
    interpolate_one_shot,
    run_iterative,
)
from .l1 import DEFAULT_MAX_ITER, L1Problem, solve_bp_box
from .spectral import normalized_laplacian, orient_columns

logger = logging.getLogger(__name__)

NYSTROM_MODES = ("standard", "revised")
DEFAULT_MODE = "revised"

#: Eigenvalues of ``E`` below this magnitude make the standard extension singular.
SINGULAR_TOL = 1e-12

PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KernelBlocks:
    """Landmark blocks of the normalized Laplacian.

    ``permutation`` lists the landmarks first (in the given order) followed by
    the remaining nodes in ascending order; ``B`` rows follow that order.
    """

    E: np.ndarray
    B: sparse.csr_matrix
    permutation: np.ndarray

    @property
    def r(self) -> int:
        return int(self.E.shape[0])

    @property
    def n(self) -> int:
        return int(self.permutation.shape[0])


@dataclass(frozen=True, eq=False)
class ApproxBasis:
    """``r`` approximate Markov eigenpairs, rows in original node order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    landmarks: np.ndarray
    mode: str

    @property
    def n(self) -> int:
        return int(self.eigenvectors.shape[0])

    @property
    def width(self) -> int:
        return int(self.eigenvectors.shape[1])


def _check_mode(mode: str) -> str:
    if mode not in NYSTROM_MODES:
        raise InvalidParameterError(
            f"Unknown Nyström mode '{mode}', expected one of "
            f"{', '.join(NYSTROM_MODES)}"
        )
    return mode


def partition_kernel(g: Graph, M: Sequence[int]) -> KernelBlocks:
    landmarks = as_node_array(M, g.n)
    if landmarks.size == 0:
        raise InvalidParameterError("Nyström landmark set must not be empty")
    if np.unique(landmarks).size != landmarks.size:
        raise InvalidParameterError("Nyström landmarks must be distinct")

    rest = np.setdiff1d(np.arange(g.n), landmarks)
    lap = normalized_laplacian(g)
    cols = lap[:, landmarks]
    E = cols[landmarks].toarray()
    E = 0.5 * (E + E.T)
    B = sparse.csr_matrix(cols[rest])
    return KernelBlocks(E=E, B=B, permutation=np.concatenate([landmarks, rest]))


def nystrom_extend(
    blocks: KernelBlocks, mode: str = DEFAULT_MODE
) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(Z~, q)`` in permuted row order with ``q`` ascending.

    Rows ``0..r-1`` of ``Z~`` are exactly ``Z`` in both modes.
    """
    _check_mode(mode)
    q, Z = linalg.eigh(blocks.E)
    Z = orient_columns(Z)
    if q[0] < -PSD_TOL:
        logger.warning(f"Landmark block is not PSD (smallest eigenvalue {q[0]:.3e})")

    lower = np.asarray(blocks.B @ Z)
    if mode == "standard" and lower.shape[0]:
        small = np.flatnonzero(np.abs(q) < SINGULAR_TOL)
        if small.size:
            raise SingularEigenvalueError(
                f"Landmark block has {small.size} eigenvalue(s) below "
                f"{SINGULAR_TOL:g} in magnitude; use the revised mode"
            )
        lower = lower / q
    return np.vstack([Z, lower]), q


def nystrom_markov_eigs(
    g: Graph, M: Sequence[int], mode: str = DEFAULT_MODE
) -> ApproxBasis:
    blocks = partition_kernel(g, M)
    z_tilde, q = nystrom_extend(blocks, mode)
    perm = blocks.permutation
    vectors = np.empty_like(z_tilde)
    vectors[perm] = z_tilde / np.sqrt(g.degrees[perm])[:, None]
    logger.debug(f"nystrom_markov_eigs: N={g.n}, r={blocks.r}, mode={mode}")
    return ApproxBasis(
        eigenvalues=1.0 - q,
        eigenvectors=vectors,
        landmarks=perm[: blocks.r].copy(),
        mode=mode,
    )


def interpolate_nystrom(
    g: Graph,
    samples: SampleSet,
    eta: Optional[float] = None,
    mode: str = DEFAULT_MODE,
    iterative: bool = False,
    max_iter: int = DEFAULT_MAX_ITER,
    eta_scale: float = DEFAULT_ETA_SCALE,
) -> InterpolationResult:
    """Interpolate over the Nyström basis whose landmarks are the samples.

    With ``iterative`` the active set grows by one-hop closure and every pass
    recomputes the basis with the active set as landmarks.
    """
    _check_mode(mode)
    samples.validate_for(g.n)
    eta = default_eta(samples, eta_scale) if eta is None else float(eta)

    if not iterative:
        basis = nystrom_markov_eigs(g, samples.indices, mode)
        return interpolate_one_shot(
            basis, samples, eta=eta, graph=g, max_iter=max_iter, method="nystrom"
        )

    def step(active: np.ndarray, values: np.ndarray):
        basis = nystrom_markov_eigs(g, active, mode)
        A = constraint_matrix(basis, active)
        return basis, solve_bp_box(L1Problem(A, values, eta), max_iter=max_iter)

    return run_iterative(g, samples, step, eta, "nystrom", lambda b: b.width)


__all__ = [
    "NYSTROM_MODES",
    "DEFAULT_MODE",
    "KernelBlocks",
    "ApproxBasis",
    "partition_kernel",
    "nystrom_extend",
    "nystrom_markov_eigs",
    "interpolate_nystrom",
]
