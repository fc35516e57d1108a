"""Exact Markov-matrix spectra via the normalized Laplacian.

The Markov matrix ``P = D^{-1} W`` is similar to ``I - L`` where
``L = I - D^{-1/2} W D^{-1/2}`` is symmetric, so the decomposition is always
computed on ``L``: with ``L = U diag(mu) U^T`` the Markov eigenpairs are
``lambda = 1 - mu`` and ``V = D^{-1/2} U``. Columns of ``V`` are therefore not
unit-norm; rescaling a column rescales the matching spectrum entry inversely
and leaves reconstructions unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, sparse

from .errors import DimensionMismatchError, InvalidParameterError, SpectralSizeError
from .graph import Graph, connected_components, markov_matrix
from .smoothness import vector_norm

logger = logging.getLogger(__name__)

#: Above this node count callers should use the Nyström approximation.
DEFAULT_SOFT_LIMIT = 4096


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Markov eigenpairs sorted by descending eigenvalue."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    laplacian_eigenvectors: np.ndarray
    degree_sqrt: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eigenvectors.shape[0])

    @property
    def width(self) -> int:
        """Number of available eigenpairs."""
        return int(self.eigenvectors.shape[1])

    @property
    def laplacian_eigenvalues(self) -> np.ndarray:
        return 1.0 - self.eigenvalues


@dataclass(frozen=True, eq=False)
class DiffusionEmbedding:
    """Diffusion map ``Psi_t = V Lambda^t``; row ``i`` embeds node ``i``."""

    t: int
    vectors: np.ndarray = field(repr=False)


def normalized_laplacian(g: Graph) -> sparse.csr_matrix:
    """Return ``L = I - D^{-1/2} W D^{-1/2}`` (degrees must be positive)."""
    markov_matrix(g)  # raises IsolatedNodeError for zero-degree nodes
    inv_sqrt = sparse.diags(1.0 / np.sqrt(g.degrees))
    lap = sparse.identity(g.n, format="csr") - inv_sqrt @ g.affinity @ inv_sqrt
    return sparse.csr_matrix(lap)


def orient_columns(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive."""
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def markov_eigs(
    g: Graph, soft_limit: int = DEFAULT_SOFT_LIMIT, allow_large: bool = False
) -> SpectralBasis:
    """Full eigendecomposition of the Markov matrix of ``g``.

    Disconnected graphs are accepted with a warning: the eigenvalue 1 is then
    repeated and the leading eigenvector need not be constant.
    """
    if g.n > soft_limit and not allow_large:
        raise SpectralSizeError(
            f"Full decomposition of N={g.n} exceeds the soft limit {soft_limit}; "
            "use the Nyström approximation or allow_large=True"
        )
    lap = normalized_laplacian(g).toarray()
    lap = 0.5 * (lap + lap.T)

    count, _ = connected_components(g)
    if count > 1:
        logger.warning(
            f"Graph has {count} connected components; eigenvalue 1 has "
            f"multiplicity {count} and the leading eigenvector is not constant"
        )

    mu, u = linalg.eigh(lap)
    order = np.argsort(mu, kind="stable")
    mu = mu[order]
    u = orient_columns(u[:, order])

    degree_sqrt = np.sqrt(g.degrees)
    vectors = u / degree_sqrt[:, None]
    logger.debug(f"markov_eigs: N={g.n}, lambda_min={1.0 - mu[-1]:.6g}")
    return SpectralBasis(
        eigenvalues=1.0 - mu,
        eigenvectors=vectors,
        laplacian_eigenvectors=u,
        degree_sqrt=degree_sqrt,
    )


def _check_length(basis: SpectralBasis, vec: np.ndarray, what: str) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != basis.n:
        raise DimensionMismatchError(
            f"{what} of shape {vec.shape} does not match N={basis.n}"
        )
    return vec


def gft(basis: SpectralBasis, s) -> np.ndarray:
    """Graph Fourier transform ``V^{-1} s = U^T D^{1/2} s``."""
    s = _check_length(basis, s, "Signal")
    return basis.laplacian_eigenvectors.T @ (basis.degree_sqrt * s)


def igft(basis: SpectralBasis, spectrum) -> np.ndarray:
    """Inverse graph Fourier transform ``V s_hat``."""
    spectrum = _check_length(basis, spectrum, "Spectrum")
    return basis.eigenvectors @ spectrum


def diffusion_embedding(basis: SpectralBasis, t: int) -> DiffusionEmbedding:
    if int(t) != t or t < 0:
        raise InvalidParameterError(
            f"Diffusion time must be a nonnegative integer, got {t}"
        )
    t = int(t)
    if t == 0:
        return DiffusionEmbedding(t=0, vectors=basis.eigenvectors.copy())
    return DiffusionEmbedding(t=t, vectors=basis.eigenvectors * basis.eigenvalues**t)


def spectral_markov_variation(basis: SpectralBasis, s, p=2) -> float:
    """Markov variation in the frequency domain, ``||V (I - Lambda) s_hat||_p``."""
    spectrum = gft(basis, s)
    return vector_norm(basis.eigenvectors @ ((1.0 - basis.eigenvalues) * spectrum), p)


__all__ = [
    "DEFAULT_SOFT_LIMIT",
    "SpectralBasis",
    "DiffusionEmbedding",
    "normalized_laplacian",
    "orient_columns",
    "markov_eigs",
    "gft",
    "igft",
    "diffusion_embedding",
    "spectral_markov_variation",
]
